#pragma once

// JSON documents for models, elements, crossed elements and reports, plus
// the CSV writers. Documents use insertion-ordered keys and shortest
// round-trip doubles, so identical inputs serialize byte-identically.

#include <string>

#include "torpair/crossed.hpp"
#include "torpair/dirac.hpp"
#include "torpair/graded.hpp"
#include "torpair/module.hpp"

// vendored single-header json
#include "json.hpp"

namespace torpair {

using Json = nlohmann::ordered_json;

Json model_to_json(const ModelPtr& model);
ModelPtr model_from_json(const Json& j);

Json element_to_json(const GradedElement& a);
GradedElement element_from_json(const ModelPtr& model, const Json& j);

Json crossed_to_json(const CrossedElement& f);
CrossedElement crossed_from_json(const ModelPtr& model, const Json& j);

Json saturation_to_json(const SaturationReport& r);
Json compactness_to_json(const CompactnessReport& r);
Json pairing_to_json(const PairingReport& r);
Json summability_to_json(const SummabilityProfile& r);
Json pv_to_json(const PvReport& r);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace torpair
