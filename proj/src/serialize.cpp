#include "torpair/serialize.hpp"

#include <fstream>
#include <sstream>

#include "torpair/models.hpp"

namespace torpair {

namespace {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    const auto rows = j.size();
    const auto cols = rows ? j[0].size() : 0;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Cplx(j[r][c][0].get<double>(), j[r][c][1].get<double>());
    return m;
}

std::map<std::string, std::string> parse_relations(const std::string& relations) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(relations);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(' ');
            const auto b = s.find_last_not_of(' ');
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
    return kv;
}

}  // namespace

Json model_to_json(const ModelPtr& model) {
    Json j;
    j["rank"] = model->action_rank;
    j["ambient_dim"] = model->dim;
    j["degree_budget"] = model->budget;
    Json gens = Json::array();
    for (const auto& g : model->generators) {
        Json gj;
        gj["name"] = g.name;
        gj["grading"] = (model->internal_rank == 2)
                            ? Json::array({g.grading[0], g.grading[1]})
                            : Json::array({g.grading[0]});
        gj["coefficient_matrix"] = matrix_to_json(g.coeff);
        gens.push_back(std::move(gj));
    }
    j["generators"] = std::move(gens);
    j["relations"] = model->relations;
    j["trace"] = "normalized";
    j["name"] = model->name;
    return j;
}

ModelPtr model_from_json(const Json& j) {
    const auto kv = parse_relations(j.at("relations").get<std::string>());
    const int budget = j.at("degree_budget").get<int>();
    const auto kind = kv.count("kind") ? kv.at("kind") : std::string("monomial");

    ModelPtr model;
    if (kind == "trivial") {
        model = trivial_action(std::stoi(kv.at("points")));
    } else if (kind == "zcrossed") {
        Matrix v;
        for (const auto& g : j.at("generators"))
            if (g.at("name").get<std::string>() == "V")
                v = matrix_from_json(g.at("coefficient_matrix"));
        if (v.size() == 0) throw ConfigError("zcrossed model document lacks the twist generator");
        model = z_crossed_product(v, budget);
    } else if (kind == "monomial") {
        const int rank = kv.count("rank") ? std::stoi(kv.at("rank")) : 1;
        if (rank == 1) {
            const int speed = kv.count("speed") ? std::stoi(kv.at("speed")) : 1;
            model = speed_circle(budget, speed);
        } else {
            const std::string th = kv.count("theta") ? kv.at("theta") : "0/1";
            const auto slash = th.find('/');
            if (slash != std::string::npos)
                model = nc_torus(Rational{std::stol(th.substr(0, slash)),
                                          std::stol(th.substr(slash + 1))},
                                 budget);
            else
                model = nc_torus(std::stod(th), budget);
            if (kv.count("restricted direction")) {
                const auto& d = kv.at("restricted direction");
                int a = 0, b = 0;
                if (std::sscanf(d.c_str(), "(%d,%d)", &a, &b) != 2)
                    throw ConfigError("bad restriction direction in relations");
                model = restrict_to_circle(model, a, b);
            }
        }
    } else {
        throw ConfigError("unknown model kind '" + kind + "'");
    }

    // The document's generator entries are authoritative for reload so that
    // decimal-encoded coefficients round-trip exactly.
    auto mutable_model = std::make_shared<ActionModel>(*model);
    mutable_model->generators.clear();
    for (const auto& g : j.at("generators")) {
        GeneratorSpec spec;
        spec.name = g.at("name").get<std::string>();
        const auto& gr = g.at("grading");
        spec.grading = {gr[0].get<int>(), gr.size() > 1 ? gr[1].get<int>() : 0};
        spec.coeff = matrix_from_json(g.at("coefficient_matrix"));
        mutable_model->generators.push_back(std::move(spec));
    }
    return mutable_model;
}

Json element_to_json(const GradedElement& a) {
    Json comps = Json::array();
    for (const auto& [chi, x] : a.components()) {
        Json c;
        c["grading"] = (a.model()->internal_rank == 2) ? Json::array({chi[0], chi[1]})
                                                       : Json::array({chi[0]});
        c["matrix"] = matrix_to_json(x);
        comps.push_back(std::move(c));
    }
    Json j;
    j["components"] = std::move(comps);
    return j;
}

GradedElement element_from_json(const ModelPtr& model, const Json& j) {
    GradedElement a(model);
    for (const auto& c : j.at("components")) {
        const auto& gr = c.at("grading");
        const Grading chi{gr[0].get<int>(), gr.size() > 1 ? gr[1].get<int>() : 0};
        a.add(chi, matrix_from_json(c.at("matrix")));
    }
    return a;
}

Json crossed_to_json(const CrossedElement& f) {
    Json j;
    j["model"] = model_to_json(f.model());
    j["mode_bound"] = f.mode_bound();
    Json modes = Json::array();
    for (const auto& [m, a] : f.modes()) {
        Json mj;
        mj["mode"] = m;
        mj["element"] = element_to_json(a);
        modes.push_back(std::move(mj));
    }
    j["modes"] = std::move(modes);
    j["clipped"] = f.clipped();
    return j;
}

CrossedElement crossed_from_json(const ModelPtr& model, const Json& j) {
    CrossedElement f(model, j.at("mode_bound").get<int>());
    for (const auto& mj : j.at("modes"))
        f.set_mode(mj.at("mode").get<int>(), element_from_json(model, mj.at("element")));
    return f;
}

Json saturation_to_json(const SaturationReport& r) {
    Json j;
    j["verdict"] = (r.verdict == SaturationVerdict::SaturatedAtTruncation)
                       ? "SATURATED_AT_TRUNCATION"
                       : "UNSATURATED";
    if (r.verdict == SaturationVerdict::Unsaturated) j["witness_character"] = r.witness;
    Json chars = Json::array();
    for (const auto& c : r.characters) {
        Json cj;
        cj["chi"] = c.chi;
        cj["subspace_empty"] = c.subspace_empty;
        cj["product_rank"] = c.product_rank;
        cj["fixed_rank"] = c.fixed_rank;
        cj["saturated"] = c.saturated;
        cj["singular_values"] = c.singular_values;
        chars.push_back(std::move(cj));
    }
    j["characters"] = std::move(chars);
    j["truncation"] = {{"chi_range", r.chi_range}, {"word_length", r.word_length}};
    return j;
}

Json compactness_to_json(const CompactnessReport& r) {
    Json j;
    switch (r.verdict) {
        case CompactnessVerdict::Iso: j["verdict"] = "ISO"; break;
        case CompactnessVerdict::NotInjective: j["verdict"] = "NOT_INJECTIVE"; break;
        case CompactnessVerdict::NotOntoCompacts: j["verdict"] = "NOT_ONTO_COMPACTS"; break;
    }
    if (r.verdict == CompactnessVerdict::NotInjective) j["witness_mode"] = r.witness_mode;
    j["nullity"] = r.nullity;
    j["image_rank"] = r.image_rank;
    j["theta_rank"] = r.theta_rank;
    j["joint_rank"] = r.joint_rank;
    j["singular_values"] = r.singular_values;
    j["truncation"] = {{"N", r.N}, {"M", r.M}, {"L", r.L}};
    return j;
}

Json pairing_to_json(const PairingReport& r) {
    Json j;
    j["formula_value"] = {r.formula_value.real(), r.formula_value.imag()};
    j["calibrated_value"] = {r.calibrated_value.real(), r.calibrated_value.imag()};
    j["flow_value"] = r.flow_value;
    j["oracle_value"] = r.oracle_value;
    j["calibration_constant"] = {r.calibration_constant.real(), r.calibration_constant.imag()};
    j["truncation"] = {{"N", r.n_modes}, {"margin", r.margin}};
    j["converged"] = r.converged;
    j["picture"] = r.picture;
    j["endpoint_convention"] = r.endpoint_convention;
    Json crossings = Json::array();
    for (const auto& c : r.flow.crossings)
        crossings.push_back({{"t", c.t}, {"sign", c.sign}, {"weight", c.weight}});
    j["crossings"] = std::move(crossings);
    return j;
}

Json summability_to_json(const SummabilityProfile& r) {
    Json j;
    j["n_list"] = r.n_list;
    j["partial_sums"] = r.partial_sums;
    j["increments"] = r.increments;
    j["cauchy"] = r.cauchy;
    return j;
}

Json pv_to_json(const PvReport& r) {
    Json j;
    j["winding"] = r.winding;
    j["pairing"] = pairing_to_json(r.pairing);
    j["operator_identity_deviation"] = r.operator_identity_deviation;
    j["consistent"] = r.consistent;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace torpair
