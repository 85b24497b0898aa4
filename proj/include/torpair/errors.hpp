#pragma once

#include <stdexcept>
#include <string>

namespace torpair {

// All failure modes surface as typed exceptions so callers (and the CLI)
// can distinguish verdict-level issues from numerical ones.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotSelfAdjoint : Error {
    explicit NotSelfAdjoint(const std::string& w) : Error(w) {}
};

// A rank decision could not be certified: the smallest retained singular
// value sits within 10x of the kernel threshold.
struct GapTooSmall : Error {
    explicit GapTooSmall(const std::string& w) : Error(w) {}
};

// A product would carry spectral weight outside the degree budget.
struct BudgetOverflow : Error {
    explicit BudgetOverflow(const std::string& w) : Error(w) {}
};

struct NotInvariant : Error {
    explicit NotInvariant(const std::string& w) : Error(w) {}
};

struct NotProjection : Error {
    explicit NotProjection(const std::string& w) : Error(w) {}
};

struct NotScalar : Error {
    explicit NotScalar(const std::string& w) : Error(w) {}
};

struct UnitarityViolated : Error {
    explicit UnitarityViolated(const std::string& w) : Error(w) {}
};

struct CrossingUnresolved : Error {
    explicit CrossingUnresolved(const std::string& w) : Error(w) {}
};

struct PhaseUnwrapAmbiguous : Error {
    explicit PhaseUnwrapAmbiguous(const std::string& w) : Error(w) {}
};

struct Unstable : Error {
    explicit Unstable(const std::string& w) : Error(w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(w) {}
};

}  // namespace torpair
