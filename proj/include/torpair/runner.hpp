#pragma once

// Batch front-end plumbing: a fully reproducible run configuration and the
// task dispatcher shared by the CLI binary and the tests.

#include <optional>
#include <string>

#include "torpair/serialize.hpp"

namespace torpair {

struct RunConfig {
    std::string model = "rotation_circle";  // preset name or document path
    std::string task;  // saturate | pair-odd | pair-even | flow | calibrate |
                       // trace-check | summability | pv-check
    int n_modes = 16;
    int degree_budget = 0;  // 0: task-dependent default
    int word_length = 3;
    int chi_range = 2;
    int steps = 64;
    double p_exponent = 1.5;
    int k_rank = 1;
    int samples = 100;
    unsigned seed = 7;
    std::string theta;             // "1/3" or a float literal
    int points = 5;
    int direction_a = 1, direction_b = 0;
    std::string unitary = "z";     // generator word
    std::string projection = "bott";
    std::string projection_q = "trivial";
    std::string expect;            // verdict-level expectation
    std::string out_path;
    std::string csv_path;
    bool no_timestamp = false;
};

RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& c);

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 error, 2 verdict-level failure
    Json report;
    std::string csv;
    std::string message;
};

// Executes one task; never throws (errors are folded into the outcome).
RunOutcome run_task(const RunConfig& config);

// run_task plus report/CSV writing per the config's output paths.
int run_and_write(const RunConfig& config);

ModelPtr resolve_model(const RunConfig& config);

}  // namespace torpair
