// Batch CLI: load a model, run saturation checks, pairings, flows,
// calibrations, and emit JSON/CSV reports.

#include <CLI11.hpp>

#include "torpair/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"index pairings for truncated torus actions on C*-algebras"};
    app.require_subcommand(0, 1);

    torpair::RunConfig cfg;
    std::string config_path;

    app.add_option("--config", config_path, "JSON config file (flags override it)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--model", cfg.model, "model preset name or document path");
        sub->add_option("--N", cfg.n_modes, "mode / window truncation");
        sub->add_option("--M", cfg.degree_budget, "degree budget (0 = task default)");
        sub->add_option("--L", cfg.word_length, "word length for basis enumeration");
        sub->add_option("--chi-range", cfg.chi_range, "character box for saturation");
        sub->add_option("--steps", cfg.steps, "spectral flow steps (>= 64)");
        sub->add_option("--p", cfg.p_exponent, "summability exponent");
        sub->add_option("--k", cfg.k_rank, "group rank for calibration");
        sub->add_option("--samples", cfg.samples, "sample count for trace-check");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--theta", cfg.theta, "torus angle, e.g. 1/3 or 0.6180339887");
        sub->add_option("--points", cfg.points, "points of the trivial-action base");
        sub->add_option("--direction-a", cfg.direction_a, "restriction direction, first entry");
        sub->add_option("--direction-b", cfg.direction_b, "restriction direction, second entry");
        sub->add_option("--u", cfg.unitary, "unitary as a generator word, e.g. z^3 or U1*U2");
        sub->add_option("--proj", cfg.projection, "projection spec: bott | bott@a,b | trivial");
        sub->add_option("--q-proj", cfg.projection_q, "reference projection spec");
        sub->add_option("--expect", cfg.expect,
                        "verdict expectation (saturated/unsaturated or an integer)");
        sub->add_option("--out", cfg.out_path, "report JSON path (stdout when omitted)");
        sub->add_option("--csv", cfg.csv_path, "eigenvalue-path CSV output");
        sub->add_flag("--no-timestamp", cfg.no_timestamp, "omit the timestamp field");
    };

    const std::vector<std::string> tasks = {"saturate",  "pair-odd",    "pair-even", "flow",
                                            "calibrate", "trace-check", "summability",
                                            "pv-check"};
    for (const auto& t : tasks) add_common(app.add_subcommand(t, "run the " + t + " task"));

    CLI11_PARSE(app, argc, argv);

    if (!config_path.empty()) {
        torpair::RunConfig from_file;
        try {
            from_file = torpair::config_from_json(
                torpair::Json::parse(torpair::read_text_file(config_path)));
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 1;
        }
        // Flags already wrote into cfg; transplant file values only where the
        // flag was left at its default by re-parsing on top of the file copy.
        torpair::RunConfig merged = from_file;
        for (const auto& t : tasks) {
            CLI::App* sub = app.get_subcommand(t);
            if (sub->parsed()) merged.task = t;
        }
        // Re-apply explicit flags.
        for (const auto& t : tasks) {
            CLI::App* sub = app.get_subcommand(t);
            if (!sub->parsed()) continue;
            auto apply = [&](const char* name, auto& slot, auto& src) {
                if (sub->count(name) > 0) slot = src;
            };
            apply("--model", merged.model, cfg.model);
            apply("--N", merged.n_modes, cfg.n_modes);
            apply("--M", merged.degree_budget, cfg.degree_budget);
            apply("--L", merged.word_length, cfg.word_length);
            apply("--chi-range", merged.chi_range, cfg.chi_range);
            apply("--steps", merged.steps, cfg.steps);
            apply("--p", merged.p_exponent, cfg.p_exponent);
            apply("--k", merged.k_rank, cfg.k_rank);
            apply("--samples", merged.samples, cfg.samples);
            apply("--seed", merged.seed, cfg.seed);
            apply("--theta", merged.theta, cfg.theta);
            apply("--points", merged.points, cfg.points);
            apply("--direction-a", merged.direction_a, cfg.direction_a);
            apply("--direction-b", merged.direction_b, cfg.direction_b);
            apply("--u", merged.unitary, cfg.unitary);
            apply("--proj", merged.projection, cfg.projection);
            apply("--q-proj", merged.projection_q, cfg.projection_q);
            apply("--expect", merged.expect, cfg.expect);
            apply("--out", merged.out_path, cfg.out_path);
            apply("--csv", merged.csv_path, cfg.csv_path);
            apply("--no-timestamp", merged.no_timestamp, cfg.no_timestamp);
        }
        return torpair::run_and_write(merged);
    }

    for (const auto& t : tasks)
        if (app.get_subcommand(t)->parsed()) cfg.task = t;
    if (cfg.task.empty()) {
        std::cerr << app.help() << "\n";
        return 1;
    }
    return torpair::run_and_write(cfg);
}
