#include "torpair/runner.hpp"

#include <chrono>
#include <iostream>
#include <random>

#include "torpair/models.hpp"
#include "torpair/words.hpp"

namespace torpair {

namespace {

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    return Rational{std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1))};
}

int default_budget(const RunConfig& c, const std::string& preset) {
    if (c.degree_budget > 0) return c.degree_budget;
    if (c.task == "pair-odd" || c.task == "flow" || c.task == "pv-check")
        return 2 * c.n_modes + 8;
    if (c.task == "pair-even") return 92;
    if (preset == "nc_torus" || preset == "rotation_torus" || preset == "nc_torus_restricted")
        return 4;
    return 8;
}

ElementMatrix resolve_projection(const ModelPtr& model, const std::string& name) {
    if (name == "bott") return bott_projection(model);
    if (name.rfind("bott@", 0) == 0) {
        double a = 0, b = 0;
        if (std::sscanf(name.c_str(), "bott@%lf,%lf", &a, &b) != 2)
            throw ConfigError("projection spec '" + name + "' is malformed");
        return bott_projection(model).action({a, b});
    }
    if (name == "trivial") return trivial_projection(model);
    if (name == "zero") return ElementMatrix(model, 2);
    if (name == "identity") return ElementMatrix::identity(model, 2);
    throw ConfigError("unknown projection spec '" + name + "'");
}

double trace_identity_max_dev(const ModelPtr& model, int samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int half = std::max(1, model->budget / 2);
    const auto box = model->grading_box();
    auto random_element = [&] {
        GradedElement a(model);
        for (const auto& chi : box) {
            if (std::abs(chi[0]) > half || std::abs(chi[1]) > half) continue;
            for (const auto& c : model->component_space(chi)) {
                a.add(chi, Cplx(unif(rng), unif(rng)) * c);
            }
        }
        return a;
    };
    double dev = 0;
    for (int i = 0; i < samples; ++i) {
        const GradedElement v = random_element(), w = random_element();
        // Tr_tau(Theta_{v,w}) computed through the Fin preimage: the crossed
        // trace sums the Fin coefficients, i.e. tau(v w*). Circle actions use
        // the explicit crossed element; torus actions evaluate the summed
        // coefficients directly (the mode index is immaterial to the trace).
        const Cplx lhs = (model->action_rank == 1)
                             ? crossed_trace(fin_element(v, w, model->budget))
                             : (v * w.adjoint()).trace();
        const Cplx rhs = w.inner_fixed(v).trace();
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return dev;
}

}  // namespace

ModelPtr resolve_model(const RunConfig& c) {
    if (c.model.find(".json") != std::string::npos)
        return model_from_json(Json::parse(read_text_file(c.model)));
    ModelParams p;
    p.name = c.model;
    p.degree_budget = default_budget(c, c.model);
    p.points = c.points;
    p.direction_a = c.direction_a;
    p.direction_b = c.direction_b;
    if (!c.theta.empty()) {
        if (c.theta.find('/') != std::string::npos)
            p.theta_rational = parse_rational(c.theta);
        else
            p.theta_float = std::stod(c.theta);
    }
    return make_model(p);
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("model", c.model);
    get("task", c.task);
    get("N", c.n_modes);
    get("M", c.degree_budget);
    get("L", c.word_length);
    get("chi_range", c.chi_range);
    get("steps", c.steps);
    get("p", c.p_exponent);
    get("k", c.k_rank);
    get("samples", c.samples);
    get("seed", c.seed);
    get("theta", c.theta);
    get("points", c.points);
    get("direction_a", c.direction_a);
    get("direction_b", c.direction_b);
    get("u", c.unitary);
    get("proj", c.projection);
    get("q", c.projection_q);
    get("expect", c.expect);
    get("out", c.out_path);
    get("csv", c.csv_path);
    get("no_timestamp", c.no_timestamp);
    return c;
}

Json config_to_json(const RunConfig& c) {
    Json j;
    j["model"] = c.model;
    j["task"] = c.task;
    j["N"] = c.n_modes;
    j["M"] = c.degree_budget;
    j["L"] = c.word_length;
    j["chi_range"] = c.chi_range;
    j["steps"] = c.steps;
    j["p"] = c.p_exponent;
    j["k"] = c.k_rank;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["theta"] = c.theta;
    j["points"] = c.points;
    j["direction_a"] = c.direction_a;
    j["direction_b"] = c.direction_b;
    j["u"] = c.unitary;
    j["proj"] = c.projection;
    j["q"] = c.projection_q;
    j["expect"] = c.expect;
    return j;
}

RunOutcome run_task(const RunConfig& c) {
    RunOutcome out;
    try {
        Json rep;
        rep["task"] = c.task;
        rep["config"] = config_to_json(c);

        if (c.task == "saturate") {
            const auto model = resolve_model(c);
            const auto r = saturation_check(model, c.chi_range, c.word_length);
            rep["result"] = saturation_to_json(r);
            const bool saturated = r.verdict == SaturationVerdict::SaturatedAtTruncation;
            if (c.expect == "saturated" && !saturated) out.exit_code = 2;
            if (c.expect == "unsaturated" && saturated) out.exit_code = 2;
        } else if (c.task == "pair-odd") {
            const auto model = resolve_model(c);
            const GradedElement u = parse_word(model, c.unitary);
            FlowOptions opt;
            opt.steps = c.steps;
            const PairingReport r = odd_pairing(u, DiracModel::circle(), c.n_modes, opt);
            rep["result"] = pairing_to_json(r);
            out.csv = flow_csv(r.flow);
            if (!c.expect.empty() && std::stol(c.expect) != r.oracle_value) out.exit_code = 2;
        } else if (c.task == "pair-even") {
            const auto model = resolve_model(c);
            const ElementMatrix p = resolve_projection(model, c.projection);
            const ElementMatrix q = resolve_projection(model, c.projection_q);
            const PairingReport r =
                even_pairing(p, q, DiracModel::torus(), std::min(c.n_modes, 10));
            rep["result"] = pairing_to_json(r);
            if (!c.expect.empty() && std::stol(c.expect) != r.oracle_value) out.exit_code = 2;
        } else if (c.task == "flow") {
            const auto model = resolve_model(c);
            const GradedElement u = parse_word(model, c.unitary);
            FlowOptions opt;
            opt.steps = c.steps;
            const FlowResult r =
                spectral_flow_module(ElementMatrix::from_element(u), DiracModel::circle(),
                                     c.n_modes, opt);
            Json fj;
            fj["flow_value"] = r.value;
            Json crossings = Json::array();
            for (const auto& cr : r.crossings)
                crossings.push_back({{"t", cr.t}, {"sign", cr.sign}, {"weight", cr.weight}});
            fj["crossings"] = std::move(crossings);
            fj["ts"] = r.ts;
            fj["eigenvalue_paths"] = r.eigenvalues;
            rep["result"] = std::move(fj);
            out.csv = flow_csv(r);
        } else if (c.task == "calibrate") {
            const Cplx v = calibrate_constant(c.k_rank);
            rep["result"] = {{"k", c.k_rank}, {"constant", {v.real(), v.imag()}}};
        } else if (c.task == "trace-check") {
            const auto model = resolve_model(c);
            const double dev = trace_identity_max_dev(model, c.samples, c.seed);
            rep["result"] = {{"max_deviation", dev}, {"samples", c.samples}};
            if (dev > 1e-10) out.exit_code = 2;
        } else if (c.task == "summability") {
            const auto model = resolve_model(c);
            std::vector<int> n_list{32, 64, 128, 256, 512};
            const auto r = summability_profile(model->unit(), DiracModel::circle(),
                                               c.p_exponent, n_list);
            rep["result"] = summability_to_json(r);
        } else if (c.task == "pv-check") {
            const auto model = resolve_model(c);
            const GradedElement u = parse_word(model, c.unitary);
            FlowOptions opt;
            opt.steps = c.steps;
            const PvReport r = pv_pairing_check(u, DiracModel::circle(), c.n_modes, opt);
            rep["result"] = pv_to_json(r);
            if (!r.consistent) out.exit_code = 2;
        } else {
            throw ConfigError("unknown task '" + c.task + "'");
        }

        if (!c.no_timestamp) {
            const auto now = std::chrono::system_clock::now().time_since_epoch();
            rep["timestamp_ms"] =
                std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        }
        out.report = std::move(rep);
    } catch (const ConfigError& e) {
        out.exit_code = 1;
        out.message = std::string("config error: ") + e.what();
    } catch (const Error& e) {
        out.exit_code = 1;
        out.message = e.what();
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.message = e.what();
    }
    return out;
}

int run_and_write(const RunConfig& c) {
    const RunOutcome out = run_task(c);
    if (!out.message.empty()) std::cerr << out.message << "\n";
    if (!out.report.is_null()) {
        const std::string text = out.report.dump(2) + "\n";
        if (!c.out_path.empty())
            write_text_file(c.out_path, text);
        else
            std::cout << text;
    }
    if (!c.csv_path.empty() && !out.csv.empty()) write_text_file(c.csv_path, out.csv);
    return out.exit_code;
}

}  // namespace torpair
