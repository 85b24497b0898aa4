#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "torpair/models.hpp"
#include "torpair/serialize.hpp"

using namespace torpair;

namespace {

GradedElement random_element(const ModelPtr& model, unsigned seed, int max_deg) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    GradedElement a(model);
    for (const auto& chi : model->grading_box()) {
        if (std::abs(chi[0]) > max_deg || std::abs(chi[1]) > max_deg) continue;
        for (const auto& c : model->component_space(chi)) a.add(chi, Cplx(u(rng), u(rng)) * c);
    }
    return a;
}

}  // namespace

TEST_CASE("model documents round-trip byte-identically") {
    for (const auto& name : model_presets()) {
        ModelParams params;
        params.name = name;
        params.degree_budget = 4;
        const ModelPtr m = make_model(params);
        const Json doc = model_to_json(m);
        const ModelPtr m2 = model_from_json(doc);
        const Json doc2 = model_to_json(m2);
        CHECK(doc.dump() == doc2.dump());
        CHECK(m2->budget == m->budget);
        CHECK(m2->dim == m->dim);
        CHECK(m2->action_rank == m->action_rank);
    }
}

TEST_CASE("model documents follow the declared schema") {
    const Json doc = model_to_json(nc_torus(Rational{1, 3}, 3));
    CHECK(doc.contains("rank"));
    CHECK(doc.contains("ambient_dim"));
    CHECK(doc.contains("degree_budget"));
    CHECK(doc.contains("generators"));
    CHECK(doc.contains("relations"));
    CHECK(doc.at("trace") == "normalized");
    for (const auto& g : doc.at("generators")) {
        CHECK(g.contains("name"));
        CHECK(g.contains("grading"));
        CHECK(g.contains("coefficient_matrix"));
    }
}

TEST_CASE("loaded models reproduce exact decimal coefficients") {
    const ModelPtr m = z_crossed_example(3);
    const Json doc = model_to_json(m);
    const ModelPtr m2 = model_from_json(doc);
    REQUIRE(m2->generators.size() == m->generators.size());
    for (size_t i = 0; i < m->generators.size(); ++i) {
        const Matrix& a = m->generators[i].coeff;
        const Matrix& b = m2->generators[i].coeff;
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // bitwise equality
    }
}

TEST_CASE("elements and crossed elements round-trip exactly") {
    const ModelPtr m = nc_torus(Rational{1, 3}, 3);
    const GradedElement a = random_element(m, 5, 3);
    const GradedElement a2 = element_from_json(m, element_to_json(a));
    CHECK((a - a2).norm_upper() == 0.0);

    CrossedElement f(m->action_rank == 1 ? m : restrict_to_circle(m, 1, 0), 4);
    const auto mr = f.model();
    f.set_mode(-2, random_element(mr, 6, 2));
    f.set_mode(1, random_element(mr, 7, 2));
    const CrossedElement f2 = crossed_from_json(mr, crossed_to_json(f));
    for (int mode = -4; mode <= 4; ++mode)
        CHECK((f.mode(mode) - f2.mode(mode)).norm_upper() == 0.0);
}

TEST_CASE("report schemas carry the fields the spec names") {
    const auto rep = saturation_check(rotation_circle(3), 1, 2);
    const Json j = saturation_to_json(rep);
    CHECK(j.contains("verdict"));
    CHECK(j.contains("characters"));
    CHECK(j.at("truncation").contains("chi_range"));

    const auto crep = saturation_by_compactness(rotation_circle(4), 4, 2);
    const Json cj = compactness_to_json(crep);
    CHECK(cj.at("verdict") == "ISO");
    CHECK(cj.contains("singular_values"));
    CHECK(cj.at("truncation").contains("N"));
    CHECK(cj.at("truncation").contains("M"));
    CHECK(cj.at("truncation").contains("L"));
}

TEST_CASE("identical inputs serialize identically (determinism)") {
    const Json a = model_to_json(rotation_circle(5));
    const Json b = model_to_json(rotation_circle(5));
    CHECK(a.dump(2) == b.dump(2));
}
