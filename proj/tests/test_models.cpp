#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torpair/models.hpp"
#include "torpair/module.hpp"

using namespace torpair;

TEST_CASE("rotation model trace is character orthogonality") {
    const auto m = rotation_circle(4);
    const GradedElement z = m->generator("z");
    CHECK(std::abs(m->unit().trace() - 1.0) == 0.0);
    CHECK(std::abs(z.trace()) == 0.0);
    CHECK(std::abs((z * z).trace()) == 0.0);
    CHECK(std::abs((z.adjoint() * z).trace() - 1.0) <= 1e-15);
}

TEST_CASE("NC torus commutation relation") {
    const auto m = nc_torus(Rational{1, 3}, 4);
    const GradedElement u1 = m->generator("U1");
    const GradedElement u2 = m->generator("U2");
    // U1 U2 U1^{-1} U2^{-1} = e^{2 pi i theta} 1
    const GradedElement comm = u1 * u2 * u1.adjoint() * u2.adjoint();
    const Cplx phase = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    CHECK((comm - m->scalar(phase)).norm_upper() <= 1e-14);
}

TEST_CASE("NC torus trace is tracial on budget-safe monomials") {
    const auto m = nc_torus(Rational{1, 3}, 6);
    const GradedElement a = m->generator("U1") * m->generator("U2") * m->generator("U2");
    const GradedElement b = m->generator("U2").adjoint() * m->generator("U1");
    CHECK(std::abs((a * b).trace() - (b * a).trace()) <= 1e-14);
    // tau(U1^m U2^n) = delta_{(m,n),(0,0)}
    CHECK(std::abs((m->generator("U1") * m->generator("U2")).trace()) == 0.0);
}

TEST_CASE("NC torus saturation for rational and float angles") {
    CHECK(saturation_check(nc_torus(Rational{1, 3}, 4), 2, 4).verdict ==
          SaturationVerdict::SaturatedAtTruncation);
    CHECK(saturation_check(nc_torus(0.6180339887498949, 4), 2, 4).verdict ==
          SaturationVerdict::SaturatedAtTruncation);
}

TEST_CASE("restricted circle collapses the grading") {
    const auto m2 = nc_torus(Rational{1, 3}, 4);
    const auto m = restrict_to_circle(m2, 1, 0);
    CHECK(m->action_grading({1, 0})[0] == 1);
    CHECK(m->action_grading({0, 1})[0] == 0);  // U2 is fixed for direction (1,0)

    const auto diag = restrict_to_circle(m2, 1, 1);
    CHECK(diag->action_grading({1, 1})[0] == 2);  // U1 U2 has grading 2

    // grading-0 subalgebra stays grading 0 under any restriction
    CHECK(diag->action_grading({0, 0})[0] == 0);
}

TEST_CASE("z-crossed product covariance and saturation") {
    const auto m = z_crossed_example(3);
    const GradedElement s = m->generator("s");
    const GradedElement b = m->generator("b1");
    const GradedElement v = m->generator("V");

    // covariance: s b s* = V b V*
    const GradedElement lhs = s * b * s.adjoint();
    const GradedElement rhs = v * b * v.adjoint();
    CHECK((lhs - rhs).norm_upper() <= 1e-13);

    CHECK(saturation_check(m, 2, 3).verdict == SaturationVerdict::SaturatedAtTruncation);
}

TEST_CASE("z-crossed with trivial twist and scalar fiber matches the rotation model") {
    const auto m = z_crossed_product(Matrix::Identity(1, 1), 4);
    const GradedElement s = m->generator("s");
    CHECK((s * s.adjoint() - m->unit()).norm_upper() == 0.0);
    CHECK(std::abs(s.trace()) == 0.0);
    CHECK(saturation_check(m, 2, 2).verdict == SaturationVerdict::SaturatedAtTruncation);
    const auto basis = m->module_basis();
    CHECK(basis->size() == 2 * m->budget + 1);  // same truncation as C(T)
}

TEST_CASE("rotation torus is commutative and saturated") {
    const auto m = rotation_torus(4);
    const GradedElement u1 = m->generator("U1");
    const GradedElement u2 = m->generator("U2");
    CHECK((u1 * u2 - u2 * u1).norm_upper() == 0.0);
    CHECK(saturation_check(m, 2, 4).verdict == SaturationVerdict::SaturatedAtTruncation);
}

TEST_CASE("Bott projection is a projection to 1e-12") {
    const auto m = rotation_torus(64);
    const ElementMatrix p = bott_projection(m);
    const ElementMatrix defect = p * p - p;
    CHECK(commutative_sup_norm(defect, 96) <= 1e-12);
    const ElementMatrix sa = p.adjoint() - p;
    CHECK(sa.norm_upper() <= 1e-12);
    // dominant gradings sit in the unit box
    double inside = 0, outside = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (const auto& [chi, x] : p.at(i, j).components()) {
                const double w = std::norm(x(0, 0));
                if (std::max(std::abs(chi[0]), std::abs(chi[1])) <= 1)
                    inside += w;
                else
                    outside += w;
            }
    CHECK(inside > 10 * outside);
}

TEST_CASE("model registry") {
    for (const auto& name : model_presets()) {
        ModelParams p;
        p.name = name;
        p.degree_budget = 4;
        const auto m = make_model(p);
        CHECK(m != nullptr);
    }
    ModelParams bad;
    bad.name = "no_such_model";
    CHECK_THROWS_AS(make_model(bad), ConfigError);
}
