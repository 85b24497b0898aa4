#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "torpair/crossed.hpp"
#include "torpair/dirac.hpp"
#include "torpair/models.hpp"
#include "torpair/module.hpp"

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

TEST_CASE("module basis is tau-orthonormal with the unit first") {
    for (const ModelPtr& m :
         {rotation_circle(4), nc_torus(Rational{1, 3}, 2), z_crossed_example(2)}) {
        const auto basis = m->module_basis();
        CHECK((basis->element_of(basis->unit_index()) - m->unit()).norm_upper() <= 1e-12);
        for (int i = 0; i < basis->size(); ++i)
            for (int j = 0; j < basis->size(); ++j) {
                const Cplx g = basis->element_of(i).gns_inner(basis->element_of(j));
                CHECK(std::abs(g - (i == j ? Cplx(1.0) : Cplx(0.0))) <= 1e-12);
            }
    }
}

TEST_CASE("coords and element are inverse to each other") {
    const auto m = z_crossed_example(3);
    const auto basis = m->module_basis();
    const GradedElement a = random_element(m, 3, 3);
    CHECK((basis->element(basis->coords(a)) - a).norm_upper() <= 1e-12);
}

TEST_CASE("lambda is a *-homomorphism away from the budget edge") {
    const auto m = rotation_circle(6);
    const auto basis = m->module_basis();
    const GradedElement a = random_element(m, 5, 1);
    const GradedElement b = random_element(m, 6, 1);
    const Matrix prod = basis->lambda(a) * basis->lambda(b);
    const Matrix direct = basis->lambda(a * b);
    double dev = 0;
    for (int j = 0; j < basis->size(); ++j) {
        if (std::abs(basis->items()[static_cast<size_t>(j)].action_chi[0]) > m->budget - 2)
            continue;
        dev = std::max(dev, (prod.col(j) - direct.col(j)).cwiseAbs().maxCoeff());
    }
    CHECK(dev <= 1e-12);

    const Matrix lam = basis->lambda(a);
    const Matrix lam_star = basis->lambda(a.adjoint());
    double adev = 0;
    for (int i = 0; i < basis->size(); ++i)
        for (int j = 0; j < basis->size(); ++j) {
            if (std::abs(basis->items()[static_cast<size_t>(i)].action_chi[0]) > m->budget - 1 ||
                std::abs(basis->items()[static_cast<size_t>(j)].action_chi[0]) > m->budget - 1)
                continue;
            adev = std::max(adev, std::abs(std::conj(lam(j, i)) - lam_star(i, j)));
        }
    CHECK(adev <= 1e-12);
}

TEST_CASE("theta operators") {
    const auto m = rotation_circle(5);
    const auto basis = m->module_basis();

    // Theta_{1,1} projects onto the fixed part
    const HOperator t11 = theta(m->unit(), m->unit());
    for (int j = 0; j < basis->size(); ++j) {
        const bool fixed = basis->items()[static_cast<size_t>(j)].action_chi[0] == 0;
        CHECK(std::abs(t11.mat(j, j) - (fixed ? 1.0 : 0.0)) <= 1e-13);
    }

    const GradedElement v = random_element(m, 7, 2);
    const GradedElement w = random_element(m, 8, 2);
    CHECK((theta(v, w).mat.adjoint() - theta(w, v).mat).cwiseAbs().maxCoeff() <= 1e-12);

    const HOperator tvv = theta(v, v);
    const auto ev = eigh(Matrix((tvv.mat + tvv.mat.adjoint()) / 2.0));
    CHECK(ev.eigenvalues.front() >= -1e-12);
}

TEST_CASE("c_alpha: unit at mode zero is the identity on the trivial module") {
    const auto triv = trivial_action(4);
    CrossedElement f(triv, 3);
    f.set_mode(0, triv->unit());
    const HOperator id = c_alpha(f);
    CHECK((id.mat - Matrix::Identity(id.mat.rows(), id.mat.cols())).cwiseAbs().maxCoeff() <=
          1e-13);
}

TEST_CASE("Fin identity: c_alpha(a alpha(b*)) = theta(a, b)") {
    const auto m = rotation_circle(8);
    for (unsigned seed = 11; seed < 16; ++seed) {
        const GradedElement a = random_element(m, seed, 3);
        const GradedElement b = random_element(m, seed + 50, 3);
        const CrossedElement fin = fin_element(a, b, 8);
        CHECK((c_alpha(fin).mat - theta(a, b).mat).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("c_alpha is multiplicative against convolution") {
    const auto m = rotation_circle(8);
    auto band_limited = [&](unsigned seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-1, 1);
        CrossedElement f(m, 8);
        for (int mode = -2; mode <= 2; ++mode) {
            GradedElement c(m);
            for (int g = -2; g <= 2; ++g)
                c.add(grading1(g), Cplx(u(rng), u(rng)) * Matrix::Ones(1, 1));
            f.set_mode(mode, c);
        }
        return f;
    };
    const CrossedElement f1 = band_limited(31);
    const CrossedElement f2 = band_limited(32);
    const Matrix lhs = c_alpha(convolve(f1, f2)).mat;
    const Matrix rhs = c_alpha(f1).mat * c_alpha(f2).mat;
    const auto basis = m->module_basis();
    double dev = 0;
    for (int i = 0; i < basis->size(); ++i)
        for (int j = 0; j < basis->size(); ++j) {
            if (std::abs(basis->items()[static_cast<size_t>(i)].action_chi[0]) > 4 ||
                std::abs(basis->items()[static_cast<size_t>(j)].action_chi[0]) > 4)
                continue;
            dev = std::max(dev, std::abs(lhs(i, j) - rhs(i, j)));
        }
    CHECK(dev <= 1e-10);
}

TEST_CASE("phi compatibility: constants act as multiplication on the fixed part") {
    // C_alpha(phi(a)) = integral of a alpha_g(.) dg = Theta_{a,1}: left
    // multiplication by a composed with the projection onto the fixed part,
    // and plain left multiplication there.
    const auto m = z_crossed_example(3);
    const GradedElement a = random_element(m, 41, 0).mean();
    CrossedElement constant(m, 3);
    constant.set_mode(0, a);
    const HOperator lhs = c_alpha(constant);
    CHECK((lhs.mat - theta(a, m->unit()).mat).cwiseAbs().maxCoeff() <= 1e-10);

    const auto basis = m->module_basis();
    const Matrix lam = basis->lambda(a);
    for (int j = 0; j < basis->size(); ++j) {
        const bool fixed = basis->items()[static_cast<size_t>(j)].action_chi[0] == 0;
        const Vector want = fixed ? Vector(lam.col(j)) : Vector(Vector::Zero(basis->size()));
        CHECK((lhs.mat.col(j) - want).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("transfer of the regular representation is c_alpha") {
    const auto m = rotation_circle(4);
    std::mt19937 rng(51);
    std::uniform_real_distribution<double> u(-1, 1);
    CrossedElement f(m, 6);
    for (int mode = -2; mode <= 2; ++mode) {
        GradedElement c(m);
        for (int g = -1; g <= 1; ++g) c.add(grading1(g), Cplx(u(rng), u(rng)) * Matrix::Ones(1, 1));
        f.set_mode(mode, c);
    }
    const HOperator via_transfer = transfer_operator(regular_rep(f));
    const HOperator direct = c_alpha(f);
    const auto basis = m->module_basis();
    double dev = 0;
    for (int i = 0; i < basis->size(); ++i)
        for (int j = 0; j < basis->size(); ++j) {
            if (std::abs(basis->items()[static_cast<size_t>(i)].action_chi[0]) > 3 ||
                std::abs(basis->items()[static_cast<size_t>(j)].action_chi[0]) > 3)
                continue;
            dev = std::max(dev, std::abs(via_transfer.mat(i, j) - direct.mat(i, j)));
        }
    CHECK(dev <= 1e-10);
}

TEST_CASE("transfer basics: identity and the Dirac block matrix") {
    const auto m = rotation_circle(3);
    const auto basis = m->module_basis();

    TruncatedOperator id(basis, 4, 1, 0);
    id.mat() = Matrix::Identity(id.dim(), id.dim());
    const HOperator tid = transfer_operator(id);
    CHECK((tid.mat - Matrix::Identity(tid.mat.rows(), tid.mat.cols())).cwiseAbs().maxCoeff() ==
          0.0);

    const TruncatedOperator d = dirac_matrix(m, DiracModel::circle(), 4);
    const HOperator da = transfer_operator(d);
    for (int j = 0; j < basis->size(); ++j) {
        const int ell = basis->items()[static_cast<size_t>(j)].action_chi[0];
        CHECK(std::abs(da.mat(j, j) - Cplx(-2.0 * M_PI * ell)) <= 1e-12);
    }

    TruncatedOperator bad(basis, 4, 1, 0);
    bad.mat()(bad.index(1, 0, 0), bad.index(0, 0, 0)) = 1.0;
    CHECK_THROWS_AS(transfer_operator(bad), NotInvariant);
}

TEST_CASE("transfer is norm non-increasing") {
    const auto m = rotation_circle(4);
    std::mt19937 rng(60);
    std::uniform_real_distribution<double> u(-1, 1);
    CrossedElement f(m, 6);
    for (int mode = -2; mode <= 2; ++mode) {
        GradedElement c(m);
        for (int g = -1; g <= 1; ++g) c.add(grading1(g), Cplx(u(rng), u(rng)) * Matrix::Ones(1, 1));
        f.set_mode(mode, c);
    }
    const TruncatedOperator t = regular_rep(f);
    const HOperator ta = transfer_operator(t);
    CHECK(operator_norm(ta.mat) <= operator_norm(t.mat()) + 1e-12);
}

TEST_CASE("images of c_alpha sit in the theta span on the capped module") {
    const auto m = rotation_circle(6);
    const auto basis = m->module_basis();
    const auto capped = basis->indices_within(3);

    std::vector<Vector> thetas;
    for (int i : capped)
        for (int j : capped) {
            const HOperator th = theta(basis->element_of(i), basis->element_of(j));
            Matrix c(static_cast<Eigen::Index>(capped.size()),
                     static_cast<Eigen::Index>(capped.size()));
            for (size_t a = 0; a < capped.size(); ++a)
                for (size_t b = 0; b < capped.size(); ++b)
                    c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        th.mat(capped[a], capped[b]);
            thetas.push_back(Eigen::Map<const Vector>(c.data(), c.size()));
        }
    Matrix theta_stack(thetas.front().size(), static_cast<Eigen::Index>(thetas.size()));
    for (size_t i = 0; i < thetas.size(); ++i)
        theta_stack.col(static_cast<Eigen::Index>(i)) = thetas[i];

    std::mt19937 rng(70);
    std::uniform_real_distribution<double> u(-1, 1);
    CrossedElement f(m, 8);
    for (int mode = -3; mode <= 3; ++mode) {
        GradedElement c(m);
        for (int g = -2; g <= 2; ++g)
            if (std::abs(g - mode) <= 3)
                c.add(grading1(g), Cplx(u(rng), u(rng)) * Matrix::Ones(1, 1));
        c.prune(0.0);
        if (!c.empty()) f.set_mode(mode, c);
    }
    const HOperator img = c_alpha(f);
    Matrix c(static_cast<Eigen::Index>(capped.size()), static_cast<Eigen::Index>(capped.size()));
    for (size_t a = 0; a < capped.size(); ++a)
        for (size_t b = 0; b < capped.size(); ++b)
            c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                img.mat(capped[a], capped[b]);
    const Vector v = Eigen::Map<const Vector>(c.data(), c.size());

    const Matrix gram = theta_stack.adjoint() * theta_stack;
    const Vector rhs = theta_stack.adjoint() * v;
    const Vector sol = gram.ldlt().solve(rhs);
    CHECK((theta_stack * sol - v).norm() <= 1e-8 * std::max(1.0, v.norm()));
}

TEST_CASE("saturation by compactness: verdicts") {
    CHECK(saturation_by_compactness(rotation_circle(4), 4, 2).verdict ==
          CompactnessVerdict::Iso);

    const auto trep = saturation_by_compactness(trivial_action(3), 4, 1);
    CHECK(trep.verdict == CompactnessVerdict::NotInjective);
    CHECK(!trep.witness_mode.empty());

    CHECK(saturation_by_compactness(nc_torus(Rational{1, 3}, 4), 4, 2).verdict ==
          CompactnessVerdict::Iso);

    CHECK(saturation_by_compactness(speed_circle(4, 2), 4, 2).verdict ==
          CompactnessVerdict::NotInjective);

    CHECK(saturation_by_compactness(z_crossed_example(4), 4, 2).verdict ==
          CompactnessVerdict::Iso);
}

TEST_CASE("gram matrices of the scalarized inner product are PSD") {
    const auto m = nc_torus(Rational{1, 3}, 3);
    std::vector<GradedElement> sample;
    for (unsigned s = 0; s < 6; ++s) sample.push_back(random_element(m, 200 + s, 2));
    Matrix gram(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            gram(i, j) = sample[static_cast<size_t>(i)].gns_inner(sample[static_cast<size_t>(j)]);
    const auto ev = eigh(Matrix((gram + gram.adjoint()) / 2.0));
    CHECK(ev.eigenvalues.front() >= -1e-12);
}
