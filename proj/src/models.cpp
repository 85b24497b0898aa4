#include "torpair/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "torpair/errors.hpp"

namespace torpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix one1() { return Matrix::Ones(1, 1); }

// Light invariant suite run on every constructed model: the action is a
// *-homomorphism, products grade additively, tau is invariant and tracial on
// generator products that stay within budget.
void validate_model(const ModelPtr& m) {
    const std::vector<double> g(static_cast<size_t>(m->action_rank), 0.2137);
    for (const auto& ga : m->generators) {
        const GradedElement a = m->generator(ga.name);
        for (const auto& gb : m->generators) {
            const GradedElement b = m->generator(gb.name);
            GradedElement ab;
            try {
                ab = a * b;
            } catch (const BudgetOverflow&) {
                continue;
            }
            for (const auto& [chi, x] : ab.components())
                if (chi != ga.grading + gb.grading)
                    throw Error("model validation: grading multiplicativity failed");
            const GradedElement lhs = ab.action(g);
            const GradedElement rhs = a.action(g) * b.action(g);
            if ((lhs - rhs).norm_upper() > 1e-10 * std::max(1.0, ab.norm_upper()))
                throw Error("model validation: alpha_g(ab) != alpha_g(a) alpha_g(b)");
            const Cplx tab = ab.trace(), tba = (b * a).trace();
            if (std::abs(tab - tba) > 1e-10)
                throw Error("model validation: tau(ab) != tau(ba) on generators");
        }
        const GradedElement lhs = a.adjoint().action(g);
        const GradedElement rhs = a.action(g).adjoint();
        if ((lhs - rhs).norm_upper() > 1e-10 * std::max(1.0, a.norm_upper()))
            throw Error("model validation: alpha_g(a*) != alpha_g(a)*");
        if (std::abs(m->unit().trace() - 1.0) > 1e-12)
            throw Error("model validation: tau(1) != 1");
    }
}

std::shared_ptr<ActionModel> base_model() { return std::make_shared<ActionModel>(); }

}  // namespace

ModelPtr rotation_circle(int degree_budget) { return speed_circle(degree_budget, 1); }

ModelPtr speed_circle(int degree_budget, int speed) {
    if (degree_budget < 1) throw Error("rotation model needs budget >= 1");
    if (speed < 1 || speed > degree_budget) throw Error("invalid rotation speed");
    auto m = base_model();
    m->kind = ModelKind::Monomial;
    m->internal_rank = 1;
    m->action_rank = 1;
    m->dim = 1;
    m->budget = degree_budget;
    m->generators.push_back({"z", grading1(speed), one1()});
    m->name = (speed == 1) ? "rotation_circle" : ("speed_circle:" + std::to_string(speed));
    m->relations = "kind=monomial; rank=1; speed=" + std::to_string(speed) +
                   "; z zbar = 1; alpha_g(z) = e^{2 pi i " + std::to_string(speed) + " g} z";
    ModelPtr out = m;
    validate_model(out);
    return out;
}

ModelPtr trivial_action(int points) {
    if (points < 1) throw Error("trivial model needs at least one point");
    auto m = base_model();
    m->kind = ModelKind::Trivial;
    m->internal_rank = 1;
    m->action_rank = 1;
    m->dim = points;
    // Every element is fixed, so products never move in the grading lattice;
    // the budget only has to admit the mode bookkeeping of callers.
    m->budget = 16;
    Matrix z = Matrix::Zero(points, points);
    for (int j = 0; j < points; ++j)
        z(j, j) = std::polar(1.0, kTwoPi * double(j) / double(points));
    m->generators.push_back({"z", grading1(0), z});
    m->name = "trivial_action";
    m->relations = "kind=trivial; points=" + std::to_string(points) +
                   "; C(Z_" + std::to_string(points) + ") with the trivial circle action";
    ModelPtr out = m;
    validate_model(out);
    return out;
}

namespace {
ModelPtr make_nc_torus(bool rational, Rational theta_q, double theta_f, int degree_budget) {
    if (degree_budget < 2) throw Error("torus models need budget >= 2");
    auto m = base_model();
    m->kind = ModelKind::Monomial;
    m->internal_rank = 2;
    m->action_rank = 2;
    m->dim = 1;
    m->budget = degree_budget;
    m->theta_rational = rational;
    if (rational) {
        long n = theta_q.num, d = theta_q.den;
        if (d <= 0) throw Error("nc_torus: denominator must be positive");
        const long g = std::gcd(std::abs(n), d);
        if (g > 0) {
            n /= g;
            d /= g;
        }
        m->theta_num = n;
        m->theta_den = d;
        m->theta_value = double(n) / double(d);
    } else {
        m->theta_num = 0;
        m->theta_den = 1;
        m->theta_value = theta_f;
        m->theta_rational = false;
    }
    m->generators.push_back({"U1", grading2(1, 0), one1()});
    m->generators.push_back({"U2", grading2(0, 1), one1()});
    const bool flat = (rational && theta_q.num == 0) || (!rational && theta_f == 0.0);
    m->name = flat ? "rotation_torus" : "nc_torus";
    m->relations = "kind=monomial; rank=2; theta=" +
                   (rational ? (std::to_string(m->theta_num) + "/" + std::to_string(m->theta_den))
                             : std::to_string(theta_f)) +
                   "; U1 U2 = e^{2 pi i theta} U2 U1";
    ModelPtr out = m;
    validate_model(out);
    return out;
}
}  // namespace

ModelPtr nc_torus(Rational theta, int degree_budget) {
    return make_nc_torus(true, theta, 0.0, degree_budget);
}

ModelPtr nc_torus(double theta, int degree_budget) {
    return make_nc_torus(false, {}, theta, degree_budget);
}

ModelPtr rotation_torus(int degree_budget) { return nc_torus(Rational{0, 1}, degree_budget); }

ModelPtr restrict_to_circle(const ModelPtr& model, int a, int b) {
    if (model->internal_rank != 2) throw Error("restrict_to_circle needs a rank-2 model");
    if (a == 0 && b == 0) throw Error("restrict_to_circle: direction must be nonzero");
    auto m = std::make_shared<ActionModel>(*model);
    m->action_rank = 1;
    m->direction = {a, b};
    m->name = model->name + ":restricted";
    m->relations = model->relations + "; restricted direction=(" + std::to_string(a) + "," +
                   std::to_string(b) + ")";
    return m;
}

ModelPtr z_crossed_product(const Matrix& v, int degree_budget) {
    if (degree_budget < 1) throw Error("crossed-product model needs budget >= 1");
    const int r = static_cast<int>(v.rows());
    if (v.cols() != r || r < 1) throw Error("twist must be square");
    if ((v * v.adjoint() - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("twist must be unitary");
    auto m = base_model();
    m->kind = ModelKind::ZCrossed;
    m->internal_rank = 1;
    m->action_rank = 1;
    m->dim = r;
    m->budget = degree_budget;
    m->twist = v;
    m->generators.push_back({"s", grading1(1), Matrix::Identity(r, r)});
    if (r >= 2) {
        Matrix cycle = Matrix::Zero(r, r);
        for (int j = 0; j < r; ++j) cycle((j + 1) % r, j) = 1.0;
        Matrix e00 = Matrix::Zero(r, r);
        e00(0, 0) = 1.0;
        m->generators.push_back({"b1", grading1(0), cycle});
        m->generators.push_back({"b2", grading1(0), e00});
    }
    m->name = "z_crossed_product";
    m->relations = "kind=zcrossed; r=" + std::to_string(r) +
                   "; s b s' = V b V' (V stored as generator 'V')";
    // Keep the twist reachable for reload.
    m->generators.push_back({"V", grading1(0), v});
    ModelPtr out = m;
    validate_model(out);
    return out;
}

ModelPtr z_crossed_example(int degree_budget) {
    const double phi = kTwoPi / 5.0;
    Matrix v(2, 2);
    v << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return z_crossed_product(v, degree_budget);
}

ElementMatrix bott_projection(const ModelPtr& model, const BottOptions& opt) {
    if (model->internal_rank != 2 || model->kind != ModelKind::Monomial ||
        model->theta_value != 0.0 || model->theta_num != 0)
        throw Error("bott_projection lives over the commutative two-torus model");
    if (model->budget < opt.radius)
        throw BudgetOverflow("bott_projection: budget smaller than the requested radius");
    const int g = opt.grid;
    const int r = opt.radius;
    const double u = opt.gap_parameter;

    // Pointwise exact projection on the grid.
    std::vector<Matrix> p(static_cast<size_t>(g) * g, Matrix(2, 2));
    for (int ix = 0; ix < g; ++ix)
        for (int iy = 0; iy < g; ++iy) {
            const double x = double(ix) / g, y = double(iy) / g;
            const double m1 = std::sin(kTwoPi * x);
            const double m2 = std::sin(kTwoPi * y);
            const double m3 = u - std::cos(kTwoPi * x) - std::cos(kTwoPi * y);
            const double n = std::sqrt(m1 * m1 + m2 * m2 + m3 * m3);
            Matrix& q = p[static_cast<size_t>(ix) * g + iy];
            q(0, 0) = 0.5 * (1 + m3 / n);
            q(1, 1) = 0.5 * (1 - m3 / n);
            q(0, 1) = Cplx(0.5 * m1 / n, -0.5 * m2 / n);
            q(1, 0) = Cplx(0.5 * m1 / n, 0.5 * m2 / n);
        }

    // Separable Fourier analysis: first over y, then over x.
    const int w = 2 * r + 1;
    std::vector<Matrix> stage(static_cast<size_t>(g) * w, Matrix::Zero(2, 2));
    for (int ix = 0; ix < g; ++ix)
        for (int l = -r; l <= r; ++l) {
            Matrix acc = Matrix::Zero(2, 2);
            for (int iy = 0; iy < g; ++iy) {
                const double ph = -kTwoPi * double(l) * double(iy) / g;
                acc += p[static_cast<size_t>(ix) * g + iy] * Cplx(std::cos(ph), std::sin(ph));
            }
            stage[static_cast<size_t>(ix) * w + (l + r)] = acc / double(g);
        }

    ElementMatrix out(model, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.at(i, j) = GradedElement(model);
    for (int k = -r; k <= r; ++k)
        for (int l = -r; l <= r; ++l) {
            Matrix acc = Matrix::Zero(2, 2);
            for (int ix = 0; ix < g; ++ix) {
                const double ph = -kTwoPi * double(k) * double(ix) / g;
                acc += stage[static_cast<size_t>(ix) * w + (l + r)] * Cplx(std::cos(ph), std::sin(ph));
            }
            acc /= double(g);
            if (acc.cwiseAbs().maxCoeff() < 1e-17) continue;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (acc(i, j) != Cplx(0.0))
                        out.at(i, j).add(grading2(k, l), acc(i, j) * one1());
        }
    return out;
}

ElementMatrix trivial_projection(const ModelPtr& model, int n) {
    ElementMatrix p(model, n);
    p.at(0, 0) = model->unit();
    return p;
}

double commutative_sup_norm(const ElementMatrix& a, int grid) {
    const auto& model = a.model();
    if (model->kind != ModelKind::Monomial || (model->theta_num != 0 || model->theta_value != 0))
        throw Error("sup norm sampling needs a commutative monomial model");
    const int n = a.size();
    const int m = model->budget;
    const int w = 2 * m + 1;
    const bool rank2 = model->internal_rank == 2;
    const int gy = rank2 ? grid : 1;

    // Separable evaluation: values = E_x C E_y^T per entry.
    Matrix ex(grid, w);
    for (int ix = 0; ix < grid; ++ix)
        for (int k = -m; k <= m; ++k)
            ex(ix, k + m) = std::polar(1.0, kTwoPi * k * double(ix) / grid);
    Matrix ey = rank2 ? ex : Matrix::Ones(1, 1);

    std::vector<Matrix> vals(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Matrix coeffs = Matrix::Zero(w, rank2 ? w : 1);
            for (const auto& [chi, c] : a.at(i, j).components())
                coeffs(chi[0] + m, rank2 ? chi[1] + m : 0) = c(0, 0);
            vals[static_cast<size_t>(i) * n + j] = ex * coeffs * ey.transpose();
        }

    double sup = 0;
    Matrix v(n, n);
    for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < gy; ++iy) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) v(i, j) = vals[static_cast<size_t>(i) * n + j](ix, iy);
            sup = std::max(sup, operator_norm(v));
        }
    return sup;
}

ModelPtr make_model(const ModelParams& p) {
    if (p.name == "rotation_circle") return rotation_circle(p.degree_budget);
    if (p.name == "double_speed_circle") return speed_circle(p.degree_budget, 2);
    if (p.name == "trivial_action") return trivial_action(p.points);
    if (p.name == "nc_torus") {
        if (p.theta_rational) return nc_torus(*p.theta_rational, p.degree_budget);
        if (p.theta_float) return nc_torus(*p.theta_float, p.degree_budget);
        return nc_torus(Rational{1, 3}, p.degree_budget);
    }
    if (p.name == "rotation_torus") return rotation_torus(p.degree_budget);
    if (p.name == "z_crossed_product") return z_crossed_example(p.degree_budget);
    if (p.name == "nc_torus_restricted") {
        ModelPtr base = p.theta_rational ? nc_torus(*p.theta_rational, p.degree_budget)
                        : p.theta_float  ? nc_torus(*p.theta_float, p.degree_budget)
                                         : nc_torus(Rational{1, 3}, p.degree_budget);
        return restrict_to_circle(base, p.direction_a, p.direction_b);
    }
    throw ConfigError("unknown model preset '" + p.name + "'");
}

std::vector<std::string> model_presets() {
    return {"rotation_circle", "double_speed_circle", "trivial_action",
            "nc_torus",        "rotation_torus",      "z_crossed_product",
            "nc_torus_restricted"};
}

}  // namespace torpair
