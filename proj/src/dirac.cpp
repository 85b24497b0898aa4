#include "torpair/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "torpair/models.hpp"

namespace torpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix sigma1() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}
Matrix sigma2() {
    Matrix s(2, 2);
    s << 0, Cplx(0, -1), Cplx(0, 1), 0;
    return s;
}
Matrix sigma3() {
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

}  // namespace

DiracModel DiracModel::circle(double omega_scalar) {
    DiracModel d;
    d.k = 1;
    d.dim_e = 1;
    d.clifford = {Matrix::Ones(1, 1)};
    d.chirality = Matrix::Ones(1, 1);
    d.omega = omega_scalar * Matrix::Ones(1, 1);
    return d;
}

DiracModel DiracModel::torus() {
    DiracModel d;
    d.k = 2;
    d.dim_e = 2;
    d.clifford = {sigma1(), sigma2()};
    d.chirality = sigma3();
    d.omega = Matrix::Zero(2, 2);
    return d;
}

DiracModel DiracModel::with_omega(Matrix w) const {
    DiracModel d = *this;
    if (w.rows() != dim_e || w.cols() != dim_e) throw Error("omega has the wrong fiber dimension");
    if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("omega must be self-adjoint");
    d.omega = std::move(w);
    return d;
}

bool DiracModel::clifford_relations_ok(double tol) const {
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const Matrix anti = clifford[static_cast<size_t>(i)] * clifford[static_cast<size_t>(j)] +
                                clifford[static_cast<size_t>(j)] * clifford[static_cast<size_t>(i)];
            const Matrix want = (i == j) ? Matrix(2.0 * Matrix::Identity(dim_e, dim_e))
                                         : Matrix(Matrix::Zero(dim_e, dim_e));
            if ((anti - want).cwiseAbs().maxCoeff() > tol) return false;
        }
    return true;
}

bool DiracModel::odd_with_zero_omega(double tol) const {
    if (k % 2 != 0) return true;
    for (const auto& c : clifford)
        if ((chirality * c + c * chirality).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

TruncatedOperator dirac_matrix(const ModelPtr& model, const DiracModel& dirac, int n_modes) {
    if (dirac.k != 1) throw Error("dirac_matrix builds the circle-mode operator (k = 1)");
    const auto basis = model->module_basis();
    TruncatedOperator t(basis, n_modes, dirac.dim_e, 0);
    for (int m = -n_modes; m <= n_modes; ++m)
        for (int j = 0; j < basis->size(); ++j)
            for (int e = 0; e < dirac.dim_e; ++e)
                for (int f = 0; f < dirac.dim_e; ++f) {
                    const Cplx v = kTwoPi * m * dirac.clifford[0](e, f) + dirac.omega(e, f);
                    if (v != Cplx(0.0)) t.mat()(t.index(m, j, e), t.index(m, j, f)) = v;
                }
    return t;
}

Matrix dirac_alpha_matrix(const ModuleBasis& basis, const DiracModel& dirac) {
    const int d = basis.size();
    const int de = dirac.dim_e;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d) * de, static_cast<Eigen::Index>(d) * de);
    for (int j = 0; j < d; ++j) {
        const auto& l = basis.items()[static_cast<size_t>(j)].action_chi;
        Matrix block = dirac.omega;
        for (size_t i = 0; i < l.size() && i < dirac.clifford.size(); ++i)
            block -= kTwoPi * double(l[i]) * dirac.clifford[i];
        m.block(static_cast<Eigen::Index>(j) * de, static_cast<Eigen::Index>(j) * de, de, de) =
            block;
    }
    return m;
}

GradedElement dirac_commutator(const GradedElement& a) {
    GradedElement r(a.model());
    for (const auto& [chi, x] : a.components()) {
        const int ell = a.model()->action_grading(chi)[0];
        if (ell != 0) r.add(chi, -kTwoPi * double(ell) * x);
    }
    return r;
}

ElementMatrix dirac_commutator(const ElementMatrix& a) {
    ElementMatrix r(a.model(), a.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j)
            if (!a.at(i, j).empty()) r.at(i, j) = dirac_commutator(a.at(i, j));
    return r;
}

Matrix commutator_action(const TruncatedOperator& d, const GradedElement& a, Picture picture) {
    if (picture == Picture::Crossed) {
        const TruncatedOperator m =
            multiplication_operator(a, d.basis(), d.mode_bound(), d.fiber_dim());
        return d.mat() * m.mat() - m.mat() * d.mat();
    }
    const auto basis = a.model()->module_basis();
    const Matrix lam = basis->lambda(a);
    DiracModel dm = DiracModel::circle();
    const Matrix da = dirac_alpha_matrix(*basis, dm);
    return da * lam - lam * da;
}

// --- spectral flow ----------------------------------------------------------

namespace {

struct StepEig {
    double t;
    std::vector<double> values;
    Matrix vectors;
};

StepEig eval_path(const Matrix& d0, const Matrix& d1, double t) {
    StepEig s;
    s.t = t;
    EighResult e = eigh((1 - t) * d0 + t * d1);
    s.values = std::move(e.eigenvalues);
    s.vectors = std::move(e.eigenvectors);
    return s;
}

double vector_weight(const Vector& v, const std::vector<double>& slot_weights) {
    double w = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        w += slot_weights[static_cast<size_t>(i)] * std::norm(v(i));
    return w;
}

// Transition tally between two sorted spectra; near-zero endpoints inside the
// (zhard, zero_tol) band trigger x4 refinement so crossings are located and
// weighed on a finer grid.
void flow_segment(const Matrix& d0, const Matrix& d1, const StepEig& a, const StepEig& b,
                  const FlowOptions& opt, double zhard, const std::vector<double>& slot_weights,
                  int depth, bool global_left, FlowResult& out) {
    const size_t n = a.values.size();
    bool needs_refine = false;
    for (size_t k = 0; k < n; ++k) {
        const double la = a.values[k], lb = b.values[k];
        const bool band_a = std::abs(la) > zhard && std::abs(la) < opt.zero_tol && !global_left;
        const bool band_b = std::abs(lb) > zhard && std::abs(lb) < opt.zero_tol;
        const bool nega = la < -zhard, negb = lb < -zhard;
        if ((band_a || band_b) && nega != negb) {
            needs_refine = true;
            break;
        }
    }
    if (needs_refine && depth < opt.max_refine_depth) {
        StepEig prev = a;
        for (int s = 1; s <= 4; ++s) {
            const double t = a.t + (b.t - a.t) * s / 4.0;
            StepEig cur = (s == 4) ? b : eval_path(d0, d1, t);
            flow_segment(d0, d1, prev, cur, opt, zhard, slot_weights, depth + 1,
                         global_left && s == 1, out);
            prev = std::move(cur);
        }
        return;
    }
    for (size_t k = 0; k < n; ++k) {
        const double la = a.values[k], lb = b.values[k];
        const bool nega = la < -zhard, negb = lb < -zhard;
        if (nega == negb) continue;
        if (needs_refine) {
            // Refinement exhausted and the crossing endpoint still sits in the
            // ambiguous band on both sides.
            if (std::abs(la) > zhard && std::abs(la) < opt.zero_tol && std::abs(lb) > zhard &&
                std::abs(lb) < opt.zero_tol)
                throw CrossingUnresolved("eigenvalue within " + std::to_string(opt.zero_tol) +
                                         " of zero at refined grid endpoints");
        }
        const int sign = negb ? -1 : +1;
        const bool use_b = std::abs(lb) <= std::abs(la);
        const Vector vec = use_b ? b.vectors.col(static_cast<Eigen::Index>(k))
                                 : a.vectors.col(static_cast<Eigen::Index>(k));
        const double w = vector_weight(vec, slot_weights);
        const double tc =
            a.t + (b.t - a.t) * (std::abs(la) / std::max(std::abs(la) + std::abs(lb), 1e-300));
        out.crossings.push_back({tc, sign, w});
        out.value += sign * w;
    }
}

}  // namespace

FlowResult spectral_flow_path(const Matrix& d0, const Matrix& d1, const FlowOptions& opt,
                              const std::vector<double>& slot_weights) {
    if (opt.steps < 64) throw Error("spectral flow needs at least 64 steps");
    if (d0.rows() != d1.rows()) throw Error("path endpoints differ in dimension");
    if (static_cast<Eigen::Index>(slot_weights.size()) != d0.rows())
        throw Error("slot weight vector has the wrong dimension");
    const double scale =
        std::max({1.0, d0.cwiseAbs().maxCoeff(), d1.cwiseAbs().maxCoeff()});
    const double zhard = 1e-9 * scale;

    FlowResult out;
    StepEig prev = eval_path(d0, d1, 0.0);
    out.ts.push_back(0.0);
    out.eigenvalues.push_back(prev.values);
    for (int s = 1; s <= opt.steps; ++s) {
        StepEig cur = eval_path(d0, d1, double(s) / opt.steps);
        out.ts.push_back(cur.t);
        out.eigenvalues.push_back(cur.values);
        flow_segment(d0, d1, prev, cur, opt, zhard, slot_weights, 0, s == 1, out);
        prev = std::move(cur);
    }
    return out;
}

FlowResult spectral_flow_module(const ElementMatrix& u, const DiracModel& dirac, int cap,
                                const FlowOptions& opt) {
    const auto& model = u.model();
    const auto basis = model->module_basis();
    const int deg = u.max_action_degree();
    if (cap + deg > model->budget)
        throw BudgetOverflow("flow cap " + std::to_string(cap) + " + deg(u) needs budget > " +
                             std::to_string(model->budget));
    const ElementMatrix uu = u.adjoint() * u;
    ElementMatrix delta = uu - ElementMatrix::identity(model, u.size());
    if (delta.norm_upper() > 1e-9 * std::max(1.0, u.norm_upper()))
        throw UnitarityViolated("u*u differs from 1 by " + std::to_string(delta.norm_upper()));

    const int de = dirac.dim_e;
    const int d = basis->size();
    const int n = u.size();
    const Matrix dmod = dirac_alpha_matrix(*basis, dirac);
    Matrix dfull = Matrix::Zero(static_cast<Eigen::Index>(n) * d * de,
                                static_cast<Eigen::Index>(n) * d * de);
    for (int i = 0; i < n; ++i)
        dfull.block(static_cast<Eigen::Index>(i) * d * de, static_cast<Eigen::Index>(i) * d * de,
                    d * de, d * de) = dmod;
    const Matrix lam = basis->lambda(u);  // (n d) x (n d)
    Matrix ufull = Matrix::Zero(dfull.rows(), dfull.cols());
    for (Eigen::Index r = 0; r < lam.rows(); ++r)
        for (Eigen::Index c = 0; c < lam.cols(); ++c) {
            if (lam(r, c) == Cplx(0.0)) continue;
            for (int e = 0; e < de; ++e) ufull(r * de + e, c * de + e) = lam(r, c);
        }
    const Matrix a1 = ufull * dfull * ufull.adjoint();

    std::vector<Eigen::Index> sel;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            bool ok = true;
            for (int l : basis->items()[static_cast<size_t>(j)].action_chi)
                ok = ok && std::abs(l) <= cap;
            if (!ok) continue;
            for (int e = 0; e < de; ++e)
                sel.push_back((static_cast<Eigen::Index>(i) * d + j) * de + e);
        }
    Matrix d0(static_cast<Eigen::Index>(sel.size()), static_cast<Eigen::Index>(sel.size()));
    Matrix d1 = d0;
    for (size_t r = 0; r < sel.size(); ++r)
        for (size_t c = 0; c < sel.size(); ++c) {
            d0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = dfull(sel[r], sel[c]);
            d1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a1(sel[r], sel[c]);
        }
    const double w0 = (opt.weight == FlowWeight::Tau) ? 1.0 / basis->fixed_count() : 1.0;
    std::vector<double> weights(sel.size(), w0);
    return spectral_flow_path(d0, d1, opt, weights);
}

FlowResult spectral_flow_crossed(const GradedElement& u, const DiracModel& dirac, int n_modes,
                                 const FlowOptions& opt) {
    const auto& model = u.model();
    const auto basis = model->module_basis();
    const GradedElement delta = u.adjoint() * u - model->unit();
    if (delta.norm_upper() > 1e-9 * std::max(1.0, u.norm_upper()))
        throw UnitarityViolated("u*u differs from 1 by " + std::to_string(delta.norm_upper()));
    const TruncatedOperator dmat = dirac_matrix(model, dirac, n_modes);
    const TruncatedOperator mu = multiplication_operator(u, basis, n_modes, dirac.dim_e);
    const Matrix a1 = mu.mat() * dmat.mat() * mu.mat().adjoint();
    const int margin = u.max_action_degree();
    const auto idx = dmat.interior_indices(margin);
    Matrix d0(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    Matrix d1 = d0;
    for (size_t r = 0; r < idx.size(); ++r)
        for (size_t c = 0; c < idx.size(); ++c) {
            d0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                dmat.mat()(idx[r], idx[c]);
            d1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a1(idx[r], idx[c]);
        }
    std::vector<double> weights(idx.size(), opt.weight == FlowWeight::Counting ? 1.0 : 0.0);
    if (opt.weight == FlowWeight::Tau) {
        // Tr_tau weight: mass on the unit-coefficient slot of each mode.
        size_t pos = 0;
        const int d = basis->size();
        const int de = dirac.dim_e;
        for (int m = -(n_modes - margin); m <= n_modes - margin; ++m)
            for (int j = 0; j < d; ++j)
                for (int e = 0; e < de; ++e, ++pos)
                    if (j == basis->unit_index()) weights[pos] = 1.0;
    }
    return spectral_flow_path(d0, d1, opt, weights);
}

// --- integer oracles --------------------------------------------------------

namespace {

bool scalar_coefficients(const GradedElement& u, std::map<int, Cplx>* out) {
    const int d = u.model()->dim;
    for (const auto& [chi, x] : u.components()) {
        const Cplx c = x.trace() / double(d);
        if ((x - c * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9 * (std::abs(c) + 1.0))
            return false;
        if (out) (*out)[u.model()->action_grading(chi)[0]] += c;
    }
    return true;
}

}  // namespace

long toeplitz_index(const ElementMatrix& u, int window) {
    const auto& model = u.model();
    if (model->action_rank != 1) throw Error("toeplitz_index needs a circle action");
    const auto basis = model->module_basis();
    const int deg = u.max_action_degree();
    if (window + deg > model->budget)
        throw BudgetOverflow("toeplitz window + deg(u) exceeds the budget");
    const ElementMatrix delta = u.adjoint() * u - ElementMatrix::identity(model, u.size());
    if (delta.norm_upper() > 1e-9 * std::max(1.0, u.norm_upper()))
        throw UnitarityViolated("toeplitz_index: u is not unitary");

    const int d = basis->size();
    const int n = u.size();
    std::vector<Eigen::Index> win;
    std::vector<int> win_ell;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const int ell = basis->items()[static_cast<size_t>(j)].action_chi[0];
            if (ell < 0 || ell > window) continue;
            win.push_back(static_cast<Eigen::Index>(i) * d + j);
            win_ell.push_back(ell);
        }
    const Matrix lam = basis->lambda(u);
    Matrix t(static_cast<Eigen::Index>(win.size()), static_cast<Eigen::Index>(win.size()));
    for (size_t r = 0; r < win.size(); ++r)
        for (size_t c = 0; c < win.size(); ++c)
            t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = lam(win[r], win[c]);

    Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = kRankTol;
    double smallest_retained = -1;
    std::vector<Eigen::Index> cand;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) < tol)
            cand.push_back(i);
        else
            smallest_retained = (smallest_retained < 0) ? s(i) : std::min(smallest_retained, s(i));
    }
    if (smallest_retained >= 0 && smallest_retained <= 10 * tol)
        throw GapTooSmall("toeplitz_index: smallest retained singular value too close to tol");

    auto bottom_mass = [&](const Vector& v) {
        double m = 0;
        for (size_t i = 0; i < win_ell.size(); ++i)
            if (win_ell[i] <= window / 2) m += std::norm(v(static_cast<Eigen::Index>(i)));
        return m;
    };
    long ker = 0, coker = 0;
    for (Eigen::Index i : cand) {
        if (bottom_mass(svd.matrixV().col(i)) > 0.5) ++ker;
        if (bottom_mass(svd.matrixU().col(i)) > 0.5) ++coker;
    }
    return ker - coker;
}

long toeplitz_index(const GradedElement& u, int window) {
    return toeplitz_index(ElementMatrix::from_element(u), window);
}

long winding_number(const GradedElement& u) {
    const auto& model = u.model();
    if (model->action_rank != 1) throw Error("winding_number needs a circle action");
    std::map<int, Cplx> coeffs;
    if (!scalar_coefficients(u, &coeffs))
        throw NotScalar("winding_number: coefficients are not scalar multiples of the unit");
    const int grid = 8 * (2 * model->budget + 1);
    std::vector<Cplx> vals(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) {
        Cplx v = 0;
        for (const auto& [ell, c] : coeffs) {
            const double ph = kTwoPi * ell * double(j) / grid;
            v += c * Cplx(std::cos(ph), std::sin(ph));
        }
        if (std::abs(std::abs(v) - 1.0) > 1e-6)
            throw PhaseUnwrapAmbiguous("winding_number: |u(g)| deviates from 1 by " +
                                       std::to_string(std::abs(std::abs(v) - 1.0)));
        vals[static_cast<size_t>(j)] = v;
    }
    double total = 0;
    for (int j = 0; j < grid; ++j)
        total += std::arg(vals[static_cast<size_t>((j + 1) % grid)] / vals[static_cast<size_t>(j)]);
    const double w = total / kTwoPi;
    const long rounded = std::lround(w);
    if (std::abs(w - double(rounded)) > 1e-6)
        throw PhaseUnwrapAmbiguous("winding_number: unwrapped phase is not an integer");
    return rounded;
}

// --- odd pairing ------------------------------------------------------------

PairingReport odd_pairing(const ElementMatrix& u, const DiracModel& dirac, int n_modes,
                          const FlowOptions& opt, std::optional<Cplx> c1, Picture picture) {
    if (dirac.k != 1) throw Error("odd_pairing needs a rank-1 Dirac model");
    const auto& model = u.model();
    const ElementMatrix delta = u.adjoint() * u - ElementMatrix::identity(model, u.size());
    if (delta.norm_upper() > 1e-9 * std::max(1.0, u.norm_upper()))
        throw UnitarityViolated("odd_pairing: u*u differs from 1 by " +
                                std::to_string(delta.norm_upper()));

    PairingReport rep;
    rep.n_modes = n_modes;
    rep.margin = u.max_action_degree();
    rep.picture = (picture == Picture::Module) ? "module" : "crossed";

    const ElementMatrix comm = dirac_commutator(u);
    rep.formula_value = (u.adjoint() * comm).trace();
    rep.calibration_constant = c1 ? *c1 : calibrate_constant(1);
    rep.calibrated_value = rep.calibration_constant * rep.formula_value;

    if (picture == Picture::Module) {
        rep.flow = spectral_flow_module(u, dirac, n_modes, opt);
    } else {
        if (u.size() != 1) throw Error("crossed-picture flow expects an unamplified unitary");
        rep.flow = spectral_flow_crossed(u.at(0, 0), dirac, n_modes, opt);
    }
    rep.flow_value = rep.flow.value;

    bool scalar = u.size() == 1 && scalar_coefficients(u.at(0, 0), nullptr);
    if (scalar)
        rep.oracle_value = winding_number(u.at(0, 0));
    else
        rep.oracle_value = -toeplitz_index(u, n_modes);

    rep.converged = false;
    const int deg = u.max_action_degree();
    if (picture == Picture::Module && 2 * n_modes + deg <= model->budget) {
        const FlowResult f2 = spectral_flow_module(u, dirac, 2 * n_modes, opt);
        rep.converged = std::abs(f2.value - rep.flow_value) < 1e-9;
    }
    return rep;
}

PairingReport odd_pairing(const GradedElement& u, const DiracModel& dirac, int n_modes,
                          const FlowOptions& opt, std::optional<Cplx> c1, Picture picture) {
    return odd_pairing(ElementMatrix::from_element(u), dirac, n_modes, opt, c1, picture);
}

// --- even machinery ---------------------------------------------------------

namespace {

// Dense coefficient table over the grading box [-R, R]^2 with block values on
// amplification (x) E; multiplication is grading convolution with the model's
// monomial phase.
struct Poly2 {
    int radius = 0;
    int block = 0;
    std::vector<Matrix> cells;

    Poly2(int r, int b)
        : radius(r), block(b),
          cells(static_cast<size_t>(2 * r + 1) * (2 * r + 1), Matrix::Zero(b, b)) {}

    Matrix& at(int m, int n) {
        return cells[static_cast<size_t>(m + radius) * (2 * radius + 1) + (n + radius)];
    }
    const Matrix& at(int m, int n) const {
        return cells[static_cast<size_t>(m + radius) * (2 * radius + 1) + (n + radius)];
    }
};

Cplx monomial_phase(const ActionModel& model, const Grading& g1, const Grading& g2) {
    return model.monomial_phase(g1, g2);
}

Poly2 poly_mul(const ActionModel& model, const Poly2& a, const Poly2& b, int out_radius) {
    Poly2 r(out_radius, a.block);
    for (int am = -a.radius; am <= a.radius; ++am)
        for (int an = -a.radius; an <= a.radius; ++an) {
            const Matrix& x = a.at(am, an);
            if (x.cwiseAbs().maxCoeff() == 0.0) continue;
            for (int bm = -b.radius; bm <= b.radius; ++bm)
                for (int bn = -b.radius; bn <= b.radius; ++bn) {
                    const Matrix& y = b.at(bm, bn);
                    if (y.cwiseAbs().maxCoeff() == 0.0) continue;
                    const int rm = am + bm, rn = an + bn;
                    if (std::abs(rm) > out_radius || std::abs(rn) > out_radius)
                        throw BudgetOverflow("even pairing: product grading leaves the window");
                    r.at(rm, rn) += monomial_phase(model, {am, an}, {bm, bn}) * x * y;
                }
        }
    return r;
}

// p as a Poly2 with the E factor tensored in, and the commutator [D, p].
void even_tables(const ElementMatrix& p, const DiracModel& dirac, int radius, Poly2* p_out,
                 Poly2* comm_out) {
    const int n = p.size();
    const int de = dirac.dim_e;
    Poly2 pp(radius, n * de), cc(radius, n * de);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& [chi, x] : p.at(i, j).components()) {
                if (std::abs(chi[0]) > radius || std::abs(chi[1]) > radius)
                    throw BudgetOverflow("even pairing: projection grading exceeds the window");
                const Cplx c = x(0, 0);
                Matrix weight = Matrix::Zero(de, de);
                for (size_t a = 0; a < dirac.clifford.size(); ++a)
                    weight -= kTwoPi * double(chi[a]) * dirac.clifford[a];
                for (int e = 0; e < de; ++e)
                    for (int f = 0; f < de; ++f) {
                        if (e == f) pp.at(chi[0], chi[1])(i * de + e, j * de + f) += c;
                        if (weight(e, f) != Cplx(0.0))
                            cc.at(chi[0], chi[1])(i * de + e, j * de + f) += c * weight(e, f);
                    }
            }
    *p_out = std::move(pp);
    *comm_out = std::move(cc);
}

Cplx even_raw_value(const ElementMatrix& p, const DiracModel& dirac) {
    const auto& model = *p.model();
    int radius = 0;
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < p.size(); ++j)
            for (const auto& [chi, x] : p.at(i, j).components())
                radius = std::max({radius, std::abs(chi[0]), std::abs(chi[1])});
    if (radius == 0) return 0.0;  // constant projections commute with D
    if (3 * radius > model.budget)
        throw BudgetOverflow("even pairing needs budget >= 3x the projection radius");
    Poly2 pt(1, 1), ct(1, 1);
    even_tables(p, dirac, radius, &pt, &ct);
    const Poly2 csq = poly_mul(model, ct, ct, 2 * radius);
    // tau picks the grading-(0,0) coefficient of p . [D,p]^2; supertrace over
    // E, plain trace over the amplification.
    const int n = p.size();
    const int de = dirac.dim_e;
    Cplx raw = 0;
    for (int m = -radius; m <= radius; ++m)
        for (int nn = -radius; nn <= radius; ++nn) {
            const Matrix& x = pt.at(m, nn);
            if (x.cwiseAbs().maxCoeff() == 0.0) continue;
            if (std::abs(m) > 2 * radius || std::abs(nn) > 2 * radius) continue;
            const Matrix& y = csq.at(-m, -nn);
            if (y.cwiseAbs().maxCoeff() == 0.0) continue;
            const Matrix prod = monomial_phase(model, {m, nn}, {-m, -nn}) * x * y;
            for (int i = 0; i < n; ++i)
                for (int e = 0; e < de; ++e)
                    for (int f = 0; f < de; ++f)
                        raw += prod(i * de + e, i * de + f) * dirac.chirality(f, e);
        }
    return raw;
}

int projection_radius(const ElementMatrix& p) {
    int radius = 0;
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < p.size(); ++j)
            for (const auto& [chi, x] : p.at(i, j).components())
                radius = std::max({radius, std::abs(chi[0]), std::abs(chi[1])});
    return radius;
}

std::string projection_fingerprint(const ElementMatrix& p) {
    std::ostringstream os;
    os.precision(15);
    os << p.size() << "|" << static_cast<const void*>(p.model().get());
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < p.size(); ++j)
            for (const auto& [chi, x] : p.at(i, j).components())
                os << ";" << chi[0] << "," << chi[1] << "," << x(0, 0).real() << ","
                   << x(0, 0).imag();
    return os.str();
}

long brute_force_at(const ElementMatrix& p, const DiracModel&, int n_modes) {
    // A constant projection commutes with the Dirac operator: the chiral
    // compression is grading-diagonal with |2 pi (m + i n)| on the range, so
    // kernel and cokernel both live at grading (0, 0) with the same rank.
    if (projection_radius(p) == 0) return 0;

    static std::mutex cache_mu;
    static std::map<std::pair<std::string, int>, long> cache;
    const std::pair<std::string, int> key(projection_fingerprint(p), n_modes);
    {
        std::scoped_lock lock(cache_mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const int n = p.size();
    const int w = 2 * n_modes + 1;
    const Eigen::Index dim = static_cast<Eigen::Index>(w) * w * n;

    // Compression of the (E-diagonal) projection to the mode window.
    Matrix phat = Matrix::Zero(dim, dim);
    auto slot = [&](int m, int nn, int i) {
        return (static_cast<Eigen::Index>(m + n_modes) * w + (nn + n_modes)) * n + i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& [chi, x] : p.at(i, j).components()) {
                const Cplx c = x(0, 0);
                for (int m = -n_modes; m <= n_modes; ++m)
                    for (int nn = -n_modes; nn <= n_modes; ++nn) {
                        const int mi = m + chi[0], ni = nn + chi[1];
                        if (std::abs(mi) > n_modes || std::abs(ni) > n_modes) continue;
                        phat(slot(mi, ni, i), slot(m, nn, j)) += c;
                    }
            }

    // Spectral rounding with a gap certificate around 1/2.
    EighResult es = eigh(phat);
    for (double lam : es.eigenvalues)
        if (std::abs(lam - 0.5) < 5e-3)
            throw GapTooSmall("brute_force_even_index: compressed projection has an eigenvalue " +
                              std::to_string(lam) + " near 1/2");
    Eigen::Index count = 0;
    for (double lam : es.eigenvalues)
        if (lam > 0.5) ++count;
    Matrix vsel(dim, count);
    {
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < dim; ++i)
            if (es.eigenvalues[static_cast<size_t>(i)] > 0.5) vsel.col(c++) = es.eigenvectors.col(i);
    }
    const Matrix rounded = vsel * vsel.adjoint();

    // Chiral block of the flat Dirac: grading (m, n) acts by -2 pi (m + i n).
    Matrix dplus = Matrix::Zero(dim, dim);
    for (int m = -n_modes; m <= n_modes; ++m)
        for (int nn = -n_modes; nn <= n_modes; ++nn)
            for (int i = 0; i < n; ++i)
                dplus(slot(m, nn, i), slot(m, nn, i)) = -kTwoPi * Cplx(m, nn);

    const Matrix f = rounded * dplus * rounded + (Matrix::Identity(dim, dim) - rounded);

    Eigen::BDCSVD<Matrix> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = kRankTol;
    double smallest_retained = -1;
    std::vector<Eigen::Index> cand;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) < tol)
            cand.push_back(i);
        else
            smallest_retained = (smallest_retained < 0) ? s(i) : std::min(smallest_retained, s(i));
    }
    if (smallest_retained >= 0 && smallest_retained <= 10 * tol)
        throw GapTooSmall("brute_force_even_index: kernel gap not certified");

    auto boundary_mass = [&](const Vector& v) {
        double m = 0;
        for (int a = -n_modes; a <= n_modes; ++a)
            for (int b = -n_modes; b <= n_modes; ++b) {
                if (std::max(std::abs(a), std::abs(b)) < n_modes - 1) continue;
                for (int i = 0; i < n; ++i) m += std::norm(v(slot(a, b, i)));
            }
        return m;
    };
    long ker = 0, coker = 0;
    for (Eigen::Index i : cand) {
        if (boundary_mass(svd.matrixV().col(i)) < 0.5) ++ker;
        if (boundary_mass(svd.matrixU().col(i)) < 0.5) ++coker;
    }
    const long result = ker - coker;
    std::scoped_lock lock(cache_mu);
    cache.emplace(key, result);
    return result;
}

}  // namespace

long brute_force_even_index(const ElementMatrix& p, const DiracModel& dirac, int n_modes) {
    if (dirac.k != 2) throw Error("brute_force_even_index needs the rank-2 Dirac model");
    const ElementMatrix delta = p * p - p;
    if (delta.norm_upper() > 1e-9 * std::max(1.0, p.norm_upper()))
        throw NotProjection("brute_force_even_index: p^2 differs from p by " +
                            std::to_string(delta.norm_upper()));
    const long a = brute_force_at(p, dirac, n_modes);
    const long b = brute_force_at(p, dirac, n_modes + 2);
    if (a != b)
        throw Unstable("brute_force_even_index: value changed under N -> N + 2 (" +
                       std::to_string(a) + " vs " + std::to_string(b) + ")");
    return a;
}

PairingReport even_pairing(const ElementMatrix& p, const ElementMatrix& q,
                           const DiracModel& dirac, int n_modes, std::optional<Cplx> c2) {
    if (dirac.k != 2) throw Error("even_pairing needs the rank-2 Dirac model");
    for (const ElementMatrix* pr : {&p, &q}) {
        const ElementMatrix dd = (*pr) * (*pr) - (*pr);
        if (dd.norm_upper() > 1e-9 * std::max(1.0, pr->norm_upper()))
            throw NotProjection("even_pairing: argument is not a projection (defect " +
                                std::to_string(dd.norm_upper()) + ")");
        const ElementMatrix sa = pr->adjoint() - (*pr);
        if (sa.norm_upper() > 1e-9)
            throw NotProjection("even_pairing: argument is not self-adjoint");
    }
    PairingReport rep;
    rep.n_modes = n_modes;
    rep.picture = "module";
    rep.formula_value = even_raw_value(p, dirac) - even_raw_value(q, dirac);
    rep.calibration_constant = c2 ? *c2 : calibrate_constant(2);
    rep.calibrated_value = rep.calibration_constant * rep.formula_value;
    rep.oracle_value =
        brute_force_even_index(p, dirac, n_modes) - brute_force_even_index(q, dirac, n_modes);
    // The even pairing carries no path flow; the report's flow slot mirrors
    // the integer oracle.
    rep.flow_value = double(rep.oracle_value);
    rep.converged = true;  // brute_force_even_index already certified N -> N+2
    return rep;
}

// --- calibration -------------------------------------------------------------

namespace {
std::mutex g_calib_mu;
std::map<int, Cplx> g_calib;
}  // namespace

Cplx calibrate_constant_fresh(int k, int example) {
    if (k == 1) {
        const auto model = rotation_circle(40);
        const int w = std::max(1, example);
        ElementMatrix u = ElementMatrix::from_element([&] {
            GradedElement z = model->generator("z");
            GradedElement acc = model->unit();
            for (int i = 0; i < w; ++i) acc = acc * z;
            return acc;
        }());
        const DiracModel dirac = DiracModel::circle();
        FlowOptions opt;
        const FlowResult f = spectral_flow_module(u, dirac, 16, opt);
        const ElementMatrix comm = dirac_commutator(u);
        const Cplx raw = (u.adjoint() * comm).trace();
        if (std::abs(raw) < 1e-12) throw Error("calibration: degenerate raw value");
        return Cplx(f.value) / raw;
    }
    if (k == 2) {
        const auto model = rotation_torus(92);
        BottOptions bo;
        ElementMatrix p = bott_projection(model, bo);
        if (example == 1) p = p.action({0.3, 0.7});
        const DiracModel dirac = DiracModel::torus();
        const long oracle = brute_force_even_index(p, dirac, 6);
        const Cplx raw = even_raw_value(p, dirac);
        if (std::abs(raw) < 1e-12) throw Error("calibration: degenerate raw value");
        return Cplx(double(oracle)) / raw;
    }
    throw Error("calibrate_constant: rank must be 1 or 2");
}

Cplx calibrate_constant(int k) {
    {
        std::scoped_lock lock(g_calib_mu);
        auto it = g_calib.find(k);
        if (it != g_calib.end()) return it->second;
    }
    const Cplx c = calibrate_constant_fresh(k, k == 1 ? 1 : 0);
    std::scoped_lock lock(g_calib_mu);
    auto [it, inserted] = g_calib.emplace(k, c);
    return it->second;  // single assignment: first writer wins
}

// --- summability --------------------------------------------------------------

SummabilityProfile summability_profile(const GradedElement& a, const DiracModel& dirac, double p,
                                       const std::vector<int>& n_list) {
    if (p <= 0) throw Error("summability_profile: p must be positive");
    if (dirac.k != 1) throw Error("summability_profile implemented for the circle Dirac");
    const double omega = dirac.omega(0, 0).real();
    const Cplx tau_a = a.trace();
    SummabilityProfile out;
    out.n_list = n_list;
    double prev = 0;
    for (int n : n_list) {
        double s = 0;
        for (int m = -n; m <= n; ++m) {
            const double lam = kTwoPi * m + omega;
            s += std::pow(1.0 + lam * lam, -p / 2.0);
        }
        const double val = std::abs(tau_a) * s;
        out.partial_sums.push_back(val);
        out.increments.push_back(val - prev);
        prev = val;
    }
    out.cauchy = true;
    for (size_t i = 2; i < out.increments.size(); ++i)
        if (out.increments[i] >= out.increments[i - 1]) out.cauchy = false;
    return out;
}

// --- dual-sequence check -------------------------------------------------------

PvReport pv_pairing_check(const GradedElement& u, const DiracModel& dirac, int n_modes,
                          const FlowOptions& opt) {
    PvReport out;
    out.winding = winding_number(u);
    out.pairing = odd_pairing(u, dirac, n_modes, opt);

    // Operator identity: D C(f) = C(f') with f'(m) carrying per-component
    // weight 2 pi (m - grading).
    const auto& model = u.model();
    const int small_n = std::min(n_modes, 12);
    CrossedElement f(model, small_n);
    f.set_mode(0, model->unit());
    f.set_mode(1, u * Cplx(0.5));
    f.set_mode(-2, u.adjoint() * Cplx(0.25));
    CrossedElement fprime(model, small_n);
    for (const auto& [m, coeff] : f.modes()) {
        GradedElement w(model);
        for (const auto& [chi, x] : coeff.components()) {
            const int ell = model->action_grading(chi)[0];
            w.add(chi, kTwoPi * double(m - ell) * x);
        }
        if (!w.empty()) fprime.set_mode(m, w);
    }
    const TruncatedOperator cf = regular_rep(f);
    const TruncatedOperator cfp = regular_rep(fprime);
    const TruncatedOperator d = dirac_matrix(model, dirac, small_n);
    const int margin = std::max(cf.margin(), 1);
    const auto idx = cf.interior_indices(margin);
    double dev = 0;
    const Matrix lhs = d.mat() * cf.mat();
    for (Eigen::Index r : idx)
        for (Eigen::Index c : idx) dev = std::max(dev, std::abs(lhs(r, c) - cfp.mat()(r, c)));
    out.operator_identity_deviation = dev;

    const double scale = std::max(1.0, operator_norm(cfp.mat()));
    out.consistent = (std::lround(out.pairing.flow_value) == out.winding) &&
                     (std::abs(out.pairing.calibrated_value - Cplx(double(out.winding))) <= 1e-6) &&
                     (dev <= 1e-10 * scale);
    return out;
}

std::string flow_csv(const FlowResult& flow) {
    std::ostringstream os;
    os << "t";
    if (!flow.eigenvalues.empty())
        for (size_t k = 0; k < flow.eigenvalues.front().size(); ++k) os << ",lambda_" << (k + 1);
    os << "\n";
    os.precision(17);
    for (size_t i = 0; i < flow.ts.size(); ++i) {
        os << flow.ts[i];
        for (double v : flow.eigenvalues[i]) os << "," << v;
        os << "\n";
    }
    return os.str();
}

}  // namespace torpair
