#include "torpair/crossed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace torpair {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CrossedElement::CrossedElement(ModelPtr model, int n_modes)
    : model_(std::move(model)), N_(n_modes) {
    if (model_ && model_->action_rank != 1)
        throw Error("crossed elements require a circle action");
}

GradedElement CrossedElement::mode(int m) const {
    auto it = modes_.find(m);
    if (it != modes_.end()) return it->second;
    return GradedElement(model_);
}

void CrossedElement::set_mode(int m, GradedElement a) {
    if (std::abs(m) > N_) throw Error("mode outside the truncation");
    modes_[m] = std::move(a);
}

void CrossedElement::add_mode(int m, const GradedElement& a) {
    if (a.empty()) return;
    if (std::abs(m) > N_) {
        clipped_ = true;
        return;
    }
    auto it = modes_.find(m);
    if (it == modes_.end())
        modes_[m] = a;
    else
        it->second = it->second + a;
}

void CrossedElement::prune(double tol) {
    for (auto it = modes_.begin(); it != modes_.end();) {
        it->second.prune(tol);
        if (it->second.empty())
            it = modes_.erase(it);
        else
            ++it;
    }
}

CrossedElement CrossedElement::operator+(const CrossedElement& o) const {
    CrossedElement r = *this;
    if (!r.model_) {
        r.model_ = o.model_;
        r.N_ = o.N_;
    }
    for (const auto& [m, a] : o.modes_) r.add_mode(m, a);
    r.clipped_ = clipped_ || o.clipped_;
    return r;
}

CrossedElement CrossedElement::operator-(const CrossedElement& o) const {
    return *this + o * Cplx(-1.0);
}

CrossedElement CrossedElement::operator*(Cplx s) const {
    CrossedElement r = *this;
    for (auto& [m, a] : r.modes_) a = a * s;
    return r;
}

CrossedElement CrossedElement::adjoint() const {
    CrossedElement r(model_, N_);
    for (const auto& [m, a] : modes_) {
        const GradedElement astar = a.adjoint();
        for (const auto& [chi, x] : astar.components()) {
            const int ell = model_->action_grading(chi)[0];
            r.add_mode(m + ell, GradedElement::component(model_, chi, x));
        }
    }
    r.clipped_ = r.clipped_ || clipped_;
    return r;
}

int CrossedElement::max_coeff_degree() const {
    int d = 0;
    for (const auto& [m, a] : modes_)
        if (!a.empty()) d = std::max(d, a.max_action_degree());
    return d;
}

double CrossedElement::norm_upper() const {
    double n = 0;
    for (const auto& [m, a] : modes_) n = std::max(n, a.norm_upper());
    return n;
}

CrossedElement convolve(const CrossedElement& f1, const CrossedElement& f2) {
    if (f1.model() != f2.model() || f1.mode_bound() != f2.mode_bound())
        throw Error("convolve: operands must share model and truncation");
    const auto& model = f1.model();
    CrossedElement r(model, f1.mode_bound());
    r.set_clipped(f1.clipped() || f2.clipped());
    for (const auto& [p, a2] : f2.modes()) {
        GradedElement acc(model);
        for (const auto& [chi, y] : a2.components()) {
            const int ell = model->action_grading(chi)[0];
            const int m = p - ell;
            if (std::abs(m) > f1.mode_bound()) continue;  // kernel outside truncation
            const GradedElement left = f1.mode(m);
            if (left.empty()) continue;
            acc = acc + left * GradedElement::component(model, chi, y);
        }
        acc.prune(0.0);
        if (!acc.empty()) r.add_mode(p, acc);
    }
    return r;
}

CrossedElement dual_action(const CrossedElement& f, int n) {
    CrossedElement r(f.model(), f.mode_bound());
    for (const auto& [m, a] : f.modes()) r.add_mode(m + n, a);
    return r;
}

CrossedElement heat_smooth(const CrossedElement& f, double t) {
    if (t <= 0) throw Error("heat_smooth: t must be positive");
    const auto& model = f.model();
    CrossedElement r(model, f.mode_bound());
    for (const auto& [p, a] : f.modes()) {
        GradedElement w(model);
        for (const auto& [chi, x] : a.components()) {
            const int v = p - model->action_grading(chi)[0];
            if (std::abs(v) > f.mode_bound()) continue;
            const double weight = std::exp(-kTwoPi * kTwoPi * double(v) * v * t);
            w.add(chi, weight * x);
        }
        w.prune(0.0);
        if (!w.empty()) r.add_mode(p, w);
    }
    return r;
}

Cplx crossed_trace(const CrossedElement& f) {
    Cplx s = 0;
    for (const auto& [m, a] : f.modes()) s += a.trace();
    return s;
}

CrossedElement fin_element(const GradedElement& a, const GradedElement& b, int n_modes) {
    CrossedElement r(a.model(), n_modes);
    const GradedElement bstar = b.adjoint();
    for (const auto& [chi, x] : bstar.components()) {
        const int ell = a.model()->action_grading(chi)[0];
        r.add_mode(ell, a * GradedElement::component(a.model(), chi, x));
    }
    return r;
}

// --- TruncatedOperator ------------------------------------------------------

TruncatedOperator::TruncatedOperator(std::shared_ptr<const ModuleBasis> basis, int n_modes,
                                     int dim_e, int margin)
    : basis_(std::move(basis)), N_(n_modes), dimE_(dim_e), margin_(margin) {
    const Eigen::Index d = static_cast<Eigen::Index>(2 * N_ + 1) * basis_->size() * dimE_;
    mat_ = Matrix::Zero(d, d);
}

Eigen::Index TruncatedOperator::index(int mode, int item, int e) const {
    return (static_cast<Eigen::Index>(mode + N_) * basis_->size() + item) * dimE_ + e;
}

std::vector<Eigen::Index> TruncatedOperator::interior_indices(int margin,
                                                              int grading_margin) const {
    if (margin < 0) margin = margin_;
    const int budget = basis_->model()->budget;
    std::vector<Eigen::Index> idx;
    for (int m = -(N_ - margin); m <= N_ - margin; ++m)
        for (int j = 0; j < basis_->size(); ++j) {
            bool ok = true;
            for (int l : basis_->items()[static_cast<size_t>(j)].action_chi)
                ok = ok && std::abs(l) <= budget - grading_margin;
            if (!ok) continue;
            for (int e = 0; e < dimE_; ++e) idx.push_back(index(m, j, e));
        }
    return idx;
}

Matrix TruncatedOperator::interior(int margin, int grading_margin) const {
    const auto idx = interior_indices(margin, grading_margin);
    Matrix r(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j)
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mat_(idx[i], idx[j]);
    return r;
}

TruncatedOperator regular_rep(const CrossedElement& f, int dim_e) {
    const auto basis = f.model()->module_basis();
    TruncatedOperator t(basis, f.mode_bound(), dim_e, f.max_coeff_degree());
    const int d = basis->size();
    const int n = f.mode_bound();
    for (const auto& [m, a] : f.modes()) {
        for (const auto& [chi, x] : a.components()) {
            const int ell = f.model()->action_grading(chi)[0];
            const int q = m - ell;
            if (std::abs(q) > n) continue;
            const Matrix block = basis->lambda(GradedElement::component(f.model(), chi, x));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (block(i, j) == Cplx(0.0)) continue;
                    for (int e = 0; e < dim_e; ++e)
                        t.mat()(t.index(q, i, e), t.index(m, j, e)) += block(i, j);
                }
        }
    }
    return t;
}

TruncatedOperator multiplication_operator(const GradedElement& a,
                                          std::shared_ptr<const ModuleBasis> basis, int n_modes,
                                          int dim_e) {
    TruncatedOperator t(std::move(basis), n_modes, dim_e,
                        a.empty() ? 0 : a.max_action_degree());
    const auto& bs = *t.basis();
    const int d = bs.size();
    for (const auto& [chi, x] : a.components()) {
        const int ell = a.model()->action_grading(chi)[0];
        const Matrix block = bs.lambda(GradedElement::component(a.model(), chi, x));
        for (int m = -n_modes; m <= n_modes; ++m) {
            const int q = m - ell;
            if (std::abs(q) > n_modes) continue;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (block(i, j) == Cplx(0.0)) continue;
                    for (int e = 0; e < dim_e; ++e)
                        t.mat()(t.index(q, i, e), t.index(m, j, e)) += block(i, j);
                }
        }
    }
    return t;
}

Matrix mode_shift_matrix(const ModuleBasis& basis, int n_modes, int dim_e) {
    const Eigen::Index d = static_cast<Eigen::Index>(2 * n_modes + 1) * basis.size() * dim_e;
    Matrix s = Matrix::Zero(d, d);
    const Eigen::Index stride = static_cast<Eigen::Index>(basis.size()) * dim_e;
    for (int m = -n_modes; m <= n_modes - 1; ++m) {
        const Eigen::Index src = static_cast<Eigen::Index>(m + n_modes) * stride;
        const Eigen::Index dst = static_cast<Eigen::Index>(m + 1 + n_modes) * stride;
        for (Eigen::Index k = 0; k < stride; ++k) s(dst + k, src + k) = 1.0;
    }
    return s;
}

InvarianceResult invariance_check(const TruncatedOperator& t,
                                  const std::vector<double>& samples) {
    if (samples.empty()) throw Error("invariance_check: need at least one sample point");
    const auto& basis = *t.basis();
    const int d = basis.size();
    const int n = t.mode_bound();
    const auto idx = t.interior_indices();

    InvarianceResult res;
    const double scale = operator_norm(t.mat());
    for (double g : samples) {
        // R^alpha_g is diagonal: phase 2 pi (m + action grading) g per slot.
        Eigen::VectorXd phases(t.dim());
        for (int m = -n; m <= n; ++m)
            for (int j = 0; j < d; ++j) {
                const double ph = kTwoPi * g * (m + basis.items()[static_cast<size_t>(j)].action_chi[0]);
                for (int e = 0; e < t.fiber_dim(); ++e)
                    phases(t.index(m, j, e)) = ph;
            }
        double dev = 0;
        for (Eigen::Index a : idx)
            for (Eigen::Index b : idx) {
                const Cplx v = t.mat()(a, b);
                if (v == Cplx(0.0)) continue;
                const double ph = phases(a) - phases(b);
                dev = std::max(dev, std::abs(v * Cplx(std::cos(ph), std::sin(ph)) - v));
            }
        res.max_deviation = std::max(res.max_deviation, dev);
    }
    res.invariant = res.max_deviation < 1e-9 * std::max(scale, 1e-300);
    return res;
}

std::string block_norm_csv(const TruncatedOperator& t) {
    std::ostringstream os;
    os << "q,m,block_norm\n";
    const Eigen::Index stride = static_cast<Eigen::Index>(t.basis()->size()) * t.fiber_dim();
    const int n = t.mode_bound();
    for (int q = -n; q <= n; ++q)
        for (int m = -n; m <= n; ++m) {
            const Matrix block = t.mat().block(static_cast<Eigen::Index>(q + n) * stride,
                                               static_cast<Eigen::Index>(m + n) * stride, stride,
                                               stride);
            const double norm = block.cwiseAbs().maxCoeff();
            if (norm > 0) os << q << "," << m << "," << operator_norm(block) << "\n";
        }
    return os.str();
}

}  // namespace torpair
