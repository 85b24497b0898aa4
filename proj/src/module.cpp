#include "torpair/module.hpp"

#include <algorithm>
#include <cmath>

#include "torpair/crossed.hpp"

namespace torpair {

namespace {

Cplx graded_pair(const ActionModel& model, const Grading& chi, const Matrix& x, const Matrix& y) {
    return model.tau0(model.compose(model.star(x, chi), -chi, y, chi));
}

}  // namespace

ModuleBasis::ModuleBasis(ModelPtr model) : model_(std::move(model)) {
    for (const Grading& chi : model_->grading_box()) {
        std::vector<Matrix> candidates;
        if (chi == Grading{0, 0}) candidates.push_back(Matrix::Identity(model_->dim, model_->dim));
        for (auto& m : model_->component_space(chi)) candidates.push_back(std::move(m));

        std::vector<Matrix> kept;
        for (Matrix& c : candidates) {
            for (const Matrix& b : kept) c -= graded_pair(*model_, chi, b, c) * b;
            for (const Matrix& b : kept) c -= graded_pair(*model_, chi, b, c) * b;
            const double n2 = std::abs(graded_pair(*model_, chi, c, c));
            if (n2 <= 1e-20) continue;
            kept.push_back(c / std::sqrt(n2));
        }
        for (Matrix& k : kept) {
            Item it;
            it.chi = chi;
            it.action_chi = model_->action_grading(chi);
            it.coeff = std::move(k);
            items_.push_back(std::move(it));
        }
    }
    for (const auto& it : items_) {
        bool zero = true;
        for (int l : it.action_chi) zero = zero && (l == 0);
        if (zero) ++fixed_count_;
    }
    // The unit is the first candidate of grading (0,0); locate its index.
    for (size_t i = 0; i < items_.size(); ++i) {
        if (items_[i].chi == Grading{0, 0}) {
            unit_index_ = static_cast<int>(i);
            break;
        }
    }
}

GradedElement ModuleBasis::element_of(int i) const {
    const Item& it = items_[static_cast<size_t>(i)];
    return GradedElement::component(model_, it.chi, it.coeff);
}

GradedElement ModuleBasis::element(const Vector& coords) const {
    GradedElement a(model_);
    for (int i = 0; i < size(); ++i) {
        const Cplx c = coords(i);
        if (c != Cplx(0.0)) a.add(items_[static_cast<size_t>(i)].chi, c * items_[static_cast<size_t>(i)].coeff);
    }
    return a;
}

Vector ModuleBasis::coords(const GradedElement& a) const {
    Vector v = Vector::Zero(size());
    for (int i = 0; i < size(); ++i) {
        const Item& it = items_[static_cast<size_t>(i)];
        auto comp = a.components().find(it.chi);
        if (comp == a.components().end()) continue;
        v(i) = graded_pair(*model_, it.chi, it.coeff, comp->second);
    }
    return v;
}

Matrix ModuleBasis::lambda(const GradedElement& a) const {
    Matrix m = Matrix::Zero(size(), size());
    for (int j = 0; j < size(); ++j) {
        const Item& bj = items_[static_cast<size_t>(j)];
        for (const auto& [g, x] : a.components()) {
            const Grading target = g + bj.chi;
            if (!model_->in_budget(target)) continue;  // compression to the truncation
            const Matrix prod = model_->compose(x, g, bj.coeff, bj.chi);
            for (int i = 0; i < size(); ++i) {
                const Item& bi = items_[static_cast<size_t>(i)];
                if (bi.chi != target) continue;
                m(i, j) += graded_pair(*model_, target, bi.coeff, prod);
            }
        }
    }
    return m;
}

Matrix ModuleBasis::lambda(const ElementMatrix& a) const {
    const int n = a.size();
    const int d = size();
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n) * d, static_cast<Eigen::Index>(n) * d);
    for (int bi = 0; bi < n; ++bi)
        for (int bj = 0; bj < n; ++bj) {
            if (a.at(bi, bj).empty()) continue;
            m.block(static_cast<Eigen::Index>(bi) * d, static_cast<Eigen::Index>(bj) * d, d, d) =
                lambda(a.at(bi, bj));
        }
    return m;
}

std::vector<int> ModuleBasis::indices_within(int cap) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        bool ok = true;
        for (int l : items_[static_cast<size_t>(i)].action_chi) ok = ok && std::abs(l) <= cap;
        if (ok) out.push_back(i);
    }
    return out;
}

int ModuleBasis::max_action_degree() const {
    int m = 0;
    for (const auto& it : items_)
        for (int l : it.action_chi) m = std::max(m, std::abs(l));
    return m;
}

HOperator theta(const GradedElement& v, const GradedElement& w) {
    const auto basis = v.model()->module_basis();
    HOperator op;
    op.basis = basis;
    op.finite_rank = true;
    op.mat = Matrix::Zero(basis->size(), basis->size());
    for (int j = 0; j < basis->size(); ++j) {
        const GradedElement img = v * w.inner_fixed(basis->element_of(j));
        op.mat.col(j) = basis->coords(img);
    }
    return op;
}

HOperator c_alpha(const CrossedElement& f) {
    const auto basis = f.model()->module_basis();
    HOperator op;
    op.basis = basis;
    op.mat = Matrix::Zero(basis->size(), basis->size());
    if (f.model()->action_rank != 1)
        throw Error("c_alpha requires a circle action");
    for (int j = 0; j < basis->size(); ++j) {
        const auto& it = basis->items()[static_cast<size_t>(j)];
        const GradedElement coeff = f.mode(-it.action_chi[0]);
        if (coeff.empty()) continue;
        const GradedElement img = coeff * basis->element_of(j);
        op.mat.col(j) = basis->coords(img);
    }
    return op;
}

HOperator transfer_operator(const TruncatedOperator& t) {
    const auto& basis = t.basis();
    const int n_modes = t.mode_bound();
    if (basis->max_action_degree() > n_modes)
        throw Error("transfer: mode range does not cover the basis gradings");
    const auto inv = invariance_check(t, {0.3184713375796178, 0.7296416938110749});
    if (!inv.invariant)
        throw NotInvariant("transfer: operator fails the invariance check, deviation " +
                           std::to_string(inv.max_deviation));
    const int d = basis->size();
    const int de = t.fiber_dim();
    Matrix u = Matrix::Zero(t.dim(), static_cast<Eigen::Index>(d) * de);
    for (int j = 0; j < d; ++j) {
        const int ell = basis->items()[static_cast<size_t>(j)].action_chi[0];
        for (int e = 0; e < de; ++e)
            u(t.index(-ell, j, e), static_cast<Eigen::Index>(j) * de + e) = 1.0;
    }
    HOperator op;
    op.basis = basis;
    op.amplification = de;
    op.mat = u.adjoint() * t.mat() * u;
    op.adjointable_checked = true;
    return op;
}

CompactnessReport saturation_by_compactness(const ModelPtr& model, int n_modes, int cap) {
    if (2 * cap > model->budget)
        throw BudgetOverflow("saturation_by_compactness needs budget >= 2L");
    const auto basis = model->module_basis();
    const int d = basis->size();
    const int mode_cap = std::min(n_modes, cap);

    CompactnessReport rep;
    rep.N = n_modes;
    rep.M = model->budget;
    rep.L = cap;

    // Elementary spanning family: mode m in the rank-appropriate box,
    // pure-graded coefficient, with |m| <= L and |g - m| <= L so that nothing
    // clips on the full module. The map of an elementary (m, c) reads the
    // action-grading -m slice and left-multiplies by c.
    std::vector<std::vector<int>> mode_box;
    if (model->action_rank == 1) {
        for (int m = -mode_cap; m <= mode_cap; ++m) mode_box.push_back({m});
    } else {
        for (int m = -mode_cap; m <= mode_cap; ++m)
            for (int n = -mode_cap; n <= mode_cap; ++n) mode_box.push_back({m, n});
    }

    struct Entry {
        std::vector<int> mode;
        Vector vec;
        bool zero;
    };
    std::vector<Entry> family;
    for (const auto& m : mode_box) {
        for (int cj = 0; cj < d; ++cj) {
            const auto& cit = basis->items()[static_cast<size_t>(cj)];
            bool admissible = true;
            for (size_t i = 0; i < m.size(); ++i) {
                const int g = cit.action_chi[i];
                admissible = admissible && std::abs(g - m[i]) <= cap && std::abs(g) <= 2 * cap;
            }
            if (!admissible) continue;
            const GradedElement coeff = basis->element_of(cj);
            Matrix op = Matrix::Zero(d, d);
            for (int j = 0; j < d; ++j) {
                const auto& it = basis->items()[static_cast<size_t>(j)];
                bool reads = true;
                for (size_t i = 0; i < m.size(); ++i)
                    reads = reads && (it.action_chi[i] == -m[i]);
                if (!reads) continue;
                op.col(j) = basis->coords(coeff * basis->element_of(j));
            }
            Entry e;
            e.mode = m;
            e.vec = Eigen::Map<const Vector>(op.data(), op.size());
            e.zero = op.cwiseAbs().maxCoeff() <= 1e-14;
            family.push_back(std::move(e));
        }
    }

    Matrix stacked(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(family.size()));
    for (size_t i = 0; i < family.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = family[i].vec;
    rep.singular_values = singular_values(stacked);
    if (rep.singular_values.size() > 32) rep.singular_values.resize(32);
    int nullity = 0;
    {
        const auto sv = singular_values(stacked);
        const int n = static_cast<int>(std::min(stacked.rows(), stacked.cols()));
        int below = 0;
        for (double s : sv)
            if (s < kRankTol) ++below;
        nullity = below + (static_cast<int>(stacked.cols()) - n > 0
                               ? static_cast<int>(stacked.cols()) - n
                               : 0);
    }
    rep.nullity = nullity;
    if (nullity > 0) {
        rep.verdict = CompactnessVerdict::NotInjective;
        for (const auto& e : family)
            if (e.zero) {
                rep.witness_mode = e.mode;
                break;
            }
        return rep;
    }

    // Image vs Theta span on the cap-L submodule.
    const auto capped = basis->indices_within(cap);
    auto compress_vec = [&](const Matrix& full) {
        Matrix c(static_cast<Eigen::Index>(capped.size()), static_cast<Eigen::Index>(capped.size()));
        for (size_t i = 0; i < capped.size(); ++i)
            for (size_t j = 0; j < capped.size(); ++j)
                c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    full(capped[i], capped[j]);
        return Vector(Eigen::Map<const Vector>(c.data(), c.size()));
    };

    std::vector<Vector> image_vecs;
    for (const auto& e : family) {
        Matrix full = Eigen::Map<const Matrix>(e.vec.data(), d, d);
        Vector v = compress_vec(full);
        if (v.norm() > 1e-14) image_vecs.push_back(v / v.norm());
    }
    std::vector<Vector> theta_vecs;
    for (int i : capped)
        for (int j : capped) {
            const HOperator th = theta(basis->element_of(i), basis->element_of(j));
            Vector v = compress_vec(th.mat);
            if (v.norm() > 1e-14) theta_vecs.push_back(v / v.norm());
        }

    auto rank_of = [&](const std::vector<Vector>& a, const std::vector<Vector>& b) {
        Matrix m(a.empty() && b.empty() ? 0 : (a.empty() ? b.front().size() : a.front().size()),
                 static_cast<Eigen::Index>(a.size() + b.size()));
        Eigen::Index c = 0;
        for (const auto& v : a) m.col(c++) = v;
        for (const auto& v : b) m.col(c++) = v;
        if (m.cols() == 0) return 0;
        int r = 0;
        for (double s : singular_values(m))
            if (s > kRankTol) ++r;
        return r;
    };
    rep.image_rank = rank_of(image_vecs, {});
    rep.theta_rank = rank_of(theta_vecs, {});
    rep.joint_rank = rank_of(image_vecs, theta_vecs);
    const bool equal = (rep.image_rank == rep.theta_rank) && (rep.joint_rank == rep.image_rank);
    rep.verdict = equal ? CompactnessVerdict::Iso : CompactnessVerdict::NotOntoCompacts;
    return rep;
}

}  // namespace torpair
