#pragma once

// Truncated torus-graded *-algebras. An element is a finite family of
// spectral components indexed by characters; the model supplies the
// composition rule, involution, invariant trace and degree budget.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "torpair/core.hpp"

namespace torpair {

// Character key. Rank-1 models use {n, 0}.
using Grading = std::array<int, 2>;

inline Grading grading1(int n) { return {n, 0}; }
inline Grading grading2(int m, int n) { return {m, n}; }
inline Grading operator+(const Grading& a, const Grading& b) {
    return {a[0] + b[0], a[1] + b[1]};
}
inline Grading operator-(const Grading& a, const Grading& b) {
    return {a[0] - b[0], a[1] - b[1]};
}
inline Grading operator-(const Grading& a) { return {-a[0], -a[1]}; }

class ActionModel;
class ModuleBasis;
using ModelPtr = std::shared_ptr<const ActionModel>;

class GradedElement {
  public:
    GradedElement() = default;
    explicit GradedElement(ModelPtr model) : model_(std::move(model)) {}

    static GradedElement component(ModelPtr model, const Grading& chi, Matrix coeff);

    const ModelPtr& model() const { return model_; }
    const std::map<Grading, Matrix>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }

    // Component at chi, or the zero matrix.
    Matrix at(const Grading& chi) const;

    void set(const Grading& chi, Matrix coeff);
    void add(const Grading& chi, const Matrix& coeff);
    void prune(double tol = 0.0);

    GradedElement operator+(const GradedElement& o) const;
    GradedElement operator-(const GradedElement& o) const;
    GradedElement operator*(const GradedElement& o) const;  // algebra product
    GradedElement operator*(Cplx s) const;
    GradedElement adjoint() const;

    // alpha_g; g is a point of the action torus given in [0,1)^k coordinates.
    GradedElement action(const std::vector<double>& g) const;
    GradedElement action(double g) const;  // rank-1 convenience

    // Projection onto the fixed-point part (keeps action-grading 0).
    GradedElement mean() const;

    // chi-spectral component w.r.t. the action grading.
    GradedElement spectral(const std::vector<int>& chi) const;
    GradedElement spectral(int chi) const;

    // <a,b> with values in the fixed-point algebra: mean(a* b).
    GradedElement inner_fixed(const GradedElement& b) const;

    // || sum_chi (1 + 4 pi^2 |chi|^2)^s (a_chi)* a_chi ||^{1/2}.
    double sobolev_norm(double s) const;

    Cplx trace() const;  // invariant trace tau
    Cplx gns_inner(const GradedElement& b) const;  // tau(a* b)
    double gns_norm() const;

    // Upper bound for the C*-norm: sum of component operator norms.
    double norm_upper() const;

    int max_action_degree() const;
    int max_internal_degree() const;

  private:
    ModelPtr model_;
    std::map<Grading, Matrix> comps_;
};

inline GradedElement operator*(Cplx s, const GradedElement& a) { return a * s; }

enum class ModelKind {
    Monomial,  // d = 1 coefficients; optional noncommutative phase twist
    Trivial,   // commutative d x d diagonal algebra, all gradings zero
    ZCrossed,  // M_r coefficients twisted by an inner automorphism Ad(V)
};

struct GeneratorSpec {
    std::string name;
    Grading grading;
    Matrix coeff;
};

// Immutable model; construct through the factories in models.hpp.
class ActionModel : public std::enable_shared_from_this<ActionModel> {
  public:
    ActionModel() = default;
    // Copies the structure; the derived-basis cache starts fresh.
    ActionModel(const ActionModel& o);
    ActionModel& operator=(const ActionModel&) = delete;

    ModelKind kind = ModelKind::Monomial;
    int internal_rank = 1;  // rank of the grading lattice of the components
    int action_rank = 1;    // rank of the acting torus
    // Collapse map for restricted actions: action grading = direction . chi.
    // Identity when internal_rank == action_rank.
    std::array<int, 2> direction = {1, 0};
    int dim = 1;     // ambient coefficient dimension d
    int budget = 0;  // degree budget M (per internal coordinate, sup norm)

    // Monomial twist  U1 U2 = e^{2 pi i theta} U2 U1; exact when rational.
    bool theta_rational = true;
    long theta_num = 0;
    long theta_den = 1;
    double theta_value = 0.0;

    Matrix twist;  // ZCrossed: the unitary V implementing beta

    std::vector<GeneratorSpec> generators;
    std::string name;       // preset name
    std::string relations;  // descriptive string, parseable on reload

    // --- structure maps -------------------------------------------------
    bool in_budget(const Grading& chi) const;
    // Coefficient-level product of x at gx with y at gy; lands at gx + gy.
    Matrix compose(const Matrix& x, const Grading& gx, const Matrix& y, const Grading& gy) const;
    // Coefficient of the adjoint: component gx contributes at -gx.
    Matrix star(const Matrix& x, const Grading& gx) const;
    // Structure phase of monomial products (1 for commutative models).
    Cplx monomial_phase(const Grading& gx, const Grading& gy) const;
    // tau restricted to the grading-0 coefficient space.
    Cplx tau0(const Matrix& x) const;

    std::vector<int> action_grading(const Grading& chi) const;
    bool action_grading_zero(const Grading& chi) const;
    double action_phase(const Grading& chi, const std::vector<double>& g) const;

    // Basis of the admissible coefficient space at chi (empty if none).
    std::vector<Matrix> component_space(const Grading& chi) const;
    // All gradings with a nonempty coefficient space, sorted.
    std::vector<Grading> grading_box() const;

    GradedElement unit() const;
    GradedElement zero() const;
    GradedElement generator(const std::string& name) const;
    GradedElement scalar(Cplx c) const;

    // tau-orthonormal graded basis of the truncation (cached).
    std::shared_ptr<const ModuleBasis> module_basis() const;

  private:
    mutable std::mutex basis_mu_;
    mutable std::shared_ptr<const ModuleBasis> basis_cache_;
};

// n x n matrix of graded elements over one model (matrix amplification).
class ElementMatrix {
  public:
    ElementMatrix() = default;
    ElementMatrix(ModelPtr model, int n);
    static ElementMatrix from_element(const GradedElement& a);  // 1x1
    static ElementMatrix identity(ModelPtr model, int n);

    int size() const { return n_; }
    const ModelPtr& model() const { return model_; }
    GradedElement& at(int i, int j) { return e_[i * n_ + j]; }
    const GradedElement& at(int i, int j) const { return e_[i * n_ + j]; }

    ElementMatrix operator+(const ElementMatrix& o) const;
    ElementMatrix operator-(const ElementMatrix& o) const;
    ElementMatrix operator*(const ElementMatrix& o) const;
    ElementMatrix operator*(Cplx s) const;
    ElementMatrix adjoint() const;
    ElementMatrix action(const std::vector<double>& g) const;

    Cplx trace() const;          // block trace then tau
    double norm_upper() const;   // max row sum of component norm bounds
    int max_action_degree() const;

  private:
    ModelPtr model_;
    int n_ = 0;
    std::vector<GradedElement> e_;
};

// --- word-generated subspaces and the saturation checker -----------------

// Spanning set of the fixed-point part generated by words of length <= L in
// the generators and their adjoints; linearly independent after rank
// reduction. Words whose partial products leave the budget are not elements
// of the truncation and are pruned.
std::vector<GradedElement> fixed_point_basis(const ModelPtr& model, int word_length);

// Same enumeration restricted to net action grading chi.
std::vector<GradedElement> spectral_subspace_basis(const ModelPtr& model,
                                                   const std::vector<int>& chi,
                                                   int word_length);

enum class SaturationVerdict { SaturatedAtTruncation, Unsaturated };

struct SaturationCharacterReport {
    std::vector<int> chi;
    bool subspace_empty = false;
    int product_rank = 0;
    int fixed_rank = 0;
    bool saturated = false;
    std::vector<double> singular_values;  // of the stacked product coordinates
};

struct SaturationReport {
    SaturationVerdict verdict = SaturationVerdict::Unsaturated;
    std::vector<int> witness;  // first failing character (when unsaturated)
    std::vector<SaturationCharacterReport> characters;
    int chi_range = 0;
    int word_length = 0;
};

// Rieffel criterion at truncation: for every character chi in the box
// |chi_i| <= chi_range, span{a* b : a, b in A(chi)} must fill the
// fixed-point part (word length 2L on the fixed side, L per factor).
SaturationReport saturation_check(const ModelPtr& model, int chi_range, int word_length);

// Stack coordinates of elements (graded components flattened) and return the
// certified rank; basis of the span as a byproduct.
int span_rank(const std::vector<GradedElement>& elems, double tol = kRankTol);

}  // namespace torpair
