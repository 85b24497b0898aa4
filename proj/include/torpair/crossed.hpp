#pragma once

// The truncated crossed product A x T (circle actions): Fourier-mode
// convolution algebra, the regular representation as block matrices on the
// mode-truncated module, invariance checking, the dual action, heat
// smoothing and the trace Tr_tau.

#include <map>
#include <memory>
#include <vector>

#include "torpair/graded.hpp"
#include "torpair/module.hpp"

namespace torpair {

// Finite Fourier series with algebra-valued coefficients, |mode| <= N.
class CrossedElement {
  public:
    CrossedElement() = default;
    CrossedElement(ModelPtr model, int n_modes);

    const ModelPtr& model() const { return model_; }
    int mode_bound() const { return N_; }
    const std::map<int, GradedElement>& modes() const { return modes_; }
    bool clipped() const { return clipped_; }
    void set_clipped(bool c) { clipped_ = c; }

    GradedElement mode(int m) const;
    void set_mode(int m, GradedElement a);     // throws on |m| > N
    void add_mode(int m, const GradedElement& a);  // clips with flag on |m| > N
    void prune(double tol = 0.0);

    CrossedElement operator+(const CrossedElement& o) const;
    CrossedElement operator-(const CrossedElement& o) const;
    CrossedElement operator*(Cplx s) const;

    // Convolution involution; modes pushed past N are clipped (flagged).
    CrossedElement adjoint() const;

    int max_coeff_degree() const;  // largest |action grading| among coefficients
    double norm_upper() const;     // max over modes of coefficient norm bounds

  private:
    ModelPtr model_;
    int N_ = 0;
    std::map<int, GradedElement> modes_;
    bool clipped_ = false;
};

// (f1 * f2)(p) = sum_m f1hat(m) . [f2hat(p)]_{grading p-m}.
CrossedElement convolve(const CrossedElement& f1, const CrossedElement& f2);

// Dual action generator: mode shift by n, clipped with flag.
CrossedElement dual_action(const CrossedElement& f, int n);

// Left convolution with the heat kernel: coefficient component of vertical
// frequency v = p - grading gets weight e^{-4 pi^2 v^2 t} (zero when the
// kernel mode |v| exceeds the truncation).
CrossedElement heat_smooth(const CrossedElement& f, double t);

// Tr_tau(C(f)) = tau(sum_m fhat(m)).
Cplx crossed_trace(const CrossedElement& f);

// The function g |-> a alpha_g(b*): mode ell coefficient a . (b*)_ell.
CrossedElement fin_element(const GradedElement& a, const GradedElement& b, int n_modes);

// Block operator on the mode-truncated module (+f |m| <= N) (x) fiber E.
// Index layout: ((m + N) * basis.size() + j) * dim_e + e.
class TruncatedOperator {
  public:
    TruncatedOperator() = default;
    TruncatedOperator(std::shared_ptr<const ModuleBasis> basis, int n_modes, int dim_e,
                      int margin);

    const std::shared_ptr<const ModuleBasis>& basis() const { return basis_; }
    int mode_bound() const { return N_; }
    int fiber_dim() const { return dimE_; }
    int margin() const { return margin_; }
    void set_margin(int m) { margin_ = m; }

    Matrix& mat() { return mat_; }
    const Matrix& mat() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

    Eigen::Index index(int mode, int item, int e) const;
    // Rows/cols restricted to |mode| <= N - margin; a positive grading margin
    // additionally drops fiber slots whose action grading sits within that
    // distance of the degree budget (left-multiplication blocks are compressed
    // there).
    Matrix interior(int margin = -1, int grading_margin = 0) const;
    std::vector<Eigen::Index> interior_indices(int margin = -1, int grading_margin = 0) const;

  private:
    std::shared_ptr<const ModuleBasis> basis_;
    int N_ = 0;
    int dimE_ = 1;
    int margin_ = 0;
    Matrix mat_;
};

// C(f) tensored with the identity on a dim_e fiber. Margin = max coefficient
// degree of f.
TruncatedOperator regular_rep(const CrossedElement& f, int dim_e = 1);

// Multiplication by alpha^{-1}(a) (the embedding of A into the invariant
// operators); margin = max action degree of a.
TruncatedOperator multiplication_operator(const GradedElement& a,
                                          std::shared_ptr<const ModuleBasis> basis, int n_modes,
                                          int dim_e = 1);

// The mode-shift unitary S implementing the dual action; top mode clipped.
Matrix mode_shift_matrix(const ModuleBasis& basis, int n_modes, int dim_e = 1);

struct InvarianceResult {
    bool invariant = false;
    double max_deviation = 0.0;
};

// Conjugates by the diagonal action at each sample point and compares on
// interior indices; invariant iff max deviation < 1e-9 ||T||.
InvarianceResult invariance_check(const TruncatedOperator& t,
                                  const std::vector<double>& samples);

// CSV rows "q,m,norm" with the operator norm of each mode block.
std::string block_norm_csv(const TruncatedOperator& t);

}  // namespace torpair
