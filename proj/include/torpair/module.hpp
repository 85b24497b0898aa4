#pragma once

// The Hilbert module H(A) at truncation: a tau-orthonormal graded basis of
// the algebra, operators in that basis, rank-one Theta operators, the
// representation C_alpha of the crossed product, and the
// saturation <-> compactness verdict.

#include <memory>
#include <vector>

#include "torpair/graded.hpp"

namespace torpair {

class CrossedElement;
class TruncatedOperator;

// tau-orthonormal basis of the truncated algebra, graded by character.
// The unit is always the first grading-0 item; gradings are enumerated in
// lexicographic order so coordinates are reproducible.
class ModuleBasis {
  public:
    struct Item {
        Grading chi;
        std::vector<int> action_chi;
        Matrix coeff;
    };

    explicit ModuleBasis(ModelPtr model);

    const ModelPtr& model() const { return model_; }
    const std::vector<Item>& items() const { return items_; }
    int size() const { return static_cast<int>(items_.size()); }
    int unit_index() const { return unit_index_; }
    // Number of action-grading-zero items; the tau-dimension of the
    // fixed-point part, used to normalize semifinite flow weights.
    int fixed_count() const { return fixed_count_; }

    GradedElement element_of(int i) const;
    GradedElement element(const Vector& coords) const;
    Vector coords(const GradedElement& a) const;

    // Left multiplication compressed to the truncation.
    Matrix lambda(const GradedElement& a) const;
    // Block version for amplified elements; index (i * size() + j).
    Matrix lambda(const ElementMatrix& a) const;

    // Indices whose action grading has sup norm <= cap.
    std::vector<int> indices_within(int cap) const;

    int max_action_degree() const;

  private:
    ModelPtr model_;
    std::vector<Item> items_;
    int unit_index_ = 0;
    int fixed_count_ = 0;
};

struct HOperator {
    std::shared_ptr<const ModuleBasis> basis;
    int amplification = 1;
    Matrix mat;
    bool finite_rank = false;
    bool adjointable_checked = false;
};

// Theta_{v,w}: x |-> v <w, x>_{A^alpha}. Rank one over the fixed-point
// algebra; Theta_{v,w}* = Theta_{w,v}.
HOperator theta(const GradedElement& v, const GradedElement& w);

// C_alpha(f): a |-> sum_k fhat(-k) a_k on the truncated module.
HOperator c_alpha(const CrossedElement& f);

// Compression of an invariant operator on the mode-truncated L^2(G,A) to the
// invariant subspace identified with H(A). Requires invariance and a mode
// range covering every basis grading.
HOperator transfer_operator(const TruncatedOperator& t);

enum class CompactnessVerdict { Iso, NotInjective, NotOntoCompacts };

struct CompactnessReport {
    CompactnessVerdict verdict = CompactnessVerdict::Iso;
    int nullity = 0;
    int image_rank = 0;
    int theta_rank = 0;
    int joint_rank = 0;
    std::vector<int> witness_mode;  // a mode acting as zero, when not injective
    std::vector<double> singular_values;
    int N = 0;
    int M = 0;
    int L = 0;
};

// Certifies whether f |-> C_alpha(f) is injective on the elementary spanning
// family (modes |m|_inf <= L, coefficient gradings g with |g - m|_inf <= L)
// and whether its image compressed to the cap-L submodule matches the span of
// the Theta operators over the cap-L basis. Works for circle and torus
// actions; torus modes iterate over the square box.
CompactnessReport saturation_by_compactness(const ModelPtr& model, int N, int L);

}  // namespace torpair
