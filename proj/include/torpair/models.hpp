#pragma once

// Constructors for the example algebras with their canonical actions,
// traces and generators, plus the Bott projection used by the even pairing.

#include <optional>
#include <string>

#include "torpair/graded.hpp"

namespace torpair {

// C(T) truncated at Fourier degree M, rotation action, tau = Haar integral.
ModelPtr rotation_circle(int degree_budget);

// Rotation model whose generator carries grading `speed` (grading parity
// obstructions for speed > 1); speed = 2 is the standard counterexample.
ModelPtr speed_circle(int degree_budget, int speed);

// Commutative algebra of functions on `points` points (diagonal matrices)
// with the trivial circle action.
ModelPtr trivial_action(int points);

struct Rational {
    long num = 0;
    long den = 1;
};

// Noncommutative torus: U1 U2 = e^{2 pi i theta} U2 U1, T^2 action, monomial
// basis within the budget box; exact integer phase arithmetic when rational.
ModelPtr nc_torus(Rational theta, int degree_budget);
ModelPtr nc_torus(double theta, int degree_budget);

// theta = 0 instance: commutative C(T^2).
ModelPtr rotation_torus(int degree_budget);

// Rank-1 view of a rank-2 model: action grading (a, b) . chi. The component
// lattice stays two-dimensional; only the acting torus collapses.
ModelPtr restrict_to_circle(const ModelPtr& model, int a, int b);

// B x_beta Z truncation for B = M_r and beta = Ad(V): basis b s^n with the
// covariance rule s b s^{-1} = V b V*; dual circle action grades by n.
ModelPtr z_crossed_product(const Matrix& v, int degree_budget);
// r = 2 example twist used by the presets.
ModelPtr z_crossed_example(int degree_budget);

struct BottOptions {
    double gap_parameter = 1.4;  // the mass term of the degree-1 sphere map
    int radius = 30;             // grading truncation radius
    int grid = 256;              // sampling grid per circle factor
};

// Rank-one projection in M_2(C(T^2)) with unit Chern class: the normalized
// sphere map (sin 2pix, sin 2piy, u - cos 2pix - cos 2piy) fed through the
// line-bundle formula p = (1 + n.sigma)/2, Fourier-truncated at the given
// radius. The dominant gradings sit in {-1,0,1}^2; the truncated tail keeps
// ||p^2 - p|| <= 1e-12 at the default radius.
ElementMatrix bott_projection(const ModelPtr& model, const BottOptions& opt = {});

// diag(1, 0): the reference trivial projection of the same rank.
ElementMatrix trivial_projection(const ModelPtr& model, int n = 2);

// sup-norm of an amplified element of a commutative monomial model,
// evaluated pointwise on a grid.
double commutative_sup_norm(const ElementMatrix& a, int grid = 128);

struct ModelParams {
    std::string name;
    int degree_budget = 8;
    std::optional<Rational> theta_rational;
    std::optional<double> theta_float;
    int points = 5;
    int direction_a = 1;
    int direction_b = 0;
};

// Preset registry addressable from the CLI and the serialization layer.
ModelPtr make_model(const ModelParams& params);
std::vector<std::string> model_presets();

}  // namespace torpair
