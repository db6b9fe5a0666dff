#pragma once

#include <span>

#include "nspcert/sparsity_function.hpp"

namespace nspcert {

/// Coefficients of the generalized Hölder-type inequality
///
///   M_f(a) <= |a|_q / s^{1/q} <= alpha * M_f(a) + beta * |a|_inf,
///
/// where M_f(a) = f^{-1}(sum_j f(a_j) / s) is the generalized f-mean of a
/// length-s vector. Admissible pairs satisfy alpha + beta >= 1 and, depending
/// on u0 = inf{u in (0,1] : g(u) = 1}, either beta >= (1 - 1/s)^{1/q}
/// (u0 = 0) or sup_{u in (0,u0)} g(u) / (alpha u + beta)^q <= 1 (u0 > 0).
struct HolderCoefficients {
  double q = 1.0;
  int s = 1;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Default grid size for the sup over (0, u0).
inline constexpr int kHolderGridSize = 10'000;

/// The closed-form admissible pair for each built-in family:
///   u0 = 0 (lorentzian, concave_exp): beta = (1-1/s)^{1/q}, alpha = 1-beta
///   power:      alpha = p/q,  beta = 1 - p/q
///   mixed_norm: alpha = p1/q, beta = 1 - p1/q
HolderCoefficients select_coefficients(const SparsityFunction& f, double q, int s);

/// Checks all three admissibility conditions; condition 3 is evaluated on a
/// mixed log/linear grid of `grid_size` points over (0, u0) with 1e-9 slack.
bool verify_coefficients(const SparsityFunction& f, const HolderCoefficients& c,
                         int grid_size = kHolderGridSize);

/// Shrinks beta (keeping alpha + beta = 1) by bisection for as long as the
/// pair stays admissible. Starts from select_coefficients.
HolderCoefficients refine_coefficients(const SparsityFunction& f, double q, int s,
                                       int grid_size = kHolderGridSize);

/// f^{-1}(sum_j f(|a_j|) / s). For concave_exp the mean is taken on
/// exp(-|a|^p) in log space, so saturated entries do not lose precision.
double generalized_mean(const SparsityFunction& f, std::span<const double> a);

/// Both sides of the inequality for |a|, with 1e-9 relative slack.
/// Throws ValidationError if a.size() != c.s.
bool check_holder_inequality(const SparsityFunction& f, const HolderCoefficients& c,
                             std::span<const double> a);

}  // namespace nspcert
