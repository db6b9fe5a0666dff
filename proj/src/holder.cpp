#include "nspcert/holder.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nspcert/errors.hpp"
#include "nspcert/numeric.hpp"

namespace nspcert {
namespace {

constexpr double kSlack = 1e-9;

void require_q_s(double q, int s) {
  if (!(q >= 1.0)) throw ValidationError("q must be >= 1");
  if (s < 1) throw ValidationError("s must be a positive integer");
}

// Points in (0, u0): half log-spaced from 1e-12 u0, half uniform, both
// stopping short of u0 itself.
std::vector<double> condition_grid(double u0, int grid_size) {
  const int half = std::max(grid_size / 2, 1);
  std::vector<double> grid = log_grid(1e-12 * u0, u0 * (1.0 - 1e-12), half);
  for (int i = 1; i <= grid_size - half; ++i) {
    grid.push_back(u0 * static_cast<double>(i) / (grid_size - half + 1));
  }
  return grid;
}

}  // namespace

HolderCoefficients select_coefficients(const SparsityFunction& f, double q, int s) {
  require_q_s(q, s);
  HolderCoefficients c{q, s, 0.0, 0.0};
  switch (f.family()) {
    case Family::lorentzian:
    case Family::concave_exp:
      c.beta = std::pow(1.0 - 1.0 / s, 1.0 / q);
      c.alpha = 1.0 - c.beta;
      break;
    case Family::power:
      c.alpha = f.exponent() / q;
      c.beta = 1.0 - c.alpha;
      break;
    case Family::mixed_norm:
      c.alpha = f.measure()->p1() / q;
      c.beta = 1.0 - c.alpha;
      break;
  }
  return c;
}

bool verify_coefficients(const SparsityFunction& f, const HolderCoefficients& c,
                         int grid_size) {
  if (grid_size < 100) throw ValidationError("grid_size must be >= 100");
  if (c.alpha < 0.0 || c.beta < 0.0) return false;
  if (c.alpha + c.beta < 1.0 - 1e-12) return false;

  const double u0 = f.u_zero();
  if (u0 == 0.0) {
    return c.beta >= std::pow(1.0 - 1.0 / c.s, 1.0 / c.q) - 1e-12;
  }
  for (double u : condition_grid(u0, grid_size)) {
    const double ratio = f.scale(u) / std::pow(c.alpha * u + c.beta, c.q);
    if (ratio > 1.0 + kSlack) return false;
  }
  return true;
}

HolderCoefficients refine_coefficients(const SparsityFunction& f, double q, int s,
                                       int grid_size) {
  HolderCoefficients best = select_coefficients(f, q, s);
  double lo = 0.0;
  double hi = best.beta;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const HolderCoefficients trial{q, s, 1.0 - mid, mid};
    if (verify_coefficients(f, trial, grid_size)) {
      hi = mid;
      best = trial;
    } else {
      lo = mid;
    }
  }
  return best;
}

double generalized_mean(const SparsityFunction& f, std::span<const double> a) {
  if (a.empty()) throw ValidationError("generalized mean of an empty vector");
  const double s = static_cast<double>(a.size());
  if (f.family() == Family::concave_exp) {
    // 1 - mean f = mean exp(-|a|^p); invert via (-log(.))^{1/p}.
    const double p = f.exponent();
    std::vector<double> logs(a.size());
    std::transform(a.begin(), a.end(), logs.begin(),
                   [p](double v) { return -std::pow(std::abs(v), p); });
    const double log_complement = log_sum_exp(logs) - std::log(s);
    return std::pow(-log_complement, 1.0 / p);
  }
  double total = 0.0;
  for (double v : a) total += f.eval(v);
  return f.inverse(total / s);
}

bool check_holder_inequality(const SparsityFunction& f, const HolderCoefficients& c,
                             std::span<const double> a) {
  if (static_cast<int>(a.size()) != c.s) {
    throw ValidationError("vector length " + std::to_string(a.size()) +
                          " does not match s = " + std::to_string(c.s));
  }
  double q_sum = 0.0;
  double sup = 0.0;
  for (double v : a) {
    q_sum += std::pow(std::abs(v), c.q);
    sup = std::max(sup, std::abs(v));
  }
  const double q_mean = std::pow(q_sum / c.s, 1.0 / c.q);
  const double f_mean = generalized_mean(f, a);
  const double upper = c.alpha * f_mean + c.beta * sup;
  return f_mean <= q_mean * (1.0 + kSlack) && q_mean <= upper * (1.0 + kSlack);
}

}  // namespace nspcert
