#include "nspcert/sparsity_function.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nspcert/errors.hpp"
#include "nspcert/numeric.hpp"

namespace nspcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this value of u = p ln x, ln(1 + e^u) and 1 - exp(-e^u) equal e^u to
// double precision, so log f(x) = u - e^u / 2 is exact enough.
constexpr double kSmallArgument = -30.0;

void require_exponent(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ValidationError("exponent p must lie in (0,1], got " +
                          std::to_string(p));
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::power:
      return "power";
    case Family::lorentzian:
      return "lorentzian";
    case Family::concave_exp:
      return "concave_exp";
    case Family::mixed_norm:
      return "mixed_norm";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "power") return Family::power;
  if (name == "lorentzian") return Family::lorentzian;
  if (name == "concave_exp" || name == "concave-exp") return Family::concave_exp;
  if (name == "mixed_norm" || name == "mixed-norm") return Family::mixed_norm;
  throw ValidationError("unknown family '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Measure

Measure Measure::uniform(double p1, double p2) {
  if (!(p1 > 0.0 && p1 <= p2 && p2 < 1.0)) {
    throw ValidationError("uniform measure needs 0 < p1 <= p2 < 1");
  }
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  const double mid = 0.5 * (p1 + p2);
  const double half = 0.5 * (p2 - p1);

  std::vector<Atom> nodes;
  nodes.reserve(2 * abscissa.size());
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    // The rule integrates over [-1,1]; halving the weights normalizes it.
    nodes.push_back({mid - half * abscissa[i], 0.5 * weights[i]});
    nodes.push_back({mid + half * abscissa[i], 0.5 * weights[i]});
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Atom& a, const Atom& b) { return a.exponent < b.exponent; });
  return Measure(Kind::uniform_interval, p1, p2, std::move(nodes));
}

Measure Measure::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ValidationError("discrete measure needs atoms");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.exponent > 0.0 && a.exponent < 1.0)) {
      throw ValidationError("atom exponents must lie in (0,1)");
    }
    if (!(a.weight > 0.0)) throw ValidationError("atom weights must be > 0");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("atom weights must sum to 1");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.exponent < b.exponent; });
  const double p1 = atoms.front().exponent;
  const double p2 = atoms.back().exponent;
  return Measure(Kind::discrete_atoms, p1, p2, std::move(atoms));
}

// ---------------------------------------------------------------------------
// SparsityFunction

SparsityFunction SparsityFunction::power(double p) {
  require_exponent(p);
  return SparsityFunction(Family::power, p, std::nullopt);
}

SparsityFunction SparsityFunction::lorentzian(double p) {
  require_exponent(p);
  return SparsityFunction(Family::lorentzian, p, std::nullopt);
}

SparsityFunction SparsityFunction::concave_exp(double p) {
  require_exponent(p);
  return SparsityFunction(Family::concave_exp, p, std::nullopt);
}

SparsityFunction SparsityFunction::mixed_norm(Measure measure) {
  const double p2 = measure.p2();
  return SparsityFunction(Family::mixed_norm, p2, std::move(measure));
}

SparsityFunction SparsityFunction::of_family(Family family, double p) {
  switch (family) {
    case Family::power:
      return power(p);
    case Family::lorentzian:
      return lorentzian(p);
    case Family::concave_exp:
      return concave_exp(p);
    case Family::mixed_norm:
      break;
  }
  throw ValidationError("mixed_norm needs a measure, not a single exponent");
}

double SparsityFunction::eval(double x) const {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  switch (family_) {
    case Family::power:
      return std::pow(a, p_);
    case Family::lorentzian:
      return std::log1p(std::pow(a, p_));
    case Family::concave_exp:
      return -std::expm1(-std::pow(a, p_));
    case Family::mixed_norm: {
      const double log_a = std::log(a);
      double sum = 0.0;
      for (const auto& node : measure_->nodes()) {
        sum += node.weight * std::exp(node.exponent * log_a);
      }
      return sum;
    }
  }
  return 0.0;
}

double SparsityFunction::log_eval(double log_x) const {
  if (log_x == -kInf) return -kInf;
  switch (family_) {
    case Family::power:
      return p_ * log_x;
    case Family::lorentzian: {
      const double u = p_ * log_x;
      if (u < kSmallArgument) return u - 0.5 * std::exp(u);
      if (u > -kSmallArgument) return std::log(u + std::log1p(std::exp(-u)));
      return std::log(std::log1p(std::exp(u)));
    }
    case Family::concave_exp: {
      const double u = p_ * log_x;
      if (u < kSmallArgument) return u - 0.5 * std::exp(u);
      return std::log(-std::expm1(-std::exp(u)));
    }
    case Family::mixed_norm: {
      const auto nodes = measure_->nodes();
      std::vector<double> terms(nodes.size());
      std::transform(nodes.begin(), nodes.end(), terms.begin(),
                     [log_x](const Measure::Atom& node) {
                       return std::log(node.weight) + node.exponent * log_x;
                     });
      return log_sum_exp(terms);
    }
  }
  return 0.0;
}

double SparsityFunction::deriv(double x) const {
  if (!(x > 0.0)) throw DomainError("derivative needs x > 0");
  switch (family_) {
    case Family::power:
      return p_ * std::pow(x, p_ - 1.0);
    case Family::lorentzian: {
      const double w = std::pow(x, p_);
      return p_ * std::pow(x, p_ - 1.0) / (1.0 + w);
    }
    case Family::concave_exp: {
      const double w = std::pow(x, p_);
      return p_ * std::pow(x, p_ - 1.0) * std::exp(-w);
    }
    case Family::mixed_norm: {
      const double log_x = std::log(x);
      double sum = 0.0;
      for (const auto& node : measure_->nodes()) {
        sum += node.weight * node.exponent *
               std::exp((node.exponent - 1.0) * log_x);
      }
      return sum;
    }
  }
  return 0.0;
}

double SparsityFunction::inverse(double y) const {
  if (!(y >= 0.0)) throw DomainError("inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  switch (family_) {
    case Family::power:
      return std::pow(y, 1.0 / p_);
    case Family::lorentzian:
      return std::pow(std::expm1(y), 1.0 / p_);
    case Family::concave_exp:
      if (y >= 1.0) {
        throw DomainError("inverse: y must be below sup f = 1");
      }
      return std::pow(-std::log1p(-y), 1.0 / p_);
    case Family::mixed_norm:
      break;
  }
  if (!std::isfinite(y)) throw DomainError("inverse: y must be finite");

  // f is strictly increasing and unbounded: bracket by doubling, then bisect
  // down to adjacent doubles.
  double lo = 0.0;
  double hi = 1.0;
  while (eval(hi) < y) {
    lo = hi;
    hi *= 2.0;
  }
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (eval(mid) < y ? lo : hi) = mid;
  }
  return std::abs(eval(lo) - y) < std::abs(eval(hi) - y) ? lo : hi;
}

double SparsityFunction::elasticity(double x) const {
  if (!(x > 0.0)) throw DomainError("elasticity needs x > 0");
  switch (family_) {
    case Family::power:
      return p_;
    case Family::lorentzian: {
      const double w = std::exp(p_ * std::log(x));
      if (w == 0.0) return p_;
      if (!std::isfinite(w)) return 0.0;
      return p_ * w / ((1.0 + w) * std::log1p(w));
    }
    case Family::concave_exp: {
      const double w = std::exp(p_ * std::log(x));
      if (w == 0.0) return p_;
      if (w > 700.0) return p_ * w * std::exp(-w);
      return p_ * w / std::expm1(w);
    }
    case Family::mixed_norm: {
      // Ratio of E[P x^P] to E[x^P], with the weights shifted in log space.
      const double log_x = std::log(x);
      const auto nodes = measure_->nodes();
      double peak = -kInf;
      for (const auto& node : nodes) {
        peak = std::max(peak, std::log(node.weight) + node.exponent * log_x);
      }
      double num = 0.0;
      double den = 0.0;
      for (const auto& node : nodes) {
        const double w =
            std::exp(std::log(node.weight) + node.exponent * log_x - peak);
        num += node.exponent * w;
        den += w;
      }
      return num / den;
    }
  }
  return 0.0;
}

ElasticityExtrema SparsityFunction::elasticity_extrema() const {
  switch (family_) {
    case Family::power:
      return {p_, p_};
    case Family::lorentzian:
    case Family::concave_exp:
      return {p_, 0.0};
    case Family::mixed_norm:
      return {measure_->p2(), measure_->p1()};
  }
  return {0.0, 0.0};
}

double SparsityFunction::scale(double y) const {
  if (!(y >= 0.0)) throw DomainError("scale needs y >= 0");
  if (y == 0.0) return 0.0;
  switch (family_) {
    case Family::power:
      return std::pow(y, p_);
    case Family::lorentzian:
    case Family::concave_exp:
      return y <= 1.0 ? 1.0 : std::pow(y, p_);
    case Family::mixed_norm:
      return y <= 1.0 ? std::pow(y, measure_->p1()) : std::pow(y, measure_->p2());
  }
  return 0.0;
}

ScaleBounds SparsityFunction::scale_bounds(double y) const {
  if (!(y > 0.0) || y == 1.0) {
    throw DomainError("scale bounds need y > 0 and y != 1");
  }
  const auto [max_el, min_el] = elasticity_extrema();
  if (y > 1.0) {
    return {1.0 / (1.0 + (1.0 - y) * min_el / y), 1.0 + (y - 1.0) * max_el};
  }
  return {1.0 / (1.0 + (1.0 - y) * max_el / y), 1.0 + (y - 1.0) * min_el};
}

double SparsityFunction::u_zero() const {
  switch (family_) {
    case Family::lorentzian:
    case Family::concave_exp:
      return 0.0;
    case Family::power:
    case Family::mixed_norm:
      return 1.0;
  }
  return 1.0;
}

double SparsityFunction::supremum() const {
  return family_ == Family::concave_exp ? 1.0 : kInf;
}

// ---------------------------------------------------------------------------

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && lo < hi) || n < 2) {
    throw ValidationError("log grid needs 0 < lo < hi and n >= 2");
  }
  std::vector<double> grid(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(a + step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_scale_grid() { return log_grid(1e-9, 1e9, 2001); }

double scale_numeric(const SparsityFunction& f, double y,
                     std::span<const double> grid) {
  if (!(y > 0.0)) throw DomainError("scale_numeric needs y > 0");
  if (grid.empty() || !(grid.front() > 0.0) || !strictly_increasing(grid)) {
    throw ValidationError("grid must be non-empty, positive and sorted");
  }
  const double log_y = std::log(y);
  auto ratio_at = [&](double log_x) {
    return std::exp(f.log_eval(log_x + log_y) - f.log_eval(log_x));
  };
  double best = std::max(ratio_at(-kLimitLogMagnitude), ratio_at(kLimitLogMagnitude));
  for (double x : grid) best = std::max(best, ratio_at(std::log(x)));
  return best;
}

double scale_numeric(const SparsityFunction& f, double y) {
  static const std::vector<double> grid = default_scale_grid();
  return scale_numeric(f, y, grid);
}

}  // namespace nspcert
