#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nspcert {

enum class Family { power, lorentzian, concave_exp, mixed_norm };

std::string_view to_string(Family family);

/// Parses "power", "lorentzian", "concave_exp" (also "concave-exp") and
/// "mixed_norm" (also "mixed-norm"). Throws ValidationError otherwise.
Family parse_family(std::string_view name);

/// Probability measure over exponents in (0,1) used by the mixed-norm family.
///
/// A uniform measure on [p1, p2] is discretized with 64-node Gauss-Legendre
/// quadrature; a discrete measure keeps its atoms as-is. Either way the
/// measure is represented by a finite list of (exponent, weight) nodes whose
/// weights sum to one.
class Measure {
 public:
  enum class Kind { uniform_interval, discrete_atoms };

  struct Atom {
    double exponent;
    double weight;
  };

  /// Requires 0 < p1 <= p2 < 1.
  static Measure uniform(double p1, double p2);

  /// Requires every exponent in (0,1), every weight > 0, weights summing to
  /// one within 1e-12.
  static Measure discrete(std::vector<Atom> atoms);

  Kind kind() const noexcept { return kind_; }

  /// Infimum and supremum of the support.
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  std::span<const Atom> nodes() const noexcept { return nodes_; }

 private:
  Measure(Kind kind, double p1, double p2, std::vector<Atom> nodes)
      : kind_(kind), p1_(p1), p2_(p2), nodes_(std::move(nodes)) {}

  Kind kind_;
  double p1_;
  double p2_;
  std::vector<Atom> nodes_;
};

struct ElasticityExtrema {
  double max;  // sup of x f'(x)/f(x) over x > 0
  double min;  // inf of the same
};

struct ScaleBounds {
  double lower;
  double upper;
};

/// An even, increasing, concave-on-(0,inf) penalty with f(0) = 0.
///
/// Built-in families, all evaluated at |x|:
///   power        |x|^p
///   lorentzian   ln(1 + |x|^p)
///   concave_exp  1 - exp(-|x|^p)
///   mixed_norm   E_nu[|x|^P],  P ~ nu
///
/// Values are immutable after construction and safe to share across threads.
class SparsityFunction {
 public:
  static SparsityFunction power(double p);
  static SparsityFunction lorentzian(double p);
  static SparsityFunction concave_exp(double p);
  static SparsityFunction mixed_norm(Measure measure);

  /// Builds one of the three single-exponent families.
  static SparsityFunction of_family(Family family, double p);

  Family family() const noexcept { return family_; }

  /// The exponent p of a single-exponent family; p2 for mixed_norm.
  double exponent() const noexcept { return p_; }

  /// Present only for mixed_norm.
  const std::optional<Measure>& measure() const noexcept { return measure_; }

  /// f(|x|).
  double operator()(double x) const { return eval(x); }
  double eval(double x) const;

  /// log f(e^log_x). Accepts log_x = -inf (returns -inf). Stays finite where
  /// f itself would underflow or saturate.
  double log_eval(double log_x) const;

  /// f'(x); throws DomainError for x <= 0.
  double deriv(double x) const;

  /// x >= 0 with f(x) = y. Throws DomainError for y < 0 or y >= sup f.
  double inverse(double y) const;

  /// Elasticity x f'(x) / f(x); throws DomainError for x <= 0.
  double elasticity(double x) const;

  ElasticityExtrema elasticity_extrema() const;

  /// Closed-form scale function g(y) = sup_{x>0} f(xy)/f(x).
  double scale(double y) const;

  /// Concavity-based lower and upper bounds on g(y); y > 0, y != 1.
  ScaleBounds scale_bounds(double y) const;

  /// inf{u in (0,1] : g(u) = 1}.
  double u_zero() const;

  /// sup of f over [0, inf); +inf for unbounded families.
  double supremum() const;

  /// True when x f'(x)/f(x) is non-increasing on (0, inf).
  bool has_nonincreasing_elasticity() const noexcept {
    return family_ != Family::mixed_norm;
  }

 private:
  SparsityFunction(Family family, double p, std::optional<Measure> measure)
      : family_(family), p_(p), measure_(std::move(measure)) {}

  Family family_;
  double p_;
  std::optional<Measure> measure_;
};

/// `n` log-spaced points from `lo` to `hi` inclusive (n >= 2, 0 < lo < hi).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// 2001 log-spaced points in [1e-9, 1e9].
std::vector<double> default_scale_grid();

/// Log-magnitude at which the x -> 0 and x -> inf limits are approximated.
/// Evaluation goes through log_eval, so these never under- or overflow.
inline constexpr double kLimitLogMagnitude = 1e8;

/// Numerical scale function: max of f(xy)/f(x) over `grid` and the two
/// limit proxies x = exp(-+kLimitLogMagnitude). `grid` must be non-empty,
/// positive and sorted.
double scale_numeric(const SparsityFunction& f, double y,
                     std::span<const double> grid);
double scale_numeric(const SparsityFunction& f, double y);

}  // namespace nspcert
