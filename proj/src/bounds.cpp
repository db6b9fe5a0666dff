#include "nspcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nspcert/errors.hpp"
#include "nspcert/holder.hpp"

namespace nspcert {
namespace {

constexpr double kSqrt2PlusOne = std::numbers::sqrt2 + 1.0;

void require_orders(int K, int K0) {
  if (K < 1 || K0 < K) {
    throw ValidationError("orders must satisfy 1 <= K <= K0 (K=" + std::to_string(K) +
                          ", K0=" + std::to_string(K0) + ")");
  }
}

void require_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p must lie in (0,1]");
}

// Common denominator 2 sqrt(K) sqrt(L'-1) of the closed-form zetas.
double zeta_denominator(int K, int l_prime) {
  return 2.0 * std::sqrt(static_cast<double>(K)) *
         std::sqrt(static_cast<double>(l_prime - 1));
}

double zeta_for(BoundFamily family, int K, int K0, double delta) {
  return family == BoundFamily::log_exp ? zeta_log_exp(K, K0, delta)
                                        : zeta_mixed_published(K, K0, delta);
}

}  // namespace

void NscBoundInput::validate() const {
  require_orders(K, K0);
  c_prime(delta2K0);
}

double c_prime(double delta) {
  if (!(delta >= 0.0 && delta < 1.0 - 1e-15)) {
    throw DomainError("delta must lie in [0,1)");
  }
  return 0.5 * kSqrt2PlusOne * delta / (1.0 - delta);
}

NscBoundResult gamma_star(const SparsityFunction& f, const NscBoundInput& input,
                          ZetaForm form) {
  input.validate();
  const int l_prime = input.l_prime();
  const double lp = static_cast<double>(l_prime);

  NscBoundResult r;
  r.c_prime = c_prime(input.delta2K0);
  const HolderCoefficients c = select_coefficients(f, 1.0, l_prime);
  r.pi_f = std::max(c.alpha, 0.5 + 0.5 / lp);
  if (f.family() == Family::mixed_norm && form == ZetaForm::published) {
    r.zeta = zeta_mixed_published(input.K, input.K0, input.delta2K0);
  } else {
    r.zeta = 2.0 * lp * (r.pi_f + c.beta) * r.c_prime /
             zeta_denominator(input.K, l_prime);
  }
  r.gamma_star = static_cast<double>(input.K) / lp * f.scale(r.zeta);
  r.recoverable = r.gamma_star < 1.0;
  return r;
}

double gamma_star_all_rics(const SparsityFunction& f, int K, const RicProfile& profile,
                           ZetaForm form) {
  if (K < 1) throw ValidationError("K must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [order, delta] : profile.entries()) {
    if (order % 2 != 0 || order / 2 < K || !(delta < 1.0 - 1e-15)) continue;
    const NscBoundInput input{K, order / 2, delta};
    best = std::min(best, gamma_star(f, input, form).gamma_star);
  }
  return best;
}

double zeta_log_exp(int K, int K0, double delta) {
  require_orders(K, K0);
  const int l_prime = 2 * K0 - K + 1;
  return (3.0 * l_prime - 1.0) / zeta_denominator(K, l_prime) * c_prime(delta);
}

double zeta_mixed_sharp(int K, int K0, double delta, double p1) {
  require_orders(K, K0);
  const double lp = 2.0 * K0 - K + 1.0;
  const double numerator = std::max(2.0 * lp, 3.0 * lp - 2.0 * p1 * lp + 1.0);
  return numerator / zeta_denominator(K, 2 * K0 - K + 1) * c_prime(delta);
}

double zeta_mixed_published(int K, int K0, double delta) {
  require_orders(K, K0);
  const int l_prime = 2 * K0 - K + 1;
  return (3.0 * l_prime + 1.0) / zeta_denominator(K, l_prime) * c_prime(delta);
}

BoundFamily bound_family_of(Family family) {
  switch (family) {
    case Family::lorentzian:
    case Family::concave_exp:
      return BoundFamily::log_exp;
    case Family::mixed_norm:
      return BoundFamily::mixed_norm;
    case Family::power:
      break;
  }
  throw ValidationError("power has no specialized RIC/p/K bound; use mixed_norm");
}

double ric_threshold(BoundFamily family, int K, int K0, double p) {
  require_orders(K, K0);
  require_p(p);
  const double correction = 1.0 / (2.0 * K0 - K + 1.0);
  const double c = (family == BoundFamily::log_exp ? 3.0 - correction : 3.0 + correction) *
                   kSqrt2PlusOne / 4.0;
  const double ratio = static_cast<double>(K) / (K0 + 1.0);
  return 1.0 / (1.0 + c * std::pow(ratio, 1.0 / p));
}

double max_p(BoundFamily family, int K, int K0, double delta) {
  const double zeta = zeta_for(family, K, K0, delta);
  if (zeta <= 1.0) return 1.0;
  const double target = std::log((2.0 * K0 - K + 1.0) / K);
  return std::min(1.0, target / std::log(zeta));
}

int max_k(BoundFamily family, int K0, double delta, double p, double p1) {
  if (K0 < 1) throw ValidationError("K0 must be >= 1");
  require_p(p);
  if (family == BoundFamily::mixed_norm && !(p1 > 0.0 && p1 <= p)) {
    throw ValidationError("mixed_norm needs 0 < p1 <= p2");
  }
  c_prime(delta);
  int best = 0;
  for (int K = 1; K <= K0; ++K) {
    const double lp = 2.0 * K0 - K + 1.0;
    const double zeta = zeta_for(family, K, K0, delta);
    double g = 0.0;
    if (family == BoundFamily::log_exp) {
      g = zeta <= 1.0 ? 1.0 : std::pow(zeta, p);
    } else {
      g = zeta <= 1.0 ? std::pow(zeta, p1) : std::pow(zeta, p);
    }
    if (K / lp * g < 1.0) best = K;
  }
  return best;
}

std::uint64_t gaussian_rows(int N, int K0, double epsilon, double ric_bound) {
  if (K0 < 1 || K0 > N) throw ValidationError("need 1 <= K0 <= N");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0,1)");
  }
  if (!(ric_bound > 0.0 && ric_bound <= 1.0)) {
    throw ValidationError("ric_bound must lie in (0,1]");
  }
  const double log_term = K0 * std::log(N * std::numbers::e / K0) + std::log(2.0 / epsilon);
  return static_cast<std::uint64_t>(std::ceil(80.098 / (ric_bound * ric_bound) * log_term));
}

}  // namespace nspcert
