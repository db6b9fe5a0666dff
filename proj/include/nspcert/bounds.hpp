#pragma once

#include <cstdint>

#include "nspcert/ric_profile.hpp"
#include "nspcert/sparsity_function.hpp"

namespace nspcert {

/// Inputs of the null-space-constant bound: sparsity K, an order K0 >= K
/// with known delta_{2 K0} < 1.
struct NscBoundInput {
  int K = 1;
  int K0 = 1;
  double delta2K0 = 0.0;

  /// L' = 2 K0 - K + 1.
  int l_prime() const noexcept { return 2 * K0 - K + 1; }

  /// Throws ValidationError unless 1 <= K <= K0, DomainError unless
  /// 0 <= delta2K0 < 1 - 1e-15.
  void validate() const;
};

struct NscBoundResult {
  double c_prime = 0.0;
  double zeta = 0.0;
  double pi_f = 0.0;
  double gamma_star = 0.0;
  bool recoverable = true;  // gamma_star < 1
};

/// Which zeta the mixed-norm bound uses. `sharp` is the general composition
/// (max{2L', 3L' - 2 p1 L' + 1} numerator); `published` is the looser
/// closed form with numerator 3L' + 1.
enum class ZetaForm { sharp, published };

/// ((sqrt 2 + 1)/2) * delta / (1 - delta); DomainError unless 0 <= delta < 1.
double c_prime(double delta);

/// Upper bound gamma* = (K/L') g(zeta) on the null space constant.
///
/// zeta = L' (pi + beta) C' / (sqrt K sqrt(L'-1)), pi = max{alpha, 1/2 + 1/(2L')},
/// with (alpha, beta) = select_coefficients(f, 1, L').
NscBoundResult gamma_star(const SparsityFunction& f, const NscBoundInput& input,
                          ZetaForm form = ZetaForm::sharp);

/// The bound using every known RIC: the minimum of gamma_star over orders
/// K0' in [K, K0max] whose delta_{2 K0'} is present and below 1.
/// Returns +inf when no order qualifies.
double gamma_star_all_rics(const SparsityFunction& f, int K, const RicProfile& profile,
                           ZetaForm form = ZetaForm::sharp);

/// Closed forms of zeta for the specialized bounds.
double zeta_log_exp(int K, int K0, double delta);
double zeta_mixed_sharp(int K, int K0, double delta, double p1);
double zeta_mixed_published(int K, int K0, double delta);

/// log_exp covers lorentzian and concave_exp.
enum class BoundFamily { log_exp, mixed_norm };

BoundFamily bound_family_of(Family family);

/// RIC threshold below which every K-sparse vector is recovered:
///   1 / (1 + c(K,K0) (K/(K0+1))^{1/p}),
/// c = b (log_exp) or d (mixed_norm, p read as p2).
double ric_threshold(BoundFamily family, int K, int K0, double p);

/// Supremum of exponents p in [0,1] with p ln zeta < ln(L'/K); 1 when
/// zeta <= 1. The admissible set is open at the top: guaranteed recovery
/// needs p strictly below the returned value when it is < 1.
double max_p(BoundFamily family, int K, int K0, double delta);

/// Largest K in [1, K0] whose bound predicate holds, 0 if none. For
/// mixed_norm, `p` is p2 and `p1` the lower support point.
int max_k(BoundFamily family, int K0, double delta, double p, double p1 = 0.0);

/// Gaussian rows sufficient for delta_{2K0} < ric_bound with probability
/// 1 - epsilon: ceil(80.098 ric_bound^{-2} (K0 ln(N e / K0) + ln(2/epsilon))).
std::uint64_t gaussian_rows(int N, int K0, double epsilon, double ric_bound);

}  // namespace nspcert
