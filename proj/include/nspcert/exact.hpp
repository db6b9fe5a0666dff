#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nspcert/ric_profile.hpp"
#include "nspcert/sparsity_function.hpp"

namespace nspcert {

/// Dense M x N measurement matrix with finite entries and N >= M.
class SensingMatrix {
 public:
  explicit SensingMatrix(Eigen::MatrixXd entries);

  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

  /// Copy with every column scaled to unit Euclidean norm (zero columns kept).
  SensingMatrix column_normalized() const;

 private:
  Eigen::MatrixXd entries_;
};

/// CSV layout: first line "M,N", then M lines of N comma-separated values.
SensingMatrix read_matrix_csv(std::istream& in);
SensingMatrix read_matrix_csv_file(const std::string& path);
void write_matrix_csv(std::ostream& out, const SensingMatrix& m);

/// A vector spanning a one-dimensional null space plus its magnitudes sorted
/// non-increasing (stable, so equal magnitudes keep their index order).
struct NullSpaceVector {
  Eigen::VectorXd z;
  std::vector<double> z_plus;

  static NullSpaceVector from_vector(Eigen::VectorXd z);
};

/// Unit-norm kernel vector of an M x (M+1) full-row-rank matrix, sign chosen
/// so that the largest-magnitude entry is positive. Throws ValidationError if
/// N != M+1 or the rank is below M ("null space dimension exceeds 1").
NullSpaceVector null_space_vector(const SensingMatrix& m);

/// Controls for the subset enumerations.
struct EnumerationOptions {
  std::uint64_t budget = 10'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Extreme eigenvalues of the K-column sub-Gram matrices: the smallest
/// lambda_min and the largest lambda_max over all supports |S| = K.
struct GramExtremes {
  double lambda_min;
  double lambda_max;
};

/// Exhaustive enumeration of supports, eigenvalues from cyclic Jacobi.
/// Throws BudgetExceeded when binomial(N, K) exceeds the budget.
GramExtremes gram_extremes(const SensingMatrix& m, int K, const EnumerationOptions& options = {});

/// Restricted isometry constant of order K:
/// max(lambda_max - 1, 1 - lambda_min) over all supports |S| = K.
double ric(const SensingMatrix& m, int K, const EnumerationOptions& options = {});

/// Restricted isometry constant of c * m for the best scale c > 0:
/// (lambda_max - lambda_min) / (lambda_max + lambda_min). The null space,
/// and with it every null space constant, does not depend on c, so any RIC
/// bound may be applied with this value. It is below 1 whenever every
/// K columns are independent.
double scaled_ric(const SensingMatrix& m, int K, const EnumerationOptions& options = {});

/// delta_K for K = 1..max_order.
RicProfile ric_profile(const SensingMatrix& m, int max_order,
                       const EnumerationOptions& options = {});
RicProfile scaled_ric_profile(const SensingMatrix& m, int max_order,
                              const EnumerationOptions& options = {});

/// Smallest number of linearly dependent columns (numerical rank test with
/// singular-value tolerance 1e-10 times the largest). std::nullopt when no
/// subset of columns is dependent ("full spark").
std::optional<int> spark(const SensingMatrix& m, const EnumerationOptions& options = {});

/// Null space constant for a one-dimensional kernel and the power,
/// lorentzian and concave_exp families with exponent p:
///   sum_{i<=K} (z+_i)^p / sum_{i>K} (z+_i)^p   (+inf if the tail is zero).
double exact_nsc_power(const NullSpaceVector& z, int K, double p);

/// r(t) = sum_{i<=K} f(t z+_i) / sum_{i>K} f(t z+_i), evaluated in log space.
double nsc_ratio(const SparsityFunction& f, std::span<const double> z_plus, int K,
                 double t);

/// 4001 log-spaced points in [1e-12, 1e12].
std::vector<double> default_nsc_grid();

/// sup_t r(t) over `t_grid` and the t -> 0 limit proxy t = exp(-kLimitLogMagnitude).
double exact_nsc_numeric(const SparsityFunction& f, const NullSpaceVector& z, int K,
                         std::span<const double> t_grid);
double exact_nsc_numeric(const SparsityFunction& f, const NullSpaceVector& z, int K);

}  // namespace nspcert
