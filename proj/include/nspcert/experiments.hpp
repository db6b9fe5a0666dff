#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nspcert/exact.hpp"
#include "nspcert/ric_profile.hpp"
#include "nspcert/sparsity_function.hpp"

namespace nspcert {

/// sqrt(2/101.01) [[0.1, 0, 10], [1, -10, 0]]; its kernel is spanned by
/// [100, 10, -1] and delta_2 is about 0.9998.
SensingMatrix kernel_example_matrix();

/// M x N matrix of CounterRng(seed) standard normals, filled row-major
/// (entry (r, c) takes variate r * N + c), then column-normalized.
SensingMatrix random_gaussian_matrix(int M, int N, std::uint64_t seed);

/// Index of the largest-magnitude entry (first one on ties).
std::size_t largest_entry_index(const Eigen::VectorXd& v);

// ---------------------------------------------------------------------------
// 1-sparse recovery with a one-dimensional kernel span{v}.
//
// Recovering lambda e_i reduces to comparing the two endpoints of a
// piecewise-concave function of the kernel coefficient; recovery holds iff
//   sum_{j != i} f(lambda |v_j| / |v_i|) >= f(lambda).

/// Throws DomainError for lambda <= 0, ValidationError for i out of range.
bool recovery_test_1sparse(const SparsityFunction& f, const Eigen::VectorXd& v,
                           std::size_t i, double lambda);

struct PhaseDiagram {
  Family family = Family::power;
  std::vector<double> lambda_grid;
  std::vector<double> p_grid;
  std::vector<std::uint8_t> recovered;  // lambda-major: [l * p_grid.size() + k]

  bool at(std::size_t lambda_index, std::size_t p_index) const {
    return recovered[lambda_index * p_grid.size() + p_index] != 0;
  }
};

/// Evaluates recovery_test_1sparse at every (lambda, p) node. Grids must be
/// non-empty and strictly increasing; family must be single-exponent.
PhaseDiagram phase_diagram(Family family, const Eigen::VectorXd& v, std::size_t i,
                           std::span<const double> lambda_grid,
                           std::span<const double> p_grid, unsigned threads = 1);

struct RecoveryBoundary {
  enum class Kind {
    fail_then_recover,  // fails below `lambda`, recovers above
    recover_then_fail,
    recovers_everywhere,
    fails_everywhere,
  };
  Kind kind = Kind::recovers_everywhere;
  std::optional<double> lambda;
};

std::string_view to_string(RecoveryBoundary::Kind kind);

/// Bisection in log(lambda) over [1e-6, 1e9] for the sign change of the
/// recovery criterion. Only lorentzian and concave_exp have a lambda-dependent
/// criterion; other families throw ValidationError.
RecoveryBoundary recovery_boundary(Family family, const Eigen::VectorXd& v,
                                   std::size_t i, double p);

/// 200 log-spaced points in [1e-3, 1e3].
std::vector<double> default_lambda_grid();
/// 0.01, 0.02, ..., 1.00.
std::vector<double> default_p_grid();

// ---------------------------------------------------------------------------
// Null space constant versus its bounds on a matrix with one-dimensional kernel.

/// Which RIC the tables certify with: `scaled` takes, order by order, the RIC
/// of the best rescaling c * m (scaled_ric); `unscaled` uses ric as is.
enum class RicConvention { scaled, unscaled };

/// Everything the comparison tables need from one matrix.
struct MatrixAnalysis {
  SensingMatrix matrix;
  NullSpaceVector kernel;
  RicProfile rics;  // delta_K for K = 1..N
  int K0 = 0;
};

MatrixAnalysis analyze_matrix(const SensingMatrix& m, const EnumerationOptions& options = {},
                              RicConvention convention = RicConvention::scaled);

struct NscComparisonRow {
  double p;
  double gamma_exact;
  double gamma1_star;   // power, bound from delta_{2K0} only
  double gamma2_star;   // lorentzian / concave_exp, delta_{2K0} only
  double gamma1f_star;  // power, best over all known RICs
  double gamma2f_star;  // lorentzian / concave_exp, best over all known RICs
};

/// Requires 1 <= K <= analysis.K0.
std::vector<NscComparisonRow> nsc_comparison(const MatrixAnalysis& analysis, int K,
                                             std::span<const double> p_grid);

struct RecoverableKRow {
  double p;
  int k_exact;
  int k_gamma1;
  int k_gamma2;
  int k_gamma1f;
  int k_gamma2f;
};

/// Largest K with exact NSC < 1 (any K < N) and with each bound < 1 (K <= K0).
std::vector<RecoverableKRow> recoverable_k_vs_p(const MatrixAnalysis& analysis,
                                                std::span<const double> p_grid);

enum class K0Ratio { same, twice };  // K0 = K or K0 = 2K

struct DeltaBoundRow {
  int K;
  int K0;
  double p;
  double f1;
  double f2;
};

std::vector<DeltaBoundRow> delta_bound_comparison(std::span<const int> K_list, K0Ratio ratio,
                                                  std::span<const double> p_grid);

// ---------------------------------------------------------------------------
// CSV output; floats use 9 significant digits.

std::string format_real(double value);

void write_csv(std::ostream& out, const PhaseDiagram& diagram);
void write_csv(std::ostream& out, std::span<const NscComparisonRow> rows);
void write_csv(std::ostream& out, std::span<const RecoverableKRow> rows);
void write_csv(std::ostream& out, std::span<const DeltaBoundRow> rows);

/// Seeded experiment description shared by the CLI pipelines.
struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> matrix_csv;
  int rows = 8;
  int cols = 9;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<double> p_grid = default_p_grid();
  std::vector<Family> families;
  std::string out;

  /// Grids non-empty and strictly increasing; a seed or a matrix file present.
  void validate() const;

  /// The CSV matrix if given, otherwise random_gaussian_matrix(rows, cols, seed).
  SensingMatrix matrix() const;
};

}  // namespace nspcert
