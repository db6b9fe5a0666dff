#include "nspcert/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "nspcert/bounds.hpp"
#include "nspcert/errors.hpp"
#include "nspcert/numeric.hpp"
#include "nspcert/rng.hpp"

namespace nspcert {
namespace {

constexpr double kBoundaryLo = 1e-6;
constexpr double kBoundaryHi = 1e9;

void require_grid(std::span<const double> grid, const char* name) {
  if (grid.empty() || !strictly_increasing(grid)) {
    throw ValidationError(std::string(name) + " grid must be non-empty and strictly increasing");
  }
}

// sum_{j != i} f(lambda |v_j| / |v_i|) - f(lambda); recovery iff >= 0.
double recovery_margin(const SparsityFunction& f, const Eigen::VectorXd& v, std::size_t i,
                       double lambda) {
  const double vi = std::abs(v(static_cast<Eigen::Index>(i)));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (static_cast<std::size_t>(j) != i) sum += f(lambda * std::abs(v(j)) / vi);
  }
  return sum - f(lambda);
}

int largest_passing(int k_max, auto&& passes) {
  int best = 0;
  for (int K = 1; K <= k_max; ++K) {
    if (passes(K)) best = K;
  }
  return best;
}

}  // namespace

SensingMatrix kernel_example_matrix() {
  Eigen::MatrixXd a(2, 3);
  a << 0.1, 0.0, 10.0, 1.0, -10.0, 0.0;
  return SensingMatrix(std::sqrt(2.0 / 101.01) * a);
}

SensingMatrix random_gaussian_matrix(int M, int N, std::uint64_t seed) {
  if (M < 1 || N < M) throw ValidationError("random matrix needs 1 <= M <= N");
  const CounterRng rng(seed);
  Eigen::MatrixXd a(M, N);
  for (int r = 0; r < M; ++r) {
    for (int c = 0; c < N; ++c) a(r, c) = rng.normal(static_cast<std::uint64_t>(r) * N + c);
  }
  return SensingMatrix(std::move(a)).column_normalized();
}

std::size_t largest_entry_index(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw ValidationError("empty vector");
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return static_cast<std::size_t>(idx);
}

// ---------------------------------------------------------------------------
// 1-sparse recovery

bool recovery_test_1sparse(const SparsityFunction& f, const Eigen::VectorXd& v,
                           std::size_t i, double lambda) {
  if (i >= static_cast<std::size_t>(v.size())) throw ValidationError("index out of range");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  if (v(static_cast<Eigen::Index>(i)) == 0.0) return true;
  return recovery_margin(f, v, i, lambda) >= 0.0;
}

PhaseDiagram phase_diagram(Family family, const Eigen::VectorXd& v, std::size_t i,
                           std::span<const double> lambda_grid,
                           std::span<const double> p_grid, unsigned threads) {
  require_grid(lambda_grid, "lambda");
  require_grid(p_grid, "p");
  if (lambda_grid.front() <= 0.0) throw DomainError("lambda must be > 0");
  if (i >= static_cast<std::size_t>(v.size())) throw ValidationError("index out of range");
  std::vector<SparsityFunction> functions;
  functions.reserve(p_grid.size());
  for (double p : p_grid) functions.push_back(SparsityFunction::of_family(family, p));

  PhaseDiagram d;
  d.family = family;
  d.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  d.p_grid.assign(p_grid.begin(), p_grid.end());
  d.recovered.assign(lambda_grid.size() * p_grid.size(), 0);

  // Each worker owns a strided set of p columns; cells are disjoint.
  const std::size_t np = p_grid.size();
  const unsigned workers = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(np));
  auto fill = [&](unsigned worker) {
    for (std::size_t k = worker; k < np; k += workers) {
      for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
        d.recovered[l * np + k] = recovery_test_1sparse(functions[k], v, i, lambda_grid[l]);
      }
    }
  };
  if (workers == 1) {
    fill(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill, w);
  }
  return d;
}

std::string_view to_string(RecoveryBoundary::Kind kind) {
  switch (kind) {
    case RecoveryBoundary::Kind::fail_then_recover:
      return "fail_then_recover";
    case RecoveryBoundary::Kind::recover_then_fail:
      return "recover_then_fail";
    case RecoveryBoundary::Kind::recovers_everywhere:
      return "recovers_everywhere";
    case RecoveryBoundary::Kind::fails_everywhere:
      return "fails_everywhere";
  }
  return "unknown";
}

RecoveryBoundary recovery_boundary(Family family, const Eigen::VectorXd& v, std::size_t i,
                                   double p) {
  if (family != Family::lorentzian && family != Family::concave_exp) {
    throw ValidationError("recovery boundary needs lorentzian or concave_exp");
  }
  const SparsityFunction f = SparsityFunction::of_family(family, p);
  auto recovers = [&](double log_lambda) {
    return recovery_test_1sparse(f, v, i, std::exp(log_lambda));
  };
  double lo = std::log(kBoundaryLo);
  double hi = std::log(kBoundaryHi);
  const bool at_lo = recovers(lo);
  const bool at_hi = recovers(hi);
  if (at_lo == at_hi) {
    return {at_lo ? RecoveryBoundary::Kind::recovers_everywhere
                  : RecoveryBoundary::Kind::fails_everywhere,
            std::nullopt};
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (recovers(mid) == at_lo ? lo : hi) = mid;
  }
  return {at_lo ? RecoveryBoundary::Kind::recover_then_fail
                : RecoveryBoundary::Kind::fail_then_recover,
          std::exp(0.5 * (lo + hi))};
}

std::vector<double> default_lambda_grid() { return log_grid(1e-3, 1e3, 200); }

std::vector<double> default_p_grid() {
  std::vector<double> grid(100);
  for (int k = 0; k < 100; ++k) grid[k] = (k + 1) / 100.0;
  return grid;
}

// ---------------------------------------------------------------------------
// NSC tables

MatrixAnalysis analyze_matrix(const SensingMatrix& m, const EnumerationOptions& options,
                              RicConvention convention) {
  NullSpaceVector kernel = null_space_vector(m);
  const int n = static_cast<int>(m.cols());
  RicProfile rics = convention == RicConvention::scaled ? scaled_ric_profile(m, n, options)
                                                        : ric_profile(m, n, options);
  const int k0 = k0_from_rics(rics);
  return MatrixAnalysis{m, std::move(kernel), std::move(rics), k0};
}

std::vector<NscComparisonRow> nsc_comparison(const MatrixAnalysis& analysis, int K,
                                             std::span<const double> p_grid) {
  require_grid(p_grid, "p");
  if (K < 1 || K > analysis.K0) {
    throw ValidationError("K must lie in [1, K0] with K0 = " + std::to_string(analysis.K0));
  }
  const NscBoundInput input{K, analysis.K0, *analysis.rics.at(2 * analysis.K0)};
  std::vector<NscComparisonRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    const auto power = SparsityFunction::power(p);
    const auto log_exp = SparsityFunction::lorentzian(p);
    rows.push_back({p, exact_nsc_power(analysis.kernel, K, p),
                    gamma_star(power, input).gamma_star, gamma_star(log_exp, input).gamma_star,
                    gamma_star_all_rics(power, K, analysis.rics),
                    gamma_star_all_rics(log_exp, K, analysis.rics)});
  }
  return rows;
}

std::vector<RecoverableKRow> recoverable_k_vs_p(const MatrixAnalysis& analysis,
                                                std::span<const double> p_grid) {
  require_grid(p_grid, "p");
  const int n = static_cast<int>(analysis.kernel.z_plus.size());
  const int k0 = analysis.K0;
  const double delta = k0 > 0 ? *analysis.rics.at(2 * k0) : 0.0;
  std::vector<RecoverableKRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    const auto power = SparsityFunction::power(p);
    const auto log_exp = SparsityFunction::lorentzian(p);
    auto bound_k = [&](const SparsityFunction& f) {
      return largest_passing(k0, [&](int K) {
        return gamma_star(f, NscBoundInput{K, k0, delta}).gamma_star < 1.0;
      });
    };
    auto all_ric_k = [&](const SparsityFunction& f) {
      return largest_passing(k0, [&](int K) {
        return gamma_star_all_rics(f, K, analysis.rics) < 1.0;
      });
    };
    rows.push_back({p,
                    largest_passing(n - 1, [&](int K) {
                      return exact_nsc_power(analysis.kernel, K, p) < 1.0;
                    }),
                    bound_k(power), bound_k(log_exp), all_ric_k(power), all_ric_k(log_exp)});
  }
  return rows;
}

std::vector<DeltaBoundRow> delta_bound_comparison(std::span<const int> K_list, K0Ratio ratio,
                                                  std::span<const double> p_grid) {
  require_grid(p_grid, "p");
  if (K_list.empty()) throw ValidationError("K list must be non-empty");
  std::vector<DeltaBoundRow> rows;
  rows.reserve(K_list.size() * p_grid.size());
  for (int K : K_list) {
    const int k0 = ratio == K0Ratio::same ? K : 2 * K;
    for (double p : p_grid) {
      rows.push_back({K, k0, p, ric_threshold(BoundFamily::log_exp, K, k0, p),
                      ric_threshold(BoundFamily::mixed_norm, K, k0, p)});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_csv(std::ostream& out, const PhaseDiagram& diagram) {
  out << "lambda,p,recovered\n";
  for (std::size_t l = 0; l < diagram.lambda_grid.size(); ++l) {
    for (std::size_t k = 0; k < diagram.p_grid.size(); ++k) {
      out << format_real(diagram.lambda_grid[l]) << ',' << format_real(diagram.p_grid[k])
          << ',' << (diagram.at(l, k) ? 1 : 0) << '\n';
    }
  }
}

void write_csv(std::ostream& out, std::span<const NscComparisonRow> rows) {
  out << "p,gamma_exact,gamma1_star,gamma2_star,gamma1f_star,gamma2f_star\n";
  for (const auto& r : rows) {
    out << format_real(r.p) << ',' << format_real(r.gamma_exact) << ','
        << format_real(r.gamma1_star) << ',' << format_real(r.gamma2_star) << ','
        << format_real(r.gamma1f_star) << ',' << format_real(r.gamma2f_star) << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const RecoverableKRow> rows) {
  out << "p,k_exact,k_gamma1,k_gamma2,k_gamma1f,k_gamma2f\n";
  for (const auto& r : rows) {
    out << format_real(r.p) << ',' << r.k_exact << ',' << r.k_gamma1 << ',' << r.k_gamma2
        << ',' << r.k_gamma1f << ',' << r.k_gamma2f << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const DeltaBoundRow> rows) {
  out << "K,K0,p,f1,f2\n";
  for (const auto& r : rows) {
    out << r.K << ',' << r.K0 << ',' << format_real(r.p) << ',' << format_real(r.f1) << ','
        << format_real(r.f2) << '\n';
  }
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  require_grid(lambda_grid, "lambda");
  require_grid(p_grid, "p");
  if (!seed && !matrix_csv) {
    throw ValidationError("randomized run needs --seed (or a --matrix file)");
  }
  if (rows < 1 || cols < rows) throw ValidationError("matrix needs 1 <= rows <= cols");
}

SensingMatrix ExperimentConfig::matrix() const {
  if (matrix_csv) return read_matrix_csv_file(*matrix_csv);
  if (!seed) throw ValidationError("randomized run needs --seed");
  return random_gaussian_matrix(rows, cols, *seed);
}

}  // namespace nspcert
