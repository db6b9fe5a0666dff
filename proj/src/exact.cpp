#include "nspcert/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "nspcert/errors.hpp"
#include "nspcert/jacobi.hpp"
#include "nspcert/numeric.hpp"

namespace nspcert {
namespace {

constexpr double kRankTolerance = 1e-10;

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls visit(indices) for every increasing K-tuple of [0, n) whose first
// element is `lead`. Stops early when visit returns false.
template <typename Visit>
bool for_each_subset_with_lead(int n, int k, int lead, Visit&& visit) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), lead);
  if (k == 0 || idx.back() >= n) return true;
  for (;;) {
    if (!visit(std::span<const int>(idx))) return false;
    int pos = k - 1;
    while (pos > 0 && idx[pos] == n - k + pos) --pos;
    if (pos == 0) return true;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Runs `per_lead(lead)` for lead = 0..n-k on a pool of threads, handing out
// leading indices through an atomic counter.
template <typename PerLead>
void parallel_over_leads(int n, int k, unsigned threads, PerLead&& per_lead) {
  const int leads = n - k + 1;
  if (leads <= 0) return;
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(leads));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int lead = next++; lead < leads; lead = next++) per_lead(lead);
  };
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& a, std::span<const int> idx) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) sub.col(j) = a.col(idx[j]);
  return sub;
}

std::vector<double> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("matrix CSV line " + std::to_string(line_no) +
                            ": cannot parse '" + cell + "'");
    }
  }
  return values;
}

}  // namespace

// ---------------------------------------------------------------------------
// SensingMatrix and CSV

SensingMatrix::SensingMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < entries_.rows()) {
    throw ValidationError("sensing matrix needs 1 <= M <= N");
  }
  if (!entries_.allFinite()) throw ValidationError("sensing matrix has non-finite entries");
}

SensingMatrix SensingMatrix::column_normalized() const {
  Eigen::MatrixXd out = entries_;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return SensingMatrix(std::move(out));
}

SensingMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ValidationError("matrix CSV is empty");
  const auto dims = split_csv_line(line, line_no);
  if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1 || dims[0] != std::floor(dims[0]) ||
      dims[1] != std::floor(dims[1])) {
    throw ValidationError("matrix CSV header must be 'rows,cols'");
  }
  const auto rows = static_cast<Eigen::Index>(dims[0]);
  const auto cols = static_cast<Eigen::Index>(dims[1]);
  Eigen::MatrixXd a(rows, cols);
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (r == rows) throw ValidationError("matrix CSV has more than " + std::to_string(rows) + " rows");
    const auto values = split_csv_line(line, line_no);
    if (static_cast<Eigen::Index>(values.size()) != cols) {
      throw ValidationError("matrix CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(values.size()) + " values, expected " +
                            std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = values[c];
    ++r;
  }
  if (r != rows) throw ValidationError("matrix CSV has fewer rows than declared");
  return SensingMatrix(std::move(a));
}

SensingMatrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const SensingMatrix& m) {
  const auto& a = m.entries();
  out << a.rows() << ',' << a.cols() << '\n';
  const auto old = out.precision(17);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) out << (c ? "," : "") << a(r, c);
    out << '\n';
  }
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Null space

NullSpaceVector NullSpaceVector::from_vector(Eigen::VectorXd z) {
  if (z.size() == 0 || z.isZero(0.0)) throw ValidationError("null space vector must be non-zero");
  NullSpaceVector out;
  out.z_plus.resize(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out.z_plus[i] = std::abs(z(i));
  std::stable_sort(out.z_plus.begin(), out.z_plus.end(), std::greater<>());
  out.z = std::move(z);
  return out;
}

NullSpaceVector null_space_vector(const SensingMatrix& m) {
  const Eigen::Index rows = m.rows();
  if (m.cols() != rows + 1) {
    throw ValidationError("null_space_vector needs N = M + 1");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.entries(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(rows - 1) <= kRankTolerance * sv(0)) {
    throw ValidationError("null space dimension exceeds 1");
  }
  Eigen::VectorXd z = svd.matrixV().col(rows);
  z.normalize();
  Eigen::Index largest = 0;
  z.cwiseAbs().maxCoeff(&largest);
  if (z(largest) < 0.0) z = -z;
  return NullSpaceVector::from_vector(std::move(z));
}

// ---------------------------------------------------------------------------
// Enumerations

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // result * num / i is always integral; guard the multiplication.
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t reduced = result / g;
    const std::uint64_t num_reduced = num / (i / g);
    if (num_reduced != 0 &&
        reduced > std::numeric_limits<std::uint64_t>::max() / num_reduced) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = reduced * num_reduced;
  }
  return result;
}

GramExtremes gram_extremes(const SensingMatrix& m, int K, const EnumerationOptions& options) {
  const int n = static_cast<int>(m.cols());
  if (K < 1 || K > n) throw ValidationError("RIC order must satisfy 1 <= K <= N");
  const std::uint64_t required = binomial(n, K);
  if (required > options.budget) throw BudgetExceeded(required, options.budget);

  const Eigen::MatrixXd& a = m.entries();
  std::mutex mutex;
  GramExtremes total{std::numeric_limits<double>::infinity(), 0.0};
  parallel_over_leads(n, K, resolve_threads(options.threads), [&](int lead) {
    GramExtremes local = total;
    for_each_subset_with_lead(n, K, lead, [&](std::span<const int> idx) {
      const Eigen::MatrixXd sub = columns(a, idx);
      const Eigen::VectorXd eig = jacobi_eigenvalues(sub.transpose() * sub);
      local.lambda_min = std::min(local.lambda_min, eig(0));
      local.lambda_max = std::max(local.lambda_max, eig(eig.size() - 1));
      return true;
    });
    std::lock_guard lock(mutex);
    total.lambda_min = std::min(total.lambda_min, local.lambda_min);
    total.lambda_max = std::max(total.lambda_max, local.lambda_max);
  });
  return total;
}

double ric(const SensingMatrix& m, int K, const EnumerationOptions& options) {
  const GramExtremes e = gram_extremes(m, K, options);
  return std::max({0.0, e.lambda_max - 1.0, 1.0 - e.lambda_min});
}

double scaled_ric(const SensingMatrix& m, int K, const EnumerationOptions& options) {
  const GramExtremes e = gram_extremes(m, K, options);
  if (e.lambda_max <= 0.0) return 1.0;
  return (e.lambda_max - std::max(e.lambda_min, 0.0)) /
         (e.lambda_max + std::max(e.lambda_min, 0.0));
}

RicProfile ric_profile(const SensingMatrix& m, int max_order,
                       const EnumerationOptions& options) {
  RicProfile profile;
  for (int k = 1; k <= max_order; ++k) profile.set(k, ric(m, k, options));
  return profile;
}

RicProfile scaled_ric_profile(const SensingMatrix& m, int max_order,
                              const EnumerationOptions& options) {
  RicProfile profile;
  for (int k = 1; k <= max_order; ++k) profile.set(k, scaled_ric(m, k, options));
  return profile;
}

std::optional<int> spark(const SensingMatrix& m, const EnumerationOptions& options) {
  const int n = static_cast<int>(m.cols());
  const int rows = static_cast<int>(m.rows());
  const unsigned threads = resolve_threads(options.threads);
  const Eigen::MatrixXd& a = m.entries();

  std::uint64_t visited = 0;
  for (int r = 1; r <= std::min(n, rows); ++r) {
    const std::uint64_t level = binomial(n, r);
    if (level > options.budget - std::min(visited, options.budget)) {
      throw BudgetExceeded(visited + level, options.budget);
    }
    visited += level;

    std::atomic<bool> found{false};
    parallel_over_leads(n, r, threads, [&](int lead) {
      if (found) return;
      for_each_subset_with_lead(n, r, lead, [&](std::span<const int> idx) {
        if (found) return false;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns(a, idx));
        const auto& sv = svd.singularValues();
        if (sv(0) == 0.0 || sv(r - 1) <= kRankTolerance * sv(0)) {
          found = true;
          return false;
        }
        return true;
      });
    });
    if (found) return r;
  }
  // Any M+1 columns of an M-row matrix are dependent.
  if (n > rows) return rows + 1;
  return std::nullopt;
}

int k0_from_rics(const RicProfile& profile) {
  if (profile.empty()) throw ValidationError("RIC profile is empty");
  int k0 = 0;
  for (const auto& [order, delta] : profile.entries()) {
    if (order >= 2 && order % 2 == 0 && delta < 1.0) k0 = std::max(k0, order / 2);
  }
  return k0;
}

// ---------------------------------------------------------------------------
// Null space constant

double exact_nsc_power(const NullSpaceVector& z, int K, double p) {
  const int n = static_cast<int>(z.z_plus.size());
  if (K < 1) throw ValidationError("K must be >= 1");
  if (K >= n) throw DomainError("exact NSC needs K < N");
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p must lie in (0,1]");
  double head = 0.0;
  double tail = 0.0;
  for (int i = 0; i < n; ++i) (i < K ? head : tail) += std::pow(z.z_plus[i], p);
  if (tail == 0.0) return std::numeric_limits<double>::infinity();
  return head / tail;
}

namespace {

double nsc_ratio_at_log(const SparsityFunction& f, std::span<const double> z_plus, int K,
                        double log_t) {
  std::vector<double> head;
  std::vector<double> tail;
  for (std::size_t i = 0; i < z_plus.size(); ++i) {
    const double v = f.log_eval(log_t + std::log(z_plus[i]));
    (static_cast<int>(i) < K ? head : tail).push_back(v);
  }
  const double log_tail = log_sum_exp(tail);
  if (log_tail == -std::numeric_limits<double>::infinity()) {
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(log_sum_exp(head) - log_tail);
}

}  // namespace

double nsc_ratio(const SparsityFunction& f, std::span<const double> z_plus, int K,
                 double t) {
  return nsc_ratio_at_log(f, z_plus, K, std::log(t));
}

std::vector<double> default_nsc_grid() { return log_grid(1e-12, 1e12, 4001); }

double exact_nsc_numeric(const SparsityFunction& f, const NullSpaceVector& z, int K,
                         std::span<const double> t_grid) {
  const int n = static_cast<int>(z.z_plus.size());
  if (K < 1) throw ValidationError("K must be >= 1");
  if (K >= n) throw DomainError("exact NSC needs K < N");
  if (t_grid.empty()) throw ValidationError("t grid must be non-empty");
  double best = nsc_ratio_at_log(f, z.z_plus, K, -kLimitLogMagnitude);
  for (double t : t_grid) best = std::max(best, nsc_ratio(f, z.z_plus, K, t));
  return best;
}

double exact_nsc_numeric(const SparsityFunction& f, const NullSpaceVector& z, int K) {
  static const std::vector<double> grid = default_nsc_grid();
  return exact_nsc_numeric(f, z, K, grid);
}

}  // namespace nspcert
