#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nspcert/errors.hpp"
#include "nspcert/exact.hpp"
#include "nspcert/experiments.hpp"
#include "nspcert/jacobi.hpp"

using namespace nspcert;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = n(gen);
  }
  return a;
}

NullSpaceVector sorted_kernel(std::vector<double> v) {
  return NullSpaceVector::from_vector(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
}

}  // namespace

TEST(Jacobi, AgreesWithEigenSelfAdjointSolver) {
  for (int n : {1, 2, 3, 5, 8}) {
    const Eigen::MatrixXd b = random_matrix(n, n, 11 + n);
    const Eigen::MatrixXd sym = b.transpose() * b - 2.0 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd ours = jacobi_eigenvalues(sym);
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
    ASSERT_EQ(ours.size(), n);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ours(i), ref(i), 1e-11 * (1.0 + sym.norm()));
  }
}

TEST(Jacobi, DiagonalAndRepeatedEigenvalues) {
  Eigen::MatrixXd d = Eigen::Vector3d(3.0, -1.0, 2.0).asDiagonal();
  EXPECT_TRUE(jacobi_eigenvalues(d).isApprox(Eigen::Vector3d(-1.0, 2.0, 3.0)));
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  const Eigen::VectorXd e = jacobi_eigenvalues(ones);
  EXPECT_NEAR(e(3), 4.0, 1e-13);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e(i), 0.0, 1e-13);
}

TEST(Exact, KernelExampleMatrix) {
  const SensingMatrix m = kernel_example_matrix();
  EXPECT_NEAR(ric(m, 2), 0.9998, 5e-4);
  // delta_1 = max_i | ||phi_i||^2 - 1 |.
  double d1 = 0.0;
  for (int c = 0; c < 3; ++c) d1 = std::max(d1, std::abs(m.entries().col(c).squaredNorm() - 1.0));
  EXPECT_NEAR(ric(m, 1), d1, 1e-12);
  EXPECT_NEAR(d1, 0.98, 1e-3);
  EXPECT_EQ(spark(m), 3);

  const NullSpaceVector z = null_space_vector(m);
  const Eigen::Vector3d v(100.0, 10.0, -1.0);
  const double cosine = std::abs(z.z.dot(v)) / (z.z.norm() * v.norm());
  EXPECT_LT(std::acos(std::min(1.0, cosine)), 1e-9);
  EXPECT_NEAR(z.z.norm(), 1.0, 1e-14);
  EXPECT_GT(z.z(0), 0.0);
}

TEST(Exact, OrthonormalColumnsHaveZeroRic) {
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(6, 6, 5)).householderQ();
  const SensingMatrix m(q);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(ric(m, k), 0.0, 1e-12);
    EXPECT_NEAR(scaled_ric(m, k), 0.0, 1e-12);
  }
  EXPECT_FALSE(spark(m).has_value());
}

TEST(Exact, OrderTwoRicOfUnitColumnsIsCoherence) {
  const SensingMatrix m = SensingMatrix(random_matrix(5, 8, 9)).column_normalized();
  const Eigen::MatrixXd gram = m.entries().transpose() * m.entries();
  double mu = 0.0;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) mu = std::max(mu, std::abs(gram(i, j)));
  }
  EXPECT_NEAR(ric(m, 2), mu, 1e-12);
  EXPECT_NEAR(scaled_ric(m, 2), mu, 1e-12);
}

TEST(Exact, RicIsNonDecreasingAndThreadIndependent) {
  const SensingMatrix m = random_gaussian_matrix(6, 9, 77);
  double prev = 0.0;
  double prev_scaled = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double d = ric(m, k, {.threads = 1});
    EXPECT_GE(d, prev);
    EXPECT_EQ(d, ric(m, k, {.threads = 3}));
    const double s = scaled_ric(m, k);
    EXPECT_GE(s, prev_scaled);
    EXPECT_LE(s, d + 1e-15);
    prev = d;
    prev_scaled = s;
  }
}

TEST(Exact, ScaledRicIsScaleInvariant) {
  const Eigen::MatrixXd a = random_matrix(4, 6, 21);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(scaled_ric(SensingMatrix(a), k), scaled_ric(SensingMatrix(7.5 * a), k), 1e-12);
  }
}

TEST(Exact, BudgetIsEnforced) {
  const SensingMatrix m = random_gaussian_matrix(4, 12, 1);
  try {
    ric(m, 6, {.budget = 100});
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.required(), 924u);
    EXPECT_EQ(e.budget(), 100u);
  }
  EXPECT_THROW(spark(m, {.budget = 10}), BudgetExceeded);
  EXPECT_THROW(ric(m, 0), ValidationError);
}

TEST(Exact, Binomial) {
  EXPECT_EQ(binomial(9, 4), 126u);
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(Exact, SparkCases) {
  Eigen::MatrixXd a = random_matrix(3, 5, 4);
  a.col(2).setZero();
  EXPECT_EQ(spark(SensingMatrix(a)), 1);
  a = random_matrix(3, 5, 4);
  a.col(4) = -2.0 * a.col(1);
  EXPECT_EQ(spark(SensingMatrix(a)), 2);
  EXPECT_EQ(spark(random_gaussian_matrix(8, 9, 3)), 9);
  EXPECT_FALSE(spark(SensingMatrix(Eigen::MatrixXd::Identity(4, 4))).has_value());
}

TEST(Exact, NullSpaceVectorCases) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  const NullSpaceVector z = null_space_vector(SensingMatrix(a));
  EXPECT_NEAR(z.z(2), 1.0, 1e-14);
  EXPECT_NEAR(z.z.head(2).norm(), 0.0, 1e-14);

  const SensingMatrix g = random_gaussian_matrix(8, 9, 42);
  const NullSpaceVector k = null_space_vector(g);
  EXPECT_LE((g.entries() * k.z).norm(), 1e-10);
  EXPECT_TRUE(std::is_sorted(k.z_plus.rbegin(), k.z_plus.rend()));

  Eigen::MatrixXd deficient = random_matrix(3, 4, 8);
  deficient.row(2) = deficient.row(0);
  EXPECT_THROW(null_space_vector(SensingMatrix(deficient)), ValidationError);
  EXPECT_THROW(null_space_vector(SensingMatrix(random_matrix(3, 5, 1))), ValidationError);
}

TEST(Exact, SensingMatrixValidation) {
  EXPECT_THROW(SensingMatrix(random_matrix(4, 3, 1)), ValidationError);
  Eigen::MatrixXd bad = random_matrix(2, 3, 1);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SensingMatrix{bad}, ValidationError);
  const SensingMatrix n = SensingMatrix(random_matrix(3, 5, 2)).column_normalized();
  for (int c = 0; c < 5; ++c) EXPECT_NEAR(n.entries().col(c).norm(), 1.0, 1e-15);
}

TEST(Exact, MatrixCsvRoundTrip) {
  const SensingMatrix m = random_gaussian_matrix(3, 4, 5);
  std::stringstream buf;
  write_matrix_csv(buf, m);
  EXPECT_EQ(buf.str().substr(0, 4), "3,4\n");
  const SensingMatrix back = read_matrix_csv(buf);
  EXPECT_EQ(back.entries(), m.entries());

  std::stringstream bad("2,2\n1,2\n3\n");
  EXPECT_THROW(read_matrix_csv(bad), ValidationError);
  std::stringstream junk("2,2\n1,x\n3,4\n");
  EXPECT_THROW(read_matrix_csv(junk), ValidationError);
}

TEST(Exact, K0FromRics) {
  EXPECT_EQ(k0_from_rics({{2, 0.5617}, {4, 0.9034}, {6, 0.9781}, {8, 0.9999}}), 4);
  EXPECT_EQ(k0_from_rics({{2, 1.0}}), 0);
  EXPECT_EQ(k0_from_rics({{2, 0.0}}), 1);
  EXPECT_THROW(k0_from_rics(RicProfile{}), ValidationError);
}

TEST(ExactNsc, PowerRatio) {
  const auto z = sorted_kernel({100.0, 10.0, -1.0});
  EXPECT_NEAR(exact_nsc_power(z, 1, 0.5), 10.0 / (std::sqrt(10.0) + 1.0), 1e-14);
  EXPECT_NEAR(exact_nsc_power(z, 1, 0.5), 2.402530, 1e-6);
  // 10^{-p} + 100^{-p} = 1 at the recovery threshold.
  const double p0 = -std::log10((std::sqrt(5.0) - 1.0) / 2.0);
  EXPECT_NEAR(exact_nsc_power(z, 1, p0), 1.0, 1e-12);
  EXPECT_NEAR(exact_nsc_power(sorted_kernel({2.0, -2.0, 2.0, 2.0, 2.0}), 2, 0.3), 2.0 / 3.0,
              1e-15);
  EXPECT_TRUE(std::isinf(exact_nsc_power(sorted_kernel({1.0, 0.0, 0.0}), 1, 0.5)));
  EXPECT_THROW(exact_nsc_power(z, 3, 0.5), DomainError);
}

TEST(ExactNsc, NumericSupremumMatchesPowerRatio) {
  const auto z = sorted_kernel({100.0, 10.0, -1.0});
  EXPECT_NEAR(exact_nsc_numeric(SparsityFunction::lorentzian(0.5), z, 1), 2.40253, 3e-3);
  EXPECT_NEAR(exact_nsc_numeric(SparsityFunction::concave_exp(0.5), z, 1), 2.40253, 3e-3);
  const auto ones = sorted_kernel({1.0, 1.0});
  EXPECT_NEAR(exact_nsc_numeric(SparsityFunction::lorentzian(0.5), ones, 1), 1.0, 1e-12);
  EXPECT_THROW(exact_nsc_numeric(SparsityFunction::power(0.5), z, 3), DomainError);
}

TEST(ExactNsc, RatioIsNonIncreasingInT) {
  const auto z = sorted_kernel({5.0, 3.0, 2.0, 0.5, 0.1});
  const auto grid = default_nsc_grid();
  for (const auto& f : {SparsityFunction::power(0.4), SparsityFunction::lorentzian(0.7),
                        SparsityFunction::concave_exp(0.3)}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double t : grid) {
      const double r = nsc_ratio(f, z.z_plus, 2, t);
      EXPECT_LE(r, prev * (1 + 1e-12)) << to_string(f.family()) << " t=" << t;
      prev = r;
    }
  }
}

TEST(ExactNsc, TiesUseStableOrder) {
  const auto z = sorted_kernel({1.0, -3.0, 3.0, 2.0});
  EXPECT_EQ(z.z_plus, (std::vector<double>{3.0, 3.0, 2.0, 1.0}));
  EXPECT_NEAR(exact_nsc_power(z, 1, 1.0), 3.0 / 6.0, 1e-15);
}
