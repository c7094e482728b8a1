#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dqhelmert/dqhelmert.hpp"
#include "reference_cases.hpp"

namespace dqhelmert {
namespace {

long long Binomial(int n, int k) {
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Closed-form integer inverse of the n×n Hilbert matrix.
DenseMatrix HilbertInverse(int n) {
  DenseMatrix inv(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const long long sign = (i + j) % 2 == 0 ? 1 : -1;
      const long long b1 = Binomial(n + i - 1, n - j);
      const long long b2 = Binomial(n + j - 1, n - i);
      const long long b3 = Binomial(i + j - 2, i - 1);
      inv(i - 1, j - 1) = static_cast<double>(sign * (i + j - 1) * b1 * b2 * b3 * b3);
    }
  }
  return inv;
}

TEST(SolveSquare, Examples) {
  const DenseVector w = (DenseVector(3) << 1, 2, 3).finished();
  EXPECT_EQ(SolveSquare(DenseMatrix::Identity(3, 3), w), w);

  DenseMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const DenseVector x = SolveSquare(swap, (DenseVector(2) << 2, 5).finished());
  EXPECT_DOUBLE_EQ(x[0], 5.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveSquare, RandomWellConditioned) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix m(6, 6);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    m += 6.0 * DenseMatrix::Identity(6, 6);
    DenseVector x(6);
    for (int i = 0; i < 6; ++i) x[i] = g(rng);
    const DenseVector w = m * x;
    EXPECT_LT((SolveSquare(m, w) - x).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((Invert(m) * w - SolveSquare(m, w)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SolveSquare, Errors) {
  try {
    SolveSquare(DenseMatrix::Zero(2, 3), DenseVector::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  try {
    SolveSquare(DenseMatrix::Identity(3, 3), DenseVector::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  DenseMatrix rank1(3, 3);
  rank1 << 1, 2, 3, 2, 4, 6, 3, 6, 9;
  try {
    SolveSquare(rank1, DenseVector::Ones(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
}

TEST(SolveSquare, BadlyScaledButRegular) {
  DenseMatrix m(3, 3);
  m << 1e15, 2e7, 0, 2e7, 1.0, 1e-3, 0, 1e-3, 1e-8;
  const DenseVector x = (DenseVector(3) << 1e-7, 2.0, -3.0).finished();
  const DenseVector got = SolveSquare(m, m * x);
  EXPECT_LT(((got - x).array() / x.array()).abs().maxCoeff(), 1e-6);
}

TEST(Invert, Examples) {
  EXPECT_TRUE(Invert(DenseMatrix::Identity(4, 4)).isIdentity(0.0));
  EXPECT_DOUBLE_EQ(ConditionEstimate(DenseMatrix::Identity(4, 4)), 1.0);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-12;
  EXPECT_NEAR(ConditionEstimate(d) / 1e12, 1.0, 1e-9);
}

TEST(Invert, Hilbert) {
  DenseMatrix h(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (i + j + 1);
  }
  const DenseMatrix expected = HilbertInverse(4);
  EXPECT_EQ(expected(0, 0), 16.0);
  EXPECT_EQ(expected(3, 3), 2800.0);
  const DenseMatrix inv = Invert(h);
  EXPECT_LT(((inv - expected).array() / expected.array()).abs().maxCoeff(), 1e-6);
}

TEST(ConditionEstimate, SingularIsInfinite) {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  EXPECT_TRUE(std::isinf(ConditionEstimate(m)));
}

// First correction from the bordered system vs. eliminating k_a and solving
// the reduced normal equations on the null space of C.
TEST(Bordered, MatchesNullSpaceElimination) {
  for (const Problem& p : {testing::Case1(), testing::Case2()}) {
    const int n3 = 3 * p.size();
    ModelState state;
    DenseVector v_prev = DenseVector::Zero(2 * n3);
    const LinearizedSystem sys = Linearize(p, state, v_prev);
    const DenseMatrix normal = sys.a * BuildCofactorMatrix(p) * sys.a.transpose();

    const int k = 9, c = 2;
    DenseMatrix m = DenseMatrix::Zero(n3 + c + k, n3 + c + k);
    m.topLeftCorner(n3, n3) = normal;
    m.block(0, n3 + c, n3, k) = sys.b;
    m.block(n3, n3 + c, c, k) = sys.c;
    m.block(n3 + c, 0, k, n3) = -sys.b.transpose();
    m.block(n3 + c, n3, k, c) = -sys.c.transpose();
    DenseVector rhs = DenseVector::Zero(n3 + c + k);
    rhs.head(n3) = -sys.w1;
    rhs.segment(n3, c) = -sys.w2;
    const DenseVector dx = SolveSquare(m, rhs).tail(k);

    // Independent route: δx = x_p + Z y with C x_p = −w2, minimizing the
    // reduced quadratic over the null space Z of C.
    const Eigen::LLT<DenseMatrix> llt(normal);
    const DenseMatrix s = sys.b.transpose() * llt.solve(sys.b);
    const DenseVector g = sys.b.transpose() * llt.solve(sys.w1);
    Eigen::HouseholderQR<DenseMatrix> qr(sys.c.transpose());
    const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(k, k);
    const DenseMatrix z = q.rightCols(k - c);
    const DenseVector xp = sys.c.completeOrthogonalDecomposition().solve(-sys.w2);
    const DenseMatrix zsz = z.transpose() * s * z;
    const DenseVector y = zsz.ldlt().solve(-z.transpose() * (s * xp + g));
    const DenseVector expected = xp + z * y;
    EXPECT_LT((dx - expected).cwiseAbs().maxCoeff(),
              1e-9 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
  }
}

}  // namespace
}  // namespace dqhelmert
