#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace pnp;
using namespace pnp::linalg;
using test::dense;
using test::inf_norm;

namespace {

SparseMatrix from_dense(const DenseMatrix& d)
{
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c)
      if (d(r, c) != 0.0) t.push_back({r, c, d(r, c)});
  return SparseMatrix::from_triplets(d.rows(), d.cols(), std::move(t));
}

SparseMatrix diagonal(std::vector<double> d)
{
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return SparseMatrix::from_triplets(d.size(), d.size(), std::move(t));
}

}  // namespace

TEST(SparseMatrix, TripletsSumDuplicatesAndSortColumns)
{
  const auto a = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0},
                                                    {0, 1, 0.5}});
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_DOUBLE_EQ(a.at(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(a.at(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(a.at(1, 1), 0.0);
  EXPECT_EQ(a.find(1, 1), SparseMatrix::npos);
  const std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_EQ(a * x, (std::vector<double>{5.0, 6.0}));
}

TEST(SparseMatrix, ApplyMatchesDenseProduct)
{
  std::mt19937_64 rng(test::kSeed);
  const PoissonProblem p{test::random_grid(5, 4, rng), 0.7};
  const auto a = assemble_poisson_matrix(p);
  const auto d = dense(a);
  const Vector x = test::random_vector(a.rows(), -1, 1, rng);
  const Vector ys = a * x, yd = d * x;
  for (std::size_t i = 0; i < ys.size(); ++i) EXPECT_NEAR(ys[i], yd[i], 1e-12 * inf_norm(yd));
}

TEST(SparseMatrix, RejectsMalformedCsr)
{
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST(LinearOperator, AssembledOperatorsAreLinear)
{
  std::mt19937_64 rng(test::kSeed + 1);
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 9, 7), 1.0};
  const auto l = assemble_poisson_matrix(p);
  const Vector psi = test::random_vector(p.grid.size(), -3, 3, rng);
  const auto a = NpAssembler(p.grid).assemble(psi, 1.0, 0.01);
  for (const SparseMatrix* m : {&l, &a}) {
    for (int probe = 0; probe < 10; ++probe) {
      const Vector x = test::random_vector(m->rows(), -1, 1, rng);
      const Vector y = test::random_vector(m->rows(), -1, 1, rng);
      const double al = 0.37 * (probe + 1), be = -1.3;
      Vector z(x.size());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = al * x[i] + be * y[i];
      const Vector az = *m * z, ax = *m * x, ay = *m * y;
      double err = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i)
        err = std::max(err, std::abs(az[i] - al * ax[i] - be * ay[i]));
      const double scale = dense(*m).norm1();
      EXPECT_LE(err, 1e-12 * scale * (inf_norm(x) + inf_norm(y)) * (std::abs(al) + 1.3));
    }
  }
}

TEST(Bicgstab, IdentityConvergesImmediately)
{
  const Vector b{1.0, -2.0, 3.5, 0.25};
  Vector x(4, 0.0);
  const auto rep = bicgstab(diagonal({1, 1, 1, 1}), b, x);
  EXPECT_LE(rep.iterations, 1u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(x[i], b[i], 1e-14);
}

TEST(Bicgstab, DiagonalInverse)
{
  const Vector b(5, 1.0);
  Vector x(5, 0.0);
  const auto rep = bicgstab(diagonal({1, 2, 3, 4, 5}), b, x, {1e-14});
  EXPECT_LE(rep.relative_residual, 1e-14);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(x[i], 1.0 / double(i + 1), 1e-13);
}

TEST(Bicgstab, PoissonMatrixMatchesDenseSolve)
{
  std::mt19937_64 rng(test::kSeed + 2);
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 4, 4), 1.0};
  const auto l = assemble_poisson_matrix(p);
  const Vector b = test::random_vector(l.rows(), -1, 1, rng);
  Vector x(b.size(), 0.0);
  bicgstab(l, b, x, Ilu0(l), {1e-13});
  const Vector xd = dense_solve(dense(l), b);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], xd[i], 1e-8);
}

TEST(Bicgstab, ReachesRequestedTrueResidual)
{
  std::mt19937_64 rng(test::kSeed + 3);
  const PoissonProblem p{test::random_grid(12, 10, rng), 0.3};
  const auto l = assemble_poisson_matrix(p);
  const Vector b = test::random_vector(l.rows(), -1, 1, rng);
  for (double tol : {1e-6, 1e-10, 1e-12}) {
    Vector x(b.size(), 0.0);
    const auto rep = bicgstab(l, b, x, Ilu0(l), {tol});
    Vector r = l * x;
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      rn += (b[i] - r[i]) * (b[i] - r[i]);
      bn += b[i] * b[i];
    }
    EXPECT_LE(std::sqrt(rn), tol * std::sqrt(bn) * (1 + 1e-12));
    EXPECT_LE(rep.relative_residual, tol);
  }
}

TEST(Bicgstab, ZeroRightHandSide)
{
  Vector x{1.0, 2.0};
  const Vector b{0.0, 0.0};
  const auto rep = bicgstab(diagonal({2, 3}), b, x);
  EXPECT_EQ(rep.iterations, 0u);
  EXPECT_EQ(x, b);
}

TEST(Bicgstab, PreconditioningAcceleratesNpSystems)
{
  std::mt19937_64 rng(test::kSeed + 4);
  const Grid2D g = Grid2D::uniform(0, 1, 0, 1, 16, 16);
  const NpAssembler np(g);
  int faster = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const Vector psi = test::random_vector(g.size(), -4, 4, rng);
    const auto a = np.assemble(psi, t % 2 ? 1.0 : -1.0, 0.01 * (1 + t % 5));
    const Vector b = test::random_vector(g.size(), 0.1, 1, rng);
    Vector x0(b.size(), 0.0), x1(b.size(), 0.0);
    const auto plain = bicgstab(a, b, x0, {1e-10});
    const auto pre = bicgstab(a, b, x1, Ilu0(a), {1e-10});
    if (pre.iterations < plain.iterations) ++faster;
  }
  EXPECT_GE(faster, (9 * trials + 9) / 10);
}

TEST(Bicgstab, BreakdownIsReported)
{
  // b . A b = 0 for a skew-symmetric A, so the first step breaks down.
  const auto a = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
  const Vector b{1.0, 0.0};
  Vector x(2, 0.0);
  EXPECT_THROW(bicgstab(a, b, x), BreakdownError);
}

TEST(Bicgstab, IterationLimitCarriesBestIterate)
{
  std::mt19937_64 rng(test::kSeed + 5);
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 16, 16), 1.0};
  const auto l = assemble_poisson_matrix(p);
  const Vector b = test::random_vector(l.rows(), -1, 1, rng);
  Vector x(b.size(), 0.0);
  try {
    bicgstab(l, b, x, {1e-14, 2});
    FAIL() << "expected ConvergenceError";
  } catch (const BreakdownError&) {
    FAIL() << "iteration limit reported as breakdown";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_iterate().size(), b.size());
    EXPECT_FALSE(e.history().empty());
  }
}

TEST(Bicgstab, RejectsBadArguments)
{
  const auto a = diagonal({1, 2});
  Vector x(2, 0.0);
  const Vector b3(3, 1.0), b2(2, 1.0);
  EXPECT_THROW(bicgstab(a, b3, x), std::invalid_argument);
  EXPECT_THROW(bicgstab(a, b2, x, {0.0}), std::invalid_argument);
}

TEST(Ilu0, TwoByTwoHandElimination)
{
  const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}});
  const Ilu0 ilu(a);
  const auto& f = ilu.factors();
  EXPECT_DOUBLE_EQ(f.at(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(f.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(f.at(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(f.at(1, 1), 2.75);
}

TEST(Ilu0, IdentityFactorsTrivially)
{
  const auto a = diagonal({1, 1, 1});
  const Ilu0 ilu(a);
  EXPECT_EQ(ilu.factors().to_dense(), a.to_dense());
}

TEST(Ilu0, LowerTriangularIsExact)
{
  const auto a = SparseMatrix::from_triplets(
      3, 3, {{0, 0, 2}, {1, 0, 1}, {1, 1, 4}, {2, 0, -1}, {2, 2, 5}, {2, 1, 3}});
  const Ilu0 ilu(a);
  const auto& f = ilu.factors();
  EXPECT_DOUBLE_EQ(f.at(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.at(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(f.at(2, 2), 5.0);
  EXPECT_DOUBLE_EQ(f.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.at(2, 0), -0.5);
  EXPECT_DOUBLE_EQ(f.at(2, 1), 0.75);
  const Vector x{1.0, -2.0, 0.5};
  const Vector b = a * x;
  Vector y(3);
  ilu.apply(b, y);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(y[i], x[i], 1e-15);
}

TEST(Ilu0, DensePatternIsExactLu)
{
  std::mt19937_64 rng(test::kSeed + 6);
  DenseMatrix d(6, 6);
  for (std::size_t r = 0; r < 6; ++r) {
    const Vector row = test::random_vector(6, -1, 1, rng);
    for (std::size_t c = 0; c < 6; ++c) d(r, c) = row[c];
    d(r, r) += 8.0;
  }
  const auto a = from_dense(d);
  const Ilu0 ilu(a);
  const Vector x = test::random_vector(6, -1, 1, rng);
  Vector y(6);
  ilu.apply(a * x, y);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(y[i], x[i], 1e-13);
}

TEST(Ilu0, KeepsSparsityPattern)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 6, 5), 1.0};
  const auto l = assemble_poisson_matrix(p);
  const Ilu0 ilu(l);
  EXPECT_EQ(ilu.factors().row_offsets(), l.row_offsets());
  EXPECT_EQ(ilu.factors().col_indices(), l.col_indices());
}

TEST(Ilu0, ZeroPivotNamesRow)
{
  const auto a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1},
                                                    {2, 2, 1}});
  try {
    Ilu0 ilu(a);
    FAIL() << "expected FactorizationError";
  } catch (const FactorizationError& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
  const auto missing = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {1, 0, 1}});
  EXPECT_THROW(Ilu0{missing}, FactorizationError);
}

TEST(DenseSolve, Examples)
{
  const auto id = DenseMatrix::identity(3);
  const Vector b{1.0, 2.0, 3.0};
  EXPECT_EQ(dense_solve(id, b), b);

  DenseMatrix d(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 4;
  const Vector x = dense_solve(d, Vector{2.0, 4.0});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(DenseSolve, AgreesWithIterativeSolver)
{
  std::mt19937_64 rng(test::kSeed + 7);
  for (int trial = 0; trial < 5; ++trial) {
    DenseMatrix d(10, 10);
    for (std::size_t r = 0; r < 10; ++r) {
      double off = 0.0;
      for (std::size_t c = 0; c < 10; ++c) {
        if (r == c) continue;
        d(r, c) = test::random_vector(1, -1, 1, rng)[0];
        off += std::abs(d(r, c));
      }
      d(r, r) = off + 1.0;
    }
    const Vector b = test::random_vector(10, -1, 1, rng);
    const Vector xd = dense_solve(d, b);
    const Vector r = d * xd;
    for (int i = 0; i < 10; ++i) EXPECT_LE(std::abs(r[i] - b[i]), 1e-10 * inf_norm(b));
    Vector xi(10, 0.0);
    bicgstab(from_dense(d), b, xi, {1e-13});
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(xi[i], xd[i], 1e-8);
  }
}

TEST(DenseSolve, SingularMatrixThrows)
{
  DenseMatrix d(2, 2, 1.0);
  EXPECT_THROW(dense_solve(d, Vector{1.0, 2.0}), SingularMatrixError);
}

TEST(Dense, NormsAndPositiveDefiniteness)
{
  DenseMatrix d(2, 2);
  d(0, 0) = 2;
  d(0, 1) = -1;
  d(1, 0) = -1;
  d(1, 1) = 2;
  EXPECT_DOUBLE_EQ(d.norm1(), 3.0);
  EXPECT_TRUE(is_positive_definite(d));
  EXPECT_NEAR(cond1(d), 3.0 * 1.0, 1e-14);  // inverse is [[2,1],[1,2]]/3
  d(0, 1) = d(1, 0) = -3;
  EXPECT_FALSE(is_positive_definite(d));
}
