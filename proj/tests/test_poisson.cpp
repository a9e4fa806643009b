#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace pnp;
using linalg::DenseMatrix;
using test::dense;
using test::inf_norm;

namespace {

void expect_m_matrix(const linalg::SparseMatrix& a)
{
  const DenseMatrix d = dense(a);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (r == c)
        EXPECT_GT(d(r, c), 0.0);
      else
        EXPECT_LE(d(r, c), 0.0);
    }
  const DenseMatrix inv = linalg::inverse(d);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) EXPECT_GE(inv(r, c), 0.0) << r << "," << c;
}

double mms_poisson_error(int n, double t)
{
  PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, n, n), 1.0};
  p.v_left = p.v_right = Field(mms::potential, true);
  p.rho_f = Field([](double t, double x, double y) { return mms::fixed_charge(t, x, y, 1.0); },
                  true);
  const Vector psi = solve_poisson(p, Vector(p.grid.size(), 0.0), t, {1e-13});
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      err = std::max(err, std::abs(psi[p.grid.index(i, j)] -
                                   mms::potential(t, p.grid.x_center(i), p.grid.y_center(j))));
  return err;
}

}  // namespace

TEST(PoissonMatrix, SingleCell)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 1, 1), 1.0};
  const auto l = assemble_poisson_matrix(p);
  ASSERT_EQ(l.rows(), 1u);
  // two Dirichlet ghosts at distance 1, each 2 kappa hy / hx
  EXPECT_DOUBLE_EQ(l.at(0, 0), 4.0);
  expect_m_matrix(l);
}

TEST(PoissonMatrix, SymmetrizedFormIsSpd)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 4, 4), 1.0};
  const DenseMatrix r = dense(assemble_symmetrized_poisson_matrix(p));
  const DenseMatrix rt = r.transpose();
  for (std::size_t a = 0; a < r.rows(); ++a)
    for (std::size_t b = 0; b < r.cols(); ++b) EXPECT_NEAR(r(a, b), rt(a, b), 1e-13);
  EXPECT_TRUE(linalg::is_positive_definite(r));
}

TEST(PoissonMatrix, SymmetrizedFormIsPAssembled)
{
  std::mt19937_64 rng(test::kSeed);
  const PoissonProblem p{test::random_grid(6, 5, rng), 0.4};
  const DenseMatrix r = dense(assemble_symmetrized_poisson_matrix(p));
  const DenseMatrix l = dense(assemble_poisson_matrix(p));
  const auto& area = p.grid.cell_areas();
  for (std::size_t a = 0; a < r.rows(); ++a)
    for (std::size_t b = 0; b < r.cols(); ++b) {
      EXPECT_NEAR(area[a] * l(a, b), r(a, b), 1e-12 * std::abs(r(a, b)) + 1e-15);
      EXPECT_EQ(r(a, b), r(b, a));
    }
  EXPECT_TRUE(linalg::is_positive_definite(r));
}

TEST(PoissonMatrix, OneNormBound)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 8, 8), 1.0};
  const double norm = dense(assemble_poisson_matrix(p)).norm1();
  // interior columns attain 8/h^2 exactly
  EXPECT_LE(norm, 512.0 * (1 + 1e-12));
  EXPECT_NEAR(norm, 512.0, 1e-9);

  std::mt19937_64 rng(test::kSeed + 1);
  for (int trial = 0; trial < 10; ++trial) {
    const PoissonProblem q{test::random_grid(4 + trial, 3 + trial % 4, rng), 1.0};
    const double hx = q.grid.hx_min(), hy = q.grid.hy_min();
    EXPECT_LE(dense(assemble_poisson_matrix(q)).norm1(),
              (4.0 / (hx * hx) + 4.0 / (hy * hy)) * (1 + 1e-12));
  }
}

TEST(PoissonMatrix, IsMMatrix)
{
  std::mt19937_64 rng(test::kSeed + 2);
  expect_m_matrix(assemble_poisson_matrix({Grid2D::uniform(0, 1, 0, 1, 4, 4), 1.0}));
  expect_m_matrix(assemble_poisson_matrix({Grid2D::uniform(0, 1, 0, 1, 16, 16), 1.0}));
  expect_m_matrix(assemble_poisson_matrix({Grid2D::uniform(-1, 1, 0, 1, 30, 1), 0.1}));
  expect_m_matrix(assemble_poisson_matrix({test::random_grid(10, 7, rng), 2.5}));
}

TEST(PoissonMatrix, ColumnSumsOfSymmetrizedForm)
{
  std::mt19937_64 rng(test::kSeed + 3);
  for (double kappa : {1.0, 0.3}) {
    const PoissonProblem p{test::random_grid(7, 5, rng), kappa};
    const Grid2D& g = p.grid;
    const auto sums = dense(assemble_symmetrized_poisson_matrix(p)).column_sums();
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        double expect = 0.0;
        if (i == 0) expect += 2.0 * kappa * g.hy(j) / g.hx_face(0);
        if (i == g.nx() - 1) expect += 2.0 * kappa * g.hy(j) / g.hx_face(g.nx());
        EXPECT_NEAR(sums[g.index(i, j)], expect, 1e-12) << i << "," << j;
      }
  }
}

TEST(PoissonMatrix, RejectsNonPositiveKappa)
{
  EXPECT_THROW(assemble_poisson_matrix({Grid2D::uniform(0, 1, 0, 1, 2, 2), 0.0}),
               std::invalid_argument);
}

TEST(PoissonRhs, ZeroData)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 5, 5), 1.0};
  const Vector rhs = assemble_poisson_rhs(p, Vector(25, 0.0), 0.0);
  EXPECT_EQ(inf_norm(rhs), 0.0);
}

TEST(PoissonRhs, DirichletLiftIsLocal)
{
  PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 6, 4), 1.0};
  p.v_left = p.v_right = Field::constant(1.0);
  const Vector rhs = assemble_poisson_rhs(p, Vector(24, 0.0), 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) {
      const double v = rhs[p.grid.index(i, j)];
      if (i == 0 || i == 5)
        EXPECT_NEAR(v, 2.0 / (p.grid.hx(i) * p.grid.hx(i)), 1e-12);
      else
        EXPECT_EQ(v, 0.0);
    }
}

TEST(PoissonRhs, ClosedCellThreeByThree)
{
  const PnpProblem p = test::closed_cell_problem(3);
  const Vector charge = ionic_charge(p, {Vector(9, 1.0), Vector(9, 1.0)});
  const Vector rhs = assemble_poisson_rhs(p.poisson, charge, 0.0);
  // Dirichlet: 2 V / h^2 = 18 on the right column; surface charge: -sin(pi x_i) / h.
  const double expect[3][3] = {{-1.5, 0.0, -1.5}, {-3.0, 0.0, -3.0}, {16.5, 18.0, 16.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(rhs[p.grid().index(i, j)], expect[i][j], 1e-12);
}

TEST(PoissonRhs, IncludesChargeAndFixedCharge)
{
  PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 3, 2), 1.0};
  p.rho_f = Field([](double t, double x, double) { return t + x; }, true);
  const Vector charge{1, 2, 3, 4, 5, 6};
  const Vector rhs = assemble_poisson_rhs(p, charge, 2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::size_t k = p.grid.index(i, j);
      EXPECT_NEAR(rhs[k], charge[k] + 2.0 + p.grid.x_center(i), 1e-14);
    }
  EXPECT_THROW(assemble_poisson_rhs(p, Vector(5, 0.0), 0.0), std::invalid_argument);
}

TEST(PoissonSolve, ZeroRhsGivesZero)
{
  const PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 8, 8), 1.0};
  EXPECT_EQ(inf_norm(solve_poisson(p, Vector(64, 0.0), 0.0)), 0.0);
}

TEST(PoissonSolve, LinearProfileIsExact)
{
  PoissonProblem u{Grid2D::uniform(0, 1, 0, 1, 9, 4), 1.0};
  u.v_right = Field::constant(1.0);
  const Vector psi = solve_poisson(u, Vector(u.grid.size(), 0.0), 0.0, {1e-14});
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(psi[u.grid.index(i, j)], u.grid.x_center(i), 1e-12);
}

TEST(PoissonSolve, DiscreteMaximumPrinciple)
{
  std::mt19937_64 rng(test::kSeed + 5);
  PoissonProblem p{test::random_grid(9, 4, rng), 1.0};
  p.v_right = Field::constant(1.0);
  const Vector psi = solve_poisson(p, Vector(p.grid.size(), 0.0), 0.0, {1e-14});
  for (double v : psi) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(PoissonSolve, AgreesWithDenseSolve)
{
  std::mt19937_64 rng(test::kSeed + 4);
  PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 4, 4), 0.8};
  p.v_left = Field::constant(-0.5);
  p.v_right = Field::constant(2.0);
  p.sigma_top = Field([](double, double x, double) { return x; }, false);
  const Vector charge = test::random_vector(16, -1, 1, rng);
  const Vector psi = solve_poisson(p, charge, 0.0, {1e-13});
  const Vector ref = linalg::dense_solve(dense(assemble_poisson_matrix(p)),
                                         assemble_poisson_rhs(p, charge, 0.0));
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(psi[k], ref[k], 1e-8);
}

TEST(PoissonSolve, ManufacturedSolutionSecondOrder)
{
  const int ns[] = {8, 16, 32, 64};
  double prev = 0.0;
  for (int n : ns) {
    const double e = mms_poisson_error(n, 0.05);
    if (prev > 0.0) {
      const double order = std::log2(prev / e);
      EXPECT_GE(order, 1.8) << "n=" << n;
      EXPECT_LE(order, 2.2) << "n=" << n;
    }
    prev = e;
  }
}

TEST(PoissonSolver, ReusesMatrixAcrossTimes)
{
  PoissonProblem p{Grid2D::uniform(0, 1, 0, 1, 6, 6), 1.0};
  p.v_right = Field([](double t, double, double) { return t; }, true);
  const PoissonSolver s(p, {1e-13});
  const Vector zero(36, 0.0);
  const Vector a = s.solve(zero, 1.0), b = s.solve(zero, 2.0);
  for (std::size_t k = 0; k < 36; ++k) EXPECT_NEAR(b[k], 2.0 * a[k], 1e-11);
}
