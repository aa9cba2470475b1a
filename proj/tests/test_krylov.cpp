#include "curlme/krylov.hpp"

#include <doctest.h>

#include "curlme/equation.hpp"
#include "curlme/oracle.hpp"
#include "curlme/problems.hpp"
#include "helpers.hpp"

using namespace curlme;

namespace {

LinearMatrixOperator identity_op() {
  LinearMatrixOperator op;
  op.has_mass = true;
  op.dt = 0.0;
  return op;
}

}  // namespace

TEST_CASE("apply_operator identity limit") {
  const DenseMatrix x = test::random_matrix(6, 3, 1);
  CHECK((apply_operator(identity_op(), x) - x).norm() == 0.0);
}

TEST_CASE("apply_operator scalar shift with identity term") {
  LinearMatrixOperator op = identity_op();
  op.dt = 0.3;
  op.terms.emplace_back(OperatorSide::make_identity(), OperatorSide::make_identity());
  const DenseMatrix x = test::random_matrix(5, 2, 2);
  CHECK((apply_operator(op, x) - 0.7 * x).norm() <= 1e-15 * x.norm());
}

TEST_CASE("apply_operator matches the Kronecker matrix action") {
  auto a1 = std::make_shared<SparseMatrix>(test::random_sparse(6, 6, 0.4, 3));
  auto b1 = std::make_shared<SparseMatrix>(test::random_sparse(3, 3, 0.6, 4));
  auto a2 = std::make_shared<SparseMatrix>(test::random_sparse(6, 6, 0.4, 5));
  auto b2 = std::make_shared<SparseMatrix>(test::random_sparse(3, 3, 0.6, 6));

  StepEquation eq;
  eq.n1 = 6;
  eq.n2 = 3;
  eq.has_mass = true;
  eq.A0 = OperatorSide::make_identity();
  eq.B0 = OperatorSide::make_identity();
  eq.terms = {{a1, b1}, {a2, b2}};
  eq.dt = 0.05;
  eq.C = MatrixAccessor::zero(6, 3);

  const DenseMatrix akron = oracle::kron_operator(eq).to_dense();
  const LinearMatrixOperator op = full_operator(eq);
  for (uint64_t seed : {7u, 8u}) {
    const DenseMatrix x = test::random_matrix(6, 3, seed);
    const DenseMatrix via_op = apply_operator(op, x);
    const DenseMatrix via_kron = oracle::unvec(akron * oracle::vec(x), 6, 3);
    CHECK((via_op - via_kron).norm() <= 1e-13 * via_op.norm());
  }
}

TEST_CASE("gmres solves the identity system in one iteration") {
  const DenseMatrix rhs = test::random_matrix(7, 2, 9);
  const GmresResult r = gmres_lme(identity_op(), rhs, DenseMatrix::Zero(7, 2), 5, 1e-12);
  CHECK(r.stats.converged);
  CHECK(r.stats.iterations == 1);
  CHECK((r.x - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("gmres solves the 1x1 case exactly") {
  LinearMatrixOperator op = identity_op();
  op.dt = 0.4;
  auto a = std::make_shared<SparseMatrix>(SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}}));
  auto b = std::make_shared<SparseMatrix>(SparseMatrix::from_triplets(1, 1, {{0, 0, 3.0}}));
  op.terms.emplace_back(OperatorSide::make_sparse(a), OperatorSide::make_sparse(b));
  DenseMatrix rhs(1, 1);
  rhs << 5.0;
  const GmresResult r = gmres_lme(op, rhs, DenseMatrix::Zero(1, 1), 3, 1e-14);
  CHECK(r.stats.converged);
  CHECK(r.x(0, 0) == doctest::Approx(5.0 / (1.0 - 0.4 * 6.0)));
}

TEST_CASE("gmres matches a dense Kronecker solve") {
  auto a1 = std::make_shared<SparseMatrix>(test::random_sparse(5, 5, 0.5, 11));
  auto b1 = std::make_shared<SparseMatrix>(test::random_sparse(3, 3, 0.7, 12));
  auto a2 = std::make_shared<SparseMatrix>(test::random_sparse(5, 5, 0.5, 13));
  auto b2 = std::make_shared<SparseMatrix>(test::random_sparse(3, 3, 0.7, 14));

  StepEquation eq;
  eq.n1 = 5;
  eq.n2 = 3;
  eq.has_mass = true;
  eq.A0 = OperatorSide::make_identity();
  eq.B0 = OperatorSide::make_identity();
  eq.terms = {{a1, b1}, {a2, b2}};
  eq.dt = 0.08;
  eq.C = MatrixAccessor::zero(5, 3);

  const DenseMatrix rhs = test::random_matrix(5, 3, 15);
  const GmresResult r =
      gmres_lme(full_operator(eq), rhs, DenseMatrix::Zero(5, 3), 15, 1e-12);
  CHECK(r.stats.converged);

  const DenseMatrix akron = oracle::kron_operator(eq).to_dense();
  const DenseMatrix direct =
      oracle::unvec(akron.partialPivLu().solve(oracle::vec(rhs)), 5, 3);
  CHECK((r.x - direct).norm() <= 1e-10 * direct.norm());
}

TEST_CASE("gmres residual history is monotone and ends at the true residual") {
  auto a1 = std::make_shared<SparseMatrix>(test::random_sparse(8, 8, 0.4, 21));
  auto b1 = std::make_shared<SparseMatrix>(test::random_sparse(4, 4, 0.6, 22));
  LinearMatrixOperator op = identity_op();
  op.dt = 0.3;
  op.terms.emplace_back(OperatorSide::make_sparse(a1), OperatorSide::make_sparse(b1));

  const DenseMatrix rhs = test::random_matrix(8, 4, 23);
  const GmresResult r = gmres_lme(op, rhs, DenseMatrix::Zero(8, 4), 40, 1e-13);
  CHECK(r.stats.converged);
  for (size_t i = 1; i < r.stats.residual_history.size(); ++i)
    CHECK(r.stats.residual_history[i] <=
          r.stats.residual_history[i - 1] * (1.0 + 1e-12));
  const double true_res = (rhs - apply_operator(op, r.x)).norm();
  CHECK(true_res == doctest::Approx(r.stats.residual_history.back()).epsilon(1e-8));
}

TEST_CASE("gmres equivalence with the vectorized formulation") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto a1 = std::make_shared<SparseMatrix>(test::random_sparse(6, 6, 0.4, 100 + seed));
    auto b1 = std::make_shared<SparseMatrix>(test::random_sparse(4, 4, 0.5, 200 + seed));
    auto a2 = std::make_shared<SparseMatrix>(test::random_sparse(6, 6, 0.4, 300 + seed));
    auto b2 = std::make_shared<SparseMatrix>(test::random_sparse(4, 4, 0.5, 400 + seed));

    StepEquation eq;
    eq.n1 = 6;
    eq.n2 = 4;
    eq.has_mass = true;
    eq.A0 = OperatorSide::make_identity();
    eq.B0 = OperatorSide::make_identity();
    eq.terms = {{a1, b1}, {a2, b2}};
    eq.dt = 0.04;
    eq.C = MatrixAccessor::zero(6, 4);

    const DenseMatrix rhs = test::random_matrix(6, 4, 500 + seed);
    const Index m = 12;
    const GmresResult mat =
        gmres_lme(full_operator(eq), rhs, DenseMatrix::Zero(6, 4), m, 1e-12, 50);
    const DenseMatrix akron = oracle::kron_operator(eq).to_dense();
    const GmresResult scal = oracle::scalar_gmres(
        akron, oracle::vec(rhs), Vector::Zero(24), m, 1e-12, 50);

    REQUIRE(mat.stats.residual_history.size() == scal.stats.residual_history.size());
    for (size_t i = 0; i < mat.stats.residual_history.size(); ++i)
      CHECK(mat.stats.residual_history[i] ==
            doctest::Approx(scal.stats.residual_history[i]).epsilon(1e-10));
    CHECK((oracle::vec(mat.x) - Vector(scal.x)).norm() <=
          1e-8 * std::max(1.0, Vector(scal.x).norm()));
  }
}

TEST_CASE("gmres restart accounting") {
  // stiff operator with a tiny subspace forces restarts
  auto fx = fem_1d(40, 1.0);
  auto k = std::make_shared<SparseMatrix>(fx.K);
  auto eye = std::make_shared<SparseMatrix>(SparseMatrix::identity(2));
  LinearMatrixOperator op;
  op.has_mass = true;
  op.dt = 2.0;
  op.terms.emplace_back(OperatorSide::make_sparse(k), OperatorSide::make_sparse(eye));

  const DenseMatrix rhs = test::random_matrix(41, 2, 31);
  const GmresResult small_m = gmres_lme(op, rhs, DenseMatrix::Zero(41, 2), 6, 1e-9, 20000);
  const GmresResult big_m = gmres_lme(op, rhs, DenseMatrix::Zero(41, 2), 82, 1e-9, 20000);
  CHECK(small_m.stats.converged);
  CHECK(big_m.stats.converged);
  CHECK(small_m.stats.restarts > big_m.stats.restarts);
  CHECK(small_m.stats.iterations > big_m.stats.iterations);
}
