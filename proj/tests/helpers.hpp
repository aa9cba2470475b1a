#pragma once

#include "curlme/cur.hpp"
#include "curlme/sparse.hpp"

#include <random>

namespace curlme::test {

inline DenseMatrix random_matrix(Index rows, Index cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline SparseMatrix random_sparse(Index rows, Index cols, double density,
                                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SparseMatrix::Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (u(rng) < density) t.push_back({i, j, g(rng)});
  // keep the matrix comfortably nonsingular when square
  if (rows == cols)
    for (Index i = 0; i < rows; ++i) t.push_back({i, i, 4.0 + u(rng)});
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

/// rank-r matrix with a prescribed singular spectrum
inline DenseMatrix synthetic_low_rank(Index rows, Index cols, const Vector& sigma,
                                      uint64_t seed) {
  std::mt19937_64 rng(seed);
  DenseMatrix u = random_orthonormal(rows, sigma.size(), rng);
  DenseMatrix y = random_orthonormal(cols, sigma.size(), rng);
  return u * sigma.asDiagonal() * y.transpose();
}

}  // namespace curlme::test
