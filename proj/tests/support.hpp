#pragma once

#include <cstdint>
#include <random>

#include "fmslab/numerics.hpp"

namespace fmslab::test {

inline CMatrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = cplx(u(rng), u(rng));
  }
  return m;
}

// Taylor series with scaling and squaring; independent of the library kernel.
inline CMatrix taylor_expm(const CMatrix& m) {
  int squarings = 0;
  double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  while (norm > 0.125) {
    norm /= 2.0;
    ++squarings;
  }
  const CMatrix a = m / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(m.rows(), m.cols());
  CMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace fmslab::test
