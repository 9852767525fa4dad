#pragma once

#include <random>

#include "qnet/qmath.hpp"

namespace qnet::test {

inline CMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(u(gen), u(gen));
  }
  return m;
}

inline CMatrix random_hermitian(std::mt19937_64& gen, std::size_t n) {
  const CMatrix g = random_matrix(gen, n, n);
  return 0.5 * (g + dagger(g));
}

inline CMatrix random_psd(std::mt19937_64& gen, std::size_t n) {
  const CMatrix g = random_matrix(gen, n, n);
  return g * dagger(g);
}

}  // namespace qnet::test
