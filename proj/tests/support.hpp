#pragma once

// Random generators shared by the property tests.

#include <random>

#include "hqc/qcore.hpp"

namespace hqc::test {

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline Matrix random_hermitian(Eigen::Index d, std::mt19937& rng) {
  Matrix a = random_complex(d, d, rng);
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(Eigen::Index d, std::mt19937& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_complex(d, d, rng));
  return qr.householderQ();
}

inline Matrix random_density(Eigen::Index d, std::mt19937& rng) {
  Matrix a = random_complex(d, d, rng);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace hqc::test
