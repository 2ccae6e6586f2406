#pragma once

#include "catlab/error.hpp"
#include "catlab/linalg.hpp"

#include <doctest.h>

#include <random>

namespace testing {

using catlab::linalg::CMatrix;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(987654321);
  return gen;
}

inline CMatrix random_matrix(Eigen::Index n, std::mt19937_64& gen = rng()) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(gen), g(gen)};
  return m;
}

inline CMatrix random_hermitian(Eigen::Index n, std::mt19937_64& gen = rng()) {
  const CMatrix b = random_matrix(n, gen);
  return b + b.adjoint();
}

inline CMatrix random_unitary(Eigen::Index n, std::mt19937_64& gen = rng()) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, gen));
  return qr.householderQ();
}

// Random full-rank density matrix.
inline CMatrix random_density(Eigen::Index n, std::mt19937_64& gen = rng()) {
  const CMatrix b = random_matrix(n, gen);
  CMatrix rho = b * b.adjoint();
  return rho / rho.trace().real();
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing

#define CHECK_ERROR_CODE(expr, expected)                          \
  do {                                                            \
    bool thrown_ = false;                                         \
    try {                                                         \
      (void)(expr);                                               \
    } catch (const catlab::Error& e_) {                           \
      thrown_ = true;                                             \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());          \
    }                                                             \
    CHECK_MESSAGE(thrown_, "expected catlab::Error from " #expr); \
  } while (0)
