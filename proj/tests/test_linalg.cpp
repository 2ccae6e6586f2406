#include "catlab/linalg.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace catlab;
using namespace catlab::linalg;
using testing::max_abs;

namespace {

CMatrix diag(std::initializer_list<double> values) {
  std::vector<double> v(values);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

}  // namespace

TEST_CASE("eig_hermitian on small fixed matrices") {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto s = eig_hermitian(x);
  CHECK(s.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(s.eigenvalues(1) == doctest::Approx(1.0));

  const auto id = eigenvalues_hermitian(CMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) CHECK(id(i) == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian rejects non-Hermitian and mismatched input") {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_ERROR_CODE(eig_hermitian(m), ErrorCode::NotHermitian);
  CHECK_ERROR_CODE(eig_hermitian(CMatrix::Zero(2, 3)), ErrorCode::DimensionMismatch);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 9;
    CMatrix h = testing::random_hermitian(n);
    h *= 10.0 * (trial + 1) / hs_norm(h);  // HS norm up to 200
    const auto s = eig_hermitian(h);
    const CMatrix back = s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    CHECK(hs_norm(h - back) <= 1e-10 * static_cast<double>(n) * std::max(1.0, hs_norm(h) / 100.0));
    CHECK(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - CMatrix::Identity(n, n)) < 1e-12);
  }
}

TEST_CASE("sqrt_psd") {
  CHECK(max_abs(sqrt_psd(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)) < 1e-14);
  CHECK(max_abs(sqrt_psd(diag({4, 9})) - diag({2, 3})) < 1e-14);

  Eigen::VectorXcd v = Eigen::VectorXcd::Random(5);
  v.normalize();
  const CMatrix proj = v * v.adjoint();
  CHECK(max_abs(sqrt_psd(proj) - proj) < 1e-7);

  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 3 + trial;
    const CMatrix b = testing::random_matrix(n);
    const CMatrix m = b * b.adjoint();
    const CMatrix r = sqrt_psd(m);
    CHECK(max_abs(r * r - m) <= 1e-9 * static_cast<double>(n));
  }
  CHECK_ERROR_CODE(sqrt_psd(diag({1, -0.5})), ErrorCode::NotPSD);
}

TEST_CASE("von Neumann entropy of diagonal states") {
  CHECK(von_neumann_entropy(DensityMatrix(diag({1, 0}))) == doctest::Approx(0.0));
  CHECK(von_neumann_entropy(DensityMatrix(diag({0.5, 0.5}))) == doctest::Approx(std::log(2.0)));
  CHECK(von_neumann_entropy(DensityMatrix(diag({0.25, 0.25, 0.25, 0.25}))) == doctest::Approx(std::log(4.0)));
  CHECK(von_neumann_entropy(DensityMatrix(diag({0.5, 0.5})), LogBase::Two) == doctest::Approx(1.0));
}

TEST_CASE("DensityMatrix validation") {
  CHECK_ERROR_CODE(DensityMatrix(diag({0.5, 0.4})), ErrorCode::InvalidState);
  CHECK_ERROR_CODE(DensityMatrix(diag({1.5, -0.5})), ErrorCode::NotPSD);
  CMatrix skew(2, 2);
  skew << 0.5, 0.1, 0.3, 0.5;
  CHECK_ERROR_CODE(DensityMatrix(skew), ErrorCode::NotHermitian);
}

TEST_CASE("entropy is unitarily invariant") {
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const CMatrix rho = testing::random_density(n);
    const CMatrix U = testing::random_unitary(n);
    CMatrix rotated = U * rho * U.adjoint();
    rotated = 0.5 * (rotated + rotated.adjoint()).eval();
    CHECK(std::abs(von_neumann_entropy(DensityMatrix(rho)) - von_neumann_entropy(DensityMatrix(rotated))) < 1e-10);
  }
}

TEST_CASE("trace-norm distance") {
  const DensityMatrix a(testing::random_density(4));
  CHECK(trace_norm_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_norm_distance(DensityMatrix(diag({1, 0})), DensityMatrix(diag({0, 1}))) == doctest::Approx(2.0));
  CHECK(trace_norm_distance(DensityMatrix(diag({1, 0})), DensityMatrix(diag({0.5, 0.5}))) == doctest::Approx(1.0));
}

TEST_CASE("Fannes bound") {
  CHECK(fannes_bound(0.0, 7) == 0.0);
  const double inv_e = std::exp(-1.0);
  CHECK(fannes_bound(inv_e, 2) == doctest::Approx(std::log(2.0) / std::numbers::e + inv_e));
  CHECK_ERROR_CODE(fannes_bound(-0.1, 2), ErrorCode::InvalidArgument);

  // Close pairs: a mixed with a small perturbation.
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = testing::random_density(4);
    const CMatrix b = testing::random_density(4);
    const double t = 0.02 + 0.3 * (trial % 10) / 10.0;
    const CMatrix c = (1.0 - t) * a + t * b;
    const DensityMatrix da(a), dc(c);
    const double delta = trace_norm_distance(da, dc);
    if (delta > 1.0 / std::numbers::e) continue;
    ++checked;
    CHECK(std::abs(von_neumann_entropy(da) - von_neumann_entropy(dc)) <= fannes_bound(delta, 4) + 1e-12);
  }
  CHECK(checked > 50);
}

TEST_CASE("normalized trace, HS norm and Shannon entropy") {
  CHECK(normalized_trace(CMatrix::Identity(5, 5)).real() == doctest::Approx(1.0));
  CHECK(normalized_hs_norm(CMatrix::Identity(5, 5)) == doctest::Approx(1.0));
  const std::vector<double> p{0.5, 0.25, 0.25, 0.0};
  CHECK(shannon_entropy(p) == doctest::Approx(1.5 * std::log(2.0)));
  CHECK(eta(0.0) == 0.0);
}

TEST_CASE("entropy_of_psd normalizes by the trace") {
  CHECK(entropy_of_psd(diag({2, 2})) == doctest::Approx(std::log(2.0)));
  CHECK_ERROR_CODE(entropy_of_psd(diag({0, 0})), ErrorCode::InvalidState);
}
