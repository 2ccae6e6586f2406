#include "catlab/quantize.hpp"
#include "catlab/trends.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace catlab;
using namespace catlab::quantize;
using testing::max_abs;

namespace {

const auto kArnold = torus::CatMap::arnold();

CoherentFamily family(std::int64_t N) { return CoherentFamily::binomial(weyl::WeylContext::for_map(N, kArnold)); }

double min_eigenvalue(const CMatrix& m) { return linalg::eigenvalues_hermitian(0.5 * (m + m.adjoint())).minCoeff(); }

TorusFunction random_trig(int modes, std::int64_t radius) {
  std::uniform_int_distribution<std::int64_t> d(-radius, radius);
  std::normal_distribution<double> g;
  std::map<WeylIndex, Complex> m;
  for (int i = 0; i < modes; ++i) m[{d(testing::rng()), d(testing::rng())}] += Complex(g(testing::rng()), g(testing::rng()));
  return TorusFunction::trig(m);
}

// Midpoint rule on a fine grid inside each cell; independent of cell_averages.
Complex fine_cell_average(const TorusFunction& f, std::int64_t N, std::int64_t a, std::int64_t b, int s) {
  Complex acc = 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      acc += f({(a + (i + 0.5) / s) / static_cast<double>(N), (b + (j + 0.5) / s) / static_cast<double>(N)});
  return acc / static_cast<double>(s * s);
}

}  // namespace

TEST_CASE("torus functions") {
  const auto c = TorusFunction::cos_x1();
  CHECK(c({0.0, 0.3}).real() == doctest::Approx(1.0));
  CHECK(c({0.25, 0.9}).real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.modes().size() == 2);
  const auto l = TorusFunction::left_half();
  CHECK(l({0.2, 0.9}).real() == 1.0);
  CHECK(l({0.7, 0.1}).real() == 0.0);
  CHECK_ERROR_CODE(TorusFunction::rectangle(0.5, 1.5, 0.0, 1.0), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(l.modes(), ErrorCode::NotTrigPolynomial);
  const auto atom = TorusFunction::atom(torus::PartitionSpec(2), 1);
  CHECK(atom({0.1, 0.6}).real() == 1.0);
  CHECK(atom({0.6, 0.6}).real() == 0.0);
}

TEST_CASE("evolution is composition with the inverse map") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto f = random_trig(4, 3);
  const auto r = TorusFunction::rectangle(0.1, 0.6, 0.3, 0.8);
  for (int k : {1, 2, 3}) {
    const auto fk = f.evolve(kArnold, k);
    const auto rk = r.evolve(kArnold, k);
    CHECK(fk.kind() == TorusFunction::Kind::TrigPolynomial);
    for (int t = 0; t < 20; ++t) {
      const torus::TorusPoint x{u(testing::rng()), u(testing::rng())};
      const auto pre = torus::cat_apply(kArnold, x, -k);
      CHECK(std::abs(fk(x) - f(pre)) < 1e-10);
      CHECK(rk(x) == r(pre));
    }
  }
}

TEST_CASE("cell averages") {
  const std::int64_t N = 8;
  const auto f = random_trig(5, 3);
  const CMatrix avg = cell_averages(f, N);
  for (std::int64_t a = 0; a < N; a += 3)
    for (std::int64_t b = 0; b < N; b += 2) CHECK(std::abs(avg(a, b) - fine_cell_average(f, N, a, b, 200)) < 1e-4);

  const CMatrix atom = cell_averages(TorusFunction::atom(torus::PartitionSpec(2), 3), N);
  for (std::int64_t a = 0; a < N; ++a)
    for (std::int64_t b = 0; b < N; ++b) CHECK(atom(a, b).real() == ((a >= 4 && b >= 4) ? 1.0 : 0.0));

  const CMatrix rect = cell_averages(TorusFunction::rectangle(0.0, 0.3, 0.0, 1.0), 10);
  CHECK(rect(2, 0).real() == doctest::Approx(1.0));
  CHECK(rect(3, 0).real() == doctest::Approx(0.0));
  CHECK(cell_averages(TorusFunction::rectangle(0.0, 0.25, 0.0, 1.0), 6)(1, 4).real() == doctest::Approx(0.5));
}

TEST_CASE("anti-Wick quantization examples") {
  for (std::int64_t N : {2, 8, 32}) {
    const auto fam = family(N);
    CHECK(max_abs(anti_wick(fam, TorusFunction::constant(1.0)) - CMatrix::Identity(N, N)) < 1e-11);
    const CMatrix left = anti_wick(fam, TorusFunction::left_half());
    CHECK(linalg::normalized_trace(left).real() == doctest::Approx(0.5).epsilon(1e-14));
    const CMatrix c = anti_wick(fam, TorusFunction::cos_x1());
    CHECK(linalg::hermiticity_defect(c) < 1e-14);
    CHECK(std::abs(linalg::normalized_trace(c)) < 1e-12);
  }
}

TEST_CASE("anti-Wick is positive, unital and contractive") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t N : {6, 16}) {
    const auto fam = family(N);
    for (int t = 0; t < 5; ++t) {
      // Positive random function of sup norm <= 1.
      const double a = u(testing::rng()), b = u(testing::rng());
      const auto f = TorusFunction::generic([=](torus::TorusPoint x) {
        return Complex(0.5 + 0.5 * std::sin(2 * std::numbers::pi * (x.x1 + a)) * std::cos(2 * std::numbers::pi * (x.x2 * 2 + b)));
      });
      const CMatrix q = anti_wick(fam, f);
      CHECK(min_eigenvalue(q) >= -1e-12);
      CHECK(linalg::eigenvalues_hermitian(0.5 * (q + q.adjoint())).maxCoeff() <= 1.0 + 1e-12);
      const CMatrix back = dequantize(fam, q);
      CHECK(back.real().minCoeff() >= -1e-12);
      CHECK(back.real().maxCoeff() <= 1.0 + 1e-12);
      // Trace duality: tau of the quantization is the mean of the cell averages.
      CHECK(std::abs(linalg::normalized_trace(q) - cell_averages(f, N).mean()) < 1e-12);
    }
  }
}

TEST_CASE("quantized atoms satisfy y^2 <= y") {
  const torus::PartitionSpec P(2);
  for (std::int64_t N : {8, 16}) {
    const auto fam = family(N);
    for (int i = 0; i < P.atoms(); ++i) {
      const CMatrix y = anti_wick(fam, TorusFunction::atom(P, i));
      CHECK(min_eigenvalue(y - y * y) >= -1e-10);
      CHECK(linalg::normalized_trace(y).real() == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("dequantization") {
  const std::int64_t N = 16;
  const auto fam = family(N);
  const CMatrix one = dequantize(fam, CMatrix::Identity(N, N));
  CHECK(max_abs(one - CMatrix::Ones(N, N)) < 1e-12);

  const coherent::CVector c0 = fam.state_at({0, 0});
  const CMatrix proj = c0 * c0.adjoint();
  const CMatrix back = dequantize(fam, proj);
  Eigen::Index r = 0, col = 0;
  back.real().maxCoeff(&r, &col);
  CHECK(r == 0);
  CHECK(col == 0);
  for (std::int64_t a = 0; a < N; a += 5)
    for (std::int64_t b = 0; b < N; b += 3)
      CHECK(back(a, b).real() == doctest::Approx(std::norm(coherent::overlap(fam, {a, b}))).epsilon(1e-10));
}

TEST_CASE("round trip errors") {
  for (std::int64_t N : {4, 16, 64}) CHECK(roundtrip_error(family(N), TorusFunction::constant(1.0), GridNorm::Sup) <= 1e-11);
  std::vector<double> cos_l2, cos_sup, left_l2;
  for (std::int64_t N : {8, 16, 32, 64, 128}) {
    const auto fam = family(N);
    cos_l2.push_back(roundtrip_error(fam, TorusFunction::cos_x1(), GridNorm::L2));
    cos_sup.push_back(roundtrip_error(fam, TorusFunction::cos_x1(), GridNorm::Sup));
    left_l2.push_back(roundtrip_error(fam, TorusFunction::left_half(), GridNorm::L2));
  }
  CHECK(trends::strictly_decreasing(cos_l2));
  CHECK(trends::strictly_decreasing(cos_sup));
  CHECK(trends::decreasing_with_one_inversion(left_l2, 0.05));
}

TEST_CASE("state overlap residuals") {
  const auto one = TorusFunction::constant(1.0);
  CHECK(state_overlap_residual(family(16), one, one) < 1e-11);
  std::vector<double> same, disjoint;
  const auto left = TorusFunction::left_half(), right = TorusFunction::rectangle(0.5, 1.0, 0.0, 1.0);
  for (std::int64_t N : {8, 16, 32, 64, 128}) {
    const auto fam = family(N);
    same.push_back(state_overlap_residual(fam, left, left));
    disjoint.push_back(state_overlap_residual(fam, left, right));
    const CMatrix q = anti_wick(fam, left);
    const double tau = linalg::normalized_trace(q * q).real();
    CHECK(tau < 0.5);
    CHECK(std::abs(0.5 - tau - same.back()) < 1e-12);
  }
  CHECK(trends::decreasing_with_one_inversion(same, 0.05));
  CHECK(trends::decreasing_with_one_inversion(disjoint, 0.05));
}

TEST_CASE("Weyl quantization of trigonometric polynomials") {
  const std::int64_t N = 9;
  const auto ctx = weyl::WeylContext::for_map(N, kArnold);
  CHECK(max_abs(weyl_quantize(ctx, TorusFunction::constant(1.0)) - CMatrix::Identity(N, N)) < 1e-14);
  const auto mode = TorusFunction::trig({{{1, 0}, 1.0}});
  CHECK(max_abs(weyl_quantize(ctx, mode) - weyl::weyl_operator(ctx, {1, 0})) < 1e-14);
  const CMatrix c = weyl_quantize(ctx, TorusFunction::cos_x1());
  CHECK(max_abs(c - 0.5 * (weyl::weyl_operator(ctx, {0, 1}) + weyl::weyl_operator(ctx, {0, -1}))) < 1e-14);

  // tau(W(f)* W(f)) = sum |f_n|^2 once N exceeds the spread of the modes.
  const auto f = random_trig(6, 2);
  double norm2 = 0.0;
  for (const auto& [n, v] : f.modes()) norm2 += std::norm(v);
  for (std::int64_t M : {5, 8, 16}) {
    const CMatrix w = weyl_quantize(weyl::WeylContext::for_map(M, kArnold), f);
    CHECK(linalg::normalized_trace(w.adjoint() * w).real() == doctest::Approx(norm2).epsilon(1e-12));
  }
}

TEST_CASE("Egorov residual") {
  for (int t = 0; t < 5; ++t) CHECK(egorov_residual(family(16), random_trig(4, 3), 0) <= 1e-11);
  CHECK(egorov_residual(family(32), TorusFunction::left_half(), 0) <= 1e-11);

  std::vector<double> at_k2;
  for (std::int64_t N : {32, 64, 128, 256, 512}) at_k2.push_back(egorov_residual(family(N), TorusFunction::cos_x1(), 2));
  CHECK(trends::strictly_decreasing(at_k2));

  // Breaking-time signature at N = 128: small below log N / (2 log lambda) ~ 2.5, large after.
  std::vector<double> curve;
  const auto fam = family(128);
  for (int k = 0; k <= 4; ++k) curve.push_back(egorov_residual(fam, TorusFunction::cos_x1(), k));
  CHECK(trends::nondecreasing(curve));
  CHECK(curve[1] < 0.1);
  CHECK(curve[3] > 0.1);

  const auto plain = CoherentFamily::binomial(weyl::WeylContext::plain(8));
  CHECK_ERROR_CODE(egorov_residual(plain, TorusFunction::cos_x1(), 1), ErrorCode::MissingDynamics);
  CHECK_ERROR_CODE(egorov_residual(fam, TorusFunction::cos_x1(), -1), ErrorCode::InvalidArgument);
}
