#include "catlab/torus.hpp"
#include "support.hpp"

#include <cmath>
#include <map>

using namespace catlab;
using namespace catlab::torus;

namespace {

// Refined-partition entropies of the Arnold map, q_side = 2, on the centered
// 4096^2 lattice; computed independently with numpy (dyadic coordinates make
// the float iteration exact).
constexpr double kArnoldEntropy[] = {1.3862943611198906, 2.7725884838211643, 4.04068236494526,
                                     5.19118846216125,   6.257846551795459,  7.2773376109979235,
                                     8.272169436023841,  9.253049410600344};

double torus_gap(TorusPoint a, TorusPoint b) {
  auto d = [](double u, double v) {
    const double t = std::abs(u - v);
    return std::min(t, 1.0 - t);
  };
  return std::max(d(a.x1, b.x1), d(a.x2, b.x2));
}

}  // namespace

TEST_CASE("CatMap construction guards") {
  CHECK_NOTHROW(CatMap::arnold());
  CHECK_ERROR_CODE(CatMap::make(1, 1, 1, 1), ErrorCode::NotUnimodular);
  CHECK_ERROR_CODE(CatMap::make(1, 1, 0, 1), ErrorCode::NotHyperbolic);
  CHECK_ERROR_CODE(CatMap::make(0, 1, -1, 0), ErrorCode::NotHyperbolic);
  CHECK_NOTHROW(CatMap::make(-3, 1, -1, 0));
}

TEST_CASE("lyapunov exponent") {
  const double expected = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(lyapunov(CatMap::arnold()) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(lyapunov(CatMap::make(2, 1, 1, 1)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.962424).epsilon(1e-6));
}

TEST_CASE("cat_apply examples and inverse") {
  const auto A = CatMap::arnold();
  const auto p = cat_apply(A, {0.5, 0.5}, 1);
  CHECK(p.x1 == doctest::Approx(0.0));
  CHECK(p.x2 == doctest::Approx(0.5));
  const auto q = cat_apply(A, {0.3, 0.7}, 0);
  CHECK(q.x1 == 0.3);
  CHECK(q.x2 == 0.7);
  const auto back = cat_apply(A, cat_apply(A, {0.2, 0.1}, 1), -1);
  CHECK(torus_gap(back, {0.2, 0.1}) < 1e-12);
  const auto inv = A.inverse();
  CHECK(inv.a() == 2);
  CHECK(inv.b() == -1);
  CHECK(inv.c() == -1);
  CHECK(inv.d() == 1);
}

TEST_CASE("cat_apply composes") {
  const auto A = CatMap::arnold();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const TorusPoint p{u(testing::rng()), u(testing::rng())};
    const int j = trial % 5 - 2, k = (trial / 5) % 5 - 2;
    CHECK(torus_gap(cat_apply(A, cat_apply(A, p, k), j), cat_apply(A, p, j + k)) < 1e-12);
  }
}

TEST_CASE("integer orbits") {
  const auto A = CatMap::arnold();
  const auto n = A.apply(1, 0, 1);
  CHECK(n[0] == 1);
  CHECK(n[1] == 1);
  const auto m = A.apply(1, 0, 3);  // A^3 = ((5,8),(8,13))
  CHECK(m[0] == 5);
  CHECK(m[1] == 8);
  const auto r = A.apply(5, 8, -3);
  CHECK(r[0] == 1);
  CHECK(r[1] == 0);
  const auto w = A.apply_mod(1, 0, 4, 3);
  CHECK(w[0] == 1);
  CHECK(w[1] == 0);
  CHECK_ERROR_CODE(A.apply(1, 0, 200), ErrorCode::InvalidArgument);
}

TEST_CASE("partition atoms") {
  const PartitionSpec P(2);
  CHECK(P.atoms() == 4);
  CHECK(P.atom_of({0.1, 0.1}) == 0);
  CHECK(P.atom_of({0.1, 0.6}) == 1);
  CHECK(P.atom_of({0.6, 0.1}) == 2);
  CHECK(P.atom_of({0.6, 0.6}) == 3);
  CHECK(P.atom_of({1.0, 1.0}) == 0);
  const auto b = P.bounds(2);
  CHECK(b[0] == 0.5);
  CHECK(b[1] == 1.0);
  CHECK(b[2] == 0.0);
  CHECK(b[3] == 0.5);
  CHECK_ERROR_CODE(PartitionSpec(0), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(P.bounds(4), ErrorCode::InvalidArgument);
}

TEST_CASE("refined measures at k = 1 and k = 2") {
  const auto A = CatMap::arnold();
  const PartitionSpec P(2);
  for (std::int64_t M : {2, 64, 1000}) {
    const auto m = refined_measures(A, P, 1, M);
    REQUIRE(m.weights.size() == 4);
    for (const auto& [code, w] : m.weights) CHECK(w == 0.25);
  }
  const auto m2 = refined_measures(A, P, 2, 4096);
  CHECK(m2.total() == 1.0);
  CHECK(m2.err > 0.0);
}

TEST_CASE("refined measures agree with a finer brute-force lattice") {
  // Independent oracle: iterate points of an 8192^2 grid in floating point.
  const auto A = CatMap::arnold();
  const PartitionSpec P(2);
  const auto m = refined_measures(A, P, 2, 4096);
  const int M = 8192;
  std::map<std::uint64_t, double> fine;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const TorusPoint x{(i + 0.5) / M, (j + 0.5) / M};
      const TorusPoint y = cat_apply(A, x, 1);
      fine[static_cast<std::uint64_t>(P.atom_of(x) * 4 + P.atom_of(y))] += 1.0 / (double(M) * M);
    }
  for (const auto& [code, w] : fine) {
    const double got = m.weights.count(code) ? m.weights.at(code) : 0.0;
    CHECK(std::abs(got - w) <= m.err);
  }
}

TEST_CASE("refined measure codes") {
  RefinedMeasure m;
  m.k = 3;
  m.q = 4;
  CHECK(m.encode({1, 2, 3}) == 27);
  CHECK(m.decode(27) == std::vector<int>{1, 2, 3});
}

TEST_CASE("entropy of refined partitions matches the lattice oracle") {
  const auto A = CatMap::arnold();
  const PartitionSpec P(2);
  const auto full = refined_measures(A, P, 8, 4096);
  CHECK(full.total() == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 1; k <= 8; ++k)
    CHECK(shannon_entropy(marginal(full, k)) == doctest::Approx(kArnoldEntropy[k - 1]).epsilon(1e-12));

  // Nondecreasing in k, increments nonincreasing up to the lattice error.
  double prev_s = 0.0, prev_inc = 1e9;
  for (int k = 1; k <= 8; ++k) {
    const auto mk = marginal(full, k);
    const double s = shannon_entropy(mk);
    CHECK(s >= prev_s);
    CHECK(s - prev_s <= prev_inc + mk.err);
    prev_inc = s - prev_s;
    prev_s = s;
  }
  CHECK(std::abs(prev_inc - lyapunov(A)) / lyapunov(A) <= 0.10);
}

TEST_CASE("trivial partition has zero entropy") {
  const auto A = CatMap::arnold();
  const PartitionSpec P(1);
  for (int k = 1; k <= 4; ++k) CHECK(shannon_entropy(refined_measures(A, P, k, 64)) == 0.0);
  CHECK(ks_entropy_estimate(A, P, 4, 64) == 0.0);
}

TEST_CASE("KS entropy estimate") {
  const auto A = CatMap::arnold();
  const double est = ks_entropy_estimate(A, PartitionSpec(2), 8);
  CHECK(est == doctest::Approx(kArnoldEntropy[7] - kArnoldEntropy[6]).epsilon(1e-10));
  CHECK(std::abs(est - 0.9624) <= 0.1);
  CHECK_ERROR_CODE(ks_entropy_estimate(A, PartitionSpec(2), 1), ErrorCode::InvalidArgument);
}

TEST_CASE("both time directions give equal entropies") {
  // The centered sampling lattice is not exactly A-invariant, so the two
  // directions agree up to a discretization term of order 1/M^2.
  const auto A = CatMap::arnold();
  const PartitionSpec P(2);
  for (std::int64_t M : {1024, 4096}) {
    const double tol = 10.0 / static_cast<double>(M * M);
    for (int k = 1; k <= 5; ++k) {
      const auto f = refined_measures(A, P, k, M);
      const auto b = refined_measures(A, P, k, M, {TimeDirection::Backward, false});
      CHECK(std::abs(shannon_entropy(f) - shannon_entropy(b)) <= tol);
    }
  }
}

TEST_CASE("resolution guard is opt-in") {
  const auto A = CatMap::arnold();
  const PartitionSpec P(2);
  CHECK_NOTHROW(refined_measures(A, P, 8, 4096));
  CHECK_ERROR_CODE(refined_measures(A, P, 8, 4096, {TimeDirection::Forward, true}), ErrorCode::ResolutionTooCoarse);
  CHECK_ERROR_CODE(refined_measures(A, P, 0, 4096), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(refined_measures(A, P, 2, 1), ErrorCode::InvalidArgument);
}

TEST_CASE("lattice counts are invariant under the map") {
  // A permutes the centered lattice, so per-atom counts of images equal
  // per-atom counts of the lattice itself.
  const auto A = CatMap::arnold();
  const PartitionSpec P(4);
  const int M = 256;
  std::vector<int> before(16, 0), after(16, 0);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const std::int64_t n1 = 2 * i + 1, n2 = 2 * j + 1;
      ++before[static_cast<std::size_t>(P.atom_of({n1 / (2.0 * M), n2 / (2.0 * M)}))];
      const auto m = A.apply_mod(n1, n2, 2 * M, 1);
      ++after[static_cast<std::size_t>(P.atom_of({m[0] / (2.0 * M), m[1] / (2.0 * M)}))];
    }
  CHECK(before == after);
}
