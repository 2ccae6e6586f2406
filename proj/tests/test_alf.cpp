#include "catlab/entropy_alf.hpp"
#include "catlab/quantize.hpp"
#include "catlab/trends.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace catlab;
using namespace catlab::alf;
using testing::max_abs;

namespace {

const auto kArnold = torus::CatMap::arnold();

CoherentFamily family(std::int64_t N) { return CoherentFamily::binomial(weyl::WeylContext::for_map(N, kArnold)); }

double tau(const CMatrix& m) { return linalg::normalized_trace(m).real(); }

}  // namespace

TEST_CASE("trivial partition of unity") {
  const auto Y = pou_from_partition(family(8), torus::PartitionSpec(1));
  REQUIRE(Y.size() == 2);
  REQUIRE(Y.corrector == std::size_t{1});
  CHECK(max_abs(Y.ops[0] - CMatrix::Identity(8, 8)) < 1e-11);
  CHECK(max_abs(Y.ops[1]) < 1e-11);
  CHECK(Y.bistochastic);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(alf_curve(family(8).context(), Y, k).back()) < 1e-9);
}

TEST_CASE("partition of unity from the four quadrants") {
  const torus::PartitionSpec P(2);
  const auto Y = pou_from_partition(family(16), P);
  REQUIRE(Y.size() == 5);
  CHECK(unity_defect(Y) <= 1e-9 * 16);
  CHECK(bistochastic_defect(Y) <= 1e-9 * 16);
  CHECK(Y.bistochastic);
  double squares = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(linalg::hermiticity_defect(Y.ops[i]) < 1e-15);
    squares += tau(Y.ops[i] * Y.ops[i]);
  }
  const CMatrix& c = Y.ops[*Y.corrector];
  CHECK(squares == doctest::Approx(1.0 - tau(c * c)).epsilon(1e-10));
  CHECK(linalg::eigenvalues_hermitian(c).minCoeff() >= -1e-12);

  CHECK_ERROR_CODE(pou_from_partition(family(10), torus::PartitionSpec(4)), ErrorCode::IndivisibleGrid);
}

TEST_CASE("corrector shrinks with N") {
  std::vector<double> norms;
  for (std::int64_t N : {8, 16, 32, 64, 128}) {
    const auto Y = pou_from_partition(family(N), torus::PartitionSpec(2));
    const CMatrix& c = Y.ops[*Y.corrector];
    norms.push_back(tau(c * c));
  }
  CHECK(trends::strictly_decreasing(norms));
}

TEST_CASE("refinement") {
  const auto fam = family(32);
  const auto Y = pou_from_partition(fam, torus::PartitionSpec(2));
  const auto one = refine(fam.context(), Y, 1);
  REQUIRE(one.size() == Y.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(max_abs(one[i] - Y.ops[i]) == 0.0);

  const auto three = refine(fam.context(), Y, 3);
  REQUIRE(three.size() == 125);
  CMatrix sum = CMatrix::Zero(32, 32);
  for (const auto& a : three) sum += a.adjoint() * a;
  CHECK(max_abs(sum - CMatrix::Identity(32, 32)) <= 1e-8 * 32);

  // Chain (i1, i2) = Theta(y_i2) y_i1 with i1 the leading digit.
  const auto two = refine(fam.context(), Y, 2);
  const CMatrix expected = weyl::theta(fam.context(), Y.ops[3], 1) * Y.ops[1];
  CHECK(max_abs(two[1 * 5 + 3] - expected) < 1e-10);

  CHECK_ERROR_CODE(refine(fam.context(), Y, 6), ErrorCode::BudgetExceeded);
  CHECK_ERROR_CODE(refine(fam.context(), Y, 0), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(refine(weyl::WeylContext::plain(32), Y, 2), ErrorCode::MissingDynamics);
}

TEST_CASE("refined densities are compatible under partial trace") {
  const auto fam = family(16);
  const auto Y = pou_from_partition(fam, torus::PartitionSpec(2));
  for (int k : {2, 3}) {
    const auto hi = refined_density(fam.context(), Y, k);
    const auto lo = refined_density(fam.context(), Y, k - 1);
    CHECK(hi.alphabet == 5);
    CHECK(max_abs(partial_trace_last(hi.rho, 5).matrix() - lo.rho.matrix()) <= 1e-8);
  }
  CHECK_ERROR_CODE(partial_trace_last(refined_density(fam.context(), Y, 1).rho, 3), ErrorCode::DimensionMismatch);
}

TEST_CASE("chain entropy uses either Gram matrix") {
  const auto fam = family(4);
  const auto Y = pou_from_partition(fam, torus::PartitionSpec(2));
  // 125 chains against a 16-dimensional dual.
  const auto chains = refine(fam.context(), Y, 3);
  CHECK(chain_entropy(chains) == doctest::Approx(linalg::von_neumann_entropy(gram_density(chains))).epsilon(1e-9));
}

TEST_CASE("ALF entropy is bounded by 2 log N") {
  for (std::int64_t N : {4, 8, 16}) {
    const auto fam = family(N);
    const auto Y = pou_from_partition(fam, torus::PartitionSpec(2));
    const auto curve = alf_curve(fam.context(), Y, 4);
    REQUIRE(curve.size() == 4);
    for (double h : curve) {
      CHECK(h >= -1e-12);
      CHECK(h <= 2.0 * std::log(static_cast<double>(N)) + 1e-9);
    }
    CHECK(trends::nondecreasing(curve));
  }
}

TEST_CASE("quantum and classical entropies at fixed k") {
  const torus::PartitionSpec P(2);
  const auto classical = torus::refined_measures(kArnold, P, 3, 4096);
  std::vector<double> gaps;
  for (std::int64_t N : {32, 64, 128}) {
    const auto r = theorem72_gap(family(N), P, 3, classical);
    CHECK(r.N == N);
    CHECK(r.leakage >= 0.0);
    CHECK(r.leakage < 1.0);
    if (r.trace_distance <= 1.0 / std::numbers::e) CHECK(r.gap <= r.fannes / 3.0 + r.leakage + 1e-12);
    gaps.push_back(r.gap);
  }
  CHECK(trends::strictly_decreasing(gaps));

  const auto k1 = torus::refined_measures(kArnold, P, 1, 4096);
  const auto r1 = theorem72_gap(family(16), P, 1, k1);
  CHECK(r1.entropy_classical == doctest::Approx(std::log(4.0)));
  CHECK_ERROR_CODE(theorem72_gap(family(16), P, 2, k1), ErrorCode::DimensionMismatch);
}
