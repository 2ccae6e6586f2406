#pragma once

// Finite Weyl algebra on C^N: phased clock/shift operators for arbitrary
// integer labels, coefficient expansion and the cat-map automorphism.

#include "catlab/linalg.hpp"
#include "catlab/torus.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace catlab::weyl {

using linalg::CMatrix;
using linalg::Complex;
using Rational = boost::rational<std::int64_t>;

struct WeylIndex {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  WeylIndex operator-() const { return {-n1, -n2}; }
  WeylIndex operator+(const WeylIndex& o) const { return {n1 + o.n1, n2 + o.n2}; }
  auto operator<=>(const WeylIndex&) const = default;
};

/// sigma(n, m) = n1 m2 - n2 m1.
std::int64_t symplectic(const WeylIndex& n, const WeylIndex& m);

struct UV {
  Rational u;
  Rational v;
};

/// Canonical solution in [0,1)^2 of (A^t - 1)(u,v) = (N/2)(ac, bd) mod 1.
UV solve_uv(const torus::CatMap& A, std::int64_t N);

/// True when (A^t - 1)(u,v) - (N/2)(ac, bd) is an integer vector.
bool satisfies_uv(const torus::CatMap& A, std::int64_t N, const UV& uv);

class WeylContext {
 public:
  /// Representation without dynamics.
  static WeylContext plain(std::int64_t N, UV uv = {});
  /// Representation compatible with A, using the canonical solution.
  static WeylContext for_map(std::int64_t N, const torus::CatMap& A);
  /// Explicit (u,v); throws InvalidArgument unless (u,v) solves the congruence for A.
  static WeylContext with_uv(std::int64_t N, const torus::CatMap& A, UV uv);

  std::int64_t N() const noexcept { return N_; }
  const UV& uv() const noexcept { return uv_; }
  const std::optional<torus::CatMap>& map() const noexcept { return map_; }

  /// exp(i pi/N (-n1 n2 + 2 n1 u + 2 n2 v)), exact reduction of the angle.
  Complex label_phase(const WeylIndex& n) const;

  /// label_phase on the fundamental labels p in [0,N)^2, row p1, column p2.
  const CMatrix& phase_table() const { return tables_->phase; }
  /// F(j, p) = exp(2 pi i j p / N).
  const CMatrix& dft() const { return tables_->dft; }

  // One A-step on reduced labels: W(p) -> step_factor[p] * W(step_target[p]).
  const std::vector<std::int64_t>& step_target() const;
  const std::vector<Complex>& step_factor() const;

 private:
  struct Tables {
    CMatrix phase;
    CMatrix dft;
    std::vector<std::int64_t> target;
    std::vector<Complex> factor;
  };

  WeylContext(std::int64_t N, UV uv, std::optional<torus::CatMap> A);

  std::int64_t N_;
  UV uv_;
  std::optional<torus::CatMap> map_;
  std::shared_ptr<const Tables> tables_;
};

/// W(n)|j> = label_phase(n) exp(-2 pi i j n2 / N) |j + n1 mod N>.
CMatrix weyl_operator(const WeylContext& ctx, const WeylIndex& n);

/// tau_N(W(n)): label_phase(n) when n = 0 mod N, else 0.
Complex weyl_trace(const WeylContext& ctx, const WeylIndex& n);

// Coefficients c(p1, p2) of X = sum_p c_p W(p), p in [0,N)^2.
struct WeylCoefficients {
  std::int64_t N = 0;
  CMatrix coeffs;
};

WeylCoefficients expand(const WeylContext& ctx, const CMatrix& X);
CMatrix reconstruct(const WeylContext& ctx, const WeylCoefficients& c);

/// Coefficients of W(m) for arbitrary m, folded onto [0,N)^2.
WeylCoefficients coefficients_of(const WeylContext& ctx, const std::vector<std::pair<WeylIndex, Complex>>& terms);

/// Applies k steps of W(p) -> W(Ap) to a coefficient set. Throws
/// MissingDynamics without a map, InvalidArgument for k < 0.
WeylCoefficients transport(const WeylContext& ctx, const WeylCoefficients& c, int k);

/// Theta^k(X).
CMatrix theta(const WeylContext& ctx, const CMatrix& X, int k);

/// (1/N) sum_p W(-p) W(n) W(p), p in [0,N)^2.
CMatrix weyl_average_check(const WeylContext& ctx, const WeylIndex& n);

}  // namespace catlab::weyl
