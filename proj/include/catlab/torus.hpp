#pragma once

// Classical side: hyperbolic toral automorphisms, grid partitions and the
// measures of their dynamical refinements.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace catlab::torus {

// Integer matrix ((a, b), (c, d)) with unit determinant and |a + d| > 2.
class CatMap {
 public:
  /// Throws NotUnimodular when ad - bc != 1, NotHyperbolic when |a + d| <= 2.
  static CatMap make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
  static CatMap arnold() { return make(1, 1, 1, 2); }

  std::int64_t a() const noexcept { return a_; }
  std::int64_t b() const noexcept { return b_; }
  std::int64_t c() const noexcept { return c_; }
  std::int64_t d() const noexcept { return d_; }
  std::int64_t trace() const noexcept { return a_ + d_; }

  /// Expanding eigenvalue modulus and its logarithm.
  double lambda() const noexcept { return lambda_; }
  double log_lambda() const noexcept { return log_lambda_; }

  CatMap inverse() const;

  /// A^k applied to an integer vector; k may be negative. 128-bit
  /// intermediates, throws InvalidArgument on overflow of the 64-bit result.
  std::array<std::int64_t, 2> apply(std::int64_t n1, std::int64_t n2, int k = 1) const;

  /// A^k applied to an integer vector modulo m (m > 0); result in [0, m).
  std::array<std::int64_t, 2> apply_mod(std::int64_t n1, std::int64_t n2, std::int64_t m, int k = 1) const;

  /// Transpose matrix (a, c; b, d); also unimodular and hyperbolic.
  CatMap transpose() const { return CatMap(a_, c_, b_, d_); }

  bool operator==(const CatMap& o) const noexcept {
    return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
  }

 private:
  CatMap(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
  std::int64_t a_, b_, c_, d_;
  double lambda_, log_lambda_;
};

struct TorusPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Reduces both coordinates into [0, 1).
TorusPoint wrap(double x1, double x2);

/// A^k p mod 1, applied one step at a time (inverse steps for k < 0).
TorusPoint cat_apply(const CatMap& A, TorusPoint p, int k);

/// log lambda. Hyperbolicity is enforced when the map is built.
double lyapunov(const CatMap& A);

// q_side x q_side half-open squares; atom index = row * q_side + col with
// row from x1 and col from x2.
class PartitionSpec {
 public:
  explicit PartitionSpec(int q_side);

  int q_side() const noexcept { return q_side_; }
  int atoms() const noexcept { return q_side_ * q_side_; }
  double atom_measure() const noexcept { return 1.0 / atoms(); }
  int atom_of(TorusPoint p) const;

  /// Corner coordinates of an atom: [x1_lo, x1_hi) x [x2_lo, x2_hi).
  std::array<double, 4> bounds(int atom) const;

 private:
  int q_side_;
};

enum class TimeDirection {
  Forward,   // symbol j is the atom of A^j s
  Backward,  // symbol j is the atom of A^-j s
};

struct RefinedMeasureOptions {
  TimeDirection direction = TimeDirection::Forward;
  bool enforce_resolution = false;
};

// Multi-index codes put symbol 0 in the most significant base-q digit.
struct RefinedMeasure {
  int k = 0;
  int q = 1;
  std::int64_t lattice = 0;
  std::map<std::uint64_t, double> weights;
  double err = 0.0;

  std::vector<int> decode(std::uint64_t code) const;
  std::uint64_t encode(const std::vector<int>& symbols) const;
  double total() const;
};

/// Perimeter constant in err = C * k * lambda^k / M.
double perimeter_constant(const PartitionSpec& P);

/// Symbol statistics of the M x M centered lattice ((2i+1)/2M, (2j+1)/2M).
/// Throws InvalidArgument if M < q_side or k < 1; ResolutionTooCoarse when
/// enforced and err > 0.1 / q^k.
RefinedMeasure refined_measures(const CatMap& A, const PartitionSpec& P, int k, std::int64_t M,
                                RefinedMeasureOptions options = {});

/// Measure of the first k' symbols (k' <= m.k).
RefinedMeasure marginal(const RefinedMeasure& m, int k_prefix);

double shannon_entropy(const RefinedMeasure& m);

/// S(C^(k_max)) - S(C^(k_max - 1)) on an M lattice.
double ks_entropy_estimate(const CatMap& A, const PartitionSpec& P, int k_max, std::int64_t M = 4096);

}  // namespace catlab::torus
