#pragma once

// Binomial coherent states on the quantized torus and their kernels.

#include "catlab/linalg.hpp"
#include "catlab/torus.hpp"
#include "catlab/weyl.hpp"

#include <optional>
#include <vector>

namespace catlab::coherent {

using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;
using linalg::RVector;
using torus::TorusPoint;
using weyl::WeylContext;
using weyl::WeylIndex;

class CoherentFamily {
 public:
  /// Binomial amplitudes 2^{-(N-1)/2} sqrt(C(N-1, j)), stored cyclically
  /// rotated so the peak sits at index 0.
  static CoherentFamily binomial(const WeylContext& ctx);

  /// Arbitrary real fundamental vector, stored unchecked (diagnostics and
  /// fault injection).
  static CoherentFamily from_vector(const WeylContext& ctx, RVector fundamental);

  const WeylContext& context() const noexcept { return ctx_; }
  std::int64_t N() const noexcept { return ctx_.N(); }
  const RVector& fundamental() const noexcept { return c0_; }
  bool is_binomial() const noexcept { return binomial_; }

  /// Cell label ([N x1], [N x2]).
  WeylIndex cell_of(TorusPoint x) const;

  /// W(p)|C> for a cell label.
  CVector state_at(const WeylIndex& cell) const;
  CVector state(TorusPoint x) const { return state_at(cell_of(x)); }

 private:
  CoherentFamily(WeylContext ctx, RVector c0, bool binomial);
  WeylContext ctx_;
  RVector c0_;
  bool binomial_;
};

/// | ||C|| - 1 |.
double normalization_defect(const CoherentFamily& fam);

/// || (1/N) sum_p W(p)|C><C|W(p)* - 1 ||_HS.
double overcompleteness_residual(const CoherentFamily& fam);

/// <C, W(n) C>. The binomial family is evaluated in the log domain.
Complex overlap(const CoherentFamily& fam, const WeylIndex& n);

/// max-coordinate torus distance.
double torus_distance(TorusPoint x, TorusPoint y);

/// eta(t) = -t log2 t - (1-t) log2(1-t).
double binary_entropy(double t);

/// Exponential upper bound on |<C, W(n) C>| for 0 < n1 < N; nullopt when the
/// bound does not apply.
std::optional<double> overlap_bound(std::int64_t N, std::int64_t n1);

/// N |<C, W(n) C>|^2 in closed form for n = (0, n2).
double scaled_overlap_vertical(std::int64_t N, std::int64_t n2);

struct LocalizationRow {
  TorusPoint x;
  TorusPoint y;
  double distance = 0.0;
  double scaled_kernel = 0.0;  // N |K_0(x, y)|^2
  std::optional<double> bound;  // bound on |K_0(x, y)|
};

std::vector<LocalizationRow> localization_table(const CoherentFamily& fam,
                                                const std::vector<std::pair<TorusPoint, TorusPoint>>& pairs);

/// Largest N |K_0(x, y)|^2 over all cell pairs with distance >= d_min.
double max_separated_kernel(const CoherentFamily& fam, double d_min);

/// <C(p), X C(p)> for every cell p, indexed [p1][p2].
CMatrix cell_expectations(const CoherentFamily& fam, const CMatrix& X);

/// |K_k(x, y)|^2 = <C(y), Theta^k(|C(x)><C(x)|) C(y)>.
double dynamical_kernel_sq(const CoherentFamily& fam, TorusPoint x, TorusPoint y, int k);

/// |K_k(x, y)|^2 for every cell y, indexed [y1][y2].
Eigen::MatrixXd dynamical_kernel_row(const CoherentFamily& fam, TorusPoint x, int k);

}  // namespace catlab::coherent
