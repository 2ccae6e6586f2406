#pragma once

// Anti-Wick quantization, dequantization and Weyl quantization on the torus,
// plus the semiclassical residuals built from them.

#include "catlab/coherent.hpp"
#include "catlab/linalg.hpp"
#include "catlab/torus.hpp"
#include "catlab/weyl.hpp"

#include <functional>
#include <map>
#include <memory>

namespace catlab::quantize {

using coherent::CoherentFamily;
using linalg::CMatrix;
using linalg::Complex;
using torus::CatMap;
using torus::TorusPoint;
using weyl::WeylIndex;

// Function on the torus. A trigonometric polynomial is keyed by Weyl labels:
// the term at n is exp(2 pi i (n1 x2 - n2 x1)).
class TorusFunction {
 public:
  enum class Kind { TrigPolynomial, Rectangle, Generic };

  using Evaluator = std::function<Complex(TorusPoint)>;

  static TorusFunction trig(std::map<WeylIndex, Complex> modes);
  static TorusFunction constant(Complex value);
  /// cos(2 pi x1).
  static TorusFunction cos_x1();
  /// Indicator of [x1_lo, x1_hi) x [x2_lo, x2_hi) inside the unit square.
  static TorusFunction rectangle(double x1_lo, double x1_hi, double x2_lo, double x2_hi);
  /// Indicator of {x1 < 1/2}.
  static TorusFunction left_half() { return rectangle(0.0, 0.5, 0.0, 1.0); }
  static TorusFunction atom(const torus::PartitionSpec& P, int index);
  static TorusFunction generic(Evaluator f);

  Kind kind() const noexcept { return kind_; }
  Complex operator()(TorusPoint x) const;

  /// Modes of a trigonometric polynomial; throws NotTrigPolynomial otherwise.
  const std::map<WeylIndex, Complex>& modes() const;
  const std::array<double, 4>& rectangle_bounds() const { return rect_; }

  /// f o A^{-k}: exact relabelling for trigonometric polynomials, a generic
  /// evaluator otherwise.
  TorusFunction evolve(const CatMap& A, int k) const;

 private:
  Kind kind_ = Kind::Generic;
  std::map<WeylIndex, Complex> modes_;
  std::array<double, 4> rect_{};
  Evaluator eval_;
};

/// Cell means N^2 * integral over [p1/N, (p1+1)/N) x [p2/N, (p2+1)/N).
/// Exact for polynomials and rectangles; s x s midpoint rule otherwise.
CMatrix cell_averages(const TorusFunction& f, std::int64_t N, int subsample = 4);

/// (1/N) sum_p fbar_p W(p)|C><C|W(p)*.
CMatrix anti_wick_from_averages(const CoherentFamily& fam, const CMatrix& averages);
CMatrix anti_wick(const CoherentFamily& fam, const TorusFunction& f, int subsample = 4);

/// <C(p), X C(p)> per cell.
CMatrix dequantize(const CoherentFamily& fam, const CMatrix& X);

enum class GridNorm { Sup, L2 };

/// Distance between f at cell centers and dequantize(anti_wick(f)).
double roundtrip_error(const CoherentFamily& fam, const TorusFunction& f, GridNorm norm, int subsample = 4);

/// |tau(anti_wick(f)* anti_wick(g)) - mean(conj(fbar) gbar)|.
double state_overlap_residual(const CoherentFamily& fam, const TorusFunction& f, const TorusFunction& g,
                              int subsample = 4);

/// sum_n fhat(n) W(n). Throws NotTrigPolynomial.
CMatrix weyl_quantize(const weyl::WeylContext& ctx, const TorusFunction& f);

/// || Theta^k(anti_wick(f)) - anti_wick(f o A^{-k}) ||_2 (normalized HS).
double egorov_residual(const CoherentFamily& fam, const TorusFunction& f, int k, int subsample = 4);

}  // namespace catlab::quantize
