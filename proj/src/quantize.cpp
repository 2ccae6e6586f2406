#include "catlab/quantize.hpp"

#include "catlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace catlab::quantize {

namespace {

std::int64_t mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

// N * integral of exp(2 pi i a x) over [s/N, (s+1)/N), for s = 0..N-1.
Eigen::VectorXcd mode_cell_means(std::int64_t a, std::int64_t N) {
  Eigen::VectorXcd out(N);
  if (a == 0) {
    out.setOnes();
    return out;
  }
  const double t = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(N);
  const Complex factor = (std::exp(Complex(0.0, t)) - 1.0) / Complex(0.0, t);
  for (std::int64_t s = 0; s < N; ++s) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(mod(a * s, N)) / static_cast<double>(N);
    out(s) = std::exp(Complex(0.0, angle)) * factor;
  }
  return out;
}

// N * |[s/N, (s+1)/N) cap [lo, hi)|.
Eigen::VectorXd interval_cell_means(double lo, double hi, std::int64_t N) {
  Eigen::VectorXd out(N);
  const double n = static_cast<double>(N);
  for (std::int64_t s = 0; s < N; ++s) {
    const double a = static_cast<double>(s) / n, b = static_cast<double>(s + 1) / n;
    out(s) = std::max(0.0, std::min(b, hi) - std::max(a, lo)) * n;
  }
  return out;
}

}  // namespace

TorusFunction TorusFunction::trig(std::map<WeylIndex, Complex> modes) {
  TorusFunction f;
  f.kind_ = Kind::TrigPolynomial;
  f.modes_ = std::move(modes);
  return f;
}

TorusFunction TorusFunction::constant(Complex value) { return trig({{WeylIndex{0, 0}, value}}); }

TorusFunction TorusFunction::cos_x1() {
  // sigma((0, +-1), x) = -+x1.
  return trig({{WeylIndex{0, 1}, 0.5}, {WeylIndex{0, -1}, 0.5}});
}

TorusFunction TorusFunction::rectangle(double x1_lo, double x1_hi, double x2_lo, double x2_hi) {
  const auto ok = [](double lo, double hi) { return 0.0 <= lo && lo <= hi && hi <= 1.0; };
  if (!ok(x1_lo, x1_hi) || !ok(x2_lo, x2_hi)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("rectangle [{},{})x[{},{}) outside the unit square", x1_lo, x1_hi, x2_lo, x2_hi));
  }
  TorusFunction f;
  f.kind_ = Kind::Rectangle;
  f.rect_ = {x1_lo, x1_hi, x2_lo, x2_hi};
  return f;
}

TorusFunction TorusFunction::atom(const torus::PartitionSpec& P, int index) {
  const auto b = P.bounds(index);
  return rectangle(b[0], b[1], b[2], b[3]);
}

TorusFunction TorusFunction::generic(Evaluator eval) {
  TorusFunction f;
  f.kind_ = Kind::Generic;
  f.eval_ = std::move(eval);
  return f;
}

Complex TorusFunction::operator()(TorusPoint x) const {
  switch (kind_) {
    case Kind::TrigPolynomial: {
      Complex acc = 0.0;
      for (const auto& [n, c] : modes_) {
        const double phase = 2.0 * std::numbers::pi *
                             (static_cast<double>(n.n1) * x.x2 - static_cast<double>(n.n2) * x.x1);
        acc += c * std::exp(Complex(0.0, phase));
      }
      return acc;
    }
    case Kind::Rectangle: {
      const TorusPoint w = torus::wrap(x.x1, x.x2);
      const bool in = w.x1 >= rect_[0] && w.x1 < rect_[1] && w.x2 >= rect_[2] && w.x2 < rect_[3];
      return in ? 1.0 : 0.0;
    }
    case Kind::Generic:
      return eval_(x);
  }
  return 0.0;
}

const std::map<WeylIndex, Complex>& TorusFunction::modes() const {
  if (kind_ != Kind::TrigPolynomial) throw Error(ErrorCode::NotTrigPolynomial, "function has no finite Fourier support");
  return modes_;
}

TorusFunction TorusFunction::evolve(const CatMap& A, int k) const {
  if (k == 0) return *this;
  if (kind_ == Kind::TrigPolynomial) {
    // sigma(n, A^{-k} x) = sigma(A^k n, x).
    std::map<WeylIndex, Complex> moved;
    for (const auto& [n, c] : modes_) {
      const auto m = A.apply(n.n1, n.n2, k);
      moved[WeylIndex{m[0], m[1]}] += c;
    }
    return trig(std::move(moved));
  }
  const TorusFunction self = *this;
  return generic([self, A, k](TorusPoint x) { return self(torus::cat_apply(A, x, -k)); });
}

CMatrix cell_averages(const TorusFunction& f, std::int64_t N, int subsample) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("N = {}", N));
  switch (f.kind()) {
    case TorusFunction::Kind::TrigPolynomial: {
      CMatrix out = CMatrix::Zero(N, N);
      for (const auto& [n, c] : f.modes()) {
        out.noalias() += c * (mode_cell_means(-n.n2, N) * mode_cell_means(n.n1, N).transpose());
      }
      return out;
    }
    case TorusFunction::Kind::Rectangle: {
      const auto& r = f.rectangle_bounds();
      const Eigen::VectorXd rows = interval_cell_means(r[0], r[1], N);
      const Eigen::VectorXd cols = interval_cell_means(r[2], r[3], N);
      return (rows * cols.transpose()).cast<Complex>();
    }
    case TorusFunction::Kind::Generic: {
      if (subsample < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("subsample = {}", subsample));
      CMatrix out(N, N);
      const double n = static_cast<double>(N), s = static_cast<double>(subsample);
      for (std::int64_t p1 = 0; p1 < N; ++p1)
        for (std::int64_t p2 = 0; p2 < N; ++p2) {
          Complex acc = 0.0;
          for (int i = 0; i < subsample; ++i)
            for (int j = 0; j < subsample; ++j)
              acc += f({(static_cast<double>(p1) + (i + 0.5) / s) / n, (static_cast<double>(p2) + (j + 0.5) / s) / n});
          out(p1, p2) = acc / (s * s);
        }
      return out;
    }
  }
  return {};
}

CMatrix anti_wick_from_averages(const CoherentFamily& fam, const CMatrix& averages) {
  const std::int64_t N = fam.N();
  if (averages.rows() != N || averages.cols() != N) {
    throw Error(ErrorCode::DimensionMismatch, "anti_wick: averages grid does not match N");
  }
  // spectra(p1, m) = sum_p2 fbar(p1, p2) exp(-2 pi i m p2 / N).
  const CMatrix spectra = averages * fam.context().dft().conjugate();
  const linalg::RVector& c = fam.fundamental();
  CMatrix out = CMatrix::Zero(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t a = 0; a < N; ++a) {
      const double ca = c(mod(a - p1, N));
      if (ca == 0.0) continue;
      for (std::int64_t b = 0; b < N; ++b) out(a, b) += ca * c(mod(b - p1, N)) * spectra(p1, mod(a - b, N));
    }
  return out / static_cast<double>(N);
}

CMatrix anti_wick(const CoherentFamily& fam, const TorusFunction& f, int subsample) {
  return anti_wick_from_averages(fam, cell_averages(f, fam.N(), subsample));
}

CMatrix dequantize(const CoherentFamily& fam, const CMatrix& X) { return coherent::cell_expectations(fam, X); }

double roundtrip_error(const CoherentFamily& fam, const TorusFunction& f, GridNorm norm, int subsample) {
  const std::int64_t N = fam.N();
  const CMatrix back = dequantize(fam, anti_wick(fam, f, subsample));
  const double n = static_cast<double>(N);
  double sup = 0.0, sq = 0.0;
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t p2 = 0; p2 < N; ++p2) {
      const Complex exact = f({(static_cast<double>(p1) + 0.5) / n, (static_cast<double>(p2) + 0.5) / n});
      const double d = std::abs(back(p1, p2) - exact);
      sup = std::max(sup, d);
      sq += d * d;
    }
  return norm == GridNorm::Sup ? sup : std::sqrt(sq / (n * n));
}

double state_overlap_residual(const CoherentFamily& fam, const TorusFunction& f, const TorusFunction& g,
                              int subsample) {
  const std::int64_t N = fam.N();
  const CMatrix fbar = cell_averages(f, N, subsample);
  const CMatrix gbar = cell_averages(g, N, subsample);
  const CMatrix qf = anti_wick_from_averages(fam, fbar);
  const CMatrix qg = anti_wick_from_averages(fam, gbar);
  const Complex quantum = (qf.adjoint() * qg).trace() / static_cast<double>(N);
  const Complex classical = (fbar.conjugate().cwiseProduct(gbar)).sum() / static_cast<double>(N * N);
  return std::abs(quantum - classical);
}

CMatrix weyl_quantize(const weyl::WeylContext& ctx, const TorusFunction& f) {
  std::vector<std::pair<WeylIndex, Complex>> terms(f.modes().begin(), f.modes().end());
  return weyl::reconstruct(ctx, weyl::coefficients_of(ctx, terms));
}

double egorov_residual(const CoherentFamily& fam, const TorusFunction& f, int k, int subsample) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("egorov_residual at k = {}", k));
  const auto& A = fam.context().map();
  if (!A) throw Error(ErrorCode::MissingDynamics, "egorov_residual: context carries no cat map");
  const CMatrix quantum = weyl::theta(fam.context(), anti_wick(fam, f, subsample), k);
  const CMatrix classical = anti_wick(fam, f.evolve(*A, k), subsample);
  return linalg::normalized_hs_norm(quantum - classical);
}

}  // namespace catlab::quantize
