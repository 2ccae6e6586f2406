#include "catlab/weyl.hpp"

#include "catlab/error.hpp"
#include "catlab/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <numeric>

namespace catlab::weyl {

namespace {

using i128 = __int128;

std::int64_t mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

Rational frac(Rational x) {
  const std::int64_t fl = x.numerator() >= 0 ? x.numerator() / x.denominator()
                                             : -((-x.numerator() + x.denominator() - 1) / x.denominator());
  return x - Rational(fl);
}

Rational half_parity(std::int64_t N, std::int64_t x, std::int64_t y) {
  // (N/2) x y mod 1 is 0 or 1/2.
  const i128 prod = static_cast<i128>(N) * x * y;
  return (prod % 2 == 0) ? Rational(0) : Rational(1, 2);
}

void require_dimension(std::int64_t N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("dimension N = {}", N));
}

// Unit complex number exp(i pi num / den) with num reduced mod 2 den.
Complex half_turns(i128 num, i128 den) {
  const i128 period = 2 * den;
  i128 r = num % period;
  if (r < 0) r += period;
  const long double angle = std::numbers::pi_v<long double> * static_cast<long double>(r) / static_cast<long double>(den);
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

// Monomial matrix: column j has a single entry val[j] in row row[j].
struct Monomial {
  std::vector<std::int64_t> row;
  std::vector<Complex> val;
};

Monomial monomial(const WeylContext& ctx, const WeylIndex& n) {
  const std::int64_t N = ctx.N();
  Monomial m;
  m.row.resize(static_cast<std::size_t>(N));
  m.val.resize(static_cast<std::size_t>(N));
  const Complex ph = ctx.label_phase(n);
  const std::int64_t s1 = mod(n.n1, N), s2 = mod(n.n2, N);
  for (std::int64_t j = 0; j < N; ++j) {
    m.row[static_cast<std::size_t>(j)] = (j + s1) % N;
    m.val[static_cast<std::size_t>(j)] = ph * half_turns(-2 * static_cast<i128>(j) * s2, N);
  }
  return m;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.row.resize(b.row.size());
  out.val.resize(b.row.size());
  for (std::size_t j = 0; j < b.row.size(); ++j) {
    const auto mid = static_cast<std::size_t>(b.row[j]);
    out.row[j] = a.row[mid];
    out.val[j] = a.val[mid] * b.val[j];
  }
  return out;
}

}  // namespace

std::int64_t symplectic(const WeylIndex& n, const WeylIndex& m) { return n.n1 * m.n2 - n.n2 * m.n1; }

UV solve_uv(const torus::CatMap& A, std::int64_t N) {
  require_dimension(N);
  // (A^t - 1) = ((a-1, c), (b, d-1)), det = 2 - (a + d) != 0 for hyperbolic A.
  const Rational m11(A.a() - 1), m12(A.c()), m21(A.b()), m22(A.d() - 1);
  const Rational det = m11 * m22 - m12 * m21;
  const Rational r1 = half_parity(N, A.a(), A.c());
  const Rational r2 = half_parity(N, A.b(), A.d());
  const Rational u = (m22 * r1 - m12 * r2) / det;
  const Rational v = (-m21 * r1 + m11 * r2) / det;
  return {frac(u), frac(v)};
}

bool satisfies_uv(const torus::CatMap& A, std::int64_t N, const UV& uv) {
  const Rational half_n(N, 2);
  const Rational e1 = Rational(A.a() - 1) * uv.u + Rational(A.c()) * uv.v - half_n * Rational(A.a() * A.c());
  const Rational e2 = Rational(A.b()) * uv.u + Rational(A.d() - 1) * uv.v - half_n * Rational(A.b() * A.d());
  return e1.denominator() == 1 && e2.denominator() == 1;
}

WeylContext::WeylContext(std::int64_t N, UV uv, std::optional<torus::CatMap> A)
    : N_(N), uv_(uv), map_(A) {
  auto t = std::make_shared<Tables>();
  t->phase.resize(N, N);
  t->dft.resize(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t p2 = 0; p2 < N; ++p2) {
      t->phase(p1, p2) = label_phase({p1, p2});
      t->dft(p1, p2) = half_turns(2 * static_cast<i128>((p1 * p2) % N), N);
    }
  if (map_) {
    const std::size_t cells = static_cast<std::size_t>(N * N);
    t->target.resize(cells);
    t->factor.resize(cells);
    for (std::int64_t p1 = 0; p1 < N; ++p1)
      for (std::int64_t p2 = 0; p2 < N; ++p2) {
        const auto m = map_->apply(p1, p2, 1);
        const WeylIndex full{m[0], m[1]};
        const WeylIndex red{mod(m[0], N), mod(m[1], N)};
        const std::size_t idx = static_cast<std::size_t>(p1 * N + p2);
        t->target[idx] = red.n1 * N + red.n2;
        // Same shift and clock part, so only the label phases differ.
        t->factor[idx] = label_phase(full) * std::conj(label_phase(red));
      }
  }
  tables_ = std::move(t);
}

WeylContext WeylContext::plain(std::int64_t N, UV uv) {
  require_dimension(N);
  return WeylContext(N, {frac(uv.u), frac(uv.v)}, std::nullopt);
}

WeylContext WeylContext::for_map(std::int64_t N, const torus::CatMap& A) {
  return WeylContext(N, solve_uv(A, N), A);
}

WeylContext WeylContext::with_uv(std::int64_t N, const torus::CatMap& A, UV uv) {
  require_dimension(N);
  if (!satisfies_uv(A, N, uv)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("(u,v) = ({}/{}, {}/{}) is not compatible with the map at N = {}", uv.u.numerator(),
                            uv.u.denominator(), uv.v.numerator(), uv.v.denominator(), N));
  }
  return WeylContext(N, {frac(uv.u), frac(uv.v)}, A);
}

Complex WeylContext::label_phase(const WeylIndex& n) const {
  const std::int64_t qu = uv_.u.denominator(), qv = uv_.v.denominator();
  const std::int64_t L = std::lcm(qu, qv);
  const i128 num = -static_cast<i128>(n.n1) * n.n2 * L + 2 * static_cast<i128>(n.n1) * uv_.u.numerator() * (L / qu) +
                   2 * static_cast<i128>(n.n2) * uv_.v.numerator() * (L / qv);
  return half_turns(num, static_cast<i128>(N_) * L);
}

const std::vector<std::int64_t>& WeylContext::step_target() const {
  if (!map_) throw Error(ErrorCode::MissingDynamics, "context carries no cat map");
  return tables_->target;
}

const std::vector<Complex>& WeylContext::step_factor() const {
  if (!map_) throw Error(ErrorCode::MissingDynamics, "context carries no cat map");
  return tables_->factor;
}

CMatrix weyl_operator(const WeylContext& ctx, const WeylIndex& n) {
  const Monomial m = monomial(ctx, n);
  CMatrix W = CMatrix::Zero(ctx.N(), ctx.N());
  for (std::size_t j = 0; j < m.row.size(); ++j) W(m.row[j], static_cast<Eigen::Index>(j)) = m.val[j];
  return W;
}

Complex weyl_trace(const WeylContext& ctx, const WeylIndex& n) {
  if (mod(n.n1, ctx.N()) != 0 || mod(n.n2, ctx.N()) != 0) return {0.0, 0.0};
  return ctx.label_phase(n);
}

WeylCoefficients expand(const WeylContext& ctx, const CMatrix& X) {
  const std::int64_t N = ctx.N();
  if (X.rows() != N || X.cols() != N) {
    throw Error(ErrorCode::DimensionMismatch, fmt::format("expand: {}x{} vs N = {}", X.rows(), X.cols(), N));
  }
  CMatrix diag(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t j = 0; j < N; ++j) diag(p1, j) = X((j + p1) % N, j);
  WeylCoefficients out{N, (diag * ctx.dft()) / static_cast<double>(N)};
  out.coeffs.array() *= ctx.phase_table().array().conjugate();
  return out;
}

CMatrix reconstruct(const WeylContext& ctx, const WeylCoefficients& c) {
  const std::int64_t N = ctx.N();
  if (c.N != N || c.coeffs.rows() != N || c.coeffs.cols() != N) {
    throw Error(ErrorCode::DimensionMismatch, "reconstruct: coefficient grid does not match context");
  }
  const CMatrix phased = c.coeffs.cwiseProduct(ctx.phase_table());
  const CMatrix diag = phased * ctx.dft().conjugate();
  CMatrix X(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t j = 0; j < N; ++j) X((j + p1) % N, j) = diag(p1, j);
  return X;
}

WeylCoefficients coefficients_of(const WeylContext& ctx, const std::vector<std::pair<WeylIndex, Complex>>& terms) {
  const std::int64_t N = ctx.N();
  WeylCoefficients out{N, CMatrix::Zero(N, N)};
  for (const auto& [n, value] : terms) {
    const WeylIndex red{mod(n.n1, N), mod(n.n2, N)};
    out.coeffs(red.n1, red.n2) += value * ctx.label_phase(n) * std::conj(ctx.label_phase(red));
  }
  return out;
}

WeylCoefficients transport(const WeylContext& ctx, const WeylCoefficients& c, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("transport: k = {} < 0", k));
  if (k == 0) return c;
  const auto& target = ctx.step_target();
  const auto& factor = ctx.step_factor();
  const std::int64_t N = ctx.N();
  WeylCoefficients cur = c;
  WeylCoefficients next{N, CMatrix(N, N)};
  for (int s = 0; s < k; ++s) {
    for (std::int64_t p1 = 0; p1 < N; ++p1)
      for (std::int64_t p2 = 0; p2 < N; ++p2) {
        const std::size_t idx = static_cast<std::size_t>(p1 * N + p2);
        const std::int64_t t = target[idx];
        next.coeffs(t / N, t % N) = cur.coeffs(p1, p2) * factor[idx];
      }
    std::swap(cur, next);
  }
  return cur;
}

CMatrix theta(const WeylContext& ctx, const CMatrix& X, int k) {
  if (!ctx.map()) throw Error(ErrorCode::MissingDynamics, "theta: context carries no cat map");
  if (k == 0) return X;
  return reconstruct(ctx, transport(ctx, expand(ctx, X), k));
}

CMatrix weyl_average_check(const WeylContext& ctx, const WeylIndex& n) {
  const std::int64_t N = ctx.N();
  const Monomial center = monomial(ctx, n);
  CMatrix out = CMatrix::Zero(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t p2 = 0; p2 < N; ++p2) {
      const Monomial term = multiply(monomial(ctx, {-p1, -p2}), multiply(center, monomial(ctx, {p1, p2})));
      for (std::size_t j = 0; j < term.row.size(); ++j) out(term.row[j], static_cast<Eigen::Index>(j)) += term.val[j];
    }
  return out / static_cast<double>(N);
}

}  // namespace catlab::weyl
