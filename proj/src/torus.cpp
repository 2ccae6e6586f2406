#include "catlab/torus.hpp"

#include "catlab/error.hpp"
#include "catlab/linalg.hpp"
#include "catlab/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <unordered_map>

namespace catlab::torus {

namespace {

using i128 = __int128;

std::int64_t mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

std::int64_t narrow(i128 x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::InvalidArgument, "integer orbit exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(x);
}

double wrap1(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

CatMap::CatMap(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
    : a_(a), b_(b), c_(c), d_(d) {
  const double t = std::abs(static_cast<double>(a + d));
  lambda_ = 0.5 * (t + std::sqrt(t * t - 4.0));
  log_lambda_ = std::log(lambda_);
}

CatMap CatMap::make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  const i128 det = static_cast<i128>(a) * d - static_cast<i128>(b) * c;
  if (det != 1) {
    throw Error(ErrorCode::NotUnimodular,
                fmt::format("det(({},{}),({},{})) = {}", a, b, c, d, static_cast<long long>(det)));
  }
  const std::int64_t tr = a + d;
  if (tr >= -2 && tr <= 2) {
    throw Error(ErrorCode::NotHyperbolic, fmt::format("|trace| = {} <= 2", tr < 0 ? -tr : tr));
  }
  return CatMap(a, b, c, d);
}

CatMap CatMap::inverse() const { return CatMap(d_, -b_, -c_, a_); }

std::array<std::int64_t, 2> CatMap::apply(std::int64_t n1, std::int64_t n2, int k) const {
  const CatMap step = k >= 0 ? *this : inverse();
  const int steps = k >= 0 ? k : -k;
  for (int s = 0; s < steps; ++s) {
    const i128 m1 = static_cast<i128>(step.a_) * n1 + static_cast<i128>(step.b_) * n2;
    const i128 m2 = static_cast<i128>(step.c_) * n1 + static_cast<i128>(step.d_) * n2;
    n1 = narrow(m1);
    n2 = narrow(m2);
  }
  return {n1, n2};
}

std::array<std::int64_t, 2> CatMap::apply_mod(std::int64_t n1, std::int64_t n2, std::int64_t m, int k) const {
  const CatMap step = k >= 0 ? *this : inverse();
  const int steps = k >= 0 ? k : -k;
  std::int64_t ma = mod(step.a_, m), mb = mod(step.b_, m), mc = mod(step.c_, m), md = mod(step.d_, m);
  n1 = mod(n1, m);
  n2 = mod(n2, m);
  for (int s = 0; s < steps; ++s) {
    const i128 m1 = static_cast<i128>(ma) * n1 + static_cast<i128>(mb) * n2;
    const i128 m2 = static_cast<i128>(mc) * n1 + static_cast<i128>(md) * n2;
    n1 = static_cast<std::int64_t>(m1 % m);
    n2 = static_cast<std::int64_t>(m2 % m);
  }
  return {n1, n2};
}

TorusPoint wrap(double x1, double x2) { return {wrap1(x1), wrap1(x2)}; }

TorusPoint cat_apply(const CatMap& A, TorusPoint p, int k) {
  const CatMap step = k >= 0 ? A : A.inverse();
  const int steps = k >= 0 ? k : -k;
  for (int s = 0; s < steps; ++s) {
    p = wrap(static_cast<double>(step.a()) * p.x1 + static_cast<double>(step.b()) * p.x2,
             static_cast<double>(step.c()) * p.x1 + static_cast<double>(step.d()) * p.x2);
  }
  return wrap(p.x1, p.x2);
}

double lyapunov(const CatMap& A) { return A.log_lambda(); }

PartitionSpec::PartitionSpec(int q_side) : q_side_(q_side) {
  if (q_side < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("q_side = {}", q_side));
}

int PartitionSpec::atom_of(TorusPoint p) const {
  const TorusPoint w = wrap(p.x1, p.x2);
  const int r = std::min(q_side_ - 1, static_cast<int>(std::floor(w.x1 * q_side_)));
  const int c = std::min(q_side_ - 1, static_cast<int>(std::floor(w.x2 * q_side_)));
  return r * q_side_ + c;
}

std::array<double, 4> PartitionSpec::bounds(int atom) const {
  if (atom < 0 || atom >= atoms()) throw Error(ErrorCode::InvalidArgument, fmt::format("atom {}", atom));
  const double h = 1.0 / q_side_;
  const int r = atom / q_side_, c = atom % q_side_;
  return {r * h, (r + 1) * h, c * h, (c + 1) * h};
}

std::vector<int> RefinedMeasure::decode(std::uint64_t code) const {
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int j = k - 1; j >= 0; --j) {
    s[static_cast<std::size_t>(j)] = static_cast<int>(code % static_cast<std::uint64_t>(q));
    code /= static_cast<std::uint64_t>(q);
  }
  return s;
}

std::uint64_t RefinedMeasure::encode(const std::vector<int>& symbols) const {
  std::uint64_t code = 0;
  for (int s : symbols) code = code * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(s);
  return code;
}

double RefinedMeasure::total() const {
  double t = 0.0;
  for (const auto& [code, w] : weights) t += w;
  return t;
}

double perimeter_constant(const PartitionSpec& P) { return 4.0 * std::sqrt(2.0) / P.q_side(); }

RefinedMeasure refined_measures(const CatMap& A, const PartitionSpec& P, int k, std::int64_t M,
                                RefinedMeasureOptions options) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("k = {} < 1", k));
  if (M < P.q_side()) throw Error(ErrorCode::InvalidArgument, fmt::format("lattice M = {} < q_side", M));
  const int q = P.atoms();
  if (static_cast<double>(k) * std::log2(static_cast<double>(q)) >= 63.0) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("q^k too large for 64-bit codes (q={}, k={})", q, k));
  }

  RefinedMeasure out;
  out.k = k;
  out.q = q;
  out.lattice = M;
  out.err = perimeter_constant(P) * k * std::pow(A.lambda(), k) / static_cast<double>(M);
  if (options.enforce_resolution && out.err > 0.1 / std::pow(static_cast<double>(q), k)) {
    throw Error(ErrorCode::ResolutionTooCoarse,
                fmt::format("err {:.3e} > 0.1/q^k at k={}, M={}", out.err, k, M));
  }

  // Numerators of the centered lattice modulo 2M; exact under integer maps.
  const std::int64_t twoM = 2 * M;
  const CatMap step = options.direction == TimeDirection::Forward ? A : A.inverse();
  const std::int64_t sa = mod(step.a(), twoM), sb = mod(step.b(), twoM);
  const std::int64_t sc = mod(step.c(), twoM), sd = mod(step.d(), twoM);
  const std::int64_t qs = P.q_side();
  auto atom = [&](std::int64_t n1, std::int64_t n2) {
    return static_cast<std::uint64_t>((qs * n1 / twoM) * qs + qs * n2 / twoM);
  };
  auto code_of = [&](std::int64_t n1, std::int64_t n2) {
    std::uint64_t code = 0;
    for (int j = 0; j < k; ++j) {
      code = code * static_cast<std::uint64_t>(q) + atom(n1, n2);
      const i128 m1 = static_cast<i128>(sa) * n1 + static_cast<i128>(sb) * n2;
      const i128 m2 = static_cast<i128>(sc) * n1 + static_cast<i128>(sd) * n2;
      n1 = static_cast<std::int64_t>(m1 % twoM);
      n2 = static_cast<std::int64_t>(m2 % twoM);
    }
    return code;
  };

  const double cells = static_cast<double>(q);
  const double codes = std::pow(cells, k);
  const std::size_t rows = static_cast<std::size_t>(M);
  if (codes <= static_cast<double>(1u << 22)) {
    const std::size_t dense = static_cast<std::size_t>(codes);
    std::vector<std::vector<std::uint64_t>> counts(worker_count());
    parallel_chunks(rows, [&](unsigned w, std::size_t lo, std::size_t hi) {
      auto& c = counts[w];
      c.assign(dense, 0);
      for (std::size_t i = lo; i < hi; ++i)
        for (std::int64_t j = 0; j < M; ++j) ++c[code_of(2 * static_cast<std::int64_t>(i) + 1, 2 * j + 1)];
    });
    std::vector<std::uint64_t> total(dense, 0);
    for (const auto& c : counts)
      for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];
    const double norm = static_cast<double>(M) * static_cast<double>(M);
    for (std::size_t i = 0; i < dense; ++i)
      if (total[i]) out.weights.emplace(i, static_cast<double>(total[i]) / norm);
  } else {
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> counts(worker_count());
    parallel_chunks(rows, [&](unsigned w, std::size_t lo, std::size_t hi) {
      auto& c = counts[w];
      for (std::size_t i = lo; i < hi; ++i)
        for (std::int64_t j = 0; j < M; ++j) ++c[code_of(2 * static_cast<std::int64_t>(i) + 1, 2 * j + 1)];
    });
    std::map<std::uint64_t, std::uint64_t> total;
    for (const auto& c : counts)
      for (const auto& [code, n] : c) total[code] += n;
    const double norm = static_cast<double>(M) * static_cast<double>(M);
    for (const auto& [code, n] : total) out.weights.emplace(code, static_cast<double>(n) / norm);
  }
  return out;
}

RefinedMeasure marginal(const RefinedMeasure& m, int k_prefix) {
  if (k_prefix < 1 || k_prefix > m.k) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("prefix {} outside [1, {}]", k_prefix, m.k));
  }
  RefinedMeasure out = m;
  out.k = k_prefix;
  out.weights.clear();
  std::uint64_t drop = 1;
  for (int j = k_prefix; j < m.k; ++j) drop *= static_cast<std::uint64_t>(m.q);
  for (const auto& [code, w] : m.weights) out.weights[code / drop] += w;
  return out;
}

double shannon_entropy(const RefinedMeasure& m) {
  double s = 0.0;
  for (const auto& [code, w] : m.weights) s += linalg::eta(w);
  return s;
}

double ks_entropy_estimate(const CatMap& A, const PartitionSpec& P, int k_max, std::int64_t M) {
  if (k_max < 2) throw Error(ErrorCode::InvalidArgument, fmt::format("k_max = {} < 2", k_max));
  const RefinedMeasure full = refined_measures(A, P, k_max, M);
  return shannon_entropy(full) - shannon_entropy(marginal(full, k_max - 1));
}

}  // namespace catlab::torus
