#include "catlab/coherent.hpp"

#include "catlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace catlab::coherent {

namespace {

std::int64_t mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

// exp(i pi num / den) with exact reduction.
Complex half_turns(std::int64_t num, std::int64_t den) {
  const std::int64_t r = mod(num, 2 * den);
  const long double angle = std::numbers::pi_v<long double> * static_cast<long double>(r) / static_cast<long double>(den);
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

// log of the squared binomial amplitudes, C(N-1, j) / 2^(N-1).
std::vector<double> log_binomial_weights(std::int64_t N) {
  std::vector<double> lw(static_cast<std::size_t>(N));
  const double n = static_cast<double>(N - 1);
  for (std::int64_t j = 0; j < N; ++j) {
    const double jj = static_cast<double>(j);
    lw[static_cast<std::size_t>(j)] = std::lgamma(n + 1.0) - std::lgamma(jj + 1.0) - std::lgamma(n - jj + 1.0) - n * std::log(2.0);
  }
  return lw;
}

// |cos(pi s / N)| through a sine of the exactly reduced complementary angle;
// keeps full relative precision near the zero at s = N/2.
long double abs_cos_ratio(std::int64_t s, std::int64_t N) {
  s = mod(s, 2 * N);
  if (s > N) s = 2 * N - s;
  const std::int64_t r = std::min(s, N - s);
  return std::sin(std::numbers::pi_v<long double> * static_cast<long double>(N - 2 * r) / (2.0L * static_cast<long double>(N)));
}

}  // namespace

CoherentFamily::CoherentFamily(WeylContext ctx, RVector c0, bool binomial)
    : ctx_(std::move(ctx)), c0_(std::move(c0)), binomial_(binomial) {}

CoherentFamily CoherentFamily::binomial(const WeylContext& ctx) {
  const std::int64_t N = ctx.N();
  const auto lw = log_binomial_weights(N);
  const std::int64_t shift = N / 2;
  RVector c0(N);
  for (std::int64_t j = 0; j < N; ++j) c0(j) = std::exp(0.5 * lw[static_cast<std::size_t>((j + shift) % N)]);
  const double defect = std::abs(c0.norm() - 1.0);
  if (defect > 1e-12) {
    throw Error(ErrorCode::InvalidState, fmt::format("binomial fundamental vector norm defect {:.3e}", defect));
  }
  c0 /= c0.norm();
  return CoherentFamily(ctx, std::move(c0), true);
}

CoherentFamily CoherentFamily::from_vector(const WeylContext& ctx, RVector fundamental) {
  if (fundamental.size() != ctx.N()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("fundamental vector length {} vs N = {}", fundamental.size(), ctx.N()));
  }
  return CoherentFamily(ctx, std::move(fundamental), false);
}

WeylIndex CoherentFamily::cell_of(TorusPoint x) const {
  const TorusPoint w = torus::wrap(x.x1, x.x2);
  const std::int64_t N = ctx_.N();
  const auto cell = [N](double t) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(t * static_cast<double>(N))), 0, N - 1);
  };
  return {cell(w.x1), cell(w.x2)};
}

CVector CoherentFamily::state_at(const WeylIndex& cell) const {
  const std::int64_t N = ctx_.N();
  const Complex ph = ctx_.label_phase(cell);
  const std::int64_t s1 = mod(cell.n1, N), s2 = mod(cell.n2, N);
  CVector out(N);
  for (std::int64_t j = 0; j < N; ++j) out((j + s1) % N) = ph * half_turns(-2 * ((j * s2) % N), N) * c0_(j);
  return out;
}

double normalization_defect(const CoherentFamily& fam) { return std::abs(fam.fundamental().norm() - 1.0); }

CMatrix cell_expectations(const CoherentFamily& fam, const CMatrix& X) {
  const std::int64_t N = fam.N();
  if (X.rows() != N || X.cols() != N) {
    throw Error(ErrorCode::DimensionMismatch, fmt::format("cell_expectations: {}x{} vs N = {}", X.rows(), X.cols(), N));
  }
  const RVector& c = fam.fundamental();
  CMatrix G = CMatrix::Zero(N, N);
  for (std::int64_t p1 = 0; p1 < N; ++p1)
    for (std::int64_t m = 0; m < N; ++m) {
      Complex acc = 0.0;
      for (std::int64_t a = 0; a < N; ++a)
        acc += c(mod(a - p1, N)) * c(mod(a - m - p1, N)) * X(a, mod(a - m, N));
      G(p1, m) = acc;
    }
  return G * fam.context().dft();
}

double overcompleteness_residual(const CoherentFamily& fam) {
  // Summing the projectors over p2 first kills every off-diagonal entry
  // (sum_p2 exp(-2 pi i (a-b) p2 / N) = N delta_ab); what remains is a
  // cyclic sum of squared amplitudes on the diagonal.
  const std::int64_t N = fam.N();
  const RVector& c = fam.fundamental();
  CMatrix sum = CMatrix::Zero(N, N);
  for (std::int64_t a = 0; a < N; ++a) {
    double acc = 0.0;
    for (std::int64_t p1 = 0; p1 < N; ++p1) acc += c(mod(a - p1, N)) * c(mod(a - p1, N));
    sum(a, a) = acc;
  }
  return (sum - CMatrix::Identity(N, N)).norm();
}

Complex overlap(const CoherentFamily& fam, const WeylIndex& n) {
  const std::int64_t N = fam.N();
  const weyl::WeylContext& ctx = fam.context();
  const Complex ph = ctx.label_phase(n);
  const std::int64_t s1 = mod(n.n1, N), s2 = mod(n.n2, N);

  if (fam.is_binomial() && s1 == 0) {
    // sum_i C(i)^2 z^(i - h) = z^-h ((1 + z)/2)^(N-1), z = exp(-2 pi i n2 / N).
    if (N == 1) return ph;
    const long double amplitude = abs_cos_ratio(s2, N);
    if (amplitude == 0.0L) return {0.0, 0.0};
    const double modulus = static_cast<double>(std::exp(static_cast<long double>(N - 1) * std::log(amplitude)));
    const double sign = (2 * s2 > N && (N - 1) % 2 == 1) ? -1.0 : 1.0;
    const std::int64_t h = N / 2;
    return ph * sign * modulus * half_turns(mod(2 * h * s2 - (N - 1) * s2, 2 * N), N);
  }

  if (fam.is_binomial()) {
    const auto lw = log_binomial_weights(N);
    const std::int64_t h = N / 2;
    Complex acc = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      const double lterm = 0.5 * (lw[static_cast<std::size_t>((j + s1 + h) % N)] + lw[static_cast<std::size_t>((j + h) % N)]);
      acc += std::exp(lterm) * half_turns(-2 * ((j * s2) % N), N);
    }
    return ph * acc;
  }

  const RVector& c = fam.fundamental();
  Complex acc = 0.0;
  for (std::int64_t j = 0; j < N; ++j) acc += c((j + s1) % N) * c(j) * half_turns(-2 * ((j * s2) % N), N);
  return ph * acc;
}

double torus_distance(TorusPoint x, TorusPoint y) {
  const auto axis = [](double a, double b) {
    const double d = std::abs(a - b);
    const double r = d - std::floor(d);
    return std::min(r, 1.0 - r);
  };
  return std::max(axis(x.x1, y.x1), axis(x.x2, y.x2));
}

double binary_entropy(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -t * std::log2(t) - (1.0 - t) * std::log2(1.0 - t);
}

std::optional<double> overlap_bound(std::int64_t N, std::int64_t n1) {
  if (N < 2) return std::nullopt;
  const std::int64_t s = mod(n1, N);
  if (s == 0) return std::nullopt;
  const double n = static_cast<double>(N - 1);
  const double eta1 = binary_entropy(0.5 - static_cast<double>(s) / (2.0 * n));
  const double eta2 = binary_entropy(0.5 + static_cast<double>(N - s) / (2.0 * n));
  return static_cast<double>(N) * (std::exp2(-n * (1.0 - eta1)) + std::exp2(-n * (1.0 - eta2)));
}

double scaled_overlap_vertical(std::int64_t N, std::int64_t n2) {
  if (N == 1) return 1.0;
  const long double amplitude = abs_cos_ratio(n2, N);
  if (amplitude == 0.0L) return 0.0;
  return static_cast<double>(static_cast<long double>(N) * std::exp(2.0L * static_cast<long double>(N - 1) * std::log(amplitude)));
}

std::vector<LocalizationRow> localization_table(const CoherentFamily& fam,
                                                const std::vector<std::pair<TorusPoint, TorusPoint>>& pairs) {
  std::vector<LocalizationRow> rows;
  rows.reserve(pairs.size());
  const std::int64_t N = fam.N();
  for (const auto& [x, y] : pairs) {
    const WeylIndex cx = fam.cell_of(x), cy = fam.cell_of(y);
    const WeylIndex diff{cy.n1 - cx.n1, cy.n2 - cx.n2};
    LocalizationRow row;
    row.x = x;
    row.y = y;
    row.distance = torus_distance(x, y);
    row.scaled_kernel = static_cast<double>(N) * std::norm(overlap(fam, diff));
    row.bound = overlap_bound(N, diff.n1);
    rows.push_back(row);
  }
  return rows;
}

double max_separated_kernel(const CoherentFamily& fam, double d_min) {
  const std::int64_t N = fam.N();
  const double n = static_cast<double>(N);
  double worst = 0.0;
  for (std::int64_t n1 = 0; n1 < N; ++n1)
    for (std::int64_t n2 = 0; n2 < N; ++n2) {
      const double d = torus_distance({0.0, 0.0}, {static_cast<double>(n1) / n, static_cast<double>(n2) / n});
      if (d + 1e-12 < d_min) continue;
      worst = std::max(worst, n * std::norm(overlap(fam, {n1, n2})));
    }
  return worst;
}

Eigen::MatrixXd dynamical_kernel_row(const CoherentFamily& fam, TorusPoint x, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("dynamical kernel at k = {}", k));
  const CVector phi = fam.state(x);
  const CMatrix evolved = weyl::theta(fam.context(), phi * phi.adjoint(), k);
  return cell_expectations(fam, evolved).real();
}

double dynamical_kernel_sq(const CoherentFamily& fam, TorusPoint x, TorusPoint y, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("dynamical kernel at k = {}", k));
  const CVector phi = fam.state(x);
  const CVector psi = fam.state(y);
  const CMatrix evolved = weyl::theta(fam.context(), phi * phi.adjoint(), k);
  return std::max(0.0, (psi.adjoint() * evolved * psi)(0, 0).real());
}

}  // namespace catlab::coherent
