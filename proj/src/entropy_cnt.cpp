#include "catlab/entropy_cnt.hpp"

#include "catlab/error.hpp"
#include "catlab/linalg.hpp"
#include "catlab/quantize.hpp"
#include "catlab/weyl.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace catlab::cnt {

namespace {

constexpr double kClampBudget = 1e-8;

// sum_i mu_i S(p^{l,i}) for one time step.
double step_correction(const ProbabilityRows& p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.rows.rows(); ++i) {
    const Eigen::VectorXd row = p.rows.row(i).transpose();
    acc += p.marginals(i) * linalg::shannon_entropy(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  }
  return acc;
}

}  // namespace

double cnt_upper(const torus::RefinedMeasure& measure) { return torus::shannon_entropy(measure); }

ProbabilityRows probability_rows(const CoherentFamily& fam, const torus::PartitionSpec& P, int step,
                                 Evolution evolution, int subsample) {
  const std::int64_t N = fam.N();
  if (N % P.q_side() != 0) {
    throw Error(ErrorCode::IndivisibleGrid, fmt::format("q_side = {} does not divide N = {}", P.q_side(), N));
  }
  if (step < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("step = {}", step));
  const auto& A = fam.context().map();
  if (step > 0 && !A) throw Error(ErrorCode::MissingDynamics, "probability_rows: context carries no cat map");

  const int q = P.atoms();
  std::vector<linalg::CMatrix> ys;
  ys.reserve(static_cast<std::size_t>(q));
  for (int s = 0; s < q; ++s) {
    const auto chi = quantize::TorusFunction::atom(P, s);
    if (evolution == Evolution::Classical || step == 0) {
      ys.push_back(quantize::anti_wick(fam, step == 0 ? chi : chi.evolve(*A, step), subsample));
    } else {
      ys.push_back(weyl::theta(fam.context(), quantize::anti_wick(fam, chi, subsample), step));
    }
  }

  ProbabilityRows out;
  out.rows.resize(q, q);
  out.marginals.resize(q);
  const double n = static_cast<double>(N);
  for (int i = 0; i < q; ++i) {
    out.marginals(i) = ys[static_cast<std::size_t>(i)].trace().real() / n;
    for (int s = 0; s < q; ++s) {
      // tau(y_i y_s) = sum_ab y_i(a,b) y_s(b,a) / N.
      const double v = (ys[static_cast<std::size_t>(i)].cwiseProduct(ys[static_cast<std::size_t>(s)].transpose())).sum().real() / n;
      out.rows(i, s) = v;
    }
  }
  for (int i = 0; i < q; ++i) {
    const double mu = out.marginals(i);
    if (!(mu > 0.0)) throw Error(ErrorCode::SimplexViolation, fmt::format("atom {} has quantum weight {:.3e}", i, mu));
    for (int s = 0; s < q; ++s) {
      double& v = out.rows(i, s);
      v /= mu;
      if (v < 0.0) {
        out.clamped_mass += -v;
        v = 0.0;
      }
    }
    if (out.clamped_mass > kClampBudget) {
      throw Error(ErrorCode::SimplexViolation, fmt::format("clamped mass {:.3e} in row {}", out.clamped_mass, i));
    }
    out.rows.row(i) /= out.rows.row(i).sum();
  }
  return out;
}

CNTBracket cnt_lower(const CoherentFamily& fam, const torus::PartitionSpec& P, int k,
                     const torus::RefinedMeasure& classical, Evolution evolution, int subsample) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("k = {} < 1", k));
  if (classical.k != k || classical.q != P.atoms()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("classical statistics (k={}, q={}) vs (k={}, q={})", classical.k, classical.q, k, P.atoms()));
  }
  CNTBracket out;
  out.k = k;
  out.upper = cnt_upper(classical);
  for (int step = 0; step < k; ++step) out.correction += step_correction(probability_rows(fam, P, step, evolution, subsample));
  out.lower = out.upper - out.correction;
  return out;
}

std::vector<BracketRow> cnt_bracket_curve(const torus::CatMap& A, const torus::PartitionSpec& P, int k_max,
                                          const std::vector<std::int64_t>& N_list, std::int64_t lattice,
                                          int subsample) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("k_max = {} < 1", k_max));
  const torus::RefinedMeasure full = torus::refined_measures(A, P, k_max, lattice);
  std::vector<double> upper(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) upper[static_cast<std::size_t>(k)] = cnt_upper(torus::marginal(full, k));

  std::vector<std::int64_t> sizes = N_list;
  std::sort(sizes.begin(), sizes.end());
  std::vector<BracketRow> rows;
  for (const std::int64_t N : sizes) {
    const auto fam = CoherentFamily::binomial(weyl::WeylContext::for_map(N, A));
    double correction = 0.0;
    for (int k = 1; k <= k_max; ++k) {
      correction += step_correction(probability_rows(fam, P, k - 1, Evolution::Classical, subsample));
      const double up = upper[static_cast<std::size_t>(k)];
      rows.push_back({N, k, (up - correction) / k, up / k, correction / k});
    }
  }
  return rows;
}

bool narrows_in_N(const std::vector<BracketRow>& rows, double slack) {
  std::map<int, std::vector<std::pair<std::int64_t, double>>> by_k;
  for (const auto& r : rows) by_k[r.k].emplace_back(r.N, r.upper_rate - r.lower_rate);
  for (auto& [k, series] : by_k) {
    std::sort(series.begin(), series.end());
    for (std::size_t i = 1; i < series.size(); ++i)
      if (series[i].second > series[i - 1].second + slack) return false;
  }
  return true;
}

}  // namespace catlab::cnt
