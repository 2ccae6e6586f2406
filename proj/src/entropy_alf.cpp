#include "catlab/entropy_alf.hpp"

#include "catlab/error.hpp"
#include "catlab/parallel.hpp"
#include "catlab/quantize.hpp"

#include <fmt/format.h>

#include <cmath>

namespace catlab::alf {

namespace {

// Spectral floor below which the corrector counts as exactly zero.
constexpr double kCorrectorFloor = 1e-12;

std::size_t checked_power(std::size_t base, int k) {
  std::size_t out = 1;
  for (int i = 0; i < k; ++i) {
    if (base != 0 && out > (std::size_t{1} << 62) / base) {
      throw Error(ErrorCode::BudgetExceeded, fmt::format("{}^{} overflows", base, k));
    }
    out *= base;
  }
  return out;
}

void check_budget(const PartitionOfUnity& Y, std::int64_t N, int k, const Budget& budget) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("refinement length k = {} < 1", k));
  const std::size_t chains = checked_power(Y.size(), k);
  const std::size_t entries = chains * static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
  if (chains > budget.max_chains || entries > budget.max_entries) {
    throw Error(ErrorCode::BudgetExceeded,
                fmt::format("{} chains of {}x{} exceed budget ({} chains, {} entries)", chains, N, N,
                            budget.max_chains, budget.max_entries));
  }
}

// Columns are the chains flattened column-major.
CMatrix stack(const std::vector<CMatrix>& chains) {
  const Eigen::Index n2 = chains.front().size();
  CMatrix M(n2, static_cast<Eigen::Index>(chains.size()));
  for (std::size_t i = 0; i < chains.size(); ++i)
    M.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const linalg::CVector>(chains[i].data(), n2);
  return M;
}

// Extends chains by one time step using the already evolved operators.
std::vector<CMatrix> extend(const std::vector<CMatrix>& prev, const std::vector<CMatrix>& evolved) {
  const std::size_t l = evolved.size();
  std::vector<CMatrix> next(prev.size() * l);
  parallel_for(next.size(), [&](std::size_t idx) { next[idx] = evolved[idx % l] * prev[idx / l]; });
  return next;
}

// Walks k = 1..k_max, handing the chains of each level to visit.
template <class Visit>
void walk_chains(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k_max, const Budget& budget, Visit&& visit) {
  check_budget(Y, ctx.N(), k_max, budget);
  std::vector<weyl::WeylCoefficients> coeffs;
  if (k_max > 1) {
    coeffs.reserve(Y.size());
    for (const auto& y : Y.ops) coeffs.push_back(weyl::expand(ctx, y));
  }
  std::vector<CMatrix> chains = Y.ops;
  visit(1, chains);
  for (int level = 2; level <= k_max; ++level) {
    std::vector<CMatrix> evolved(Y.size());
    for (std::size_t i = 0; i < Y.size(); ++i) {
      coeffs[i] = weyl::transport(ctx, coeffs[i], 1);
      evolved[i] = weyl::reconstruct(ctx, coeffs[i]);
    }
    chains = extend(chains, evolved);
    visit(level, chains);
  }
}

}  // namespace

double unity_defect(const PartitionOfUnity& Y) {
  if (Y.ops.empty()) return 0.0;
  const Eigen::Index N = Y.ops.front().rows();
  CMatrix sum = CMatrix::Zero(N, N);
  for (const auto& y : Y.ops) sum.noalias() += y.adjoint() * y;
  return (sum - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
}

double bistochastic_defect(const PartitionOfUnity& Y) {
  if (Y.ops.empty()) return 0.0;
  const Eigen::Index N = Y.ops.front().rows();
  CMatrix sum = CMatrix::Zero(N, N);
  for (const auto& y : Y.ops) sum.noalias() += y * y.adjoint();
  return (sum - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
}

PartitionOfUnity pou_from_partition(const CoherentFamily& fam, const torus::PartitionSpec& P) {
  const std::int64_t N = fam.N();
  if (N % P.q_side() != 0) {
    throw Error(ErrorCode::IndivisibleGrid, fmt::format("q_side = {} does not divide N = {}", P.q_side(), N));
  }
  PartitionOfUnity Y;
  CMatrix rest = CMatrix::Identity(N, N);
  for (int atom = 0; atom < P.atoms(); ++atom) {
    CMatrix y = quantize::anti_wick(fam, quantize::TorusFunction::atom(P, atom));
    y = 0.5 * (y + y.adjoint());
    rest.noalias() -= y * y;
    Y.ops.push_back(std::move(y));
  }
  linalg::Spectrum s = linalg::eig_hermitian(rest);
  if (s.eigenvalues(0) < -linalg::Tolerances::psd) {
    throw Error(ErrorCode::NotPSD, fmt::format("1 - sum y_i^2 has eigenvalue {:.3e}", s.eigenvalues(0)));
  }
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    s.eigenvalues(i) = s.eigenvalues(i) <= kCorrectorFloor ? 0.0 : std::sqrt(s.eigenvalues(i));
  CMatrix corrector = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  Y.ops.push_back(0.5 * (corrector + corrector.adjoint()));
  Y.corrector = Y.ops.size() - 1;

  const double tol = 1e-9 * static_cast<double>(N);
  const double defect = unity_defect(Y);
  if (defect > tol) {
    throw Error(ErrorCode::InvalidState, fmt::format("partition of unity defect {:.3e}", defect));
  }
  Y.bistochastic = bistochastic_defect(Y) <= tol;
  return Y;
}

std::vector<CMatrix> refine(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k, Budget budget) {
  std::vector<CMatrix> out;
  walk_chains(ctx, Y, k, budget, [&](int level, const std::vector<CMatrix>& chains) {
    if (level == k) out = chains;
  });
  return out;
}

DensityMatrix gram_density(const std::vector<CMatrix>& chains) {
  if (chains.empty()) throw Error(ErrorCode::InvalidArgument, "gram_density: no chains");
  const double N = static_cast<double>(chains.front().rows());
  const CMatrix M = stack(chains);
  // rho(i, j) = tau(A_j* A_i) = (M* M)(j, i) / N.
  CMatrix rho = (M.adjoint() * M).transpose() / N;
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

RefinedDensity refined_density(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k, Budget budget) {
  return RefinedDensity{k, Y.size(), gram_density(refine(ctx, Y, k, budget))};
}

DensityMatrix partial_trace_last(const DensityMatrix& rho, std::size_t alphabet) {
  const Eigen::Index l = static_cast<Eigen::Index>(alphabet);
  if (l < 1 || rho.dim() % l != 0) {
    throw Error(ErrorCode::DimensionMismatch, fmt::format("dimension {} is not a multiple of {}", rho.dim(), l));
  }
  const Eigen::Index outer = rho.dim() / l;
  CMatrix out = CMatrix::Zero(outer, outer);
  for (Eigen::Index i = 0; i < outer; ++i)
    for (Eigen::Index j = 0; j < outer; ++j)
      for (Eigen::Index a = 0; a < l; ++a) out(i, j) += rho.matrix()(i * l + a, j * l + a);
  return DensityMatrix(std::move(out));
}

double chain_entropy(const std::vector<CMatrix>& chains) {
  if (chains.empty()) throw Error(ErrorCode::InvalidArgument, "chain_entropy: no chains");
  const Eigen::Index N = chains.front().rows();
  const auto n = static_cast<Eigen::Index>(chains.size());
  if (n <= N * N) return linalg::von_neumann_entropy(gram_density(chains));
  // Same nonzero spectrum as the Gram matrix.
  const CMatrix M = stack(chains);
  CMatrix dual = M * M.adjoint() / static_cast<double>(N);
  dual = 0.5 * (dual + dual.adjoint());
  const double tr = dual.trace().real();
  if (std::abs(tr - 1.0) > linalg::Tolerances::trace) {
    throw Error(ErrorCode::InvalidState, fmt::format("refined state trace {:.12f}", tr));
  }
  return linalg::entropy_of_psd(dual);
}

std::vector<double> alf_curve(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k_max, Budget budget) {
  std::vector<double> out;
  const double cap = 2.0 * std::log(static_cast<double>(ctx.N()));
  walk_chains(ctx, Y, k_max, budget, [&](int level, const std::vector<CMatrix>& chains) {
    const double h = chain_entropy(chains);
    if (h > cap + 1e-9) {
      throw Error(ErrorCode::InvalidState, fmt::format("H = {:.6f} exceeds 2 log N at k = {}", h, level));
    }
    out.push_back(h);
  });
  return out;
}

GapReport theorem72_gap(const CoherentFamily& fam, const torus::PartitionSpec& P, int k,
                        const torus::RefinedMeasure& classical, Budget budget) {
  if (classical.k != k || classical.q != P.atoms()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("classical statistics (k={}, q={}) vs (k={}, q={})", classical.k, classical.q, k, P.atoms()));
  }
  const PartitionOfUnity Y = pou_from_partition(fam, P);
  const DensityMatrix rho = gram_density(refine(fam.context(), Y, k, budget));

  const std::size_t l = Y.size();
  const std::size_t corrector = *Y.corrector;
  std::vector<Eigen::Index> kept;
  std::vector<std::uint64_t> classical_code;
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(rho.dim()); ++idx) {
    std::vector<int> digits(static_cast<std::size_t>(k));
    std::size_t rest = idx;
    bool clean = true;
    for (int t = k - 1; t >= 0; --t) {
      digits[static_cast<std::size_t>(t)] = static_cast<int>(rest % l);
      clean = clean && rest % l != corrector;
      rest /= l;
    }
    if (!clean) continue;
    // Slot t of the chain evolves for t steps, which is classical symbol k-1-t.
    std::vector<int> symbols(digits.rbegin(), digits.rend());
    kept.push_back(static_cast<Eigen::Index>(idx));
    classical_code.push_back(classical.encode(symbols));
  }

  const auto m = static_cast<Eigen::Index>(kept.size());
  CMatrix block(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) block(i, j) = rho.matrix()(kept[i], kept[j]);
  const double kept_weight = block.trace().real();
  block /= kept_weight;
  const DensityMatrix restricted(std::move(block));

  std::vector<double> sigma(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto it = classical.weights.find(classical_code[static_cast<std::size_t>(i)]);
    sigma[static_cast<std::size_t>(i)] = it == classical.weights.end() ? 0.0 : it->second;
  }
  const DensityMatrix sigma_state = DensityMatrix::diagonal(sigma);

  GapReport out;
  out.k = k;
  out.N = fam.N();
  out.entropy_quantum = linalg::von_neumann_entropy(rho);
  out.entropy_restricted = linalg::von_neumann_entropy(restricted);
  out.entropy_classical = torus::shannon_entropy(classical);
  out.gap = std::abs(out.entropy_restricted - out.entropy_classical) / k;
  out.gap_full = std::abs(out.entropy_quantum - out.entropy_classical) / k;
  out.leakage = 1.0 - kept_weight;
  out.trace_distance = linalg::trace_norm_distance(restricted, sigma_state);
  out.fannes = linalg::fannes_bound(out.trace_distance, static_cast<std::size_t>(m));
  return out;
}

}  // namespace catlab::alf
