#pragma once

// ALF dynamical entropy of quantized partitions of unity.

#include "catlab/coherent.hpp"
#include "catlab/linalg.hpp"
#include "catlab/torus.hpp"
#include "catlab/weyl.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace catlab::alf {

using coherent::CoherentFamily;
using linalg::CMatrix;
using linalg::DensityMatrix;

struct PartitionOfUnity {
  std::vector<CMatrix> ops;
  /// Index of the corrector sqrt(1 - sum y_i^2), if present.
  std::optional<std::size_t> corrector;
  bool bistochastic = false;

  std::size_t size() const noexcept { return ops.size(); }
};

/// || sum y* y - 1 ||_max and || sum y y* - 1 ||_max.
double unity_defect(const PartitionOfUnity& Y);
double bistochastic_defect(const PartitionOfUnity& Y);

/// y_i = anti_wick(indicator of atom i) for the q atoms, plus the corrector.
/// Throws IndivisibleGrid unless q_side divides N.
PartitionOfUnity pou_from_partition(const CoherentFamily& fam, const torus::PartitionSpec& P);

struct Budget {
  std::size_t max_chains = 4096;
  std::size_t max_entries = std::size_t{1} << 31;
};

/// Chains Theta^{k-1}(y_{i_k}) ... Theta(y_{i_2}) y_{i_1}; chain index puts
/// i_1 in the most significant base-l digit. Throws BudgetExceeded.
std::vector<CMatrix> refine(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k, Budget budget = {});

/// Gram matrix rho_{i,j} = tau(A_j* A_i) / trace, validated.
DensityMatrix gram_density(const std::vector<CMatrix>& chains);

struct RefinedDensity {
  int k = 0;
  std::size_t alphabet = 0;
  DensityMatrix rho;
};

RefinedDensity refined_density(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k, Budget budget = {});

/// rho with the last tensor slot traced out.
DensityMatrix partial_trace_last(const DensityMatrix& rho, std::size_t alphabet);

/// S(rho) from chains; switches to the N^2-dimensional dual Gram matrix when
/// it is smaller than the chain count.
double chain_entropy(const std::vector<CMatrix>& chains);

/// H[Y^(k)] for k = 1..k_max.
std::vector<double> alf_curve(const weyl::WeylContext& ctx, const PartitionOfUnity& Y, int k_max, Budget budget = {});

struct GapReport {
  int k = 0;
  std::int64_t N = 0;
  double entropy_quantum = 0.0;       // S(rho[Y^(k)])
  double entropy_restricted = 0.0;    // S of rho on corrector-free indices, renormalized
  double entropy_classical = 0.0;     // S_mu(C^(k))
  double gap = 0.0;                   // |entropy_restricted - entropy_classical| / k
  double gap_full = 0.0;              // |entropy_quantum - entropy_classical| / k
  double leakage = 0.0;               // rho weight on indices containing the corrector
  double trace_distance = 0.0;        // || restricted rho - sigma ||_1
  double fannes = 0.0;                // fannes_bound(trace_distance, q^k)
};

/// Compares rho[Y^(k)] with the diagonal state of the classical refinement.
/// `classical` must hold forward symbol statistics at the same k.
GapReport theorem72_gap(const CoherentFamily& fam, const torus::PartitionSpec& P, int k,
                        const torus::RefinedMeasure& classical, Budget budget = {});

}  // namespace catlab::alf
