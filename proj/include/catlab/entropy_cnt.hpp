#pragma once

// CNT entropy bracket: Shannon upper bound of the classical refinement and
// the lower bound from an explicit tracial decomposition.

#include "catlab/coherent.hpp"
#include "catlab/torus.hpp"

#include <cstdint>
#include <vector>

namespace catlab::cnt {

using coherent::CoherentFamily;

struct CNTBracket {
  int k = 0;
  double lower = 0.0;
  double upper = 0.0;
  double correction = 0.0;
};

double cnt_upper(const torus::RefinedMeasure& measure);

enum class Evolution {
  Classical,  // anti_wick(chi_C o A^-l)
  Quantum,    // Theta^l(anti_wick(chi_C))
};

// Row s of p^{l,i}: tau(y_i y_s) / tau(y_i) with y = the quantized, l-step
// evolved atoms.
struct ProbabilityRows {
  Eigen::MatrixXd rows;       // q x q
  Eigen::VectorXd marginals;  // tau(y_i)
  double clamped_mass = 0.0;  // total negative mass zeroed while clamping
};

/// Throws IndivisibleGrid unless q_side divides N, SimplexViolation when more
/// than 1e-8 of negative mass has to be clamped.
ProbabilityRows probability_rows(const CoherentFamily& fam, const torus::PartitionSpec& P, int step,
                                 Evolution evolution = Evolution::Classical, int subsample = 4);

/// Bracket at length k; `classical` supplies S_mu(C^(k)) and must have length k.
CNTBracket cnt_lower(const CoherentFamily& fam, const torus::PartitionSpec& P, int k,
                     const torus::RefinedMeasure& classical, Evolution evolution = Evolution::Classical,
                     int subsample = 4);

struct BracketRow {
  std::int64_t N = 0;
  int k = 0;
  double lower_rate = 0.0;
  double upper_rate = 0.0;
  double correction_rate = 0.0;
};

/// Rows over N_list x {1..k_max}, sorted by (N, k).
std::vector<BracketRow> cnt_bracket_curve(const torus::CatMap& A, const torus::PartitionSpec& P, int k_max,
                                          const std::vector<std::int64_t>& N_list, std::int64_t lattice = 4096,
                                          int subsample = 4);

/// True when (upper - lower)/k does not increase with N at any fixed k by
/// more than `slack`.
bool narrows_in_N(const std::vector<BracketRow>& rows, double slack = 0.02);

}  // namespace catlab::cnt
