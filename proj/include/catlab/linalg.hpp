#pragma once

// Dense complex matrix kernel: Hermitian spectra, PSD square roots, density
// matrices and von Neumann entropy.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>

namespace catlab::linalg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// tau_herm scales with the dimension; the other two are absolute.
struct Tolerances {
  static constexpr double herm_per_dim = 1e-10;
  static constexpr double trace = 1e-8;
  static constexpr double psd = 1e-10;

  static double herm(Eigen::Index dim) { return herm_per_dim * static_cast<double>(dim); }
};

struct Spectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns
};

enum class LogBase { E, Two };

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitian when
/// ||m - m*||_max exceeds tau_herm, NoConvergence if the solver gives up.
Spectrum eig_hermitian(const CMatrix& m);

/// Eigenvalues only (ascending); same preconditions as eig_hermitian.
RVector eigenvalues_hermitian(const CMatrix& m);

/// Hermitian PSD square root. Eigenvalues in [-tau_psd, 0) are clamped to 0;
/// anything more negative is NotPSD.
CMatrix sqrt_psd(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double tol);
double hermiticity_defect(const CMatrix& m);

/// tau_N(X) = tr(X)/N.
Complex normalized_trace(const CMatrix& m);

/// ||X||_2 = sqrt(tau_N(X* X)).
double normalized_hs_norm(const CMatrix& m);

/// Plain Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const CMatrix& m);

/// eta(x) = -x log x with eta(0) = 0.
double eta(double x);

/// Shannon entropy sum_i eta(p_i) in nats.
double shannon_entropy(std::span<const double> p);

// Validated density matrix: Hermitian to tau_herm, unit trace to tau_tr,
// eigenvalues >= -tau_psd.
class DensityMatrix {
 public:
  /// Validates; throws NotHermitian / InvalidState / NotPSD.
  explicit DensityMatrix(CMatrix m);

  /// diag(p) for a probability vector.
  static DensityMatrix diagonal(std::span<const double> p);

  const CMatrix& matrix() const noexcept { return mat_; }
  Eigen::Index dim() const noexcept { return mat_.rows(); }

  /// Spectrum clamped to [0,1] and renormalized to unit sum.
  const RVector& probabilities() const noexcept { return probs_; }

 private:
  CMatrix mat_;
  RVector probs_;
};

double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::E);

/// Entropy of the spectrum of a PSD matrix after normalization to unit trace.
/// Used where only the nonzero spectrum matters (e.g. a dual Gram matrix).
double entropy_of_psd(const CMatrix& m);

/// ||a - b||_1 = sum |lambda_i(a - b)|. Throws DimensionMismatch.
double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Fannes continuity bound delta*log(dim) + eta(delta).
double fannes_bound(double delta, std::size_t dim);

}  // namespace catlab::linalg
