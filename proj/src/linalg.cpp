#include "catlab/linalg.hpp"

#include "catlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace catlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::MissingDynamics: return "MissingDynamics";
    case ErrorCode::NotTrigPolynomial: return "NotTrigPolynomial";
    case ErrorCode::IndivisibleGrid: return "IndivisibleGrid";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::SimplexViolation: return "SimplexViolation";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace linalg {

namespace {

void require_square(const CMatrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{}: expected a non-empty square matrix, got {}x{}", op, m.rows(), m.cols()));
  }
}

void require_hermitian(const CMatrix& m, const char* op) {
  require_square(m, op);
  const double defect = hermiticity_defect(m);
  if (!(defect <= Tolerances::herm(m.rows()))) {
    throw Error(ErrorCode::NotHermitian, fmt::format("{}: |m - m*|_max = {:.3e}", op, defect));
  }
}

// Symmetrize before handing to the solver so it only ever sees exact Hermitian input.
CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

Spectrum eig_hermitian(const CMatrix& m) {
  require_hermitian(m, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "eig_hermitian: iteration cap reached");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

RVector eigenvalues_hermitian(const CMatrix& m) {
  require_hermitian(m, "eigenvalues_hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "eigenvalues_hermitian: iteration cap reached");
  }
  return solver.eigenvalues();
}

CMatrix sqrt_psd(const CMatrix& m) {
  Spectrum s = eig_hermitian(m);
  const double lowest = s.eigenvalues.size() ? s.eigenvalues(0) : 0.0;
  if (lowest < -Tolerances::psd) {
    throw Error(ErrorCode::NotPSD, fmt::format("sqrt_psd: min eigenvalue {:.3e}", lowest));
  }
  RVector roots = s.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return s.eigenvectors * roots.asDiagonal() * s.eigenvectors.adjoint();
}

Complex normalized_trace(const CMatrix& m) {
  require_square(m, "normalized_trace");
  return m.trace() / static_cast<double>(m.rows());
}

double normalized_hs_norm(const CMatrix& m) {
  require_square(m, "normalized_hs_norm");
  return m.norm() / std::sqrt(static_cast<double>(m.rows()));
}

double hs_norm(const CMatrix& m) { return m.norm(); }

double eta(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

double shannon_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += eta(x);
  return s;
}

namespace {

RVector clamp_to_simplex(const RVector& eigenvalues) {
  RVector p = eigenvalues.cwiseMax(0.0).cwiseMin(1.0);
  const double total = p.sum();
  if (total > 0.0) p /= total;
  return p;
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix m) : mat_(std::move(m)) {
  require_hermitian(mat_, "DensityMatrix");
  const Complex tr = mat_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > Tolerances::trace) {
    throw Error(ErrorCode::InvalidState,
                fmt::format("DensityMatrix: trace {:.12f}{:+.3e}i", tr.real(), tr.imag()));
  }
  RVector ev = eigenvalues_hermitian(mat_);
  if (ev(0) < -Tolerances::psd) {
    throw Error(ErrorCode::NotPSD, fmt::format("DensityMatrix: min eigenvalue {:.3e}", ev(0)));
  }
  probs_ = clamp_to_simplex(ev);
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> p) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return DensityMatrix(std::move(m));
}

double von_neumann_entropy(const DensityMatrix& rho, LogBase base) {
  const RVector& p = rho.probabilities();
  const double nats = shannon_entropy(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  return base == LogBase::E ? nats : nats / std::log(2.0);
}

double entropy_of_psd(const CMatrix& m) {
  RVector ev = eigenvalues_hermitian(m);
  const double tr = ev.sum();
  if (!(tr > 0.0)) throw Error(ErrorCode::InvalidState, "entropy_of_psd: non-positive trace");
  ev /= tr;
  if (ev(0) < -Tolerances::psd * std::max(1.0, static_cast<double>(ev.size()))) {
    throw Error(ErrorCode::NotPSD, fmt::format("entropy_of_psd: min eigenvalue {:.3e}", ev(0)));
  }
  RVector p = clamp_to_simplex(ev);
  return shannon_entropy(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("trace_norm_distance: {} vs {}", a.dim(), b.dim()));
  }
  const CMatrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(diff), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "trace_norm_distance: iteration cap reached");
  }
  return solver.eigenvalues().cwiseAbs().sum();
}

double fannes_bound(double delta, std::size_t dim) {
  if (delta < 0.0) throw Error(ErrorCode::InvalidArgument, "fannes_bound: negative distance");
  return delta * std::log(static_cast<double>(dim)) + eta(delta);
}

}  // namespace linalg
}  // namespace catlab
