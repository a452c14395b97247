#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "aqls/errors.hpp"

namespace aqls {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// One global zero-eigenvalue threshold, relative to the spectral norm.
// Singularity detection, null-space extraction and ground-space projection
// all classify against this same constant.
inline constexpr double kZeroEigTol = 1e-10;
inline constexpr double kHermitianCertTol = 1e-12;
inline constexpr double kUnitNormTol = 1e-10;
inline constexpr double kPostselectFloor = 1e-14;

/// Dense complex square matrix certified Hermitian at construction
/// (max |M - M^dag| entry <= 1e-12 * (1 + max |M| entry)), then symmetrized
/// so downstream code sees exact Hermiticity.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m);

  const ComplexMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// orthonormal eigenvectors with a deterministic phase convention (first
/// above-threshold component of each vector rotated to positive real).
struct EigenSystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;  // columns
};

/// Pure-state amplitude vector, certified normalized (||psi|| = 1 to 1e-10).
class QuantumState {
 public:
  explicit QuantumState(ComplexVector amplitudes);

  const ComplexVector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }

 private:
  ComplexVector amps_;
};

/// Mixed state: Hermitian, unit trace (1e-10), eigenvalues >= -1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator rho);
  explicit DensityMatrix(const QuantumState& psi);

  const ComplexMatrix& mat() const { return op_.mat(); }
  const HermitianOperator& op() const { return op_; }
  Eigen::Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

EigenSystem eigh(const HermitianOperator& h);

/// exp(-i H t) = V diag(exp(-i lambda_k t)) V^dag.
ComplexMatrix expm_unitary(const HermitianOperator& h, double t);

/// kappa = max|lambda| / min|lambda|. Throws SingularMatrixError when
/// min|lambda| <= kZeroEigTol * max|lambda|.
double condition_number(const HermitianOperator& h);

double spectral_norm(const HermitianOperator& h);

/// Reduced density matrix over the kept subsystems (0-based indices into
/// `dims`, listed left to right in tensor order). Trace is preserved.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Eigen::Index>& dims,
                            const std::vector<std::size_t>& keep);

/// Projects psi onto the range of an (idempotency-certified) projector.
/// Returns the renormalized state and the outcome probability ||P psi||^2;
/// throws PostselectError below the zero-probability floor.
std::pair<QuantumState, double> project_postselect(
    const QuantumState& psi, const HermitianOperator& projector);

}  // namespace aqls
