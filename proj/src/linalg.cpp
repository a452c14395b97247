#include "aqls/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqls {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("HermitianOperator needs a nonempty square matrix, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  const double asym = max_abs(m - m.adjoint());
  if (asym > kHermitianCertTol * (1.0 + max_abs(m))) {
    throw Error("matrix is not Hermitian (max |M - M^dag| entry = " +
                std::to_string(asym) + ")");
  }
  mat_ = 0.5 * (m + m.adjoint());
}

QuantumState::QuantumState(ComplexVector amplitudes) {
  if (amplitudes.size() == 0) {
    throw DimensionError("QuantumState needs a nonempty amplitude vector");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kUnitNormTol) {
    throw Error("state is not normalized (||psi|| = " + std::to_string(norm) +
                ")");
  }
  amps_ = std::move(amplitudes);
}

DensityMatrix::DensityMatrix(HermitianOperator rho) : op_(std::move(rho)) {
  const Complex tr = op_.mat().trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kUnitNormTol) {
    throw Error("density matrix trace is not 1 (tr = " +
                std::to_string(tr.real()) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op_.mat(),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("eigenvalue check of density matrix failed");
  }
  if (solver.eigenvalues().minCoeff() < -kZeroEigTol) {
    throw Error("density matrix is not positive semidefinite (min eigenvalue " +
                std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
}

DensityMatrix::DensityMatrix(const QuantumState& psi)
    : op_(ComplexMatrix(psi.amplitudes() * psi.amplitudes().adjoint())) {}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

EigenSystem eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.mat());
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("SelfAdjointEigenSolver did not converge");
  }
  EigenSystem sys{solver.eigenvalues(), solver.eigenvectors()};
  // Deterministic phase: rotate the first component with magnitude above
  // 1e-8 (well clear of round-off on a unit vector) to positive real.
  for (Eigen::Index k = 0; k < sys.eigenvectors.cols(); ++k) {
    auto col = sys.eigenvectors.col(k);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-8) {
        col *= std::conj(col(i)) / mag;
        break;
      }
    }
  }
  return sys;
}

ComplexMatrix expm_unitary(const HermitianOperator& h, double t) {
  const EigenSystem sys = eigh(h);
  ComplexVector phases(sys.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -sys.eigenvalues(k) * t));
  }
  return sys.eigenvectors * phases.asDiagonal() * sys.eigenvectors.adjoint();
}

double condition_number(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.mat(),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("SelfAdjointEigenSolver did not converge");
  }
  const RealVector abs_eigs = solver.eigenvalues().cwiseAbs();
  const double max = abs_eigs.maxCoeff();
  const double min = abs_eigs.minCoeff();
  if (min <= kZeroEigTol * max) {
    throw SingularMatrixError("matrix is singular (|lambda|_min/|lambda|_max = " +
                              std::to_string(max > 0 ? min / max : 0.0) + ")");
  }
  return max / min;
}

double spectral_norm(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.mat(),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("SelfAdjointEigenSolver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Eigen::Index>& dims,
                            const std::vector<std::size_t>& keep) {
  const Eigen::Index total = std::accumulate(dims.begin(), dims.end(),
                                             Eigen::Index{1},
                                             std::multiplies<>());
  if (total != rho.dim()) {
    throw DimensionError("partial_trace: factor dimensions multiply to " +
                         std::to_string(total) + ", state has dimension " +
                         std::to_string(rho.dim()));
  }
  std::vector<std::size_t> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  if (std::adjacent_find(keep_sorted.begin(), keep_sorted.end()) !=
          keep_sorted.end() ||
      (!keep_sorted.empty() && keep_sorted.back() >= dims.size())) {
    throw DimensionError("partial_trace: keep list must be unique indices into dims");
  }
  if (keep_sorted.empty()) {
    throw DimensionError("partial_trace: must keep at least one subsystem");
  }

  std::vector<std::size_t> traced;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), a)) {
      traced.push_back(a);
    }
  }

  // Row-major strides over the tensor factors, leftmost factor first.
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (std::size_t a = dims.size(); a-- > 1;) {
    stride[a - 1] = stride[a] * dims[a];
  }

  Eigen::Index kept_dim = 1;
  for (std::size_t a : keep_sorted) kept_dim *= dims[a];
  Eigen::Index traced_dim = 1;
  for (std::size_t a : traced) traced_dim *= dims[a];

  // Base offset of each kept multi-index (enumerated in row-major order over
  // the kept factors) and of each traced multi-index.
  auto offsets = [&](const std::vector<std::size_t>& axes, Eigen::Index count) {
    std::vector<Eigen::Index> out(static_cast<std::size_t>(count), 0);
    Eigen::Index repeat = count;
    for (std::size_t a : axes) {
      repeat /= dims[a];
      for (Eigen::Index flat = 0; flat < count; ++flat) {
        out[static_cast<std::size_t>(flat)] +=
            ((flat / repeat) % dims[a]) * stride[a];
      }
    }
    return out;
  };
  const std::vector<Eigen::Index> kept_off = offsets(keep_sorted, kept_dim);
  const std::vector<Eigen::Index> traced_off = offsets(traced, traced_dim);

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  const ComplexMatrix& m = rho.mat();
  for (Eigen::Index i = 0; i < kept_dim; ++i) {
    for (Eigen::Index j = 0; j < kept_dim; ++j) {
      Complex sum = 0;
      for (Eigen::Index t = 0; t < traced_dim; ++t) {
        sum += m(kept_off[static_cast<std::size_t>(i)] +
                     traced_off[static_cast<std::size_t>(t)],
                 kept_off[static_cast<std::size_t>(j)] +
                     traced_off[static_cast<std::size_t>(t)]);
      }
      out(i, j) = sum;
    }
  }
  return DensityMatrix(HermitianOperator(std::move(out)));
}

std::pair<QuantumState, double> project_postselect(
    const QuantumState& psi, const HermitianOperator& projector) {
  const ComplexMatrix& p = projector.mat();
  if (p.rows() != psi.dim()) {
    throw DimensionError("project_postselect: projector dimension " +
                         std::to_string(p.rows()) + " vs state dimension " +
                         std::to_string(psi.dim()));
  }
  if (max_abs(p * p - p) > 1e-10) {
    throw Error("project_postselect: operator is not idempotent");
  }
  const ComplexVector phi = p * psi.amplitudes();
  const double prob = phi.squaredNorm();
  if (prob < kPostselectFloor) {
    throw PostselectError("post-selection probability " +
                          std::to_string(prob) + " is below the floor");
  }
  return {QuantumState(phi / std::sqrt(prob)), prob};
}

}  // namespace aqls
