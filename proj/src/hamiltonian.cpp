#include "aqls/hamiltonian.hpp"

#include <cmath>
#include <utility>

#include "aqls/pauli.hpp"

namespace aqls {

namespace {

void require_unit_interval(double s) {
  if (s < -1e-12 || s > 1.0 + 1e-12) {
    throw Error("interpolation parameter s = " + std::to_string(s) +
                " outside [0, 1]");
  }
}

}  // namespace

ProblemInstance normalize_instance(const HermitianOperator& A_raw,
                                   const ComplexVector& b_raw,
                                   Algorithm algorithm,
                                   std::optional<double> kappa_override,
                                   std::string expression) {
  if (b_raw.size() != A_raw.dim()) {
    throw DimensionError("right-hand side has dimension " +
                         std::to_string(b_raw.size()) + ", matrix has " +
                         std::to_string(A_raw.dim()));
  }
  const double b_norm = b_raw.norm();
  if (b_norm < kZeroEigTol) {
    throw Error("right-hand side is the zero vector");
  }
  const bool rescaled = std::abs(b_norm - 1.0) > kUnitNormTol;

  // condition_number rejects singular matrices before we divide by anything.
  const double kappa_computed = condition_number(A_raw);
  const double scale = spectral_norm(A_raw);
  if (kappa_override && !(*kappa_override >= 1.0)) {
    throw Error("kappa override must be >= 1, got " +
                std::to_string(*kappa_override));
  }

  return ProblemInstance{
      A_raw,
      HermitianOperator(ComplexMatrix(A_raw.mat() / scale)),
      QuantumState(rescaled ? ComplexVector(b_raw / b_norm) : b_raw),
      kappa_override.value_or(kappa_computed),
      kappa_computed,
      kappa_override.has_value(),
      scale,
      algorithm,
      rescaled,
      std::move(expression)};
}

QuantumState embed_b(const QuantumState& b) {
  const Eigen::Index n = b.dim();
  ComplexVector out(2 * n);
  out.head(n) = b.amplitudes() / std::sqrt(2.0);
  out.tail(n) = b.amplitudes() / std::sqrt(2.0);
  return QuantumState(std::move(out));
}

HermitianOperator A_of_s(double s, const ProblemInstance& inst) {
  require_unit_interval(s);
  const Eigen::Index n = inst.dim();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  return HermitianOperator((1.0 - s) * kron(pauli_matrix('Z'), eye) +
                           s * kron(pauli_matrix('X'), inst.A.mat()));
}

HermitianOperator H_of_s(double s, const ProblemInstance& inst) {
  const ComplexMatrix a = A_of_s(s, inst).mat();
  const ComplexVector ab = a * embed_b(inst.b).amplitudes();
  return HermitianOperator(a * a - ab * ab.adjoint());
}

HermitianOperator Hprime_of_s(double s, const ProblemInstance& inst) {
  const Eigen::Index n2 = 2 * inst.dim();
  const ComplexMatrix a = A_of_s(s, inst).mat();
  const ComplexVector bb = embed_b(inst.b).amplitudes();
  const ComplexMatrix p =
      ComplexMatrix::Identity(n2, n2) - bb * bb.adjoint();
  const ComplexMatrix block = a * p;  // B = A(s) P_perp
  ComplexMatrix h = ComplexMatrix::Zero(2 * n2, 2 * n2);
  h.topRightCorner(n2, n2) = block;
  h.bottomLeftCorner(n2, n2) = block.adjoint();
  return HermitianOperator(std::move(h));
}

QuantumState initial_state(const ProblemInstance& inst) {
  const Eigen::Index n = inst.dim();
  ComplexVector base(2 * n);
  base.head(n) = inst.b.amplitudes() / std::sqrt(2.0);
  base.tail(n) = -inst.b.amplitudes() / std::sqrt(2.0);
  if (inst.algorithm == Algorithm::kAlg1) {
    return QuantumState(std::move(base));
  }
  ComplexVector out = ComplexVector::Zero(4 * n);
  out.head(2 * n) = base;
  return QuantumState(std::move(out));
}

GroundSpace ground_space(const HermitianOperator& h, int expected_nullity) {
  const EigenSystem sys = eigh(h);
  const RealVector abs_eigs = sys.eigenvalues.cwiseAbs();
  const double threshold = kZeroEigTol * abs_eigs.maxCoeff();

  GroundSpace gs;
  std::vector<Eigen::Index> zero;
  gs.gap = 0.0;
  bool have_gap = false;
  for (Eigen::Index k = 0; k < abs_eigs.size(); ++k) {
    if (abs_eigs(k) <= threshold) {
      zero.push_back(k);
      gs.energy = std::max(gs.energy, abs_eigs(k));
    } else if (!have_gap || abs_eigs(k) < gs.gap) {
      gs.gap = abs_eigs(k);
      have_gap = true;
    }
  }
  if (static_cast<int>(zero.size()) != expected_nullity) {
    throw NullityError("expected a null space of dimension " +
                       std::to_string(expected_nullity) + ", found " +
                       std::to_string(zero.size()));
  }
  gs.basis.resize(sys.eigenvectors.rows(),
                  static_cast<Eigen::Index>(zero.size()));
  for (std::size_t i = 0; i < zero.size(); ++i) {
    gs.basis.col(static_cast<Eigen::Index>(i)) =
        sys.eigenvectors.col(zero[i]);
  }
  return gs;
}

}  // namespace aqls
