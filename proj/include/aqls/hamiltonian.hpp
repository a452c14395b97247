#pragma once

#include <optional>
#include <string>

#include "aqls/linalg.hpp"
#include "aqls/schedule.hpp"

namespace aqls {

enum class Algorithm { kAlg1 = 1, kAlg2 = 2 };

/// A linear system A x = b prepared for annealing: A is rescaled to unit
/// spectral norm (which leaves the solution state unchanged and makes the
/// Delta* gap bound valid), b is normalized, kappa = max|lambda|/min|lambda|.
struct ProblemInstance {
  HermitianOperator A_raw;
  HermitianOperator A;    // A_raw / scale
  QuantumState b;
  double kappa = 1;       // effective value (override if given, else computed)
  double kappa_computed = 1;
  bool kappa_overridden = false;
  double scale = 1;       // spectral_norm(A_raw)
  Algorithm algorithm = Algorithm::kAlg1;
  bool b_was_rescaled = false;
  std::string expression;  // source text when built from a Pauli expression

  Eigen::Index dim() const { return A.dim(); }
  ScheduleVariant schedule_variant() const {
    return algorithm == Algorithm::kAlg1 ? ScheduleVariant::kAlg1
                                         : ScheduleVariant::kAlg2;
  }
};

/// Zero-eigenvalue subspace of a Hamiltonian.
struct GroundSpace {
  double energy = 0;    // largest |eigenvalue| classified as zero
  ComplexMatrix basis;  // orthonormal null vectors (columns)
  double gap = 0;       // smallest nonzero |eigenvalue|
};

ProblemInstance normalize_instance(
    const HermitianOperator& A_raw, const ComplexVector& b_raw,
    Algorithm algorithm, std::optional<double> kappa_override = std::nullopt,
    std::string expression = {});

/// |b_bar> = |+> (x) |b>, length 2N.
QuantumState embed_b(const QuantumState& b);

/// A(s) = (1-s) Z (x) I + s X (x) A, dimension 2N.
HermitianOperator A_of_s(double s, const ProblemInstance& inst);

/// H(s) = A(s)^2 - A(s)|b_bar><b_bar|A(s); PSD with a one-dimensional zero
/// mode that carries the solution.
HermitianOperator H_of_s(double s, const ProblemInstance& inst);

/// Gap-amplified Hamiltonian, dimension 4N, built from sigma+ (x) A(s)P +
/// sigma- (x) P A(s) with P = I - |b_bar><b_bar| and sigma+ = [[0,1],[0,0]].
/// Indefinite: spectrum is {0, 0} plus +-sqrt of the nonzero spectrum of H(s).
HermitianOperator Hprime_of_s(double s, const ProblemInstance& inst);

/// |-,b> for algorithm 1 (length 2N); |0,-,b> for algorithm 2 (length 4N).
QuantumState initial_state(const ProblemInstance& inst);

/// Null basis via eigh with the global zero threshold. Throws NullityError
/// when the found nullity differs from expected_nullity (degenerate or
/// singular instance, or threshold failure).
GroundSpace ground_space(const HermitianOperator& h, int expected_nullity);

}  // namespace aqls
