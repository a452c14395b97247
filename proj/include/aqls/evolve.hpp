#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "aqls/hamiltonian.hpp"
#include "aqls/linalg.hpp"
#include "aqls/schedule.hpp"

namespace aqls {

/// Seed for the per-run PRNG. Runs are reproducible bit for bit: the
/// generator is std::mt19937_64 seeded with this value, and each step draws
/// exactly one time t = t_max * ((gen() >> 11) * 2^-53).
struct RngSeed {
  std::uint64_t value = 0;
};

struct StepRecord {
  int j = 0;  // 1-based step index
  double v = 0;
  double s = 0;
  std::optional<double> t;  // drawn time; empty in channel mode
  double t_max = 0;
  double energy = 0;  // expectation of the driven Hamiltonian after the step
  double e0 = 0;
  double e1 = 0;  // smallest nonzero |eigenvalue| at this step
  double ground_fidelity = 0;
};

enum class RunKind { kTrajectory, kChannel };
enum class RunStatus { kOk, kFailedPostselection };

/// Everything one run produces. Trajectory runs fill final_state, channel
/// runs fill final_density. On failed post-selection the solution is empty,
/// solution_fidelity is 0 and the (near-zero) probability is retained.
struct RunReport {
  RunKind kind = RunKind::kTrajectory;
  std::optional<std::uint64_t> seed;
  RunStatus status = RunStatus::kOk;
  std::vector<StepRecord> steps;
  ComplexVector final_state;
  ComplexMatrix final_density;
  ComplexVector solution;         // post-selected, phase-fixed
  double success_probability = 0;
  double solution_fidelity = 0;   // |<solution|x_oracle>|^2
  double traced_fidelity = 0;     // F(tr_anc(rho_final), |x_oracle><x_oracle|)
  ComplexVector x_oracle;
};

/// Per-step eigensystems of the driven Hamiltonian for one
/// (instance, schedule) pair. Immutable after construction; safe to share
/// across concurrent runs. Building it once amortizes the diagonalizations
/// over seeds.
class CompiledEvolution {
 public:
  CompiledEvolution(ProblemInstance instance, Schedule schedule);

  const ProblemInstance& instance() const { return instance_; }
  const Schedule& schedule() const { return schedule_; }
  const ComplexVector& x_oracle() const { return x_oracle_; }
  int steps() const { return static_cast<int>(eigs_.size()); }

  const EigenSystem& step_eigensystem(int j) const { return eigs_.at(j); }

 private:
  friend RunReport run_trajectory_with_times(const CompiledEvolution&,
                                             std::span<const double>,
                                             std::optional<std::uint64_t>);
  friend RunReport run_channel(const CompiledEvolution&);

  ProblemInstance instance_;
  Schedule schedule_;
  ComplexVector initial_;
  ComplexVector x_oracle_;
  std::vector<EigenSystem> eigs_;       // one per step
  std::vector<double> e1_;              // smallest nonzero |eigenvalue|
  std::vector<std::vector<int>> zero_;  // indices of zero modes
};

/// Seeded stochastic pure-state run: step j draws t_j uniformly from
/// [0, t_max_j] and applies exp(-i H_j t_j).
RunReport run_trajectory(const CompiledEvolution& ce, RngSeed seed);
RunReport run_trajectory(const ProblemInstance& inst, const Schedule& sched,
                         RngSeed seed);

/// Deterministic variant with caller-supplied times (one per step).
RunReport run_trajectory_with_times(
    const CompiledEvolution& ce, std::span<const double> times,
    std::optional<std::uint64_t> seed = std::nullopt);

/// Exact expectation of the randomized evolution: in the eigenbasis of H_j,
/// element (a,b) is damped by phi((lambda_a - lambda_b) * t_max_j) with
/// phi(x) = (1 - exp(-ix))/(ix), phi(0) = 1. Deterministic; no seed.
RunReport run_channel(const CompiledEvolution& ce);
RunReport run_channel(const ProblemInstance& inst, const Schedule& sched);

/// The time-average damping factor phi above.
Complex channel_damping(double x);

/// Post-selects the ancillas (|+> for algorithm 1; |0> then |+> for
/// algorithm 2) and returns the remaining N-vector, phase-fixed, with the
/// success probability.
std::pair<ComplexVector, double> extract_solution(const ComplexVector& final,
                                                  const ProblemInstance& inst);
std::pair<ComplexVector, double> extract_solution(const ComplexMatrix& final,
                                                  const ProblemInstance& inst);

/// x = A^-1 b / ||A^-1 b|| via the eigendecomposition, phase-fixed.
ComplexVector oracle_solve(const ProblemInstance& inst);

/// F(rho, sigma) = tr(rho sigma) / (sqrt(tr rho^2) sqrt(tr sigma^2)).
double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma);

double energy(const QuantumState& psi, const HermitianOperator& h);
double energy(const DensityMatrix& rho, const HermitianOperator& h);

/// Global-phase convention for reported vectors: the largest-magnitude
/// component (first such index on ties) is rotated to positive real.
ComplexVector phase_fix(const ComplexVector& v);

}  // namespace aqls
