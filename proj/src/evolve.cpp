#include "aqls/evolve.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace aqls {

namespace {

struct Extraction {
  ComplexVector x;  // empty when the outcome probability was (near) zero
  double p = 0;
  bool ok = false;
};

// <anc| (x) I applied to a pure state: the system-space component left after
// projecting the ancillas. Algorithm 1 keeps <+|; algorithm 2 keeps <0| on
// the outer ancilla and <+| on the inner one.
ComplexVector ancilla_component(const ComplexVector& final,
                                const ProblemInstance& inst) {
  const Eigen::Index n = inst.dim();
  const double r = 1.0 / std::sqrt(2.0);
  if (inst.algorithm == Algorithm::kAlg1) {
    if (final.size() != 2 * n) {
      throw DimensionError("algorithm 1 expects a state of dimension " +
                           std::to_string(2 * n));
    }
    return r * (final.head(n) + final.segment(n, n));
  }
  if (final.size() != 4 * n) {
    throw DimensionError("algorithm 2 expects a state of dimension " +
                         std::to_string(4 * n));
  }
  return r * (final.head(n) + final.segment(n, n));
}

// The ancilla bra as a vector, for the density-matrix variant.
ComplexVector ancilla_vector(const ProblemInstance& inst) {
  const double r = 1.0 / std::sqrt(2.0);
  if (inst.algorithm == Algorithm::kAlg1) {
    ComplexVector a(2);
    a << r, r;
    return a;
  }
  ComplexVector a(4);
  a << r, r, 0.0, 0.0;
  return a;
}

Extraction extract_raw(const ComplexVector& final,
                       const ProblemInstance& inst) {
  const ComplexVector sys = ancilla_component(final, inst);
  Extraction e;
  e.p = sys.squaredNorm();
  if (e.p < kPostselectFloor) return e;
  e.x = phase_fix(sys / std::sqrt(e.p));
  e.ok = true;
  return e;
}

Extraction extract_raw(const ComplexMatrix& final,
                       const ProblemInstance& inst) {
  const Eigen::Index n = inst.dim();
  const ComplexVector a = ancilla_vector(inst);
  if (final.rows() != a.size() * n || final.cols() != final.rows()) {
    throw DimensionError("density matrix has dimension " +
                         std::to_string(final.rows()) + ", expected " +
                         std::to_string(a.size() * n));
  }
  // M = (<a| (x) I) rho (|a> (x) I)
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == Complex(0, 0)) continue;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (a(j) == Complex(0, 0)) continue;
      m += std::conj(a(i)) * a(j) * final.block(i * n, j * n, n, n);
    }
  }
  Extraction e;
  e.p = m.trace().real();
  if (e.p < kPostselectFloor) return e;
  const EigenSystem sys = eigh(HermitianOperator(ComplexMatrix(m / e.p)));
  e.x = phase_fix(sys.eigenvectors.col(sys.eigenvalues.size() - 1));
  e.ok = true;
  return e;
}

double traced_fidelity_of(const ComplexMatrix& rho_full,
                          const ProblemInstance& inst,
                          const ComplexVector& x_oracle) {
  const Eigen::Index n = inst.dim();
  std::vector<Eigen::Index> dims;
  std::vector<std::size_t> keep;
  if (inst.algorithm == Algorithm::kAlg1) {
    dims = {2, n};
    keep = {1};
  } else {
    dims = {2, 2, n};
    keep = {2};
  }
  const DensityMatrix reduced =
      partial_trace(DensityMatrix(HermitianOperator(rho_full)), dims, keep);
  const DensityMatrix target{QuantumState(x_oracle)};
  return fidelity_mixed(reduced, target);
}

// One StepRecord worth of observables from the eigenbasis coefficients:
// energy = sum_k lambda_k w_k and ground-space population, with w_k the
// (probability) weight in eigenmode k.
void fill_observables(const CompiledEvolution& ce, int j,
                      const RealVector& weights, StepRecord* rec) {
  const EigenSystem& sys = ce.step_eigensystem(j);
  rec->energy = sys.eigenvalues.dot(weights);
  double e0 = 0.0;
  double pop = 0.0;
  // |lambda| < e1 classifies a mode as zero: e1 is the smallest magnitude
  // among the nonzero-classified eigenvalues, so this reproduces the
  // compile-time classification exactly.
  for (Eigen::Index k = 0; k < sys.eigenvalues.size(); ++k) {
    if (std::abs(sys.eigenvalues(k)) < rec->e1) {
      pop += weights(k);
      if (std::abs(sys.eigenvalues(k)) > std::abs(e0)) {
        e0 = sys.eigenvalues(k);
      }
    }
  }
  rec->e0 = e0;
  rec->ground_fidelity = pop;
}

}  // namespace

CompiledEvolution::CompiledEvolution(ProblemInstance instance,
                                     Schedule schedule)
    : instance_(std::move(instance)), schedule_(std::move(schedule)) {
  if (std::abs(schedule_.kappa - instance_.kappa) >
      1e-12 * instance_.kappa) {
    throw Error("schedule kappa " + std::to_string(schedule_.kappa) +
                " does not match instance kappa " +
                std::to_string(instance_.kappa));
  }
  if (schedule_.grid.size() != static_cast<std::size_t>(schedule_.steps)) {
    throw DimensionError("schedule grid has " +
                         std::to_string(schedule_.grid.size()) +
                         " entries for " + std::to_string(schedule_.steps) +
                         " steps");
  }
  const bool alg2 = instance_.algorithm == Algorithm::kAlg2;
  if (schedule_.variant == ScheduleVariant::kLinearBaseline) {
    if (alg2) {
      throw Error("the linear baseline grid is paired with algorithm 1");
    }
  } else if (schedule_.variant != instance_.schedule_variant()) {
    throw Error("schedule variant does not match the instance algorithm");
  }

  initial_ = initial_state(instance_).amplitudes();
  x_oracle_ = oracle_solve(instance_);

  const int q = schedule_.steps;
  const int nullity = alg2 ? 2 : 1;
  eigs_.reserve(static_cast<std::size_t>(q));
  e1_.reserve(static_cast<std::size_t>(q));
  zero_.reserve(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {
    const double s = schedule_.grid[static_cast<std::size_t>(j)].s;
    const HermitianOperator h =
        alg2 ? Hprime_of_s(s, instance_) : H_of_s(s, instance_);
    EigenSystem sys = eigh(h);
    const double norm = sys.eigenvalues.cwiseAbs().maxCoeff();
    const double threshold = kZeroEigTol * norm;
    std::vector<int> zero;
    double e1 = norm;
    for (Eigen::Index k = 0; k < sys.eigenvalues.size(); ++k) {
      const double mag = std::abs(sys.eigenvalues(k));
      if (mag <= threshold) {
        zero.push_back(static_cast<int>(k));
      } else {
        e1 = std::min(e1, mag);
      }
    }
    if (static_cast<int>(zero.size()) != nullity) {
      throw NullityError("step " + std::to_string(j + 1) + " (s = " +
                         std::to_string(s) + "): expected nullity " +
                         std::to_string(nullity) + ", found " +
                         std::to_string(zero.size()));
    }
    eigs_.push_back(std::move(sys));
    e1_.push_back(e1);
    zero_.push_back(std::move(zero));
  }
}

RunReport run_trajectory(const CompiledEvolution& ce, RngSeed seed) {
  std::mt19937_64 gen(seed.value);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(ce.steps()));
  for (int j = 0; j < ce.steps(); ++j) {
    // One draw per step: 53 uniform bits mapped to [0, 1).
    const double u =
        static_cast<double>(gen() >> 11) * 0x1.0p-53;
    times.push_back(
        u * ce.schedule().grid[static_cast<std::size_t>(j)].t_max);
  }
  return run_trajectory_with_times(ce, times, seed.value);
}

RunReport run_trajectory(const ProblemInstance& inst, const Schedule& sched,
                         RngSeed seed) {
  return run_trajectory(CompiledEvolution(inst, sched), seed);
}

RunReport run_trajectory_with_times(const CompiledEvolution& ce,
                                    std::span<const double> times,
                                    std::optional<std::uint64_t> seed) {
  const int q = ce.steps();
  if (static_cast<int>(times.size()) != q) {
    throw DimensionError("expected " + std::to_string(q) + " step times, got " +
                         std::to_string(times.size()));
  }
  RunReport report;
  report.kind = RunKind::kTrajectory;
  report.seed = seed;
  report.x_oracle = ce.x_oracle_;
  report.steps.reserve(static_cast<std::size_t>(q));

  ComplexVector psi = ce.initial_;
  for (int j = 0; j < q; ++j) {
    const ScheduleStep& grid = ce.schedule().grid[static_cast<std::size_t>(j)];
    const double t = times[static_cast<std::size_t>(j)];
    if (t < 0.0 || t > grid.t_max * (1.0 + 1e-12)) {
      throw Error("step time " + std::to_string(t) + " outside [0, t_max]");
    }
    const EigenSystem& sys = ce.eigs_[static_cast<std::size_t>(j)];
    ComplexVector coeff = sys.eigenvectors.adjoint() * psi;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
      coeff(k) *= std::exp(Complex(0.0, -sys.eigenvalues(k) * t));
    }
    psi = sys.eigenvectors * coeff;

    StepRecord rec;
    rec.j = j + 1;
    rec.v = grid.v;
    rec.s = grid.s;
    rec.t = t;
    rec.t_max = grid.t_max;
    rec.e1 = ce.e1_[static_cast<std::size_t>(j)];
    fill_observables(ce, j, coeff.cwiseAbs2(), &rec);
    report.steps.push_back(rec);
  }

  report.final_state = psi;
  const Extraction e = extract_raw(psi, ce.instance());
  report.success_probability = e.p;
  if (e.ok) {
    report.solution = e.x;
    report.solution_fidelity =
        std::norm(report.solution.dot(ce.x_oracle_));
  } else {
    report.status = RunStatus::kFailedPostselection;
  }
  report.traced_fidelity = traced_fidelity_of(
      ComplexMatrix(psi * psi.adjoint()), ce.instance(), ce.x_oracle_);
  return report;
}

RunReport run_channel(const CompiledEvolution& ce) {
  RunReport report;
  report.kind = RunKind::kChannel;
  report.x_oracle = ce.x_oracle_;
  const int q = ce.steps();
  report.steps.reserve(static_cast<std::size_t>(q));

  ComplexMatrix rho = ce.initial_ * ce.initial_.adjoint();
  for (int j = 0; j < q; ++j) {
    const ScheduleStep& grid = ce.schedule().grid[static_cast<std::size_t>(j)];
    const EigenSystem& sys = ce.eigs_[static_cast<std::size_t>(j)];
    ComplexMatrix c = sys.eigenvectors.adjoint() * rho * sys.eigenvectors;
    for (Eigen::Index a = 0; a < c.rows(); ++a) {
      for (Eigen::Index b = 0; b < c.cols(); ++b) {
        c(a, b) *= channel_damping(
            (sys.eigenvalues(a) - sys.eigenvalues(b)) * grid.t_max);
      }
    }

    StepRecord rec;
    rec.j = j + 1;
    rec.v = grid.v;
    rec.s = grid.s;
    rec.t_max = grid.t_max;
    rec.e1 = ce.e1_[static_cast<std::size_t>(j)];
    RealVector weights(c.rows());
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
      weights(k) = c(k, k).real();
    }
    fill_observables(ce, j, weights, &rec);
    report.steps.push_back(rec);

    rho = sys.eigenvectors * c * sys.eigenvectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }

  report.final_density = rho;
  const Extraction e = extract_raw(rho, ce.instance());
  report.success_probability = e.p;
  if (e.ok) {
    report.solution = e.x;
    report.solution_fidelity =
        std::norm(report.solution.dot(ce.x_oracle_));
  } else {
    report.status = RunStatus::kFailedPostselection;
  }
  report.traced_fidelity =
      traced_fidelity_of(rho, ce.instance(), ce.x_oracle_);
  return report;
}

RunReport run_channel(const ProblemInstance& inst, const Schedule& sched) {
  return run_channel(CompiledEvolution(inst, sched));
}

Complex channel_damping(double x) {
  // phi(x) = (1 - exp(-ix)) / (ix); the series around 0 is
  // sum_k (-ix)^k / (k+1)!.
  if (std::abs(x) < 1e-4) {
    const Complex z(0.0, -x);
    Complex sum(1.0, 0.0);
    Complex term(1.0, 0.0);
    for (int k = 1; k <= 5; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  const Complex num = Complex(1.0, 0.0) - std::exp(Complex(0.0, -x));
  return num / Complex(0.0, x);
}

std::pair<ComplexVector, double> extract_solution(const ComplexVector& final,
                                                  const ProblemInstance& inst) {
  const Extraction e = extract_raw(final, inst);
  if (!e.ok) {
    throw PostselectError("post-selection probability " +
                          std::to_string(e.p) + " is below the floor");
  }
  return {e.x, e.p};
}

std::pair<ComplexVector, double> extract_solution(const ComplexMatrix& final,
                                                  const ProblemInstance& inst) {
  const Extraction e = extract_raw(final, inst);
  if (!e.ok) {
    throw PostselectError("post-selection probability " +
                          std::to_string(e.p) + " is below the floor");
  }
  return {e.x, e.p};
}

ComplexVector oracle_solve(const ProblemInstance& inst) {
  const EigenSystem sys = eigh(inst.A);
  const ComplexVector coeff =
      sys.eigenvectors.adjoint() * inst.b.amplitudes();
  ComplexVector y(coeff.size());
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    y(k) = coeff(k) / sys.eigenvalues(k);
  }
  const ComplexVector x = sys.eigenvectors * y;
  return phase_fix(x / x.norm());
}

double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("fidelity between states of dimension " +
                         std::to_string(rho.dim()) + " and " +
                         std::to_string(sigma.dim()));
  }
  const double cross = (rho.mat() * sigma.mat()).trace().real();
  const double pr = (rho.mat() * rho.mat()).trace().real();
  const double ps = (sigma.mat() * sigma.mat()).trace().real();
  return cross / std::sqrt(pr * ps);
}

double energy(const QuantumState& psi, const HermitianOperator& h) {
  if (psi.dim() != h.dim()) {
    throw DimensionError("energy of a state of dimension " +
                         std::to_string(psi.dim()) +
                         " under an operator of dimension " +
                         std::to_string(h.dim()));
  }
  return (psi.amplitudes().adjoint() * h.mat() * psi.amplitudes())(0).real();
}

double energy(const DensityMatrix& rho, const HermitianOperator& h) {
  if (rho.dim() != h.dim()) {
    throw DimensionError("energy of a state of dimension " +
                         std::to_string(rho.dim()) +
                         " under an operator of dimension " +
                         std::to_string(h.dim()));
  }
  return (rho.mat() * h.mat()).trace().real();
}

ComplexVector phase_fix(const ComplexVector& v) {
  Eigen::Index best = -1;
  double best_mag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best < 0) return v;
  return v * (std::conj(v(best)) / best_mag);
}

}  // namespace aqls
