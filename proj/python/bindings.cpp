#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "aqls/evolve.hpp"
#include "aqls/experiment.hpp"
#include "aqls/hamiltonian.hpp"
#include "aqls/pauli.hpp"
#include "aqls/schedule.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;

namespace {

aqls::Algorithm algorithm_from_int(int a) {
  if (a == 1) return aqls::Algorithm::kAlg1;
  if (a == 2) return aqls::Algorithm::kAlg2;
  throw aqls::ConfigError("algorithm must be 1 or 2");
}

aqls::ScheduleVariant variant_from_string(const std::string& name) {
  if (name == "alg1") return aqls::ScheduleVariant::kAlg1;
  if (name == "alg2") return aqls::ScheduleVariant::kAlg2;
  if (name == "linear") return aqls::ScheduleVariant::kLinearBaseline;
  throw aqls::ConfigError("schedule variant must be alg1, alg2 or linear");
}

aqls::ProblemInstance instance_from_expression(
    const std::string& expression, std::optional<aqls::ComplexVector> b,
    int algorithm, std::optional<double> kappa) {
  const aqls::HermitianOperator a =
      aqls::PauliExpr::parse(expression).to_matrix();
  aqls::ComplexVector rhs =
      b ? *b
        : aqls::ComplexVector::Constant(
              a.dim(), aqls::Complex(1.0 / std::sqrt(double(a.dim())), 0.0));
  return aqls::normalize_instance(a, rhs, algorithm_from_int(algorithm),
                                  kappa, expression);
}

aqls::ProblemInstance instance_from_matrix(const aqls::ComplexMatrix& matrix,
                                           std::optional<aqls::ComplexVector> b,
                                           int algorithm,
                                           std::optional<double> kappa) {
  const aqls::HermitianOperator a{matrix};
  aqls::ComplexVector rhs =
      b ? *b
        : aqls::ComplexVector::Constant(
              a.dim(), aqls::Complex(1.0 / std::sqrt(double(a.dim())), 0.0));
  return aqls::normalize_instance(a, rhs, algorithm_from_int(algorithm),
                                  kappa, {});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Classical simulator for two adiabatic-inspired quantum linear-system "
      "algorithms";

  py::register_exception<aqls::Error>(m, "AqlsError");

  // ---- pauli ----
  py::class_<aqls::PauliTerm>(m, "PauliTerm")
      .def_readonly("coefficient", &aqls::PauliTerm::coefficient)
      .def_property_readonly(
          "word", [](const aqls::PauliTerm& t) { return t.word.letters; })
      .def("__repr__", [](const aqls::PauliTerm& t) {
        return "PauliTerm(" + std::to_string(t.coefficient) + ", '" +
               t.word.letters + "')";
      });

  py::class_<aqls::PauliExpr>(m, "PauliExpr")
      .def_static("parse", &aqls::PauliExpr::parse, py::arg("text"),
                  py::arg("max_qubits") = aqls::PauliExpr::kDefaultMaxQubits)
      .def("__str__", &aqls::PauliExpr::str)
      .def("__eq__", [](const aqls::PauliExpr& a,
                        const aqls::PauliExpr& b) { return a == b; })
      .def("to_matrix",
           [](const aqls::PauliExpr& e) { return e.to_matrix().mat(); })
      .def_property_readonly("terms", &aqls::PauliExpr::terms)
      .def_property_readonly("divisor", &aqls::PauliExpr::divisor)
      .def_property_readonly("n_qubits", &aqls::PauliExpr::n_qubits);

  // ---- schedule ----
  py::class_<aqls::ScheduleStep>(m, "ScheduleStep")
      .def_readonly("v", &aqls::ScheduleStep::v)
      .def_readonly("s", &aqls::ScheduleStep::s)
      .def_readonly("gap_bound", &aqls::ScheduleStep::gap_bound)
      .def_readonly("t_max", &aqls::ScheduleStep::t_max);

  py::class_<aqls::Schedule>(m, "Schedule")
      .def_readonly("kappa", &aqls::Schedule::kappa)
      .def_readonly("steps", &aqls::Schedule::steps)
      .def_readonly("v_a", &aqls::Schedule::v_a)
      .def_readonly("v_b", &aqls::Schedule::v_b)
      .def_property_readonly(
          "variant",
          [](const aqls::Schedule& s) {
            return std::string(aqls::to_string(s.variant));
          })
      .def_readonly("grid", &aqls::Schedule::grid);

  m.def("schedule_bounds", &aqls::schedule_bounds, py::arg("kappa"),
        "Domain [v_a, v_b] of the natural schedule parametrization");
  m.def("s_of_v", &aqls::s_of_v, py::arg("v"), py::arg("kappa"));
  m.def("gap_bound", &aqls::gap_bound, py::arg("s"), py::arg("kappa"),
        "Delta*(s) = (1-s)^2 + (s/kappa)^2");
  m.def(
      "build_grid",
      [](double kappa, int steps, const std::string& variant) {
        return aqls::build_grid(kappa, steps, variant_from_string(variant));
      },
      py::arg("kappa"), py::arg("steps"), py::arg("variant"));

  // ---- instances and Hamiltonians ----
  py::class_<aqls::ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly(
          "A", [](const aqls::ProblemInstance& p) { return p.A.mat(); })
      .def_property_readonly(
          "A_raw",
          [](const aqls::ProblemInstance& p) { return p.A_raw.mat(); })
      .def_property_readonly(
          "b", [](const aqls::ProblemInstance& p) { return p.b.amplitudes(); })
      .def_readonly("kappa", &aqls::ProblemInstance::kappa)
      .def_readonly("kappa_computed", &aqls::ProblemInstance::kappa_computed)
      .def_readonly("kappa_overridden",
                    &aqls::ProblemInstance::kappa_overridden)
      .def_readonly("scale", &aqls::ProblemInstance::scale)
      .def_readonly("expression", &aqls::ProblemInstance::expression)
      .def_property_readonly("dim", &aqls::ProblemInstance::dim)
      .def_property_readonly("algorithm", [](const aqls::ProblemInstance& p) {
        return p.algorithm == aqls::Algorithm::kAlg1 ? 1 : 2;
      });

  m.def("instance", &instance_from_expression, py::arg("expression"),
        py::arg("b") = std::nullopt, py::arg("algorithm") = 1,
        py::arg("kappa") = std::nullopt,
        "Build a normalized problem instance from a Pauli expression");
  m.def("instance_from_matrix", &instance_from_matrix, py::arg("matrix"),
        py::arg("b") = std::nullopt, py::arg("algorithm") = 1,
        py::arg("kappa") = std::nullopt);

  m.def(
      "A_of_s",
      [](double s, const aqls::ProblemInstance& inst) {
        return aqls::A_of_s(s, inst).mat();
      },
      py::arg("s"), py::arg("instance"));
  m.def(
      "H_of_s",
      [](double s, const aqls::ProblemInstance& inst) {
        return aqls::H_of_s(s, inst).mat();
      },
      py::arg("s"), py::arg("instance"));
  m.def(
      "Hprime_of_s",
      [](double s, const aqls::ProblemInstance& inst) {
        return aqls::Hprime_of_s(s, inst).mat();
      },
      py::arg("s"), py::arg("instance"));
  m.def(
      "initial_state",
      [](const aqls::ProblemInstance& inst) {
        return aqls::initial_state(inst).amplitudes();
      },
      py::arg("instance"));
  m.def("oracle_solve", &aqls::oracle_solve, py::arg("instance"),
        "x = A^-1 b, normalized and phase-fixed");

  // ---- evolution ----
  py::class_<aqls::StepRecord>(m, "StepRecord")
      .def_readonly("j", &aqls::StepRecord::j)
      .def_readonly("v", &aqls::StepRecord::v)
      .def_readonly("s", &aqls::StepRecord::s)
      .def_readonly("t", &aqls::StepRecord::t)
      .def_readonly("t_max", &aqls::StepRecord::t_max)
      .def_readonly("energy", &aqls::StepRecord::energy)
      .def_readonly("e0", &aqls::StepRecord::e0)
      .def_readonly("e1", &aqls::StepRecord::e1)
      .def_readonly("ground_fidelity", &aqls::StepRecord::ground_fidelity);

  py::class_<aqls::RunReport>(m, "RunReport")
      .def_property_readonly(
          "kind",
          [](const aqls::RunReport& r) {
            return r.kind == aqls::RunKind::kTrajectory
                       ? std::string("trajectory")
                       : std::string("channel");
          })
      .def_readonly("seed", &aqls::RunReport::seed)
      .def_property_readonly(
          "status",
          [](const aqls::RunReport& r) {
            return r.status == aqls::RunStatus::kOk
                       ? std::string("ok")
                       : std::string("failed_postselection");
          })
      .def_readonly("steps", &aqls::RunReport::steps)
      .def_readonly("final_state", &aqls::RunReport::final_state)
      .def_readonly("final_density", &aqls::RunReport::final_density)
      .def_readonly("solution", &aqls::RunReport::solution)
      .def_readonly("success_probability",
                    &aqls::RunReport::success_probability)
      .def_readonly("solution_fidelity", &aqls::RunReport::solution_fidelity)
      .def_readonly("traced_fidelity", &aqls::RunReport::traced_fidelity)
      .def_readonly("x_oracle", &aqls::RunReport::x_oracle);

  py::class_<aqls::CompiledEvolution>(m, "CompiledEvolution")
      .def(py::init<aqls::ProblemInstance, aqls::Schedule>(),
           py::arg("instance"), py::arg("schedule"))
      .def_property_readonly("steps", &aqls::CompiledEvolution::steps)
      .def_property_readonly("x_oracle", &aqls::CompiledEvolution::x_oracle);

  m.def(
      "run_trajectory",
      [](const aqls::ProblemInstance& inst, const aqls::Schedule& sched,
         std::uint64_t seed) {
        return aqls::run_trajectory(inst, sched, aqls::RngSeed{seed});
      },
      py::arg("instance"), py::arg("schedule"), py::arg("seed"));
  m.def(
      "run_trajectory",
      [](const aqls::CompiledEvolution& ce, std::uint64_t seed) {
        return aqls::run_trajectory(ce, aqls::RngSeed{seed});
      },
      py::arg("compiled"), py::arg("seed"));
  m.def(
      "run_channel",
      [](const aqls::ProblemInstance& inst, const aqls::Schedule& sched) {
        return aqls::run_channel(inst, sched);
      },
      py::arg("instance"), py::arg("schedule"));
  m.def(
      "run_channel",
      [](const aqls::CompiledEvolution& ce) { return aqls::run_channel(ce); },
      py::arg("compiled"));
  m.def("channel_damping", &aqls::channel_damping, py::arg("x"),
        "phi(x) = (1 - exp(-ix))/(ix), the random-time dephasing factor");

  m.def(
      "extract_solution",
      [](const aqls::ComplexVector& final, const aqls::ProblemInstance& inst) {
        return aqls::extract_solution(final, inst);
      },
      py::arg("final_state"), py::arg("instance"));
  m.def(
      "extract_solution_density",
      [](const aqls::ComplexMatrix& final, const aqls::ProblemInstance& inst) {
        return aqls::extract_solution(final, inst);
      },
      py::arg("final_density"), py::arg("instance"));

  // ---- dense linear algebra ----
  m.def(
      "eigh",
      [](const aqls::ComplexMatrix& mat) {
        const aqls::EigenSystem sys = aqls::eigh(aqls::HermitianOperator(mat));
        return py::make_tuple(sys.eigenvalues, sys.eigenvectors);
      },
      py::arg("matrix"),
      "Eigendecomposition of a Hermitian matrix with the library's "
      "deterministic phase convention");
  m.def(
      "expm_unitary",
      [](const aqls::ComplexMatrix& mat, double t) {
        return aqls::expm_unitary(aqls::HermitianOperator(mat), t);
      },
      py::arg("matrix"), py::arg("t"), "exp(-i H t)");
  m.def(
      "condition_number",
      [](const aqls::ComplexMatrix& mat) {
        return aqls::condition_number(aqls::HermitianOperator(mat));
      },
      py::arg("matrix"));
  m.def(
      "spectral_norm",
      [](const aqls::ComplexMatrix& mat) {
        return aqls::spectral_norm(aqls::HermitianOperator(mat));
      },
      py::arg("matrix"));
  m.def(
      "partial_trace",
      [](const aqls::ComplexMatrix& rho, const std::vector<Eigen::Index>& dims,
         const std::vector<std::size_t>& keep) {
        return aqls::partial_trace(
                   aqls::DensityMatrix(aqls::HermitianOperator(rho)), dims,
                   keep)
            .mat();
      },
      py::arg("rho"), py::arg("dims"), py::arg("keep"));
  m.def(
      "fidelity_mixed",
      [](const aqls::ComplexMatrix& rho, const aqls::ComplexMatrix& sigma) {
        return aqls::fidelity_mixed(
            aqls::DensityMatrix(aqls::HermitianOperator(rho)),
            aqls::DensityMatrix(aqls::HermitianOperator(sigma)));
      },
      py::arg("rho"), py::arg("sigma"),
      "tr(rho sigma) / sqrt(tr rho^2 tr sigma^2)");
  m.def("phase_fix", &aqls::phase_fix, py::arg("v"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
