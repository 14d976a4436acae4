#include "twowell/analysis.hpp"
#include "twowell/errors.hpp"
#include "twowell/fixtures.hpp"
#include "twowell/gridperturb.hpp"
#include "twowell/io.hpp"
#include "twowell/layers.hpp"
#include "twowell/spin.hpp"
#include "twowell/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace twowell;

namespace {

using DomainPtr = std::shared_ptr<LatticeDomain>;

DomainPtr py_build_domain(double d, double l, int sign, int n, Eigen::Vector2d center) {
    return std::make_shared<LatticeDomain>(build_domain(d, l, sign, n, center));
}

py::array_t<double> positions_array(const Deformation& def) {
    py::array_t<double> out({ssize_t(def.x.size()), ssize_t(2)});
    auto buf = out.mutable_unchecked<2>();
    for (ssize_t k = 0; k < ssize_t(def.x.size()); ++k) {
        buf(k, 0) = def.x[size_t(k)].x();
        buf(k, 1) = def.x[size_t(k)].y();
    }
    return out;
}

void set_positions_array(Deformation& def, py::array_t<double> arr) {
    auto buf = arr.unchecked<2>();
    if (size_t(buf.shape(0)) != def.x.size() || buf.shape(1) != 2)
        throw ConfigError("positions array must have shape (num_with_ghosts, 2)");
    for (ssize_t k = 0; k < buf.shape(0); ++k) def.x[size_t(k)] = {buf(k, 0), buf(k, 1)};
}

py::array_t<int32_t> coords_array(const LatticeDomain& dom) {
    py::array_t<int32_t> out({ssize_t(dom.num_with_ghosts()), ssize_t(2)});
    auto buf = out.mutable_unchecked<2>();
    for (ssize_t k = 0; k < ssize_t(dom.num_with_ghosts()); ++k) {
        buf(k, 0) = dom.coord(int32_t(k)).x();
        buf(k, 1) = dom.coord(int32_t(k)).y();
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete two-well lattice energies for the square-to-rectangular transition";

    py::register_exception<ConfigError>(m, "TwowellConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "TwowellDomainError", PyExc_RuntimeError);

    py::class_<WellSystem>(m, "WellSystem")
        .def_readonly("a", &WellSystem::a)
        .def_readonly("b", &WellSystem::b)
        .def_readonly("cbar", &WellSystem::cbar)
        .def_readonly("U0", &WellSystem::U0)
        .def_readonly("U1", &WellSystem::U1)
        .def_readonly("Q", &WellSystem::Q)
        .def_readonly("Qtilde", &WellSystem::Qtilde)
        .def("f_lambda", &WellSystem::f_lambda)
        .def("f_lambda_minus", &WellSystem::f_lambda_minus);
    m.def("make_wells", &make_wells, py::arg("a"));
    m.def("dist_to_well", &dist_to_well);
    m.def("dist_to_wells", &dist_to_wells);
    m.def("rotation", &rotation);

    py::enum_<NodeRole>(m, "NodeRole")
        .value("interior", NodeRole::Interior)
        .value("left_boundary", NodeRole::LeftBoundary)
        .value("right_boundary", NodeRole::RightBoundary)
        .value("lateral_free", NodeRole::LateralFree)
        .value("ghost_left", NodeRole::GhostLeft)
        .value("ghost_right", NodeRole::GhostRight);

    py::class_<LatticeDomain, DomainPtr>(m, "LatticeDomain")
        .def_property_readonly("n", &LatticeDomain::n)
        .def_property_readonly("num_nodes", &LatticeDomain::num_nodes)
        .def_property_readonly("num_with_ghosts", &LatticeDomain::num_with_ghosts)
        .def_property_readonly("num_triangles", &LatticeDomain::num_triangles)
        .def("node_id", &LatticeDomain::node_id)
        .def("role", &LatticeDomain::role)
        .def("point", &LatticeDomain::point)
        .def("coords", &coords_array)
        .def("contains_point", &LatticeDomain::contains_point, py::arg("x"),
             py::arg("tol") = 1e-12);
    m.def("build_domain", &py_build_domain, py::arg("d"), py::arg("l"), py::arg("sign"),
          py::arg("n"), py::arg("center") = Eigen::Vector2d(0.0, 0.0));

    py::class_<Deformation>(m, "Deformation")
        .def_readonly("domain", &Deformation::domain)
        .def_readwrite("c", &Deformation::c)
        .def_readwrite("lam", &Deformation::lambda)
        .def_property("positions", &positions_array, &set_positions_array)
        .def("save",
             [](const Deformation& d, const std::string& path) { save_deformation(d, path); });
    m.def("load_deformation", [](const std::string& path) { return load_deformation(path); });
    m.def("make_affine", &make_affine, py::arg("domain"), py::arg("F"),
          py::arg("b") = Eigen::Vector2d(0.0, 0.0));
    m.def("apply_boundary", &apply_boundary);
    m.def("is_admissible", &is_admissible);
    m.def("check_admissible", [](const Deformation& d) {
        AdmissibilityReport rep = check_admissible(d);
        return py::make_tuple(rep.admissible, rep.violations.size());
    });
    m.def("interpolate", &interpolate);
    m.def("node_gradient", &node_gradient);

    py::enum_<Density>(m, "Density")
        .value("tilde", Density::Tilde)
        .value("truncated", Density::Truncated)
        .value("one_well", Density::OneWell);

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("total", &EnergyReport::total)
        .def_readonly("rescaled", &EnergyReport::rescaled)
        .def_readonly("n", &EnergyReport::n)
        .def_readonly("site_density", &EnergyReport::site_density)
        .def_readonly("dist_wells", &EnergyReport::dist_wells)
        .def_readonly("bracket_u0", &EnergyReport::bracket0)
        .def_readonly("bracket_u1", &EnergyReport::bracket1);
    m.def(
        "hamiltonian",
        [](const Deformation& d, const WellSystem& w, Density k) { return hamiltonian(d, w, k); },
        py::arg("deformation"), py::arg("wells"), py::arg("density") = Density::Truncated);
    m.def(
        "hamiltonian_total",
        [](const Deformation& d, const WellSystem& w, Density k) {
            return hamiltonian_total(d, w, k);
        },
        py::arg("deformation"), py::arg("wells"), py::arg("density") = Density::Truncated);
    m.def("energy_gradient", [](const Deformation& d, const WellSystem& w, Density k) {
        EnergyGradient g = energy_gradient(d, w, k);
        py::array_t<double> arr({ssize_t(g.d_node.size()), ssize_t(2)});
        auto buf = arr.mutable_unchecked<2>();
        for (ssize_t q = 0; q < ssize_t(g.d_node.size()); ++q) {
            buf(q, 0) = g.d_node[size_t(q)].x();
            buf(q, 1) = g.d_node[size_t(q)].y();
        }
        return py::make_tuple(g.value, arr, g.d_c);
    });

    py::class_<SpinField>(m, "SpinField")
        .def_readonly("sigma", &SpinField::sigma)
        .def_readonly("mismatch_edges", &SpinField::mismatch_edges)
        .def_readonly("h_spin", &SpinField::h_spin);
    m.def("spin_field", &spin_field);
    m.def("spin_hamiltonian", &spin_hamiltonian);
    py::class_<ComparisonRecord>(m, "ComparisonRecord")
        .def_readonly("edge_mechanism_ok", &ComparisonRecord::edge_mechanism_ok)
        .def_readonly("h_total", &ComparisonRecord::h_total)
        .def_readonly("h_spin", &ComparisonRecord::h_spin)
        .def_readonly("mismatch_count", &ComparisonRecord::mismatch_count)
        .def_readonly("ratio", &ComparisonRecord::ratio);
    m.def("comparison_check", &comparison_check, py::arg("deformation"), py::arg("wells"),
          py::arg("ratio_floor") = 0.0);

    py::class_<SecondDiffRecord>(m, "SecondDiffRecord")
        .def_readonly("max_ratio", &SecondDiffRecord::max_ratio)
        .def_readonly("max_ratio_h", &SecondDiffRecord::max_ratio_h)
        .def_readonly("max_ratio_v", &SecondDiffRecord::max_ratio_v)
        .def_readonly("max_ratio_mixed", &SecondDiffRecord::max_ratio_mixed);
    m.def("second_diff_check", &second_diff_check);
    py::class_<CoareaRecord>(m, "CoareaRecord")
        .def_readonly("lhs", &CoareaRecord::lhs)
        .def_readonly("rhs", &CoareaRecord::rhs)
        .def_readonly("ratio", &CoareaRecord::ratio);
    m.def("coarea_check",
          [](const Deformation& d, const std::vector<double>& values) {
              ScalarLatticeField f{d.domain, values};
              return coarea_check(f);
          },
          py::arg("deformation"), py::arg("values"));
    py::class_<RigiditySample>(m, "RigiditySample")
        .def_readonly("ratios", &RigiditySample::ratios)
        .def_readonly("eta", &RigiditySample::eta)
        .def_readonly("mu", &RigiditySample::mu)
        .def("fraction_within", &RigiditySample::fraction_within);
    m.def("rigidity_sample", &rigidity_sample);
    py::class_<InterfaceSegment>(m, "InterfaceSegment")
        .def_readonly("edge_count", &InterfaceSegment::edge_count)
        .def_readonly("normal", &InterfaceSegment::normal)
        .def_readonly("angle_to_plus", &InterfaceSegment::angle_to_plus)
        .def_readonly("angle_to_minus", &InterfaceSegment::angle_to_minus);
    py::class_<InterfaceSummary>(m, "InterfaceSummary")
        .def_readonly("classifiable", &InterfaceSummary::classifiable)
        .def_readonly("classified_fraction", &InterfaceSummary::classified_fraction)
        .def_readonly("segments", &InterfaceSummary::segments);
    m.def("interface_extract", &interface_extract);
    m.def("second_gradient_budget", &second_gradient_budget);
    m.def("bulk_mean_distance", &bulk_mean_distance);

    py::enum_<Method>(m, "Method")
        .value("gradient_descent", Method::GradientDescent)
        .value("quasi_newton", Method::QuasiNewton);
    py::enum_<Termination>(m, "Termination")
        .value("converged", Termination::Converged)
        .value("max_iters", Termination::MaxIters)
        .value("stalled_by_admissibility", Termination::StalledByAdmissibility)
        .value("stalled", Termination::Stalled);
    py::class_<MinimizeOptions>(m, "MinimizeOptions")
        .def(py::init<>())
        .def_readwrite("max_iters", &MinimizeOptions::max_iters)
        .def_readwrite("grad_tol", &MinimizeOptions::grad_tol)
        .def_readwrite("step0", &MinimizeOptions::step0)
        .def_readwrite("backtrack_factor", &MinimizeOptions::backtrack_factor)
        .def_readwrite("armijo_c", &MinimizeOptions::armijo_c)
        .def_readwrite("seed", &MinimizeOptions::seed)
        .def_readwrite("method", &MinimizeOptions::method)
        .def_readwrite("memory", &MinimizeOptions::memory)
        .def_readwrite("smoothing_stages", &MinimizeOptions::smoothing_stages)
        .def_readwrite("stage_max_iters", &MinimizeOptions::stage_max_iters);
    m.def("relaxation_options", &relaxation_options);
    py::class_<MinimizeResult>(m, "MinimizeResult")
        .def_readonly("final", &MinimizeResult::final)
        .def_readonly("energy_trace", &MinimizeResult::energy_trace)
        .def_readonly("iterations", &MinimizeResult::iterations)
        .def_readonly("termination", &MinimizeResult::termination)
        .def_readonly("admissible", &MinimizeResult::admissible);

    m.def("init_affine", &init_affine);
    py::class_<LaminateSpec>(m, "LaminateSpec")
        .def(py::init([](int sign, std::vector<double> offsets,
                         std::vector<Eigen::Matrix2d> gradients) {
                 return LaminateSpec{sign, std::move(offsets), std::move(gradients)};
             }),
             py::arg("sign"), py::arg("offsets"), py::arg("gradients"));
    m.def("init_laminate", &init_laminate, py::arg("domain"), py::arg("wells"), py::arg("spec"),
          py::arg("lam"), py::arg("apply_bc") = true);
    m.def("init_profile", &init_profile, py::arg("domain"), py::arg("wells"), py::arg("V1"),
          py::arg("V2"), py::arg("sign"), py::arg("lam"), py::arg("apply_bc") = true);
    m.def("init_perturbed", &init_perturbed);
    m.def("prolong", &prolong);
    m.def(
        "minimize",
        [](const Deformation& d, const WellSystem& w, Density k, const MinimizeOptions& o) {
            return minimize(d, w, k, o);
        },
        py::arg("deformation"), py::arg("wells"), py::arg("density"), py::arg("options"));

    py::enum_<LayerKind>(m, "LayerKind")
        .value("b_plus", LayerKind::BPlus)
        .value("b_minus", LayerKind::BMinus)
        .value("c_plus", LayerKind::CPlus)
        .value("c_minus", LayerKind::CMinus);
    m.def("rank_one_pair", &rank_one_pair);
    py::class_<LayerEnergyEstimate>(m, "LayerEnergyEstimate")
        .def_readonly("per_n", &LayerEnergyEstimate::per_n)
        .def_readonly("extrapolated", &LayerEnergyEstimate::extrapolated)
        .def_readonly("fit_residual", &LayerEnergyEstimate::fit_residual)
        .def_readonly("all_converged", &LayerEnergyEstimate::all_converged);
    m.def("estimate_layer_energy", &estimate_layer_energy, py::arg("wells"), py::arg("kind"),
          py::arg("V1"), py::arg("V2"), py::arg("sign"), py::arg("m1"), py::arg("m2"),
          py::arg("n_list"), py::arg("options"), py::arg("lam") = 0.5);
    py::class_<SurfaceScalingRow>(m, "SurfaceScalingRow")
        .def_readonly("n", &SurfaceScalingRow::n)
        .def_readonly("best", &SurfaceScalingRow::best)
        .def_readonly("all", &SurfaceScalingRow::all)
        .def_readonly("failed", &SurfaceScalingRow::failed);
    py::class_<SurfaceScalingReport>(m, "SurfaceScalingReport")
        .def_readonly("rows", &SurfaceScalingReport::rows)
        .def_readonly("max_over_min", &SurfaceScalingReport::max_over_min)
        .def_readonly("bounded", &SurfaceScalingReport::bounded);
    m.def("surface_scaling_study", &surface_scaling_study);

    py::class_<RecursionTrace>(m, "RecursionTrace")
        .def_readonly("theta", &RecursionTrace::theta)
        .def_readonly("xs", &RecursionTrace::xs)
        .def_property_readonly(
            "converged",
            [](const RecursionTrace& t) { return t.status == RecursionTrace::Status::Converged; })
        .def_property_readonly(
            "diverged",
            [](const RecursionTrace& t) { return t.status == RecursionTrace::Status::Diverged; })
        .def_readonly("limit", &RecursionTrace::limit);
    m.def("recursion_sequence", &recursion_sequence, py::arg("theta"),
          py::arg("m_max") = 2000000L);
    m.def("recursion_limit", [](double theta) -> py::object {
        auto v = recursion_limit(theta);
        return v ? py::cast(*v) : py::none();
    });
    py::enum_<PlacementMode>(m, "PlacementMode")
        .value("worst_case", PlacementMode::WorstCase)
        .value("uniform_random", PlacementMode::UniformRandom);
    py::class_<ChainTrace>(m, "ChainTrace")
        .def_readonly("feasible_fraction", &ChainTrace::feasible_fraction)
        .def_readonly("bound_ok", &ChainTrace::bound_ok)
        .def_readonly("falsified", &ChainTrace::falsified);
    m.def("simulate_chain_selection", &simulate_chain_selection, py::arg("theta"),
          py::arg("chain_length"), py::arg("seed"), py::arg("resolution"), py::arg("mode"),
          py::arg("neighbor_divisor") = 1);

    m.def("calibrate", [](const WellSystem& w, uint64_t seed) {
        return fixtures_to_json(calibrate(w, seed)).dump();
    });
}
