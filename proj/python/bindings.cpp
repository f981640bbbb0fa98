// Copyright 2026 The hfreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hfreadout/atlas.hpp"
#include "hfreadout/dispersive.hpp"
#include "hfreadout/errors.hpp"
#include "hfreadout/floquet.hpp"
#include "hfreadout/purcell.hpp"
#include "hfreadout/qnd.hpp"
#include "hfreadout/transmon.hpp"

namespace py = pybind11;
using namespace hfro;

namespace {

ConditionalTable table_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 3 || a.shape(0) != kStateCount || a.shape(1) != kStateCount || a.shape(2) != 2) {
        throw InvalidParameter("table must have shape (5, 5, 2) indexed [prepared, post, outcome]");
    }
    auto r = a.unchecked<3>();
    ConditionalTable t;
    for (int k = 0; k < kStateCount; ++k)
        for (int i = 0; i < kStateCount; ++i)
            for (int j = 0; j < 2; ++j) t.at(i, j, k) = r(k, i, j);
    return t;
}

py::dict tally_dict(const ErrorTally &t) {
    py::dict d;
    d["sequence_length"] = t.sequence_length;
    d["records"] = t.records;
    d["discarded"] = t.discarded;
    d["leaked_sequences"] = t.leaked_sequences;
    d["clean_sequences"] = t.clean_sequences;
    d["assignment_events"] = t.assignment_events;
    d["transition_events"] = t.transition_events;
    d["eps_assign"] = t.eps_assign;
    d["eps_trans_bitflip"] = t.eps_trans_bitflip;
    d["eps_trans_leakage"] = t.eps_trans_leakage;
    d["sigma_assign"] = t.sigma_assign;
    d["sigma_trans_bitflip"] = t.sigma_trans_bitflip;
    d["sigma_trans_leakage"] = t.sigma_trans_leakage;
    d["q"] = t.q();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transmon readout modelling core";

    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<TransmonParams>(m, "TransmonParams")
        .def(py::init<double, double, double, int>(), py::arg("e_c"), py::arg("e_j"), py::arg("n_g"),
             py::arg("n_cut") = kDefaultChargeCutoff)
        .def_property_readonly("e_c", &TransmonParams::e_c)
        .def_property_readonly("e_j", &TransmonParams::e_j)
        .def_property_readonly("n_g", &TransmonParams::n_g)
        .def_property_readonly("n_cut", &TransmonParams::n_cut)
        .def("__repr__", [](const TransmonParams &p) {
            return "TransmonParams(e_c=" + std::to_string(p.e_c()) + ", e_j=" + std::to_string(p.e_j()) +
                   ", n_g=" + std::to_string(p.n_g()) + ", n_cut=" + std::to_string(p.n_cut()) + ")";
        });

    py::class_<Spectrum>(m, "Spectrum")
        .def_property_readonly("levels", &Spectrum::levels)
        .def_property_readonly("energies", &Spectrum::energies)
        .def_property_readonly("params", &Spectrum::params)
        .def("energy", &Spectrum::energy)
        .def("transition", &Spectrum::transition)
        .def("qubit_frequency", &Spectrum::qubit_frequency)
        .def("charge_element", &Spectrum::charge_element)
        .def("charge_matrix", &Spectrum::charge_matrix);

    m.def("diagonalize", py::overload_cast<const TransmonParams &, int>(&diagonalize), py::arg("params"),
          py::arg("levels"));
    m.def("diagonalize", py::overload_cast<const TransmonParams &>(&diagonalize), py::arg("params"));
    m.def("charge_matrix_element", &charge_matrix_element);
    m.def("reduce_offset_charge", &reduce_offset_charge);

    py::class_<ReadoutCoupling>(m, "ReadoutCoupling")
        .def(py::init<double, double>(), py::arg("g"), py::arg("omega_r_bare"))
        .def_property_readonly("g", &ReadoutCoupling::g)
        .def_property_readonly("omega_r_bare", &ReadoutCoupling::omega_r_bare)
        .def("perturbative", &ReadoutCoupling::perturbative);
    m.def("chi_n_full", &chi_n_full, py::arg("spectrum"), py::arg("coupling"), py::arg("n"), py::arg("m_max"));
    m.def("default_sum_cutoff", &default_sum_cutoff);
    m.def(
        "chi_full",
        [](const Spectrum &s, const ReadoutCoupling &c, int m_max) {
            return shift_full(s, c, 2, m_max > 0 ? m_max : default_sum_cutoff(s)).chi;
        },
        py::arg("spectrum"), py::arg("coupling"), py::arg("m_max") = 0);
    m.def("chi_high_freq", &chi_high_freq);
    m.def("chi_rwa", &chi_rwa);
    m.def("chi0_high_freq", &chi0_high_freq);
    m.def("coupling_from_eta", &coupling_from_eta, py::arg("eta"), py::arg("omega_q"), py::arg("omega_r_bare"));
    m.def("linear_circuit_frequency", &linear_circuit_frequency);
    m.def(
        "resonance_ratio_scan",
        [](const TransmonParams &p, double eta, const std::vector<double> &omegas, const std::vector<double> &n_g_list,
           int workers) {
            RatioScanOptions opt;
            opt.n_g_list = n_g_list;
            opt.workers = workers;
            const auto rows = resonance_ratio_scan(p, eta, omegas, opt);
            py::list out;
            for (const RatioPoint &r : rows) {
                py::dict d;
                d["omega_r_bare"] = r.omega_r_bare;
                d["n_g"] = r.n_g;
                d["chi_full"] = r.chi_full;
                d["chi_rwa"] = r.chi_rwa;
                d["ratio"] = r.ratio;
                d["flags"] = r.flags;
                d["resonant_level"] = r.resonant_level;
                out.append(d);
            }
            return out;
        },
        py::arg("params"), py::arg("eta"), py::arg("omegas"), py::arg("n_g_list") = std::vector<double>{0.25, 0.0},
        py::arg("workers") = 1);

    py::enum_<LineCoupling>(m, "LineCoupling")
        .value("inductive", LineCoupling::inductive)
        .value("capacitive", LineCoupling::capacitive);
    py::class_<CircuitParams>(m, "CircuitParams")
        .def(py::init<>())
        .def_readwrite("l_q", &CircuitParams::l_q)
        .def_readwrite("c_q", &CircuitParams::c_q)
        .def_readwrite("c_c", &CircuitParams::c_c)
        .def_readwrite("l_res", &CircuitParams::l_res)
        .def_readwrite("c_res", &CircuitParams::c_res)
        .def_readwrite("topology", &CircuitParams::topology)
        .def_readwrite("l_tr", &CircuitParams::l_tr)
        .def_readwrite("c_tr", &CircuitParams::c_tr)
        .def_readwrite("z0", &CircuitParams::z0);
    py::class_<PurcellReport>(m, "PurcellReport")
        .def_readonly("eta", &PurcellReport::eta)
        .def_readonly("omega_r", &PurcellReport::omega_r)
        .def_readonly("omega_q", &PurcellReport::omega_q)
        .def_readonly("kappa", &PurcellReport::kappa)
        .def_readonly("kappa_q", &PurcellReport::kappa_q)
        .def_readonly("kappa_q_rwa", &PurcellReport::kappa_q_rwa)
        .def("t1_purcell", &PurcellReport::t1_purcell)
        .def("t1_purcell_rwa", &PurcellReport::t1_purcell_rwa);
    m.def("purcell_rate", &purcell_rate);
    m.def(
        "synthesize_circuit",
        [](double omega_q, double omega_r, double eta, double kappa, LineCoupling topology, double z0) {
            CircuitTargets t;
            t.omega_q = omega_q;
            t.omega_r = omega_r;
            t.eta = eta;
            t.kappa = kappa;
            t.topology = topology;
            t.z0 = z0;
            return synthesize_circuit(t);
        },
        py::arg("omega_q"), py::arg("omega_r"), py::arg("eta"), py::arg("kappa"),
        py::arg("topology") = LineCoupling::inductive, py::arg("z0") = 50.0);

    m.def(
        "floquet_quasienergies",
        [](const Spectrum &s, double omega, double zeta, int levels, double tol) {
            PropagatorOptions opt;
            opt.tol = tol;
            const FloquetSet f =
                floquet_set(PeriodicHamiltonian::driven_transmon(s, DriveParams{omega, zeta}, levels), opt);
            return py::make_tuple(f.quasienergies, f.modes, f.unitarity_defect);
        },
        py::arg("spectrum"), py::arg("omega"), py::arg("zeta"), py::arg("levels") = kDefaultFloquetLevels,
        py::arg("tol") = 1e-9);
    m.def(
        "two_level_oracle",
        [](double a, double delta) {
            const TwoLevelResult r = two_level_oracle(a, delta);
            return py::make_tuple(r.quasienergy_gap, r.theta);
        },
        py::arg("a"), py::arg("delta"));
    m.def("zeta_from_stark", &zeta_from_stark, py::arg("delta_omega"), py::arg("omega"), py::arg("omega_q"));
    m.def("stark_from_zeta", &stark_from_zeta, py::arg("zeta"), py::arg("omega"), py::arg("omega_q"));

    m.def(
        "hybridization_atlas",
        [](const Spectrum &s, double omega_min, double omega_max, int n_omega, double power_max, int n_power,
           std::vector<int> track_levels, int levels, double tol, int workers) {
            GridSpec spec;
            spec.omega_min = omega_min;
            spec.omega_max = omega_max;
            spec.n_omega = n_omega;
            spec.power_max = power_max;
            spec.n_power = n_power;
            GridOptions gopt;
            gopt.propagator.tol = tol;
            gopt.workers = workers;
            DriveGrid grid;
            {
                py::gil_scoped_release release;
                grid = compute_transmon_grid(s, spec, levels, gopt);
            }
            TrackOptions topt;
            topt.levels = track_levels;
            const TrackResult tracked = track_states(grid, topt);
            py::dict out;
            for (const StarkTrackedState &st : tracked.states) {
                const HybridizationMap map = hybridization_map(grid, st);
                py::array_t<double> theta({map.n_power, map.n_omega});
                std::copy(map.theta.begin(), map.theta.end(), theta.mutable_data());
                out[py::int_(st.level)] = theta;
            }
            return py::make_tuple(grid.omegas, grid.powers, out);
        },
        py::arg("spectrum"), py::arg("omega_min"), py::arg("omega_max"), py::arg("n_omega"), py::arg("power_max"),
        py::arg("n_power"), py::arg("track_levels") = std::vector<int>{0, 1},
        py::arg("levels") = kDefaultFloquetLevels, py::arg("tol") = 1e-7, py::arg("workers") = 1);
    m.def(
        "transition_amplitude",
        [](const Spectrum &s, int i, int j, double zeta, double omega_lo, double omega_hi) {
            const TransitionAmplitude a = extract_transition_amplitude(s, i, j, zeta, omega_lo, omega_hi);
            py::dict d;
            d["omega_star"] = a.omega_star;
            d["omega_gap"] = a.omega_gap;
            d["omega_fit"] = a.omega_fit;
            d["low_power"] = a.low_power;
            d["ill_defined"] = a.ill_defined;
            d["reason"] = a.reason;
            return d;
        },
        py::arg("spectrum"), py::arg("initial"), py::arg("final"), py::arg("zeta"), py::arg("omega_lo"),
        py::arg("omega_hi"));

    m.def(
        "qnd_fidelity",
        [](py::array_t<double> table) {
            const QndDecomposition d = qnd_fidelity(table_from_array(table));
            py::dict out;
            out["q"] = d.q;
            out["eps_assign"] = d.eps_assign;
            out["eps_trans"] = d.eps_trans;
            out["eps_trans_bitflip"] = d.eps_trans_bitflip;
            out["eps_trans_leakage"] = d.eps_trans_leakage;
            return out;
        },
        py::arg("table"));
    m.def("readout_fidelity", [](py::array_t<double> table) { return readout_fidelity(table_from_array(table)); });
    m.def("repeatability",
          [](py::array_t<double> table) { return repeatability(compose_repeat(table_from_array(table))); });
    m.def(
        "synthesize_and_classify",
        [](double assign, double bitflip, double leakage, std::uint64_t shots, std::uint64_t seed, int workers) {
            SynthRates r;
            r.assign = assign;
            r.bitflip = bitflip;
            r.leakage = leakage;
            ErrorTally t;
            {
                py::gil_scoped_release release;
                t = classify_records(synthesize_records(r, shots, seed, workers), workers);
            }
            return tally_dict(t);
        },
        py::arg("assign"), py::arg("bitflip"), py::arg("leakage"), py::arg("shots"), py::arg("seed"),
        py::arg("workers") = 1);
    m.def(
        "classify_outcomes",
        [](int prepared, const std::vector<std::uint8_t> &outcomes) {
            const SequenceEvents ev = classify_sequence(prepared, outcomes);
            return py::make_tuple(ev.assignment, ev.transition);
        },
        py::arg("prepared"), py::arg("outcomes"));
}
