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

#include "hfreadout/purcell.hpp"

#include <cmath>
#include <numbers>

#include "hfreadout/errors.hpp"

namespace hfro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be positive");
}

double angular(double f) { return kTwoPi * f; }

}  // namespace

std::string to_string(LineCoupling topology) {
    return topology == LineCoupling::inductive ? "inductive" : "capacitive";
}

LineCoupling parse_line_coupling(const std::string &name) {
    if (name == "inductive") return LineCoupling::inductive;
    if (name == "capacitive") return LineCoupling::capacitive;
    throw InvalidParameter("unknown line coupling '" + name + "'");
}

void CircuitParams::validate() const {
    require_positive(l_q, "l_q");
    require_positive(c_q, "c_q");
    if (!(c_c >= 0.0) || !std::isfinite(c_c)) throw InvalidParameter("c_c must be non-negative");
    require_positive(l_res, "l_res");
    require_positive(c_res, "c_res");
    require_positive(z0, "z0");
    if (topology == LineCoupling::inductive) {
        if (!(l_tr >= 0.0) || !std::isfinite(l_tr)) throw InvalidParameter("l_tr must be non-negative");
        if (c_tr != 0.0) throw InvalidParameter("inductive coupling takes l_tr, not c_tr");
    } else {
        if (!(c_tr >= 0.0) || !std::isfinite(c_tr)) throw InvalidParameter("c_tr must be non-negative");
        if (l_tr != 0.0) throw InvalidParameter("capacitive coupling takes c_tr, not l_tr");
    }
}

double c_sigma_squared(const CircuitParams &c) {
    return c.c_res * c.c_q + c.c_res * c.c_c + c.c_q * c.c_c;
}

double coupling_efficiency(const CircuitParams &c) {
    return c.c_c / std::sqrt((c.c_res + c.c_c) * (c.c_q + c.c_c));
}

DerivedFrequencies derived_frequencies(const CircuitParams &c) {
    c.validate();
    const double eta = coupling_efficiency(c);
    if (eta >= kMaxCouplingEfficiency) {
        throw InvalidParameter("near-unity coupling efficiency eta = " + std::to_string(eta));
    }
    const double cq = c.c_q + c.c_c;
    const double wr = std::sqrt(cq / (c.l_res * c_sigma_squared(c)));
    const double wq = 1.0 / std::sqrt(c.l_q * cq);
    return {wr / kTwoPi, wq / kTwoPi, eta};
}

double resonator_linewidth(const CircuitParams &c) {
    const double wr = angular(derived_frequencies(c).omega_r);
    double kappa = 0.0;
    if (c.topology == LineCoupling::inductive) {
        kappa = c.l_tr * c.l_tr * wr * wr / (c.z0 * c.l_res);
    } else {
        kappa = wr * wr * c.z0 * c.c_tr * c.c_tr * (c.c_q + c.c_c) / c_sigma_squared(c);
    }
    return kappa / kTwoPi;
}

std::complex<double> island_impedance(const CircuitParams &c, double f) {
    c.validate();
    require_positive(f, "frequency");
    const double w = angular(f);
    const std::complex<double> i(0.0, 1.0);
    double loss = 0.0;
    if (c.topology == LineCoupling::inductive) {
        loss = std::pow(w, 4) * c.c_c * c.c_c * c.l_tr * c.l_tr / c.z0;
    } else {
        loss = std::pow(w, 6) * c.c_c * c.c_c * c.c_tr * c.c_tr * c.l_res * c.l_res * c.z0;
    }
    return 1.0 / (1.0 / (i * w * c.l_q) + i * w * (c.c_q + c.c_c) + loss);
}

bool island_impedance_valid(const CircuitParams &c, double f) {
    const double fq = derived_frequencies(c).omega_q;
    return std::abs(f - fq) <= 0.1 * fq;
}

double island_admittance(const CircuitParams &c, double f) {
    return (1.0 / island_impedance(c, f)).real();
}

double rwa_admittance(const CircuitParams &c, double f) {
    require_positive(f, "frequency");
    const DerivedFrequencies d = derived_frequencies(c);
    const double kappa = angular(resonator_linewidth(c));
    const double g = 0.5 * d.eta * std::sqrt(angular(f) * angular(d.omega_r));
    const double delta = angular(f) - angular(d.omega_r);
    return (c.c_q + c.c_c) * kappa * g * g / (delta * delta);
}

std::vector<AdmittancePoint> admittance_spectrum(const CircuitParams &c, std::span<const double> grid) {
    std::vector<AdmittancePoint> out;
    out.reserve(grid.size());
    for (double f : grid) out.push_back({f, island_admittance(c, f), rwa_admittance(c, f)});
    return out;
}

double PurcellReport::t1_purcell() const { return 1.0 / angular(kappa_q); }
double PurcellReport::t1_purcell_rwa() const { return 1.0 / angular(kappa_q_rwa); }

double qubit_linewidth(LineCoupling topology, double eta, double omega_q, double omega_r,
                       double kappa) {
    if (!(eta >= 0.0 && eta < 1.0)) throw InvalidParameter("eta must lie in [0, 1)");
    require_positive(omega_q, "omega_q");
    require_positive(omega_r, "omega_r");
    const double ratio = omega_q / omega_r;
    const double power = topology == LineCoupling::inductive ? 4.0 : 6.0;
    return eta * eta / (1.0 - eta * eta) * std::pow(ratio, power) * kappa;
}

double qubit_linewidth_from_g(LineCoupling topology, double eta, double g, double omega_q,
                              double omega_r, double kappa) {
    if (!(eta >= 0.0 && eta < 1.0)) throw InvalidParameter("eta must lie in [0, 1)");
    require_positive(omega_q, "omega_q");
    require_positive(omega_r, "omega_r");
    const double ratio = omega_q / omega_r;
    const double power = topology == LineCoupling::inductive ? 3.0 : 5.0;
    const double gr = g / omega_r;
    return 4.0 * std::pow(ratio, power) * gr * gr * kappa / (1.0 - eta * eta);
}

double qubit_linewidth_rwa(double g, double omega_q, double omega_r, double kappa) {
    const double delta = omega_r - omega_q;
    if (delta == 0.0) throw PoleError("rwa Purcell rate is singular at omega_r = omega_q");
    return g * g * kappa / (delta * delta);
}

PurcellReport purcell_rate(const CircuitParams &c) {
    const DerivedFrequencies d = derived_frequencies(c);
    PurcellReport r;
    r.topology = c.topology;
    r.eta = d.eta;
    r.omega_r = d.omega_r;
    r.omega_q = d.omega_q;
    r.kappa = resonator_linewidth(c);
    r.kappa_q = qubit_linewidth(c.topology, d.eta, d.omega_q, d.omega_r, r.kappa);
    const double g = 0.5 * d.eta * std::sqrt(d.omega_q * d.omega_r);
    r.kappa_q_rwa = qubit_linewidth_rwa(g, d.omega_q, d.omega_r, r.kappa);
    return r;
}

CircuitParams synthesize_circuit(const CircuitTargets &t) {
    require_positive(t.omega_q, "omega_q");
    require_positive(t.omega_r, "omega_r");
    require_positive(t.kappa, "kappa");
    require_positive(t.z0, "z0");
    if (!(t.eta > 0.0 && t.eta < kMaxCouplingEfficiency)) {
        throw InvalidParameter("eta must lie in (0, 0.9)");
    }
    CircuitParams c;
    c.topology = t.topology;
    c.z0 = t.z0;
    c.c_q = kSynthQubitCapacitance;
    c.c_res = kSynthQubitCapacitance;
    c.c_c = t.eta * c.c_q / (1.0 - t.eta);
    const double cq = c.c_q + c.c_c;
    const double cs2 = c_sigma_squared(c);
    const double wq = angular(t.omega_q);
    const double wr = angular(t.omega_r);
    const double kappa = angular(t.kappa);
    c.l_q = 1.0 / (wq * wq * cq);
    c.l_res = cq / (wr * wr * cs2);
    if (t.topology == LineCoupling::inductive) {
        c.l_tr = std::sqrt(kappa * t.z0 * c.l_res) / wr;
    } else {
        c.c_tr = std::sqrt(kappa * cs2 / (wr * wr * t.z0 * cq));
    }
    return c;
}

}  // namespace hfro
