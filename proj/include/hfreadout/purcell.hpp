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

// Purcell decay of a transmon coupled through a lumped readout resonator.
//
// Element values are SI (H, F, Ohm). Rates and frequencies at the interface are
// in Hz (angular quantity divided by 2 pi).

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace hfro {

enum class LineCoupling { inductive, capacitive };

std::string to_string(LineCoupling topology);
LineCoupling parse_line_coupling(const std::string &name);

struct CircuitParams {
    double l_q = 0.0;
    double c_q = 0.0;
    double c_c = 0.0;
    double l_res = 0.0;
    double c_res = 0.0;
    LineCoupling topology = LineCoupling::inductive;
    /// Used when topology is inductive.
    double l_tr = 0.0;
    /// Used when topology is capacitive.
    double c_tr = 0.0;
    double z0 = 50.0;

    /// Throws InvalidParameter on a non-positive element or a coupling element that
    /// does not match the topology. C_C and the coupling element may be zero.
    void validate() const;
};

struct DerivedFrequencies {
    double omega_r;  // Hz
    double omega_q;  // Hz
    double eta;
};

/// C_res C_q + C_res C_C + C_q C_C.
double c_sigma_squared(const CircuitParams &c);

/// eta = C_C / sqrt((C_res + C_C)(C_q + C_C)), without the near-unity check.
double coupling_efficiency(const CircuitParams &c);

inline constexpr double kMaxCouplingEfficiency = 0.9;

/// Resonator and qubit frequencies and eta. Throws InvalidParameter when eta >= 0.9.
DerivedFrequencies derived_frequencies(const CircuitParams &c);

/// Resonator linewidth kappa / 2 pi for the circuit's line coupling, in Hz.
double resonator_linewidth(const CircuitParams &c);

/// Impedance of the qubit island at angular frequency 2 pi f. Rejects f <= 0.
std::complex<double> island_impedance(const CircuitParams &c, double f);

/// True when |f - f_q| <= 0.1 f_q, where the island impedance is quantitative.
bool island_impedance_valid(const CircuitParams &c, double f);

/// Re Y[f] = Re(1 / Z[f]) in Siemens.
double island_admittance(const CircuitParams &c, double f);

/// Admittance whose dissipative part reproduces kappa g^2 / (omega - omega_r)^2
/// with g = eta sqrt(omega omega_r) / 2, the rotating-wave decay evaluated at f.
double rwa_admittance(const CircuitParams &c, double f);

struct AdmittancePoint {
    double omega = 0.0;  // Hz
    double re_y = 0.0;
    double re_y_rwa = 0.0;
};

std::vector<AdmittancePoint> admittance_spectrum(const CircuitParams &c, std::span<const double> grid);

struct PurcellReport {
    double eta = 0.0;
    double omega_r = 0.0;      // Hz
    double omega_q = 0.0;      // Hz
    double kappa = 0.0;        // Hz
    double kappa_q = 0.0;      // Hz
    double kappa_q_rwa = 0.0;  // Hz
    LineCoupling topology = LineCoupling::inductive;

    double t1_purcell() const;      // s
    double t1_purcell_rwa() const;  // s
};

PurcellReport purcell_rate(const CircuitParams &c);

/// Qubit linewidth from eta and the frequencies alone (Hz in, Hz out).
double qubit_linewidth(LineCoupling topology, double eta, double omega_q, double omega_r,
                       double kappa);

/// Same rate written through the coupling strength g.
double qubit_linewidth_from_g(LineCoupling topology, double eta, double g, double omega_q,
                              double omega_r, double kappa);

/// g^2 kappa / (omega_r - omega_q)^2.
double qubit_linewidth_rwa(double g, double omega_q, double omega_r, double kappa);

struct CircuitTargets {
    double omega_q = 0.0;  // Hz
    double omega_r = 0.0;  // Hz
    double eta = 0.0;
    double kappa = 0.0;    // Hz
    double z0 = 50.0;
    LineCoupling topology = LineCoupling::inductive;
};

inline constexpr double kSynthQubitCapacitance = 100e-15;

/// Circuit reproducing the targets with C_q = C_res = 100 fF.
CircuitParams synthesize_circuit(const CircuitTargets &targets);

}  // namespace hfro
