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

// Floquet modes of periodically driven Hamiltonians
//
//   H(t) = diag(h0) + V exp(-i omega t) + V^dagger exp(+i omega t)
//
// in Hz, with omega the drive frequency (cycles per second). The one-period
// propagator is integrated with a fourth-order two-point Magnus scheme and
// per-period step doubling. Step exponentials use a scaled diagonal Pade(6,6)
// approximant, which is exactly unitary for a Hermitian exponent.

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "hfreadout/transmon.hpp"

namespace hfro {

struct DriveParams {
    double omega = 0.0;  // Hz
    double zeta = 0.0;   // Hz, the amplitude in zeta N cos(omega t)

    double period() const { return 1.0 / omega; }
    void validate() const;
};

inline constexpr int kDefaultFloquetLevels = 20;

class PeriodicHamiltonian {
  public:
    PeriodicHamiltonian(Eigen::VectorXd h0, Eigen::MatrixXcd v, double omega);

    /// Driven transmon truncated to its lowest `levels` undriven eigenstates:
    /// h0 = E_n, V = zeta N / 2.
    static PeriodicHamiltonian driven_transmon(const Spectrum &spectrum, const DriveParams &drive,
                                               int levels = kDefaultFloquetLevels);

    /// Two-level model in the basis {|nc>, |c>}: h0 = (splitting, 0), V = (a / 2) sigma_+.
    static PeriodicHamiltonian two_level(double splitting, double a, double omega_d);

    int dimension() const { return static_cast<int>(h0_.size()); }
    const Eigen::VectorXd &h0() const { return h0_; }
    const Eigen::MatrixXcd &v() const { return v_; }
    double omega() const { return omega_; }
    double period() const { return 1.0 / omega_; }

    /// True when V is real symmetric, so H(t) is real and even in t.
    bool time_symmetric() const { return time_symmetric_; }
    bool static_only() const { return static_only_; }

    Eigen::MatrixXcd at(double t) const;

  private:
    Eigen::VectorXd h0_;
    Eigen::MatrixXcd v_;
    double omega_;
    bool time_symmetric_;
    bool static_only_;
};

struct PropagatorOptions {
    /// Max-norm difference allowed between the n-step and 2n-step propagators.
    double tol = 1e-9;
    /// Start phase: the propagator maps t0 to t0 + T, with t0 in units of the period.
    double t0 = 0.0;
    int min_steps = 4;
    int max_steps = 1 << 16;
};

struct Propagator {
    Eigen::MatrixXcd u;
    double unitarity_defect = 0.0;
    double error_estimate = 0.0;
    int steps = 0;
};

/// max |U^dagger U - 1|.
double unitarity_defect(const Eigen::MatrixXcd &u);

/// Fixed-step Magnus propagator from t_from to t_to (seconds); t_to < t_from integrates backward.
Eigen::MatrixXcd propagate(const PeriodicHamiltonian &h, double t_from, double t_to, int steps);

/// U(t0, t0 + T). Throws InvalidParameter for tol outside [1e-12, 1e-6] and
/// IntegrationFailure when step doubling cannot reach tol or the defect exceeds 10 tol.
Propagator one_period_propagator(const PeriodicHamiltonian &h, const PropagatorOptions &options = {});

struct FloquetSet {
    /// Columns are the modes at the start time, each with its largest component real positive.
    Eigen::MatrixXcd modes;
    /// Folded into (-omega/2, omega/2], Hz.
    Eigen::VectorXd quasienergies;
    double unitarity_defect = 0.0;
};

inline constexpr double kMaxInputDefect = 1e-8;

/// Eigen-decomposition of a one-period propagator for drive frequency omega (Hz).
/// Modes are sorted by quasienergy; eigenphases closer than 1e-10 are ordered
/// by the index of their largest component. Rejects inputs whose defect exceeds 1e-8.
FloquetSet floquet_modes(const Eigen::MatrixXcd &u, double omega);

/// Propagator and modes in one call. A static Hamiltonian returns the exact basis modes.
FloquetSet floquet_set(const PeriodicHamiltonian &h, const PropagatorOptions &options = {});

/// Folds a quasienergy into (-omega/2, omega/2].
double fold_quasienergy(double e, double omega);

/// delta_omega / omega_q = zeta^2 omega^2 / (8 (omega^2 - omega_q^2)^2), returns delta_omega.
double stark_from_zeta(double zeta, double omega, double omega_q);

/// Inverse of stark_from_zeta, non-negative root.
double zeta_from_stark(double delta_omega, double omega, double omega_q);

struct StarkValidity {
    bool deep_transmon = true;  // E_J / E_C >= 20
    bool far_detuned = true;    // |omega - omega_q| >= E_C
    bool ok() const { return deep_transmon && far_detuned; }
};

StarkValidity stark_validity(const TransmonParams &params, double omega, double omega_q);

struct TwoLevelResult {
    /// sqrt((A/2)^2 + (Delta/2)^2).
    double quasienergy_gap = 0.0;
    double theta = 0.0;
};

/// Analytic Floquet solution of the two-level model at drive amplitude a and detuning delta.
TwoLevelResult two_level_oracle(double a, double delta);

}  // namespace hfro
