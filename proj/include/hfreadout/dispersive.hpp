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

// Resonator frequency pulls induced by a capacitively coupled transmon.
//
// Three routes to the dispersive shift chi = chi_1 - chi_0:
//   full_sum   second-order sum over every transmon level,
//   high_freq  closed form keeping only m = n +- 1 with nonlinear matrix-element corrections,
//   rwa        the small-detuning (rotating-wave) result.
// Every frequency is in Hz and every formula takes the bare resonator frequency.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hfreadout/transmon.hpp"

namespace hfro {

class ReadoutCoupling {
  public:
    ReadoutCoupling(double g, double omega_r_bare);

    double g() const noexcept { return g_; }
    double omega_r_bare() const noexcept { return omega_r_bare_; }

    /// False once g / omega_r_bare exceeds 0.1.
    bool perturbative() const noexcept { return g_ / omega_r_bare_ <= 0.1; }

  private:
    double g_;
    double omega_r_bare_;
};

enum class ShiftMethod { full_sum, high_freq, rwa };

std::string to_string(ShiftMethod method);
ShiftMethod parse_shift_method(const std::string &name);

struct ShiftReport {
    std::vector<double> chi_n;  // empty for rwa
    double chi = 0.0;
    ShiftMethod method = ShiftMethod::full_sum;
};

/// Pole guard: a denominator whose |E_nm| lies within this fraction of omega_r_bare diverges.
inline constexpr double kPoleGuard = 1e-6;

/// Levels whose excitation energy E_m - E_0 lies below 2 E_J.
int levels_inside_well(const Spectrum &spectrum);

/// 3 x levels_inside_well, clamped to the validated level count.
int default_sum_cutoff(const Spectrum &spectrum);

/// Second-order pull chi_n, summing m != n over m < m_max.
/// Throws DivergenceError naming (n, m) when a term sits on its pole.
double chi_n_full(const Spectrum &spectrum, const ReadoutCoupling &coupling, int n, int m_max);

/// chi_0 ... chi_{levels-1} and chi = chi_1 - chi_0 from the full sum.
ShiftReport shift_full(const Spectrum &spectrum, const ReadoutCoupling &coupling, int levels,
                       int m_max);

/// -8 E_C g^2 w^2 / ((w^2 - E_10^2)(w^2 - E_21^2)), w = omega_r_bare.
/// Throws PoleError when w is within 1% of E_10 or E_21.
double chi_high_freq(const Spectrum &spectrum, const ReadoutCoupling &coupling);

/// -2 E_C g^2 / (Delta (Delta - E_C)), Delta = omega_q - omega_r_bare.
double chi_rwa(const Spectrum &spectrum, const ReadoutCoupling &coupling);

/// Same formula at an explicit detuning.
double chi_rwa_at(double e_c, double g, double delta);

/// 2 omega_q g^2 / omega_r_bare^2.
double chi0_high_freq(const Spectrum &spectrum, const ReadoutCoupling &coupling);

/// True when omega_r_bare >= 5 omega_q, the regime chi0_high_freq is derived for.
bool high_frequency_regime(const Spectrum &spectrum, const ReadoutCoupling &coupling);

/// g = eta sqrt(omega_q omega_r_bare) / 2. Requires 0 < eta < 1.
double coupling_from_eta(double eta, double omega_q, double omega_r_bare);

/// Inverse of coupling_from_eta.
double eta_from_coupling(double g, double omega_q, double omega_r_bare);

/// Qubit frequency of the linearized circuit, sqrt(8 E_J E_C). This is the
/// omega_q entering the lumped-circuit relation between eta and g.
double linear_circuit_frequency(const TransmonParams &params);

/// Dressed resonator frequency omega_r_bare + chi_n.
double dressed_resonator_frequency(const Spectrum &spectrum, const ReadoutCoupling &coupling,
                                   int n, int m_max);

enum ScanFlag : std::uint32_t {
    kScanOk = 0,
    /// A term sat inside the pole guard; ratio is NaN.
    kScanDivergent = 1u << 0,
    /// A visible pole (E_{m n} = omega_r_bare for n in {0, 1}) lies between this
    /// point and the previous one.
    kScanPoleCrossed = 1u << 1,
};

struct RatioPoint {
    double omega_r_bare = 0.0;
    double n_g = 0.0;
    double chi_full = 0.0;
    double chi_rwa = 0.0;
    double ratio = 0.0;
    std::uint32_t flags = kScanOk;
    /// Level m of the offending term for flagged points, -1 otherwise.
    int resonant_level = -1;
};

struct RatioScanOptions {
    std::vector<double> n_g_list{0.25, 0.0};
    /// A pole crossing is reported when the crossing term contributes at least
    /// this fraction of |chi_full| at either neighbouring scan point.
    double visibility = 0.1;
    int workers = 1;
};

/// chi_full / chi_rwa across omega_range for each n_g. Coupling follows eta through
/// coupling_from_eta with the linear-circuit qubit frequency. Rows are ordered by
/// (n_g index, omega index) independent of the worker count.
std::vector<RatioPoint> resonance_ratio_scan(const TransmonParams &params, double eta,
                                             std::span<const double> omega_range,
                                             const RatioScanOptions &options = {});

}  // namespace hfro
