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

// Resonance atlases of a driven transmon over (omega, power) grids.
//
// A grid holds one Floquet set per cell. track_states follows selected bare
// levels into the driven regime by fitting their mode coefficients to a
// polynomial in (zeta, omega) window by window; hybridization_map then measures
// how far the best-matching Floquet mode strays from the fitted state.
//
// Fit variables are x = zeta / zeta_scale and y = (omega / omega_q - center) / half_width.
// The zeta^0 coefficients are pinned to the bare state, so every fitted state
// equals its bare level at zeta = 0.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hfreadout/floquet.hpp"
#include "hfreadout/transmon.hpp"

namespace hfro {

enum class PowerKind { zeta, stark };

std::string to_string(PowerKind kind);
PowerKind parse_power_kind(const std::string &name);

/// Axes in units of the qubit frequency. Power is zeta / omega_q or delta_omega / omega_q.
struct GridSpec {
    double omega_min = 0.0;
    double omega_max = 0.0;
    int n_omega = 1;
    double power_min = 0.0;
    double power_max = 0.0;
    int n_power = 1;
    PowerKind kind = PowerKind::stark;

    void validate() const;
};

struct FloquetCell {
    double omega = 0.0;  // Hz
    double zeta = 0.0;   // Hz
    FloquetSet set;
    bool failed = false;
    std::string reason;
};

using ModelFactory = std::function<PeriodicHamiltonian(double omega, double zeta)>;

struct DriveGrid {
    std::vector<double> omegas;  // Hz, strictly increasing
    std::vector<double> powers;  // normalized, strictly increasing
    PowerKind kind = PowerKind::stark;
    double omega_q = 0.0;        // Hz, normalization of both axes
    int dimension = 0;
    /// Row-major: cell (p, w) at index p * omegas.size() + w.
    std::vector<FloquetCell> cells;

    std::size_t n_omega() const { return omegas.size(); }
    std::size_t n_power() const { return powers.size(); }
    const FloquetCell &cell(std::size_t p, std::size_t w) const { return cells[p * omegas.size() + w]; }
};

/// zeta in Hz for a normalized power at drive frequency omega.
double grid_zeta(PowerKind kind, double power, double omega, double omega_q);

std::vector<double> linspace(double lo, double hi, int n);

struct GridOptions {
    PropagatorOptions propagator{1e-7};
    int workers = 1;
};

/// Evaluates every cell. Cells whose integration fails are marked with the reason.
DriveGrid compute_grid(const ModelFactory &model, std::vector<double> omegas, std::vector<double> powers,
                       PowerKind kind, double omega_q, int dimension, const GridOptions &options = {});

/// Driven transmon grid over spec, truncated to `levels` undriven states.
DriveGrid compute_transmon_grid(const Spectrum &spectrum, const GridSpec &spec, int levels,
                                const GridOptions &options = {});

inline constexpr int kPolyOrder = 4;

struct FitScaling {
    double zeta_scale = 1.0;
    double omega_q = 1.0;
    double omega_center = 0.0;
    double omega_half_width = 1.0;
};

enum CellStatus : std::uint8_t {
    kCellIncluded = 0,
    kCellBelowThreshold = 1,
    kCellCollision = 2,
    kCellFailed = 3,
};

struct StarkTrackedState {
    int level = 0;
    int dimension = 0;
    /// Row i * (kPolyOrder + 1) + j holds C_ij over the basis index k (columns).
    /// Rows with i = 0 are fixed to the bare state.
    Eigen::MatrixXcd coefficients;
    FitScaling scaling;
    /// First power row of each window, followed by n_power.
    std::vector<int> window_boundaries;
    double fit_residual = 0.0;
    /// Per cell (row-major like DriveGrid::cells).
    std::vector<std::uint8_t> status;

    /// Fitted state at (zeta, omega), renormalized.
    Eigen::VectorXcd evaluate(double zeta, double omega) const;
    /// Fitted state before renormalization.
    Eigen::VectorXcd evaluate_raw(double zeta, double omega) const;
};

/// Untracked reference: the bare level at every drive.
StarkTrackedState bare_state(int level, int dimension);

struct TrackOptions {
    std::vector<int> levels{0, 1};
    /// Squared overlap a mode needs with its reference to enter a fit.
    double threshold = 0.8;
    int windows = 8;
};

struct LabelCollision {
    std::size_t cell = 0;
    int level_a = 0;
    int level_b = 0;
    int mode = 0;
};

struct TrackResult {
    std::vector<StarkTrackedState> states;
    std::vector<LabelCollision> collisions;
};

/// Iterative windowed tracking. Window k labels its cells against the fit of
/// windows 1..k-1 (bare states for the first window) and refits on all labeled
/// cells so far; the last pass is the global fit over the whole grid.
TrackResult track_states(const DriveGrid &grid, const TrackOptions &options = {});

enum MapStatus : std::uint8_t { kMapOk = 0, kMapLost = 1, kMapFailed = 2 };

struct HybridizationMap {
    int level = 0;
    std::size_t n_power = 0;
    std::size_t n_omega = 0;
    /// Row-major, NaN for lost or failed cells.
    std::vector<double> theta;
    /// Bare index k not in {0, 1} carrying the largest admixture, -1 when theta < 1e-6.
    std::vector<int> dominant;
    std::vector<std::uint8_t> status;

    double at(std::size_t p, std::size_t w) const { return theta[p * n_omega + w]; }
    std::size_t count_above(double value) const;
    std::size_t lost_count() const;
};

inline constexpr double kLostOverlap = 0.5;

HybridizationMap hybridization_map(const DriveGrid &grid, const StarkTrackedState &tracked);

struct ResonanceEntry {
    double n_g = 0.0;
    int initial = 0;
    int final_level = 0;
    double omega_star = 0.0;  // Hz
};

/// Single-photon resonances E_j - E_i inside [band_lo, band_hi] (Hz) for each initial state.
std::vector<ResonanceEntry> resonance_condition_scan(const Spectrum &spectrum, double band_lo,
                                                     double band_hi, const std::vector<int> &initial);

/// Same census for each offset charge.
std::vector<ResonanceEntry> resonance_condition_scan(const TransmonParams &params,
                                                     const std::vector<double> &n_g_list, double band_lo,
                                                     double band_hi, const std::vector<int> &initial);

struct TransitionOptions {
    int levels = kDefaultFloquetLevels;
    int coarse_points = 121;
    /// Relative accuracy of the resonance location search.
    double search_tol = 1e-9;
    PropagatorOptions propagator{1e-9};
    /// A third mode holding more than this weight in the two-state subspace marks a multi-crossing.
    double crowding = 0.1;
};

struct TransitionAmplitude {
    int initial = 0;
    int final_level = 0;
    double zeta = 0.0;            // Hz
    double omega_star = 0.0;      // Hz, drive frequency of the minimum gap
    double omega_gap = 0.0;       // Hz, half the minimum quasienergy gap
    double omega_fit = 0.0;       // Hz, from the hybridization profile fit
    double low_power = 0.0;       // Hz, zeta |<j|N|i>| / 2
    bool ill_defined = false;
    std::string reason;
};

/// Transition amplitude for i -> j at fixed zeta from a scan of omega over [omega_lo, omega_hi] (Hz).
TransitionAmplitude extract_transition_amplitude(const Spectrum &spectrum, int i, int j, double zeta,
                                                 double omega_lo, double omega_hi,
                                                 const TransitionOptions &options = {});

/// Same for a generic model whose bare states are the basis vectors.
TransitionAmplitude extract_transition_amplitude(const ModelFactory &model, int dimension, int i, int j,
                                                 double zeta, double omega_lo, double omega_hi,
                                                 const TransitionOptions &options = {});

}  // namespace hfro
