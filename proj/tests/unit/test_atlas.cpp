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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "hfreadout/atlas.hpp"
#include "hfreadout/errors.hpp"
#include "hfreadout/floquet.hpp"
#include "oracles.hpp"

using namespace hfro;

namespace {
constexpr double kEc = 36e6;

Spectrum deep(double n_g = 0.25) { return diagonalize(TransmonParams(kEc, 60.0 * kEc, n_g)); }

ModelFactory two_level_model(double splitting) {
    return [splitting](double omega, double zeta) { return PeriodicHamiltonian::two_level(splitting, zeta, omega); };
}

DriveGrid window(const Spectrum &s, double lo, double hi, int n_omega, int n_power, int workers = 1) {
    GridSpec g{lo, hi, n_omega, 0.0, 0.15, n_power, PowerKind::stark};
    GridOptions o;
    o.workers = workers;
    return compute_transmon_grid(s, g, 20, o);
}
}  // namespace

TEST_SUITE("atlas") {
    TEST_CASE("grid spec validation") {
        CHECK_THROWS_AS((GridSpec{1.5, 1.3, 5, 0.0, 0.1, 3, PowerKind::stark}.validate()), InvalidParameter);
        CHECK_THROWS_AS((GridSpec{1.3, 1.5, 0, 0.0, 0.1, 3, PowerKind::stark}.validate()), InvalidParameter);
        CHECK_THROWS_AS((GridSpec{1.3, 1.5, 5, -0.1, 0.1, 3, PowerKind::stark}.validate()), InvalidParameter);
        CHECK(parse_power_kind("zeta") == PowerKind::zeta);
        CHECK_THROWS_AS(parse_power_kind("volts"), InvalidParameter);
    }

    TEST_CASE("undriven axis tracks the identity") {
        const Spectrum s = deep();
        GridSpec g{1.3, 1.7, 9, 0.0, 0.0, 1, PowerKind::stark};
        const DriveGrid grid = compute_transmon_grid(s, g, 12);
        const TrackResult t = track_states(grid);
        for (const StarkTrackedState &st : t.states) {
            const int rows = static_cast<int>(st.coefficients.rows());
            for (int r = 0; r < rows; ++r) {
                for (int k = 0; k < st.dimension; ++k) {
                    const double expected = (r == 0 && k == st.level) ? 1.0 : 0.0;
                    CHECK(std::abs(st.coefficients(r, k) - expected) < 1e-10);
                }
            }
            const HybridizationMap m = hybridization_map(grid, st);
            for (double th : m.theta) CHECK(th == 0.0);
        }
    }

    TEST_CASE("undriven row has zero hybridization") {
        const Spectrum s = deep();
        const DriveGrid grid = window(s, 1.3, 1.7, 11, 4);
        const TrackResult t = track_states(grid);
        for (const StarkTrackedState &st : t.states) {
            const HybridizationMap m = hybridization_map(grid, st);
            for (std::size_t w = 0; w < grid.n_omega(); ++w) CHECK(m.at(0, w) == 0.0);
            for (double th : m.theta) {
                if (std::isnan(th)) continue;
                CHECK(th >= 0.0);
                CHECK(th <= 1.0);
            }
        }
    }

    TEST_CASE("high-frequency window stays clean") {
        const Spectrum s = deep();
        const DriveGrid grid = window(s, 10.0, 13.0, 13, 6);
        const TrackResult t = track_states(grid);
        for (const StarkTrackedState &st : t.states) {
            const HybridizationMap m = hybridization_map(grid, st);
            CHECK(m.lost_count() == 0);
            for (double th : m.theta) CHECK(1.0 - th > 0.98);
            for (std::uint8_t c : st.status) CHECK(c == kCellIncluded);
        }
    }

    TEST_CASE("low-frequency window flags cells") {
        const Spectrum s = deep();
        const DriveGrid grid = window(s, 1.3, 1.7, 21, 8);
        const TrackResult t = track_states(grid);
        std::size_t flagged = 0;
        for (const StarkTrackedState &st : t.states) {
            for (std::uint8_t c : st.status) flagged += c != kCellIncluded;
            const HybridizationMap m = hybridization_map(grid, st);
            for (std::size_t p = 0; p < grid.n_power(); ++p) {
                for (std::size_t w = 0; w < grid.n_omega(); ++w) {
                    const FloquetCell &cell = grid.cell(p, w);
                    const Eigen::VectorXcd ref = st.evaluate(cell.zeta, cell.omega);
                    const double best = (cell.set.modes.adjoint() * ref).cwiseAbs2().maxCoeff();
                    const bool lost = m.status[p * grid.n_omega() + w] == kMapLost;
                    CHECK(lost == (best < kLostOverlap));
                    if (!lost) CHECK(m.at(p, w) == doctest::Approx(1.0 - best).epsilon(1e-9).scale(1e-12));
                }
            }
        }
        CHECK(flagged > 0);
    }

    TEST_CASE("resonances are denser at low frequency") {
        const Spectrum s = deep();
        const DriveGrid low = window(s, 1.4, 1.6, 21, 8);
        const DriveGrid high = window(s, 11.0, 13.0, 21, 8);
        const HybridizationMap a = hybridization_map(low, track_states(low).states[1]);
        const HybridizationMap b = hybridization_map(high, track_states(high).states[1]);
        CHECK(a.count_above(0.25) > b.count_above(0.25));
    }

    TEST_CASE("two-level cut follows the analytic profile") {
        const double split = 1e9;
        std::vector<double> omegas;
        for (int k = -40; k <= 40; ++k) omegas.push_back(split * (1.0 + 0.0025 * k));
        const DriveGrid grid =
            compute_grid(two_level_model(split), omegas, {0.0, 0.01, 0.03}, PowerKind::zeta, split, 2);
        const HybridizationMap m = hybridization_map(grid, bare_state(1, 2));
        double worst = 0.0;
        double peak = 0.0;
        for (std::size_t p = 0; p < grid.n_power(); ++p) {
            for (std::size_t w = 0; w < grid.n_omega(); ++w) {
                const FloquetCell &c = grid.cell(p, w);
                worst = std::max(worst, std::abs(m.at(p, w) - oracle::two_level_theta(c.zeta, split - c.omega)));
                peak = std::max(peak, m.at(p, w));
            }
        }
        CHECK(worst < 1e-3);
        CHECK(peak == doctest::Approx(0.5).epsilon(1e-6));
    }

    TEST_CASE("two-level transition amplitude") {
        const double split = 1e9;
        for (double a : {2e6, 1e7}) {
            TransitionOptions o;
            const TransitionAmplitude r =
                extract_transition_amplitude(two_level_model(split), 2, 1, 0, a, 0.97 * split, 1.03 * split, o);
            INFO(r.reason);
            REQUIRE_FALSE(r.ill_defined);
            CHECK(r.omega_gap == doctest::Approx(0.5 * a).epsilon(1e-4));
            CHECK(r.omega_fit == doctest::Approx(0.5 * a).epsilon(1e-4));
            CHECK(r.omega_star == doctest::Approx(split).epsilon(1e-6));
        }
    }

    TEST_CASE("transition outside the window is ill-defined") {
        const double split = 1e9;
        const TransitionAmplitude r =
            extract_transition_amplitude(two_level_model(split), 2, 1, 0, 1e6, 1.1 * split, 1.2 * split);
        CHECK(r.ill_defined);
        CHECK_FALSE(r.reason.empty());
        CHECK_THROWS_AS(extract_transition_amplitude(two_level_model(split), 2, 1, 1, 1e6, 0.9e9, 1.1e9),
                        InvalidParameter);
    }

    TEST_CASE("low-power transition amplitude") {
        const Spectrum s = diagonalize(TransmonParams(kEc, 60.0 * kEc, 0.25), 40);
        const double wq = s.qubit_frequency();
        const double e81 = s.transition(8, 1);
        const double zeta = grid_zeta(PowerKind::stark, 0.002, e81, wq);
        TransitionOptions o;
        const TransitionAmplitude r = extract_transition_amplitude(s, 1, 8, zeta, 0.98 * e81, 1.01 * e81, o);
        REQUIRE_FALSE(r.ill_defined);
        CHECK(r.low_power == doctest::Approx(0.5 * zeta * charge_matrix_element(s, 1, 8)).epsilon(1e-12));
        CHECK(r.omega_gap / r.low_power == doctest::Approx(1.0).epsilon(0.05));
        CHECK(r.omega_fit / r.omega_gap == doctest::Approx(1.0).epsilon(0.05));
    }

    TEST_CASE("qubit resonance census") {
        const Spectrum s = diagonalize(TransmonParams(kEc, 2.2e9, 0.25));
        const double wq = s.qubit_frequency();
        const auto q = resonance_condition_scan(s, 0.9 * wq, 1.1 * wq, {0});
        REQUIRE(q.size() == 1);
        CHECK(q[0].final_level == 1);

        std::set<std::pair<int, int>> near;
        for (const ResonanceEntry &e : resonance_condition_scan(s, 11.8 * wq, 13.0 * wq, {0, 1})) {
            near.emplace(e.initial, e.final_level);
        }
        CHECK(near == std::set<std::pair<int, int>>{{0, 14}, {1, 15}});
    }

    TEST_CASE("collisions thin out at high frequency") {
        const TransmonParams p(kEc, 2.2e9, 0.25);
        const double wq = diagonalize(p).qubit_frequency();
        std::vector<double> n_g;
        for (int k = 0; k <= 10; ++k) n_g.push_back(0.05 * k);
        const auto low = resonance_condition_scan(p, n_g, 0.5 * wq, 3.0 * wq, {0, 1});
        const auto high = resonance_condition_scan(p, n_g, 11.0 * wq, 13.0 * wq, {0, 1});
        CHECK(low.size() > high.size());
        auto strongest = [&](const std::vector<ResonanceEntry> &list) {
            double best = 0.0;
            for (const ResonanceEntry &e : list) {
                const Spectrum s = diagonalize(p.with_n_g(e.n_g));
                best = std::max(best, charge_matrix_element(s, e.initial, e.final_level));
            }
            return best;
        };
        CHECK(strongest(low) > 1e4 * strongest(high));
    }

    TEST_CASE("resonances move with the offset charge") {
        const TransmonParams p(kEc, 60.0 * kEc, 0.0);
        const double wq = diagonalize(p).qubit_frequency();
        const auto list = resonance_condition_scan(p, {0.0, 0.25}, 2.0 * wq, 6.0 * wq, {1});
        bool moved = false;
        for (const ResonanceEntry &a : list) {
            if (a.n_g != 0.0) continue;
            for (const ResonanceEntry &b : list) {
                if (b.n_g != 0.25 || b.final_level != a.final_level) continue;
                const Spectrum s = diagonalize(p.with_n_g(0.25));
                const double zeta = grid_zeta(PowerKind::stark, 0.05, b.omega_star, wq);
                const double width = 0.5 * zeta * charge_matrix_element(s, 1, b.final_level);
                moved = moved || std::abs(a.omega_star - b.omega_star) > width;
            }
        }
        CHECK(moved);
    }

    TEST_CASE("raising the threshold never adds fitted cells") {
        const Spectrum s = deep();
        const DriveGrid grid = window(s, 1.3, 1.7, 15, 6);
        TrackOptions loose;
        TrackOptions strict;
        strict.threshold = 0.9;
        const TrackResult a = track_states(grid, loose);
        const TrackResult b = track_states(grid, strict);
        for (std::size_t l = 0; l < a.states.size(); ++l) {
            std::size_t na = 0, nb = 0;
            for (std::uint8_t c : a.states[l].status) na += c == kCellIncluded;
            for (std::uint8_t c : b.states[l].status) nb += c == kCellIncluded;
            CHECK(nb <= na);
        }
    }

    TEST_CASE("worker count does not change the map") {
        const Spectrum s = deep();
        const DriveGrid a = window(s, 1.3, 1.7, 9, 4, 1);
        const DriveGrid b = window(s, 1.3, 1.7, 9, 4, 3);
        const HybridizationMap ma = hybridization_map(a, track_states(a).states[1]);
        const HybridizationMap mb = hybridization_map(b, track_states(b).states[1]);
        REQUIRE(ma.theta.size() == mb.theta.size());
        for (std::size_t i = 0; i < ma.theta.size(); ++i) {
            CHECK((ma.theta[i] == mb.theta[i] || (std::isnan(ma.theta[i]) && std::isnan(mb.theta[i]))));
        }
    }

    TEST_CASE("refining the frequency grid keeps resonance centers") {
        const Spectrum s = deep();
        const DriveGrid coarse = window(s, 1.3, 1.7, 21, 5);
        const DriveGrid fine = window(s, 1.3, 1.7, 41, 5);
        const HybridizationMap mc = hybridization_map(coarse, track_states(coarse).states[1]);
        const HybridizationMap mf = hybridization_map(fine, track_states(fine).states[1]);
        const std::size_t p = 2;
        const double step = (1.7 - 1.3) / 20.0;
        for (std::size_t w = 1; w + 1 < coarse.n_omega(); ++w) {
            const double v = mc.at(p, w);
            if (!(v > 0.25 && v >= mc.at(p, w - 1) && v >= mc.at(p, w + 1))) continue;
            const double center = coarse.omegas[w] / coarse.omega_q;
            double best = INFINITY;
            for (std::size_t u = 1; u + 1 < fine.n_omega(); ++u) {
                const double f = mf.at(p, u);
                if (f > 0.1 && f >= mf.at(p, u - 1) && f >= mf.at(p, u + 1)) {
                    best = std::min(best, std::abs(fine.omegas[u] / fine.omega_q - center));
                }
            }
            CHECK(best < step);
        }
    }
}
