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

#include <cmath>
#include <vector>

#include "hfreadout/dispersive.hpp"
#include "hfreadout/errors.hpp"
#include "hfreadout/transmon.hpp"
#include "oracles.hpp"

using namespace hfro;

namespace {
constexpr double kEc = 36e6;
constexpr double kEj = 2.2e9;
constexpr double kOmegaR = 9.2233e9;

Spectrum device() { return diagonalize(TransmonParams(kEc, kEj, 0.25)); }

double device_g() { return coupling_from_eta(0.38, linear_circuit_frequency(TransmonParams(kEc, kEj, 0.25)), kOmegaR); }
}  // namespace

TEST_SUITE("dispersive") {
    TEST_CASE("zero coupling gives zero pulls") {
        const Spectrum s = device();
        const ReadoutCoupling c(0.0, kOmegaR);
        for (int n = 0; n < 4; ++n) CHECK(chi_n_full(s, c, n, default_sum_cutoff(s)) == 0.0);
        CHECK(chi0_high_freq(s, c) == 0.0);
    }

    TEST_CASE("device dispersive shift") {
        const Spectrum s = device();
        const ReadoutCoupling c(0.515e9, kOmegaR);
        const int m = default_sum_cutoff(s);
        const double chi = chi_n_full(s, c, 1, m) - chi_n_full(s, c, 0, m);
        CHECK(chi == doctest::Approx(-0.90e6).epsilon(0.05));
        const double simple = -8.0 * kEc * std::pow(c.g() / kOmegaR, 2);
        const double w2 = kOmegaR * kOmegaR;
        const double poles = w2 * w2 / ((w2 - std::pow(s.transition(1, 0), 2)) * (w2 - std::pow(s.transition(2, 1), 2)));
        CHECK(chi_high_freq(s, c) == doctest::Approx(simple * poles).epsilon(1e-12));
        CHECK(std::abs(chi_high_freq(s, c) / simple - 1.0) < 0.015);
        CHECK(chi_high_freq(s, c) < 0.0);
    }

    TEST_CASE("coupling from eta") {
        const double g = coupling_from_eta(0.38, 0.758e9, kOmegaR);
        CHECK(g == doctest::Approx(0.502e9).epsilon(0.005));
        CHECK(std::abs(g / 0.515e9 - 1.0) < 0.05);
        CHECK(coupling_from_eta(1e-9, 0.758e9, kOmegaR) < 1e-8 * g);
        CHECK(eta_from_coupling(g, 0.758e9, kOmegaR) == doctest::Approx(0.38).epsilon(1e-12));
        CHECK_THROWS_AS(coupling_from_eta(1.0, 0.758e9, kOmegaR), InvalidParameter);
        CHECK_THROWS_AS(coupling_from_eta(0.0, 0.758e9, kOmegaR), InvalidParameter);
        CHECK(device_g() == doctest::Approx(0.515e9).epsilon(0.01));
    }

    TEST_CASE("cavity pull in the high-frequency limit") {
        const Spectrum s = device();
        const ReadoutCoupling c(device_g(), kOmegaR);
        CHECK(chi0_high_freq(s, c) == doctest::Approx(4.7e6).epsilon(0.03));
        CHECK(high_frequency_regime(s, c));
        const double full = chi_n_full(s, c, 0, default_sum_cutoff(s));
        CHECK(std::abs(chi0_high_freq(s, c) / full - 1.0) < 0.05);
    }

    TEST_CASE("matches exact coupled diagonalization") {
        for (double n_g : {0.0, 0.25}) {
            const double e_j = 60.0 * kEc;
            const Spectrum s = diagonalize(TransmonParams(kEc, e_j, n_g));
            const double w = 12.0 * s.qubit_frequency();
            const ReadoutCoupling c(1e-3 * w, w);
            const oracle::CoupledShifts o = oracle::coupled_shifts(kEc, e_j, n_g, c.g(), w, 30, 8, 2);
            const int m = default_sum_cutoff(s);
            for (int n = 0; n < 2; ++n) {
                CHECK(chi_n_full(s, c, n, m) == doctest::Approx(o.chi_n[n]).epsilon(0.005));
            }
        }
    }

    TEST_CASE("high-frequency form vanishes with the charging energy") {
        const double plasma = 5e9;
        std::vector<double> v;
        for (double e_c : {4e7, 1e7, 2.5e6}) {
            const Spectrum s = diagonalize(TransmonParams(e_c, plasma * plasma / (8.0 * e_c), 0.0, 80), 4);
            v.push_back(std::abs(chi_high_freq(s, ReadoutCoupling(0.3e9, 60e9))));
        }
        CHECK(v[1] < v[0] / 3.0);
        CHECK(v[2] < v[1] / 3.0);
    }

    TEST_CASE("high-frequency form meets rwa at small detuning") {
        const Spectrum s = device();
        const double delta = 4.0 * kEc;
        const ReadoutCoupling c(5e6, s.qubit_frequency() + delta);
        const double hf = chi_high_freq(s, c);
        const double rwa = chi_rwa(s, c);
        CHECK(std::abs(hf / rwa - 1.0) <= 2.0 * kEc / delta);
    }

    TEST_CASE("rwa limits") {
        const Spectrum s = device();
        CHECK(chi_rwa_at(kEc, 1e8, 2e15) / chi_rwa_at(kEc, 1e8, 1e15) == doctest::Approx(0.25).epsilon(1e-6));
        const double w = 20e9;
        const double v = chi_rwa_at(kEc, 1e8, -w);
        const double lead = -2.0 * kEc * 1e8 * 1e8 / (w * w);
        CHECK(std::abs(v / lead - 1.0) < 2.0 * kEc / w);
        CHECK_THROWS_AS(chi_rwa_at(kEc, 1e8, 0.0), PoleError);
        CHECK_THROWS_AS(chi_rwa_at(kEc, 1e8, kEc), PoleError);
        CHECK_THROWS_AS(chi_high_freq(s, ReadoutCoupling(1e8, s.qubit_frequency() * 1.005)), PoleError);
    }

    TEST_CASE("divergence names the resonant pair") {
        const Spectrum s = device();
        const double w = s.transition(3, 0);
        try {
            chi_n_full(s, ReadoutCoupling(1e8, w), 0, default_sum_cutoff(s));
            FAIL("expected a divergence");
        } catch (const DivergenceError &e) {
            CHECK(e.n() == 0);
            CHECK(e.m() == 3);
        }
    }

    TEST_CASE("matrix-element corrections matter") {
        const Spectrum s = device();
        const double w = kOmegaR;
        const double n01 = s.charge_element(0, 1);
        const double e10 = s.transition(1, 0);
        const double e21 = s.transition(2, 1);
        const double n12 = s.charge_element(1, 2);
        auto term = [w](double e, double n) { return n * n * 2.0 * e / (e * e - w * w); };
        const double exact = term(e10, n01) + term(-e21, n12) - term(-e10, n01);
        const double naive = term(e10, n01) + term(-e21, std::sqrt(2.0) * n01) - term(-e10, n01);
        CHECK(exact == doctest::Approx(chi_high_freq(s, ReadoutCoupling(1.0, w)) / 1.0 *
                                       std::pow(zero_point_scales(s.params()).n_zpf, 2)).epsilon(0.02));
        CHECK(naive / exact == doctest::Approx(0.5).epsilon(0.05));
    }

    TEST_CASE("pulls are linear inside the well") {
        const Spectrum s = diagonalize(TransmonParams(kEc, 60.0 * kEc, 0.25));
        const double w = 12.0 * s.qubit_frequency();
        const ReadoutCoupling c(0.02 * w, w);
        const ShiftReport r = shift_full(s, c, levels_inside_well(s) / 2, default_sum_cutoff(s));
        for (std::size_t n = 0; n < r.chi_n.size(); ++n) {
            if (s.energy(static_cast<int>(n)) - s.energy(0) >= s.params().e_j()) break;
            CHECK(std::abs(r.chi_n[n] - (r.chi_n[0] + static_cast<double>(n) * r.chi)) <= 0.1 * std::abs(r.chi));
        }
    }

    TEST_CASE("closed form agrees with the full sum where both apply") {
        const Spectrum s = diagonalize(TransmonParams(kEc, 60.0 * kEc, 0.25));
        const int m = default_sum_cutoff(s);
        for (double ratio : {10.0, 11.0, 12.0}) {
            const double w = ratio * s.qubit_frequency();
            const ReadoutCoupling c(1e-3 * w, w);
            const double full = chi_n_full(s, c, 1, m) - chi_n_full(s, c, 0, m);
            CHECK(chi_high_freq(s, c) == doctest::Approx(full).epsilon(0.03));
        }
    }

    TEST_CASE("ratio scan") {
        const TransmonParams p(kEc, 60.0 * kEc, 0.25);
        const Spectrum s = diagonalize(p);
        const double wq = s.qubit_frequency();
        RatioScanOptions o;
        o.n_g_list = {0.25};

        std::vector<double> near;
        for (int k = 0; k < 5; ++k) near.push_back((1.01 + 0.005 * k) * wq);
        for (const RatioPoint &r : resonance_ratio_scan(p, 0.05, near, o)) {
            CHECK(r.flags == kScanOk);
            CHECK(std::abs(r.ratio - 1.0) < 0.1);
        }

        std::vector<double> far;
        for (int k = 0; k <= 40; ++k) far.push_back((11.0 + 0.05 * k) * wq);
        const std::vector<RatioPoint> high = resonance_ratio_scan(p, 0.38, far, o);
        for (const RatioPoint &r : high) CHECK(r.flags == kScanOk);
        const RatioPoint &mid = high[20];
        const ReadoutCoupling c(coupling_from_eta(0.38, linear_circuit_frequency(p), mid.omega_r_bare), mid.omega_r_bare);
        CHECK(mid.ratio == doctest::Approx(chi_high_freq(s, c) / chi_rwa(s, c)).epsilon(0.1));
        CHECK(mid.ratio > 3.0);

        std::vector<double> mids;
        for (int k = 0; k <= 400; ++k) mids.push_back((2.0 + 0.01 * k) * wq);
        int flagged = 0;
        for (const RatioPoint &r : resonance_ratio_scan(p, 0.38, mids, o)) flagged += r.flags != kScanOk;
        CHECK(flagged >= 3);
    }

    TEST_CASE("ratio scan is independent of the worker count") {
        const TransmonParams p(kEc, 60.0 * kEc, 0.25);
        const double wq = diagonalize(p).qubit_frequency();
        std::vector<double> grid;
        for (int k = 0; k < 50; ++k) grid.push_back((2.0 + 0.1 * k) * wq);
        RatioScanOptions one;
        RatioScanOptions four;
        four.workers = 4;
        const auto a = resonance_ratio_scan(p, 0.2, grid, one);
        const auto b = resonance_ratio_scan(p, 0.2, grid, four);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK((a[i].ratio == b[i].ratio || (std::isnan(a[i].ratio) && std::isnan(b[i].ratio))));
            CHECK(a[i].flags == b[i].flags);
        }
    }
}
