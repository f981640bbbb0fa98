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
#include <complex>
#include <numbers>

#include "oracles.hpp"

TEST_SUITE("oracles") {
    TEST_CASE("charge oracle free rotor") {
        const oracle::ChargeSpectrum s = oracle::charge_diagonalize(1e8, 0.0, 0.0, 4);
        CHECK(s.energies[0] == doctest::Approx(0.0).scale(1.0));
        CHECK(s.energies[1] == doctest::Approx(4e8));
        CHECK(s.energies[2] == doctest::Approx(4e8));
        CHECK(s.energies[3] == doctest::Approx(16e8));
    }

    TEST_CASE("charge oracle parity at zero offset") {
        const oracle::ChargeSpectrum s = oracle::charge_diagonalize(36e6, 2.16e9, 0.0, 30);
        for (int j = 0; j < 6; ++j) CHECK(std::abs(std::abs(s.reflection_parity(j)) - 1.0) < 1e-10);
        CHECK(s.reflection_parity(0) > 0.0);
        CHECK(s.reflection_parity(1) < 0.0);
    }

    TEST_CASE("coupled oracle is stable in the photon cutoff") {
        const double e_c = 36e6, e_j = 60.0 * e_c;
        const double w = 12.0 * std::sqrt(8.0 * e_j * e_c);
        const oracle::CoupledShifts a = oracle::coupled_shifts(e_c, e_j, 0.25, 1e-3 * w, w, 24, 6, 2);
        const oracle::CoupledShifts b = oracle::coupled_shifts(e_c, e_j, 0.25, 1e-3 * w, w, 24, 12, 2);
        for (int n = 0; n < 2; ++n) CHECK(std::abs(a.chi_n[n] / b.chi_n[n] - 1.0) < 1e-4);
    }

    TEST_CASE("coupled oracle harmonic limit") {
        const double e_c = 2e7, plasma = 5e9;
        const double e_j = plasma * plasma / (8.0 * e_c);
        const double w = 4.0 * plasma;
        const double g = 1e-3 * w;
        const oracle::CoupledShifts s = oracle::coupled_shifts(e_c, e_j, 0.0, g, w, 12, 8, 2);
        const double harmonic = g * g * 2.0 * plasma / (plasma * plasma - w * w);
        CHECK(s.chi_n[0] == doctest::Approx(-harmonic).epsilon(0.02));
        CHECK(std::abs(s.chi_n[1] - s.chi_n[0]) < 0.05 * std::abs(s.chi_n[0]));
    }

    TEST_CASE("two-level theta") {
        CHECK(oracle::two_level_theta(1.0, 0.0) == 0.5);
        CHECK(oracle::two_level_theta(0.0, 1.0) == 0.0);
        const double x = 0.7 * 0.7;
        CHECK(oracle::two_level_theta(0.7, 1.0) == doctest::Approx(x / (2.0 * (1.0 + x + std::sqrt(1.0 + x)))).epsilon(1e-14));
    }

    TEST_CASE("rk4 static limit") {
        Eigen::VectorXd h0(3);
        h0 << 0.0, 0.3e9, 0.7e9;
        const oracle::RkFloquet f = oracle::rk4_floquet(h0, Eigen::MatrixXcd::Zero(3, 3), 1e9, 2000);
        CHECK(f.quasienergies[0] == doctest::Approx(-0.3e9).epsilon(1e-9));
        CHECK(f.quasienergies[1] == doctest::Approx(0.0).scale(1e9).epsilon(1e-9));
        CHECK(f.quasienergies[2] == doctest::Approx(0.3e9).epsilon(1e-9));
    }

    TEST_CASE("event enumeration small cases") {
        const oracle::EventMeans one = oracle::enumerate_events(0.1, 0.2, 1);
        CHECK(one.assignment == 0.0);
        CHECK(one.transition == doctest::Approx(0.1 * 0.8 + 0.2 * 0.9).epsilon(1e-14));
        const oracle::EventMeans none = oracle::enumerate_events(0.0, 0.0, 6);
        CHECK(none.assignment == 0.0);
        CHECK(none.transition == 0.0);
    }
}
