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
#include <numbers>
#include <vector>

#include "hfreadout/dispersive.hpp"
#include "hfreadout/errors.hpp"
#include "hfreadout/purcell.hpp"

using namespace hfro;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

CircuitTargets device_targets(LineCoupling topology = LineCoupling::inductive) {
    CircuitTargets t;
    t.omega_q = 0.758e9;
    t.omega_r = 9.227e9;
    t.eta = 0.38;
    t.kappa = 1.8e6;
    t.topology = topology;
    return t;
}

CircuitParams simple_circuit(double c_c) {
    CircuitParams c;
    c.l_q = 20e-9;
    c.c_q = 100e-15;
    c.c_c = c_c;
    c.l_res = 2e-9;
    c.c_res = 100e-15;
    c.l_tr = 0.1e-9;
    return c;
}

double slope(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}
}  // namespace

TEST_SUITE("purcell") {
    TEST_CASE("decoupled circuit") {
        const CircuitParams c = simple_circuit(1e-22);
        const DerivedFrequencies f = derived_frequencies(c);
        CHECK(f.eta < 1e-6);
        CHECK(f.omega_r == doctest::Approx(1.0 / (kTwoPi * std::sqrt(c.l_res * c.c_res))).epsilon(1e-6));
        CHECK(f.omega_q == doctest::Approx(1.0 / (kTwoPi * std::sqrt(c.l_q * c.c_q))).epsilon(1e-6));
        CHECK(island_admittance(c, f.omega_q) < 1e-12 * island_admittance(simple_circuit(10e-15), f.omega_q));
    }

    TEST_CASE("symmetric circuit has eta one half") {
        CircuitParams c = simple_circuit(100e-15);
        CHECK(coupling_efficiency(c) == doctest::Approx(0.5).epsilon(1e-14));
        for (double c_c : {1e-15, 50e-15, 400e-15}) {
            c.c_c = c_c;
            CHECK(coupling_efficiency(c) < 1.0);
        }
        c.c_c = 5e-12;
        CHECK_THROWS_AS(derived_frequencies(c), InvalidParameter);
    }

    TEST_CASE("validation") {
        CircuitParams c = simple_circuit(10e-15);
        c.l_q = 0.0;
        CHECK_THROWS_AS(c.validate(), InvalidParameter);
        c = simple_circuit(10e-15);
        c.topology = LineCoupling::capacitive;
        CHECK_THROWS_AS(c.validate(), InvalidParameter);
        CHECK_THROWS_AS(island_impedance(simple_circuit(10e-15), 0.0), InvalidParameter);
    }

    TEST_CASE("linewidth scaling") {
        CircuitParams c = simple_circuit(10e-15);
        const double k1 = resonator_linewidth(c);
        c.l_tr *= 2.0;
        CHECK(resonator_linewidth(c) == doctest::Approx(4.0 * k1).epsilon(1e-12));
        c.l_tr = 1e-18;
        CHECK(resonator_linewidth(c) < 1e-12 * k1);
    }

    TEST_CASE("device lifetimes") {
        const CircuitParams c = synthesize_circuit(device_targets());
        const PurcellReport r = purcell_rate(c);
        CHECK(r.eta == doctest::Approx(0.38).epsilon(1e-9));
        CHECK(r.omega_r == doctest::Approx(9.227e9).epsilon(1e-9));
        CHECK(r.omega_q == doctest::Approx(0.758e9).epsilon(1e-9));
        CHECK(r.kappa == doctest::Approx(1.8e6).epsilon(1e-9));
        CHECK(r.t1_purcell() == doctest::Approx(11e-3).epsilon(0.25));
        CHECK(r.t1_purcell_rwa() == doctest::Approx(30e-6).epsilon(0.25));
        CHECK(r.kappa_q < r.kappa_q_rwa);
    }

    TEST_CASE("admittance reproduces the decay rate") {
        for (LineCoupling t : {LineCoupling::inductive, LineCoupling::capacitive}) {
            const CircuitParams c = synthesize_circuit(device_targets(t));
            const PurcellReport r = purcell_rate(c);
            const double gamma = island_admittance(c, r.omega_q) / (c.c_q + c.c_c) / kTwoPi;
            CHECK(gamma == doctest::Approx(r.kappa_q).epsilon(0.01));
            CHECK(rwa_admittance(c, r.omega_q) >= 100.0 * island_admittance(c, r.omega_q));
        }
    }

    TEST_CASE("admittance rises below the resonator") {
        for (LineCoupling t : {LineCoupling::inductive, LineCoupling::capacitive}) {
            const CircuitParams c = synthesize_circuit(device_targets(t));
            const DerivedFrequencies f = derived_frequencies(c);
            double last = 0.0;
            for (int k = 1; k < 100; ++k) {
                const double y = island_admittance(c, f.omega_r * k / 100.0);
                CHECK(y > last);
                last = y;
            }
        }
    }

    TEST_CASE("suppression exponents") {
        for (auto [t, expected] : {std::pair{LineCoupling::inductive, 4.0}, std::pair{LineCoupling::capacitive, 6.0}}) {
            std::vector<double> x, y;
            for (int k = 0; k <= 20; ++k) {
                const double ratio = std::exp(std::log(1.0 / 20.0) + k * std::log(4.0) / 20.0);
                CircuitTargets tg = device_targets(t);
                tg.omega_q = ratio * tg.omega_r;
                const PurcellReport r = purcell_rate(synthesize_circuit(tg));
                x.push_back(std::log(r.omega_q / r.omega_r));
                y.push_back(std::log(r.kappa_q / r.kappa));
            }
            CHECK(std::abs(slope(x, y) - expected) <= 0.01);
        }
    }

    TEST_CASE("eta and coupling forms agree") {
        for (LineCoupling t : {LineCoupling::inductive, LineCoupling::capacitive}) {
            for (double eta : {0.05, 0.38, 0.7}) {
                const double g = coupling_from_eta(eta, 0.758e9, 9.227e9);
                const double a = qubit_linewidth(t, eta, 0.758e9, 9.227e9, 1.8e6);
                const double b = qubit_linewidth_from_g(t, eta, g, 0.758e9, 9.227e9, 1.8e6);
                CHECK(std::abs(a / b - 1.0) < 1e-12);
            }
        }
    }

    TEST_CASE("main-text form of the inductive rate") {
        const double wq = 0.758e9, wr = 9.227e9, kappa = 1.8e6, eta = 0.38;
        const double g = coupling_from_eta(eta, wq, wr);
        const double main = kappa * 4.0 * std::pow(wq / wr, 3) * std::pow(g / wr, 2);
        CHECK(qubit_linewidth(LineCoupling::inductive, eta, wq, wr, kappa) * (1.0 - eta * eta) ==
              doctest::Approx(main).epsilon(1e-12));
    }

    TEST_CASE("lumped rate stays below rwa beyond twice the qubit frequency") {
        for (double ratio : {2.5, 5.0, 12.0, 20.0}) {
            for (LineCoupling t : {LineCoupling::inductive, LineCoupling::capacitive}) {
                CircuitTargets tg = device_targets(t);
                tg.omega_r = ratio * tg.omega_q;
                const PurcellReport r = purcell_rate(synthesize_circuit(tg));
                CHECK(r.kappa_q < r.kappa_q_rwa);
            }
        }
    }

    TEST_CASE("impedance validity window") {
        const CircuitParams c = synthesize_circuit(device_targets());
        const double fq = derived_frequencies(c).omega_q;
        CHECK(island_impedance_valid(c, fq));
        CHECK(island_impedance_valid(c, 1.05 * fq));
        CHECK_FALSE(island_impedance_valid(c, 1.5 * fq));
    }
}
