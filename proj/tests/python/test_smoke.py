# Copyright 2026 The hfreadout Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import hfreadout as hf

E_C = 36e6
E_J = 2.2e9
OMEGA_R = 9.2233e9


def device():
    return hf.diagonalize(hf.TransmonParams(E_C, E_J, 0.25))


def test_spectrum_basics():
    s = device()
    assert s.levels >= 20
    assert abs(s.qubit_frequency() / 0.758e9 - 1.0) < 0.01
    assert np.all(np.diff(s.energies) >= 0.0)
    assert hf.reduce_offset_charge(1.3) == pytest.approx(0.3)


def test_device_shift():
    s = device()
    g = hf.coupling_from_eta(0.38, hf.linear_circuit_frequency(s.params), OMEGA_R)
    c = hf.ReadoutCoupling(g, OMEGA_R)
    assert hf.chi_full(s, c) == pytest.approx(-0.90e6, rel=0.05)
    assert hf.chi0_high_freq(s, c) == pytest.approx(4.7e6, rel=0.03)


def test_invalid_parameters_raise():
    with pytest.raises(ValueError):
        hf.TransmonParams(-1.0, E_J, 0.0)
    with pytest.raises(ValueError):
        hf.coupling_from_eta(1.5, 1e9, 1e10)


def test_purcell_device():
    c = hf.synthesize_circuit(0.758e9, 9.227e9, 0.38, 1.8e6)
    r = hf.purcell_rate(c)
    assert r.t1_purcell() == pytest.approx(11e-3, rel=0.25)
    assert r.t1_purcell_rwa() == pytest.approx(30e-6, rel=0.25)


def test_floquet_undriven():
    s = device()
    omega = 1.37 * s.qubit_frequency()
    q, modes, defect = hf.floquet_quasienergies(s, omega, 0.0, 8)
    assert defect < 1e-8
    assert modes.shape == (8, 8)
    for k in range(8):
        e = s.energy(k) - s.energy(0)
        d = min(abs(math.remainder(x - e, omega)) for x in q)
        assert d < 1e-6 * omega


def test_two_level_oracle():
    gap, theta = hf.two_level_oracle(2e6, 0.0)
    assert gap == pytest.approx(1e6)
    assert theta == pytest.approx(0.5)


def test_small_atlas():
    s = hf.diagonalize(hf.TransmonParams(E_C, 60 * E_C, 0.25))
    omegas, powers, maps = hf.hybridization_atlas(s, 11.0, 13.0, 5, 0.15, 3, levels=12)
    assert len(omegas) == 5 and len(powers) == 3
    for level in (0, 1):
        theta = maps[level]
        assert theta.shape == (3, 5)
        assert np.all(theta[0] < 1e-9)
        assert np.nanmax(theta) < 0.02


def test_qnd_tables():
    t = np.zeros((5, 5, 2))
    for k in range(5):
        t[k, k, 1 if k >= 2 else k] = 1.0
    assert hf.qnd_fidelity(t)["q"] == 1.0
    t[1, 1, 1] = 0.9
    t[1, 2, 1] = 0.1
    assert hf.readout_fidelity(t) - hf.qnd_fidelity(t)["q"] >= 0.04
    with pytest.raises(ValueError):
        hf.qnd_fidelity(np.zeros((2, 2)))


def test_synthetic_round_trip():
    a = hf.synthesize_and_classify(0.01, 0.002, 0.0, 20000, 3, workers=1)
    b = hf.synthesize_and_classify(0.01, 0.002, 0.0, 20000, 3, workers=2)
    assert a == b
    assert abs(a["eps_assign"] - 0.01) <= 3 * a["sigma_assign"]
    assert hf.classify_outcomes(0, [0, 1, 0, 0]) == (1, 0)
