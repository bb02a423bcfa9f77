# Copyright 2026 The kcsr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import kcsr


def kron_site(op, site, n):
    """op on `site` (bit j = site j, so site 0 is the rightmost factor)."""
    out = np.eye(1)
    for j in reversed(range(n)):
        out = np.kron(out, op if j == site else np.eye(2))
    return out


SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])
NUMBER = np.diag([0.0, 1.0])


def test_rates_and_channels():
    p = kcsr.ChainParams(n_sites=4, delta=1.0, j_int=1.0)
    assert p.channel_rate(2) / p.channel_rate(0) == pytest.approx(27.0, rel=1e-15)
    model = kcsr.make_kc_model(p)
    assert model.channel_xi == [0, 1, 2]
    assert model.dimension == 16


def test_hamiltonian_matches_kronecker_oracle():
    n = 4
    p = kcsr.ChainParams(n_sites=n, delta=1.3, j_int=0.4)
    numbers = [kron_site(NUMBER, j, n) for j in range(n)]
    h = sum(1.3 * numbers[j] + 0.4 * numbers[j] @ numbers[(j + 1) % n] for j in range(n))
    np.testing.assert_allclose(kcsr.hamiltonian(p), h, atol=1e-14)


def test_jump_operators_partition_collective_lowering():
    p = kcsr.ChainParams(n_sites=5)
    total = sum(kcsr.constrained_jump(p, xi) for xi in range(3))
    np.testing.assert_allclose(total, kcsr.collective_lowering(p), atol=0)
    for xi in range(3):
        assert kcsr.eigenoperator_residual(p, xi) < 1e-12


def test_two_atom_cascade():
    # Two sites with no interaction: the collective ladder 2 -> 1 -> 0 has
    # rates 2g and 2g, so n(t) = (2 + 2 g t) exp(-2 g t).
    p = kcsr.ChainParams(n_sites=2, delta=1.0, j_int=0.0)
    model = kcsr.make_dicke_model(p, 0.7)
    run = kcsr.evolve_master(model, t_max=2.0, sample_interval=0.25, rel_tol=1e-10, abs_tol=1e-12)
    g = 0.7
    expected = (2 + 2 * g * run["t"]) * np.exp(-2 * g * run["t"])
    np.testing.assert_allclose(run["n"], expected, atol=1e-8)
    assert np.max(run["trace_error"]) < 1e-9


def test_master_invariants_and_sum_rule():
    model = kcsr.make_kc_model(kcsr.ChainParams(n_sites=4))
    run = kcsr.evolve_master(model, t_max=3.0, sample_interval=0.1)
    assert run["I"].shape == (len(run["t"]), 3)
    np.testing.assert_allclose(run["nk"].sum(axis=1), run["n"], atol=1e-8)
    assert np.all(np.diff(run["n"]) <= 1e-12)
    rho = run["final_state"]
    assert abs(np.trace(rho) - 1) < 1e-9


def test_ensemble_is_deterministic_and_tracks_master():
    model = kcsr.make_kc_model(kcsr.ChainParams(n_sites=4))
    a = kcsr.run_ensemble(model, n_traj=200, t_max=1.0, record_cadence=0.25, master_seed=7, threads=1)
    b = kcsr.run_ensemble(model, n_traj=200, t_max=1.0, record_cadence=0.25, master_seed=7, threads=2)
    np.testing.assert_array_equal(a["mean"]["n"], b["mean"]["n"])
    run = kcsr.evolve_master(model, t_max=1.0, sample_interval=0.25)
    z = np.abs(a["mean"]["n"] - run["n"]) / np.maximum(a["std_error"]["n"], 1e-12)
    assert np.all(z[1:] < 4.0)


def test_entropy_of_product_and_bell_states():
    assert kcsr.entanglement_entropy(kcsr.fully_inverted(4)) == pytest.approx(0.0, abs=1e-12)
    bell = np.zeros(4, dtype=complex)
    bell[0b01] = bell[0b10] = 1 / math.sqrt(2)
    assert kcsr.entanglement_entropy(bell, [0]) == pytest.approx(math.log(2), rel=1e-12)


def test_scaling_fit_recovers_power_law():
    sizes = [4, 6, 8, 10]
    fit = kcsr.fit_scaling(sizes, [3.0 * s**2 for s in sizes], "power_law")
    assert fit["b"] == pytest.approx(2.0, rel=1e-12)
    assert fit["r_squared"] == pytest.approx(1.0, rel=1e-12)


def test_errors_map_to_exception_families():
    with pytest.raises(kcsr.ConfigError):
        kcsr.ChainParams(n_sites=0)
    with pytest.raises(kcsr.ConfigError):
        kcsr.parse_config("bogus_key: 1\n")
    assert issubclass(kcsr.ConfigError, kcsr.Error)


def test_config_round_trip():
    text = kcsr.parse_config("N: 5\nj_int: 0.3\n")
    assert kcsr.parse_config(text) == text


def test_verify_command(tmp_path):
    log = kcsr.run_command("verify", f"N: 4\nt_max: 1\noutput_dir: {tmp_path}\n")
    assert "[FAIL]" not in log
    assert "[PASS] trace conservation" in log
