"""Bundled circuit model: text, file, and constructor all agree."""

from pathlib import Path

import numpy as np
import pytest

import stochrelax as sr


def test_circuit_model_shape(circuit):
    assert (circuit.n_p, circuit.n_w, circuit.n_x) == (2, 2, 2)
    assert (circuit.t0, circuit.tf) == (0.0, 5.0)
    np.testing.assert_allclose(circuit.pbox.lo, [0.1, 0.1])
    np.testing.assert_allclose(circuit.pbox.hi, [0.3, 0.3])
    np.testing.assert_allclose(circuit.wbox.lo, [0.7, 0.7])
    np.testing.assert_allclose(circuit.wbox.hi, [1.3, 1.3])
    for marg in circuit.dist.marginals:
        assert isinstance(marg, sr.TruncatedNormal)
        assert (marg.mu, marg.sigma) == (1.0, 0.1)
    assert not circuit.f.uses_t
    assert circuit.f.uses_x
    assert not circuit.x0.uses_x


def test_text_and_constructor_agree(circuit):
    reparsed = sr.parse_model(sr.CIRCUIT_MODEL_TEXT)
    assert reparsed.f.same_structure(circuit.f)
    assert reparsed.x0.same_structure(circuit.x0)
    assert reparsed.g.same_structure(circuit.g)


def test_write_and_load_round_trip(tmp_path, circuit):
    path = tmp_path / "circuit.model"
    sr.write_circuit_model(path)
    loaded = sr.load_model(path)
    assert loaded.name == "circuit"
    assert loaded.f.same_structure(circuit.f)
    assert loaded.tf == circuit.tf


def test_repository_copy_matches_text():
    repo = Path(__file__).resolve().parents[1] / "models" / "circuit.model"
    assert repo.read_text() == sr.CIRCUIT_MODEL_TEXT


def test_shortened_horizon():
    short = sr.circuit_model(tf=2.5)
    assert short.tf == 2.5
    b = sr.compute_state_bounds(short, config=sr.IntegratorConfig(bound_mesh=2000))
    assert b.tf == 2.5


def test_bad_tf():
    with pytest.raises(ValueError):
        sr.circuit_model(tf=0.0)
