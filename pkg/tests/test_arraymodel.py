"""Grid decoding, enumeration order, geometry, and codebook serialization."""

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beamrefine import (
    ArrayConfig,
    Codebook,
    InvalidCodewordError,
    SchemaError,
    SteeringVector,
    codebook_size,
    decode,
    element_positions,
    enumerate_codebook,
    flat_from_steering,
    steering_from_flat,
)


def test_array_config_validation():
    with pytest.raises(ValueError):
        ArrayConfig(L=0, N=1)
    with pytest.raises(ValueError):
        ArrayConfig(L=2, N=0)
    with pytest.raises(ValueError):
        ArrayConfig(L=2, N=2, K_amp=2)  # amplitude bits must stay below N
    with pytest.raises(ValueError):
        ArrayConfig(L=2, N=2, K_amp=-1)
    with pytest.raises(ValueError):
        ArrayConfig(L=2, N=2, spacing_wavelengths=0.0)
    with pytest.raises(ValueError):
        ArrayConfig(L=2, N=2, carrier_hz=0.0)


def test_array_config_derived_quantities():
    cfg = ArrayConfig(L=4, N=10, K_amp=2)
    assert cfg.n_elements == 16
    assert cfg.phase_levels == 256
    assert cfg.amp_levels == 4
    assert cfg.configs_per_antenna == 1024
    assert codebook_size(cfg) == 2 ** 160


def test_decode_full_turn_phase_is_unity():
    cfg = ArrayConfig(L=2, N=1)
    w = decode(SteeringVector((1, 1, 1, 1), (2, 2, 2, 2)), cfg)
    assert np.allclose(w, np.ones(4), atol=1e-12)


def test_decode_amplitude_step():
    cfg = ArrayConfig(L=1, N=3, K_amp=1)  # two amplitudes, four phases
    assert np.allclose(decode(SteeringVector((1,), (1,)), cfg), [-0.5j], atol=1e-12)
    assert np.allclose(decode(SteeringVector((2,), (4,)), cfg), [1.0], atol=1e-12)


def test_decode_quarter_turns():
    cfg = ArrayConfig(L=2, N=2)
    w = decode(SteeringVector((1, 1, 1, 1), (1, 3, 1, 3)), cfg)
    assert np.allclose(w, [-1j, 1j, -1j, 1j], atol=1e-12)


def test_codeword_validation_errors():
    cfg = ArrayConfig(L=2, N=2)
    with pytest.raises(InvalidCodewordError):
        decode(SteeringVector((1, 1), (1, 1)), cfg)  # wrong antenna count
    with pytest.raises(InvalidCodewordError):
        decode(SteeringVector((1,) * 4, (0, 1, 1, 1)), cfg)  # phase below grid
    with pytest.raises(InvalidCodewordError):
        decode(SteeringVector((1,) * 4, (5, 1, 1, 1)), cfg)  # phase above grid
    with pytest.raises(InvalidCodewordError):
        decode(SteeringVector((0, 1, 1, 1), (1,) * 4), cfg)  # amp below grid
    with pytest.raises(InvalidCodewordError):
        decode(SteeringVector((2, 1, 1, 1), (1,) * 4), cfg)  # amp above grid
    with pytest.raises(InvalidCodewordError):
        SteeringVector((1, 1), (1,))  # mismatched index arrays


def test_phase_grid_step_and_unit_amplitude():
    cfg = ArrayConfig(L=1, N=3)
    ws = [decode(SteeringVector((1,), (p,)), cfg)[0] for p in range(1, 9)]
    angles = np.unwrap([-np.angle(z) for z in ws])
    assert np.allclose(np.diff(angles), 2 * np.pi / 8, atol=1e-12)
    assert np.allclose([abs(z) for z in ws], 1.0, atol=1e-15)


def test_enumeration_count_order_and_uniqueness():
    cfg = ArrayConfig(L=1, N=1)
    assert len(list(enumerate_codebook(cfg))) == 2 == codebook_size(cfg)

    cfg = ArrayConfig(L=2, N=2)
    cb = list(enumerate_codebook(cfg))
    assert len(cb) == 256 == codebook_size(cfg)
    assert len(set(cb)) == 256
    for flat, sv in enumerate(cb):
        assert flat_from_steering(sv, cfg) == flat
        assert steering_from_flat(flat, cfg) == sv


def test_enumeration_is_lazy_for_huge_codebooks():
    cfg = ArrayConfig(L=4, N=10)
    first = list(itertools.islice(enumerate_codebook(cfg), 3))
    assert first[0] == SteeringVector((1,) * 16, (1,) * 16)
    assert first[1].phase_idx == (1,) * 15 + (2,)
    assert first[2].phase_idx == (1,) * 15 + (3,)


def test_single_antenna_decoded_constellation():
    cfg = ArrayConfig(L=1, N=2)
    vals = [decode(sv, cfg)[0] for sv in enumerate_codebook(cfg)]
    assert np.allclose(vals, [-1j, -1.0, 1j, 1.0], atol=1e-12)


def test_amp_major_per_antenna_order():
    cfg = ArrayConfig(L=1, N=2, K_amp=1)
    vals = [decode(sv, cfg)[0] for sv in enumerate_codebook(cfg)]
    assert np.allclose(vals, [-0.5, 0.5, -1.0, 1.0], atol=1e-12)


def test_flat_index_bounds():
    cfg = ArrayConfig(L=2, N=2)
    with pytest.raises(InvalidCodewordError):
        steering_from_flat(-1, cfg)
    with pytest.raises(InvalidCodewordError):
        steering_from_flat(256, cfg)


@given(st.integers(min_value=0, max_value=2 ** 16 - 1))
def test_flat_roundtrip(flat):
    cfg = ArrayConfig(L=2, N=4, K_amp=1)
    assert flat_from_steering(steering_from_flat(flat, cfg), cfg) == flat


def test_element_positions_small_arrays():
    cfg1 = ArrayConfig(L=1, N=1)
    assert np.array_equal(element_positions(cfg1), np.zeros((1, 3)))

    cfg2 = ArrayConfig(L=2, N=1)
    d = cfg2.pitch_m
    expect = np.array(
        [
            [-d / 2, -d / 2, 0.0],
            [d / 2, -d / 2, 0.0],
            [-d / 2, d / 2, 0.0],
            [d / 2, d / 2, 0.0],
        ]
    )
    assert np.allclose(element_positions(cfg2), expect, atol=1e-18)


def test_element_pitch_at_default_carrier():
    cfg = ArrayConfig(L=4, N=10)
    assert math.isclose(cfg.wavelength_m, 0.011943922629482072, rel_tol=1e-12)
    assert math.isclose(cfg.pitch_m, 0.005971961314741036, rel_tol=1e-12)
    pos = element_positions(cfg)
    span = pos[:, 0].max() - pos[:, 0].min()
    assert math.isclose(span, 3 * cfg.pitch_m, rel_tol=1e-12)
    assert np.allclose(pos.mean(axis=0), 0.0, atol=1e-18)


def test_codebook_roundtrip(tmp_path):
    cfg = ArrayConfig(L=2, N=3, K_amp=1)
    entries = tuple(steering_from_flat(f, cfg) for f in (0, 7, 255, 123))
    cb = Codebook(L=2, N=3, K_amp=1, entries=entries)
    path = tmp_path / "cb.json"
    cb.save(path)
    back = Codebook.load(path)
    assert back == cb
    assert back.entries == entries  # order preserved
    obj = json.loads(path.read_text())
    assert set(obj) == {"L", "N", "K_amp", "entries"}
    assert obj["entries"][0] == {"amp_idx": [1, 1, 1, 1], "phase_idx": [1, 1, 1, 1]}


def test_codebook_load_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        Codebook.load(path)
    path.write_text(json.dumps({"L": 2, "N": 2, "entries": []}))
    with pytest.raises(SchemaError):
        Codebook.load(path)  # K_amp missing
    path.write_text(
        json.dumps(
            {
                "L": 2,
                "N": 2,
                "K_amp": 0,
                "entries": [{"amp_idx": [1, 1, 1, 1], "phase_idx": [9, 1, 1, 1]}],
            }
        )
    )
    with pytest.raises(SchemaError):
        Codebook.load(path)  # phase index outside the grid


def test_codebook_matches_config():
    cb = Codebook(L=2, N=2, K_amp=0)
    assert cb.matches(ArrayConfig(L=2, N=2))
    assert not cb.matches(ArrayConfig(L=2, N=3))
    assert not cb.matches(ArrayConfig(L=2, N=2, K_amp=1))
    assert cb.config().n_elements == 4
