"""Strict JSON configuration parsing and validation."""
from __future__ import annotations

import json

import pytest

from gazeforge.config import check_paths, read_config
from gazeforge.core import DistKind, MovementLabel
from gazeforge.errors import ParseError, ValidationError


def cfg_text(**over):
    doc = {"mode": "velocity", "seed": 42}
    doc.update(over)
    return json.dumps(doc)


def test_minimal_config_gets_defaults():
    cfg = read_config(cfg_text())
    assert cfg.mode == "velocity" and cfg.seed == 42
    assert cfg.base_rate_hz == 1000.0
    assert cfg.fixation.duration.min == 0.2
    assert cfg.mapping.params.pixels_per_degree == 30.0
    assert cfg.rate.rate.min == cfg.rate.rate.max == 1000.0


def test_full_velocity_config_parsed():
    cfg = read_config(cfg_text(
        base_rate_hz=500,
        sequence={
            "counts": {"fixation": 3, "saccade": 2},
            "constraints": [
                {"kind": "after_each", "first": "saccade", "second": "fixation"}
            ],
        },
        saccade={"peak_velocity": {"kind": "normal", "min": 250, "max": 450, "std": 40}},
        sampling={"rate": {"min": 50, "max": 70}},
        noise={"fraction": 0.05, "location_dist": "normal"},
    ))
    assert cfg.base_rate_hz == 500.0
    assert cfg.sequence.counts[MovementLabel.FIXATION] == 3
    assert cfg.saccade.peak_velocity.kind == DistKind.NORMAL
    assert cfg.noise.location_dist == DistKind.NORMAL
    assert cfg.rate.rate.max == 70.0


def test_invalid_json_is_parse_error_with_position():
    with pytest.raises(ParseError) as e:
        read_config("{\n  \"mode\": velocity\n}")
    assert "line 2" in str(e.value)


def test_unknown_top_level_key_suggests():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(saccede={}))
    assert "saccede" in str(e.value) and "saccade" in str(e.value)


def test_unknown_nested_key_suggests():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(fixation={"consistensy": {"min": 0, "max": 1}}))
    msg = str(e.value)
    assert "consistensy" in msg and "consistency" in msg


def test_min_above_max_names_dotted_path():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(fixation={"duration": {"min": 0.5, "max": 0.2}}))
    assert "fixation.duration" in str(e.value)


def test_unknown_mode_suggests():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(mode="velocty"))
    assert "velocity" in str(e.value)


def test_wrong_type_reports_path():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(seed="abc"))
    assert "seed" in str(e.value)


def test_unknown_dist_kind_suggests():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(saccade={"duration": {"kind": "nromal", "min": 0, "max": 1}}))
    assert "normal" in str(e.value)


def test_rate_above_base_rate_rejected():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(base_rate_hz=100, sampling={"rate": {"min": 50, "max": 200}}))
    assert "sampling.rate" in str(e.value)


def test_bad_constraint_kind():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(sequence={
            "counts": {"fixation": 1},
            "constraints": [{"kind": "near", "first": "fixation", "second": "saccade"}],
        }))
    assert "constraints[0]" in str(e.value)


def test_same_type_constraint_rejected():
    with pytest.raises(ValidationError):
        read_config(cfg_text(sequence={
            "counts": {"fixation": 2},
            "constraints": [
                {"kind": "before", "first": "fixation", "second": "fixation"}
            ],
        }))


def test_explicit_sequence_parsed():
    cfg = read_config(cfg_text(sequence={"explicit": ["fixation", "saccade", "fixation"]}))
    assert cfg.sequence.explicit == [
        MovementLabel.FIXATION, MovementLabel.SACCADE, MovementLabel.FIXATION
    ]


def test_bad_noise_mode_rejected():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(noise={"mode": "overwrite"}))
    assert "noise.mode" in str(e.value)


def test_bad_remap_mode_rejected():
    with pytest.raises(ValidationError) as e:
        read_config(cfg_text(mapping={"remap_mode": "different"}))
    assert "mapping.remap_mode" in str(e.value)


def test_check_paths_missing_required():
    cfg = read_config(cfg_text(mode="saliency"))
    with pytest.raises(ValidationError) as e:
        check_paths(cfg)
    assert "paths.stimulus" in str(e.value)


def test_check_paths_nonexistent_file(tmp_path):
    cfg = read_config(cfg_text(
        mode="evaluate", paths={"real_data": str(tmp_path / "nope.csv")}
    ))
    with pytest.raises(ValidationError) as e:
        check_paths(cfg)
    assert "not found" in str(e.value)


def test_check_paths_ok_when_file_exists(tmp_path):
    p = tmp_path / "real.csv"
    p.write_text("t_ms,velocity_deg_s,label\n1.0,2.0,FIX\n")
    cfg = read_config(cfg_text(mode="evaluate", paths={"real_data": str(p)}))
    check_paths(cfg)  # no error


def test_non_object_document_rejected():
    with pytest.raises(ValidationError):
        read_config("[1, 2, 3]")
