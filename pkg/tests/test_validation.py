import json
import math

import numpy as np
import pytest

from sglab.validation import ValidationConfig

EXPECTED_CHECKS = {
    "free_width",
    "larmor_precession",
    "decoupled_l2_raw",
    "decoupled_l2_aligned",
    "momentum_up",
    "momentum_down",
    "population_freeze",
    "norm_drift",
    "dt_convergence",
    "decoupling_trend",
    "grid_overlap_bound",
    "longitudinal_invariance",
}


def test_default_config_study_points():
    cfg = ValidationConfig()
    assert cfg.nx == 256 and cfg.nz == 256
    assert cfg.raw_params.tau == 1.0
    assert cfg.aligned_params.tau == 2.0
    assert cfg.trend_ratios == (0.1, 0.03, 0.01)


def test_battery_passes(validation_report):
    by_name = {c.name: c for c in validation_report.checks}
    assert set(by_name) == EXPECTED_CHECKS
    failed = [c.name for c in validation_report.checks if not c.passed]
    assert failed == []
    assert validation_report.all_passed


def test_battery_exactness_margins(validation_report):
    # the interesting checks do not just pass, they sit far under their
    # thresholds: the aligned distance is at the spatial floor and the
    # convergence ratio is essentially exactly four
    by_name = {c.name: c for c in validation_report.checks}
    assert by_name["decoupled_l2_aligned"].measured < 1e-10
    assert by_name["decoupled_l2_raw"].measured < 1e-5
    assert by_name["dt_convergence"].measured == pytest.approx(4.0, rel=1e-3)
    assert by_name["free_width"].measured < 1e-12
    assert by_name["larmor_precession"].measured < 1e-10


def test_battery_artifacts(validation_report):
    assert validation_report.error_map is not None
    assert validation_report.error_map.shape == (256, 256)
    assert np.all(np.isfinite(validation_report.error_map))
    x0, x1, z0, z1 = validation_report.error_extent
    assert x0 < 0 < x1 and z0 < 0 < z1

    assert len(validation_report.trend) == 3
    dists = [d for _, d in validation_report.trend]
    assert dists[0] > dists[1] > dists[2] > 0

    e1, e2 = validation_report.convergence
    assert e1 > e2 > 0

    assert validation_report.exit_state is not None
    assert validation_report.exit_solver is not None
    assert validation_report.runtime_s > 0


def test_report_serializes(validation_report):
    payload = json.dumps(validation_report.as_dict())
    decoded = json.loads(payload)
    assert decoded["all_passed"] is True
    assert len(decoded["checks"]) == len(EXPECTED_CHECKS)
    for check in decoded["checks"]:
        assert isinstance(check["measured"], float)
        assert math.isfinite(check["measured"])
