"""
Tests for the verification suites and the named quantities behind the
relation command.

Run:
    pytest tests/test_suites.py -v
"""

import os
import sys

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, REPO_ROOT)

from drinfeld.config import build_config
from drinfeld.errors import ConfigError
from drinfeld.report import report_to_json
from drinfeld.suites import (
    NAMED_VALUES,
    SUITE_NAMES,
    SUITES,
    carlitz_report,
    named_value,
    relation_search,
    run_suite,
    worker_map,
)

SMALL = {"prec": 20, "kmax": 8, "samples": 3, "t_order": 4}


def _cfg(**overrides):
    return build_config(flag_values=dict(SMALL, **overrides))


# ---------------------------------------------------------------------------
# Registry and threading
# ---------------------------------------------------------------------------

class TestRegistry:
    def test_every_name_registered(self):
        assert set(SUITES) == set(SUITE_NAMES)

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            run_suite("nope", _cfg())

    def test_worker_map_preserves_order(self):
        with worker_map(3) as mapper:
            assert list(mapper(lambda x: x * x, range(10))) == [x * x for x in range(10)]
        with worker_map(1) as mapper:
            assert mapper is map

    def test_independence_needs_odd_characteristic(self):
        with pytest.raises(ConfigError):
            run_suite("independence", _cfg(p=2, s=1, m=1))


# ---------------------------------------------------------------------------
# Small runs
# ---------------------------------------------------------------------------

class TestSmallRuns:
    def test_carlitz(self):
        report = carlitz_report(_cfg(prec=30, kmax=6))
        assert report.ok
        assert report.checks[0].detail["abs_exponent"] == 1.5

    def test_exp_suite_passes(self):
        report = run_suite("exp", _cfg())
        assert report.ok
        assert {c.check for c in report.checks} == {"exp", "log", "phi_mul"}
        assert len(report.checks) == 3 * SMALL["samples"]

    def test_report_independent_of_threads(self):
        one = report_to_json(run_suite("exp", _cfg(threads=1)))
        two = report_to_json(run_suite("exp", _cfg(threads=2)))
        assert one == two

    def test_quasi_suite_checks(self):
        report = run_suite("quasi", _cfg(samples=2))
        assert report.ok
        assert {"quasi:0", "quasi:1"} <= {c.check for c in report.checks}

    def test_omega_suite_checks(self):
        report = run_suite("omega", _cfg(samples=1))
        names = [c.check for c in report.checks]
        assert names[:2] == ["omega_twist", "omega_at_theta"]
        assert names[-1] == "omega_r:rejects_K_inf"
        assert report.checks[-1].passed

    def test_automorphy_suite_passes(self):
        report = run_suite("automorphy", _cfg(samples=2, gammas=2))
        assert report.ok
        names = [c.check for c in report.checks]
        assert names.count("automorphy") == 2 * 3
        assert "automorphy:k=2 control" in names
        assert names.count("cocycle") == 2

    def test_levelchange_suite_passes(self):
        report = run_suite("levelchange", _cfg(samples=2))
        assert report.ok
        assert {c.check for c in report.checks} == {"levelchange"}

    def test_expansion_suite_passes(self):
        report = run_suite("expansion", _cfg(samples=1))
        assert report.ok
        assert "expansion:u~!=0" in {c.check for c in report.checks}

    def test_legendre_suite_checks(self):
        report = run_suite("legendre", _cfg(prec=40))
        names = [c.check for c in report.checks]
        assert names == ["legendre:carlitz", "legendre:sqrt_theta", "legendre:control"]
        assert report.checks[-1].passed

    def test_cm_suite_checks(self):
        report = run_suite("cm", _cfg(prec=40))
        names = [c.check for c in report.checks]
        assert names[:3] == ["cm:E_v1/E_v2", "cm:E_v1/lambda", "cm:lambda/lambda"]
        assert names[-1] == "cm:stable"
        assert len(report.informational) == 1

    def test_exp_suite_rank_three_product(self):
        # sample 17 pairs a rank-3 module with deg(ab) = 6
        report = run_suite("exp", _cfg(samples=20))
        assert report.ok


# ---------------------------------------------------------------------------
# Characteristic two
# ---------------------------------------------------------------------------

class TestCharacteristicTwo:
    def setup_method(self):
        self.cfg = _cfg(p=2, m=2, prec=80, samples=1)

    def test_levelchange_goes_past_the_layer_budget(self):
        assert self.cfg.deg_budget == 5
        assert run_suite("levelchange", self.cfg).ok

    def test_expansion_goes_past_the_layer_budget(self):
        assert run_suite("expansion", self.cfg).ok


# ---------------------------------------------------------------------------
# Named quantities
# ---------------------------------------------------------------------------

class TestNamedValues:
    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            named_value("zeta_3", _cfg())

    def test_names_listed(self):
        assert "pi" in NAMED_VALUES
        assert "cm_ratio" in NAMED_VALUES

    def test_sqrt_theta_relation(self):
        _, cert = relation_search("sqrt_theta", _cfg(), d=2, h=1)
        assert cert.describe() == "X^2 + (2θ)"

    def test_theta_ratio_relation(self):
        _, cert = relation_search("theta_ratio", _cfg(), d=1, h=1)
        assert cert.describe() == "(θ)X + (2θ + 2)"
