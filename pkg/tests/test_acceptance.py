"""Acceptance gate: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with `pytest -s` or on failure)
and asserts the corresponding check. The same checks back `sim verify`.
"""

import pytest

from yflash_tm.verification import (
    check_d2d_statistics,
    check_endurance,
    check_energy_table,
    check_oracle_agreement,
    check_property_suites,
    check_resolution_scaling,
    check_staircase_states,
    check_write_traffic,
    check_xor_learning,
)

CRITERIA = [
    ("1-staircase-states", check_staircase_states),
    ("2-resolution-scaling", check_resolution_scaling),
    ("3-energy-table", check_energy_table),
    ("4-endurance", check_endurance),
    ("5-d2d-statistics", check_d2d_statistics),
    ("6-xor-learning", check_xor_learning),
    ("7-write-traffic", check_write_traffic),
    ("8-oracle-agreement", check_oracle_agreement),
    ("9-property-suites", check_property_suites),
]


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(label, check):
    result = check()
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {label}: {result.detail}")
    assert result.passed, f"criterion {label}: {result.detail}"
