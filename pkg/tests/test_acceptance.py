"""Acceptance gate: every shipped guarantee at its stated tolerance.

Each criterion prints a PASS/FAIL line; the final test drives the
``verify-all`` CLI end to end and enforces the global runtime budget.
"""

import json
import time

import pytest

from warpstab.cli import main as cli_main
from warpstab.verify import (
    check_comparison,
    check_conformal,
    check_cutoff_decay,
    check_expression_suite,
    check_first_variation,
    check_flow,
    check_hyperbolic_example,
    check_exp_sphere_example,
    check_oracle_equivalence,
    check_spectrum,
    check_variation_oracle,
)

CRITERIA = [
    ("01 hyperbolic example reproduction", check_hyperbolic_example),
    ("02 bounded-weight counterexample reproduction", check_exp_sphere_example),
    ("03 curvature oracle equivalence", check_oracle_equivalence),
    ("04 second-variation oracle", check_variation_oracle),
    ("05 first variation", check_first_variation),
    ("06 stability spectrum", check_spectrum),
    ("07 normal-flow residual law", check_flow),
    ("08 cutoff energy decay", check_cutoff_decay),
    ("09 weighted comparison and growth", check_comparison),
    ("10 conformal annulus experiment", check_conformal),
    ("11 parser and derivative suite", check_expression_suite),
]


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(label, check):
    result = check()
    status = "PASS" if result.passed else "FAIL"
    print(f"\nACCEPTANCE {label}: {status} — {result.detail}")
    assert result.passed, f"{label}: {result.detail}"


def test_criterion_12_verify_all_cli(tmp_path, capsys):
    out = tmp_path / "verify.json"
    started = time.perf_counter()
    code = cli_main(["verify-all", "--preset", "paper-sec4", "--out", str(out)])
    elapsed = time.perf_counter() - started
    captured = capsys.readouterr().out
    print(f"\nACCEPTANCE 12 verify-all: exit {code} in {elapsed:.1f}s")
    assert code == 0
    assert elapsed < 120.0
    report = json.loads(out.read_text())
    assert report["results"]["all_passed"] is True
    assert len(report["results"]["checks"]) == 11
    assert captured.count("PASS") == 11
