"""Acceptance gate: one test per exit criterion, each printing its
pass/fail line. `oco-lab verify` runs the same list."""

import pytest

from oco_lab.acceptance import CRITERIA


@pytest.mark.parametrize("index,name,fn", CRITERIA, ids=[f"{i:02d}-{n}" for i, n, _ in CRITERIA])
def test_criterion(index, name, fn, capsys):
    passed, detail = fn()
    with capsys.disabled():
        status = "PASS" if passed else "FAIL"
        print(f"\n[{status}] {index:2d} {name}: {detail}")
    assert passed, f"criterion {index} ({name}): {detail}"
