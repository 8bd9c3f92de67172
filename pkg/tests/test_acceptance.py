"""The ten acceptance criteria, exact arithmetic throughout."""
import json

import pytest

from balcover import acceptance


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    check = acceptance.CRITERIA[k - 1](0)
    with capsys.disabled():
        print(f" {'PASS' if check.passed else 'FAIL'} {k}. {check.name}", end=" ")
    failed = {key: d for key, d in check.details.items() if isinstance(d, dict) and not d.get("ok", True)}
    assert check.passed, json.dumps(failed, default=str, indent=1)


def test_quiver_map_coverings(capsys):
    check = acceptance.quiver_map_checks()
    with capsys.disabled():
        print(f" {'PASS' if check.passed else 'FAIL'} {check.name}", end=" ")
    assert check.passed, json.dumps(check.details, default=str)


def test_other_seed_agrees():
    assert all(c.passed for c in acceptance.run_all(seed=7))
