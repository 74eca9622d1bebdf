import pytest

from wienerzp import verify


@pytest.mark.parametrize("name", sorted(verify.SUITES))
def test_every_suite_passes_small(name):
    res = verify.SUITES[name](trials=10, seed=11)
    assert res.ok, res.violations
    assert res.trials >= 10
    assert res.to_json()["suite"] == name


def test_suites_are_seeded():
    a = verify.suite_tk_lower(trials=20, seed=3).to_json()
    b = verify.suite_tk_lower(trials=20, seed=3).to_json()
    assert a == b
