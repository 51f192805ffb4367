import pytest

from hypres.verify import DEFAULT_TOLS, SUITES, Check, SuiteReport, run_suite, run_suites


def test_check_exact_and_tolerance():
    assert Check("a", 0.0, 0, 3, exact=True).passed
    assert not Check("a", 1e-300, 0, 3, exact=True).passed
    assert Check("b", 1e-9, 1e-8, 1).passed
    assert not Check("b", 1e-7, 1e-8, 1).passed


def test_report_bookkeeping():
    rep = SuiteReport("x", 3)
    rep.add("one", 0, 0, 2, exact=True)
    rep.add("two", 0.5, 1.0, 5)
    assert rep.passed and rep.cases == 7
    d = rep.as_dict()
    assert d["suite"] == "x" and d["seed"] == 3 and len(d["checks"]) == 2
    assert rep.lines()[0].startswith("[x] seed=3 cases=7")
    rep.add("three", 2.0, 1.0, 1)
    assert not rep.passed
    assert any(line.strip().startswith("FAIL three") for line in rep.lines())


def test_suite_names():
    assert set(SUITES) >= {"lie", "tensor", "transport", "horocyclic", "poisson", "constants", "spectrum"}


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_lie_suite_exact():
    rep = run_suite("lie")
    assert rep.passed
    assert all(c.exact for c in rep.checks)


def test_deterministic_given_seed():
    a = run_suite("boundary", seed=5, samples=300, ns=(2,))
    b = run_suite("boundary", seed=5, samples=300, ns=(2,))
    assert [(c.name, c.max_dev, c.cases) for c in a.checks] == [(c.name, c.max_dev, c.cases) for c in b.checks]


def test_tolerance_override_applies():
    rep = run_suite("boundary", samples=200, ns=(1,), tols={"algebraic": 1e-30})
    assert not rep.passed
    tols = {c.tol for c in rep.checks if not c.exact}
    assert 1e-30 in tols and DEFAULT_TOLS["fd"] in tols


def test_all_override():
    rep = run_suite("boundary", samples=200, ns=(1,), tols={"all": 0.5})
    assert rep.passed and {c.tol for c in rep.checks if not c.exact} == {0.5}


def test_run_suites():
    reps = run_suites(["lie", "lie"], seed=1)
    assert [r.suite for r in reps] == ["lie", "lie"] and all(r.passed for r in reps)


def test_tensor_small():
    assert run_suite("tensor", m_max=2).passed
