"""The cross-module invariant suite that backs ``wq1d verify``, in its thinned form."""

import io

import pytest

from wq1d import beta_one, exp_power, gaussian, pareto, uniform, verify

GROUPS = {
    "distributions": verify.check_distributions,
    "quantizer": lambda: verify.check_quantizer(quick=True),
    "wasserstein": lambda: verify.check_wasserstein(quick=True),
    "rates": lambda: verify.check_rates(quick=True),
}


@pytest.mark.parametrize("group", list(GROUPS))
def test_invariant_group(group):
    outcomes = GROUPS[group]()
    assert outcomes
    failed = [o.line() for o in outcomes if not o.ok]
    assert not failed, "\n".join(failed)


# suite members with a density and a finite limiting constant: the integral
# of f^(1-rho) is finite for beta(2) when rho < 2 and for beta(4) when rho < 4/3
FINITE_CONSTANT = [(uniform(), 1.0), (uniform(), 1.5), (uniform(), 2.0), (uniform(), 3.0),
                   (beta_one(2), 1.0), (beta_one(2), 1.5), (beta_one(4), 1.0)]


@pytest.mark.parametrize("d,rho", FINITE_CONSTANT, ids=lambda v: getattr(v, "name", str(v)))
def test_constant_convergence(d, rho):
    outcome = verify.constant_convergence_case(d, rho)
    assert outcome.ok, outcome.line()


@pytest.mark.parametrize("d", [pareto(4), exp_power(1), gaussian(), beta_one(4)],
                         ids=lambda d: d.name)
def test_constant_case_skipped_when_infinite(d):
    assert verify.constant_convergence_case(d, 2.0) is None


def test_verify_main_reports_and_exit_code(monkeypatch):
    fake = [verify.Outcome("a", True), verify.Outcome("b", False, "why")]
    monkeypatch.setattr(verify, "run_all", lambda quick=True: iter(fake))
    buf = io.StringIO()
    assert verify.main(stream=buf) == 1
    assert buf.getvalue().splitlines() == ["PASS  a", "FAIL  b  why", "1 failed"]
    monkeypatch.setattr(verify, "run_all", lambda quick=True: iter(fake[:1]))
    assert verify.main(stream=io.StringIO()) == 0
