import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aoilab import analytics as an
from aoilab.errors import DomainError
from aoilab.model import NetworkParams
from oracles import chain_metrics, gaw_closed, plgfs_closed

BASE = NetworkParams(0.5, 0.2)
GRID = [NetworkParams(lam, eps) for lam in (0.2, 0.5, 0.8, 1.0) for eps in (0.0, 0.2, 0.5)]
GRID_IDS = [f"lam{p.lam}-eps{p.epsilon}" for p in GRID]


def fold(pmf, cap):
    return np.append(pmf.masses[: cap - 1], pmf.masses[cap - 1:].sum() + pmf.tail_mass)


# ---- hand-computed values at lambda=0.5, epsilon=0.2

def test_beta_values():
    # delta + 1/4 + (0.8*0.5)/(0.9*0.5) + 0.1**delta/0.9
    assert an.beta(BASE, 5) == pytest.approx(5 + 0.25 + 0.4 / 0.45 + 1e-5 / 0.9, abs=1e-12)
    assert an.beta(BASE, 0) == pytest.approx(2.25, abs=1e-12)
    assert an.beta(BASE, 1) == pytest.approx(2.25, abs=1e-12)


def test_first_mass_matches_hand_value():
    assert an.aoi_pmf(BASE, 5).masses[0] == pytest.approx(0.146606, abs=5e-7)


@pytest.mark.parametrize("delta", [2, 3, 4, 5, 8])
def test_closed_form_values_match_chain_oracle(delta):
    _, aoi, cost = chain_metrics(0.5, 0.2, delta)
    assert an.avg_aoi_closed(BASE, delta) == pytest.approx(aoi, abs=1e-9)
    assert an.avg_cost_closed(BASE, delta) == pytest.approx(cost, abs=1e-11)


def test_cost_table():
    assert an.avg_cost_closed(BASE, 3) == pytest.approx(0.3019324, abs=1e-7)
    assert an.avg_cost_closed(BASE, 4) == pytest.approx(0.2432380, abs=1e-7)
    assert an.avg_cost_closed(BASE, 5) == pytest.approx(0.2036195, abs=1e-7)
    assert an.avg_aoi_closed(BASE, 5) == pytest.approx(3.858855, abs=1e-6)


# ---- PMF structure

@pytest.mark.parametrize("p", GRID, ids=GRID_IDS)
@pytest.mark.parametrize("delta", [0, 1, 3, 7])
def test_pmf_normalized_and_nonnegative(p, delta):
    pmf = an.aoi_pmf(p, delta)
    assert (pmf.masses >= 0).all()
    assert pmf.masses.sum() + pmf.tail_mass == pytest.approx(1.0, abs=1e-10)
    assert pmf.tail_mass < 1e-12


@pytest.mark.parametrize("p", GRID, ids=GRID_IDS)
@pytest.mark.parametrize("delta", [0, 2, 6])
def test_pmf_matches_recurrence(p, delta):
    pmf = an.aoi_pmf(p, delta)
    rec = an.pmf_recurrence_oracle(p, delta, pmf.jmax)
    assert an.total_variation(fold(pmf, pmf.jmax), fold(rec, pmf.jmax)) < 1e-10


@pytest.mark.parametrize("lam,eps", [(0.5, 0.5), (0.8, 0.2), (0.3, 0.7), (1.0, 0.0)])
def test_singular_line_is_continuous(lam, eps):
    on = an.aoi_pmf(NetworkParams(lam, eps), 3, 80)
    near = an.aoi_pmf(NetworkParams(lam, eps + 1e-7), 3, 80)
    assert an.total_variation(on.masses, near.masses) < 1e-5
    assert an.avg_aoi_closed(NetworkParams(lam, eps), 3) == pytest.approx(
        an.avg_aoi_closed(NetworkParams(lam, eps + 1e-7), 3), rel=1e-5
    )


def test_pmf_mean_agrees_with_average_aoi():
    for delta in (0, 2, 5, 9):
        assert an.aoi_pmf(BASE, delta).mean() == pytest.approx(an.avg_aoi_closed(BASE, delta), abs=1e-9)


def test_pmf_rejects_bad_arguments():
    with pytest.raises(DomainError):
        an.aoi_pmf(BASE, -1)
    with pytest.raises(DomainError):
        an.aoi_pmf(BASE, 1.5)
    with pytest.raises(DomainError):
        an.aoi_pmf(BASE, 2, jmax=0)


def test_huge_threshold_does_not_overflow():
    aoi = an.avg_aoi_closed(BASE, 10**6)
    cost = an.avg_cost_closed(BASE, 10**6)
    assert math.isfinite(aoi) and aoi > 10**5 / 2
    assert 0 < cost < 1e-5


# ---- special cases

@pytest.mark.parametrize("p", GRID, ids=GRID_IDS)
def test_threshold_zero_is_plgfs(p):
    aoi, eta = plgfs_closed(p.lam, p.epsilon)
    assert an.avg_aoi_closed(p, 0) == pytest.approx(aoi, abs=1e-10)
    assert an.avg_cost_closed(p, 0) == pytest.approx(eta, abs=1e-10)
    pt = an.plgfs_metrics(p)
    assert (pt.avg_aoi, pt.avg_cost) == pytest.approx((aoi, eta), abs=1e-12)


@pytest.mark.parametrize("eps", [0.0, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("delta", [1, 2, 5, 20])
def test_generate_at_will_limit(eps, delta):
    aoi, eta = gaw_closed(eps, delta)
    p = NetworkParams(1.0, eps)
    assert an.avg_aoi_closed(p, delta) == pytest.approx(aoi, abs=1e-10)
    assert an.avg_cost_closed(p, delta) == pytest.approx(eta, abs=1e-10)
    pt = an.gaw_metrics(eps, delta)
    assert (pt.avg_aoi, pt.avg_cost) == pytest.approx((aoi, eta), abs=1e-12)


def test_generate_at_will_rejects_zero_threshold():
    with pytest.raises(DomainError):
        an.gaw_metrics(0.2, 0)


@pytest.mark.parametrize("p", GRID, ids=GRID_IDS)
def test_thresholds_zero_and_one_coincide(p):
    assert an.avg_aoi_closed(p, 0) == pytest.approx(an.avg_aoi_closed(p, 1), abs=1e-10)
    assert an.avg_cost_closed(p, 0) == pytest.approx(an.avg_cost_closed(p, 1), abs=1e-10)


# ---- properties

unit_open = st.floats(0.02, 0.98)


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(0.05, 1.0), eps=st.floats(0.0, 0.9), delta=st.integers(1, 40))
def test_monotone_in_threshold(lam, eps, delta):
    p = NetworkParams(lam, eps)
    assert an.avg_aoi_closed(p, delta + 1) > an.avg_aoi_closed(p, delta)
    assert an.avg_cost_closed(p, delta + 1) < an.avg_cost_closed(p, delta)


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(0.05, 1.0), eps=st.floats(0.0, 0.9), delta=st.integers(0, 30))
def test_closed_forms_never_beat_lower_bound(lam, eps, delta):
    p = NetworkParams(lam, eps)
    cost = an.avg_cost_closed(p, delta)
    assert an.avg_aoi_closed(p, delta) >= an.lower_bound(p, min(cost, 1.0)) - 1e-12
    assert 0 < cost <= 1.0 and cost * (1 - eps) <= lam + 1e-12


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.05, 1.0), eps=st.floats(0.0, 0.9), eta=unit_open)
def test_selected_mixture_spends_budget(lam, eps, eta):
    p = NetworkParams(lam, eps)
    sel = an.select_threshold(p, eta)
    if not sel.randomized:
        assert an.avg_cost_closed(p, sel.delta_high) <= eta + 1e-12
        return
    lo, hi = an.avg_cost_closed(p, sel.delta_low), an.avg_cost_closed(p, sel.delta_high)
    assert hi <= eta < lo
    assert sel.q * lo + (1 - sel.q) * hi == pytest.approx(eta, abs=1e-12)
    assert an.boundary_threshold_metrics(p, sel.delta_low, sel.boundary_q)[1] == pytest.approx(eta, abs=1e-9)


# ---- budgets and benchmarks

def test_lower_bound_values():
    assert an.lower_bound(BASE, 0.25) == pytest.approx(3.0, abs=1e-15)
    assert an.lower_bound(BASE, 1.0) == pytest.approx(1.5, abs=1e-15)


def test_random_benchmark_at_quarter_budget():
    gamma, pt = an.random_benchmark(BASE, 0.25)
    assert gamma == pytest.approx(0.3125, abs=1e-15)
    assert pt.avg_aoi == pytest.approx(5.0, abs=1e-12)
    assert pt.avg_cost == pytest.approx(0.25, abs=1e-12)


def test_random_benchmark_saturates_at_plgfs():
    gamma, pt = an.random_benchmark(BASE, 0.9)
    assert gamma == 1.0
    assert pt.avg_aoi == pytest.approx(2.25, abs=1e-12)


def test_deterministic_threshold_is_smallest_feasible():
    assert an.deterministic_threshold(BASE, 0.25) == 4
    assert an.deterministic_threshold(BASE, 0.6) == 0
    for eta in np.linspace(0.05, 0.55, 26):
        d = an.deterministic_threshold(BASE, eta)
        assert an.avg_cost_closed(BASE, d) <= eta
        assert d <= 1 or an.avg_cost_closed(BASE, d - 1) > eta


def test_select_threshold_quarter_budget():
    sel = an.select_threshold(BASE, 0.25)
    assert (sel.delta_low, sel.delta_high) == (3, 4)
    assert sel.q == pytest.approx((0.25 - 0.2432380) / (0.3019324 - 0.2432380), abs=1e-6)
    assert sel.q == pytest.approx(0.1152072, abs=1e-7)


def test_select_threshold_unconstrained():
    sel = an.select_threshold(BASE, 0.6)
    assert not sel.randomized and sel.delta_high == 0


@pytest.mark.parametrize("q", [0.0, 0.0622687, 0.4, 1.0])
@pytest.mark.parametrize("delta", [0, 1, 3])
def test_boundary_policy_matches_chain_oracle(q, delta):
    pmf, aoi, cost = chain_metrics(0.5, 0.2, delta, q=q)
    got = an.boundary_threshold_pmf(BASE, delta, q, len(pmf))
    assert an.total_variation(fold(got, len(pmf)), pmf) < 1e-9
    assert an.boundary_threshold_metrics(BASE, delta, q) == pytest.approx((aoi, cost), abs=1e-9)


def test_boundary_policy_endpoints_are_thresholds():
    for d in (2, 4):
        assert an.boundary_threshold_metrics(BASE, d, 1.0) == pytest.approx(
            (an.avg_aoi_closed(BASE, d), an.avg_cost_closed(BASE, d)), abs=1e-10)
        assert an.boundary_threshold_metrics(BASE, d, 0.0) == pytest.approx(
            (an.avg_aoi_closed(BASE, d + 1), an.avg_cost_closed(BASE, d + 1)), abs=1e-10)


def test_budget_validation():
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            an.lower_bound(BASE, bad)
        with pytest.raises(DomainError):
            an.select_threshold(BASE, bad)


def test_total_variation():
    assert an.total_variation([0.5, 0.5], [1.0, 0.0]) == 0.5
    assert an.total_variation([0.2, 0.8], [0.2, 0.8]) == 0.0
