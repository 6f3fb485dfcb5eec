import dataclasses

import numpy as np
import pytest

from aoilab import analytics as an
from aoilab.errors import DomainError
from aoilab.model import INITIAL_STATE, NetworkParams
from aoilab.policies import PolicySpec, decision_epochs_property
from aoilab.rng import slot_draws
from aoilab.simulator import SimConfig, empirical_vs_analytical, run, step

BASE = NetworkParams(0.5, 0.2)
SPECS = [
    PolicySpec.plgfs(),
    PolicySpec.single(0),
    PolicySpec.single(4),
    PolicySpec.mixed(3, 0.3),
    PolicySpec.double(2, 3),
    PolicySpec.random(0.4),
]


def reference_run(params, spec, slots, seed):
    state, rows = INITIAL_STATE, []
    for i in range(1, slots + 1):
        state, rec = step(state, params, spec, *slot_draws(seed, i))
        d = rec.decision
        rows.append((d.delta_t, rec.delta_r, int(rec.action), int(rec.success), int(d.buffer_occupied)))
    return np.array(rows)


@pytest.mark.parametrize("spec", SPECS, ids=str)
@pytest.mark.parametrize("params", [BASE, NetworkParams(0.8, 0.2), NetworkParams(1.0, 0.0)])
def test_compiled_kernel_matches_python_step(spec, params):
    slots, seed = 3000, 11
    ref = reference_run(params, spec, slots, seed)
    s = run(SimConfig(params, spec, slots, seed, record_trace=True))
    t = s.trace
    got = np.column_stack([t.delta_t, t.delta_r, t.action, t.success, t.occupied])
    np.testing.assert_array_equal(got, ref)
    assert s.avg_aoi == ref[:, 1].sum() / slots
    assert s.avg_cost == ref[:, 2].sum() / slots
    assert s.throughput == ref[:, 3].sum() / slots


def test_same_seed_is_bitwise_reproducible():
    cfg = SimConfig(BASE, PolicySpec.mixed(3, 0.3), 50_000, 5, record_trace=True)
    a, b = run(cfg), run(cfg)
    assert (a.avg_aoi, a.avg_cost, a.aoi_stderr) == (b.avg_aoi, b.avg_cost, b.aoi_stderr)
    np.testing.assert_array_equal(a.empirical_pmf, b.empirical_pmf)
    np.testing.assert_array_equal(a.trace.delta_r, b.trace.delta_r)


def test_different_seeds_differ():
    a = run(SimConfig(BASE, PolicySpec.single(2), 10_000, 1))
    b = run(SimConfig(BASE, PolicySpec.single(2), 10_000, 2))
    assert a.avg_aoi != b.avg_aoi


def test_common_random_numbers_make_equivalent_policies_identical():
    def trace(spec):
        return run(SimConfig(BASE, spec, 20_000, 3, record_trace=True)).trace

    np.testing.assert_array_equal(trace(PolicySpec.random(1.0)).delta_r, trace(PolicySpec.plgfs()).delta_r)
    np.testing.assert_array_equal(trace(PolicySpec.mixed(3, 1.0)).delta_r, trace(PolicySpec.single(3)).delta_r)
    np.testing.assert_array_equal(trace(PolicySpec.mixed(3, 0.0)).delta_r, trace(PolicySpec.single(4)).delta_r)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_histogram_covers_every_slot(spec):
    s = run(SimConfig(BASE, spec, 20_000, 4, pmf_cap=8))
    assert s.empirical_pmf.sum() == s.slots
    assert s.pmf_cap == 8
    assert s.frequencies().sum() == pytest.approx(1.0)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_occupancy_follows_age_gap_after_first_delivery(spec):
    t = run(SimConfig(BASE, spec, 20_000, 8, record_trace=True)).trace
    first = int(np.flatnonzero(t.success)[0])
    gap = t.delta_r_prev - t.delta_t
    occupied = t.occupied.astype(bool)
    np.testing.assert_array_equal(occupied[first + 1:], gap[first + 1:] >= 1)
    # a transmission only ever happens from an occupied buffer
    assert not (t.action.astype(bool) & ~occupied).any()


@pytest.mark.parametrize("spec", [PolicySpec.plgfs(), PolicySpec.single(3), PolicySpec.single(7)], ids=str)
def test_single_thresholds_have_fixed_decision_epochs(spec):
    t = run(SimConfig(BASE, spec, 20_000, 9, record_trace=True)).trace
    assert decision_epochs_property(spec, t)


def test_double_threshold_abandons_stale_packets():
    # the freshness cap stops retransmitting a packet that has aged past delta1
    spec = PolicySpec.double(0, 2)
    t = run(SimConfig(BASE, spec, 20_000, 9, record_trace=True)).trace
    assert not decision_epochs_property(spec, t)


def test_empty_buffer_frequency_matches_closed_form_for_plgfs():
    p_empty = an.p_empty(BASE)
    for spec in (PolicySpec.plgfs(), PolicySpec.single(1)):
        s = run(SimConfig(BASE, spec, 400_000, 10))
        assert s.empty_buffer_freq == pytest.approx(p_empty, abs=0.005)


def test_throughput_is_cost_times_success_probability():
    s = run(SimConfig(BASE, PolicySpec.single(3), 400_000, 12))
    assert s.throughput == pytest.approx(s.avg_cost * 0.8, abs=0.004)


def test_stderr_scales_like_inverse_sqrt_slots():
    small = run(SimConfig(BASE, PolicySpec.single(3), 100_000, 13))
    large = run(SimConfig(BASE, PolicySpec.single(3), 1_600_000, 13))
    ratio = large.aoi_stderr / small.aoi_stderr
    assert 0.15 < ratio < 0.4  # ideal 0.25


def test_simulated_means_within_stderr_of_closed_forms():
    for d in (0, 2, 5):
        s = run(SimConfig(BASE, PolicySpec.single(d), 500_000, 14 + d))
        assert abs(s.avg_aoi - an.avg_aoi_closed(BASE, d)) < 4 * s.aoi_stderr
        assert abs(s.avg_cost - an.avg_cost_closed(BASE, d)) < 4 * s.cost_stderr


def test_boundary_randomized_policy_spends_budget():
    sel = an.select_threshold(BASE, 0.25)
    s = run(SimConfig(BASE, PolicySpec.mixed(sel.delta_low, sel.boundary_q), 1_000_000, 15))
    assert s.avg_cost == pytest.approx(0.25, rel=0.01)
    exact = an.boundary_threshold_metrics(BASE, sel.delta_low, sel.boundary_q)[0]
    assert abs(s.avg_aoi - exact) < 4 * s.aoi_stderr


@pytest.mark.parametrize("delta", [2, 5])
def test_empirical_pmf_close_to_analytical(delta):
    s = run(SimConfig(BASE, PolicySpec.single(delta), 100_000, 1))
    assert empirical_vs_analytical(s, an.aoi_pmf(BASE, delta)) < 0.02


def test_empirical_vs_analytical_rejects_inconsistent_histogram():
    s = run(SimConfig(BASE, PolicySpec.single(2), 1000, 1))
    counts = s.empirical_pmf.copy()
    counts[0] += 1
    bad = dataclasses.replace(s, empirical_pmf=counts)
    with pytest.raises(DomainError):
        empirical_vs_analytical(bad, an.aoi_pmf(BASE, 2))


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(BASE, PolicySpec.plgfs(), 0)
    with pytest.raises(DomainError):
        SimConfig(BASE, PolicySpec.plgfs(), 10, pmf_cap=0)
    assert SimConfig(BASE, PolicySpec.plgfs(), 10, seed=-1).seed == 2**64 - 1
    assert SimConfig(BASE, PolicySpec.single(5), 10).pmf_cap == 83  # ceil(10 * (5 + 2 + 1.25))


def test_first_slot_starts_from_fresh_receiver():
    t = run(SimConfig(BASE, PolicySpec.plgfs(), 5, 0, record_trace=True)).trace
    assert t.delta_r_prev[0] == 0
    assert t.delta_r[0] == 1


def test_trace_file_format(tmp_path):
    s = run(SimConfig(BASE, PolicySpec.single(2), 50, 3, record_trace=True))
    path = tmp_path / "trace.tsv"
    s.trace.write(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# slot\tdelta_t\tdelta_r\taction\tsuccess\toccupied"
    assert len(lines) == 51
    assert lines[1].split("\t")[0] == "1"
