import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import quasikit as qk
from quasikit.sequences import _lower_hull_vertices

from conftest import random_logconvex, random_logsequence


def hull_oracle(logs):
    """Brute-force lower hull value at each n: infimum over all chords
    (k steps right, l steps left) of the interpolated ordinate at n."""
    n_len = len(logs)
    out = []
    for n in range(n_len):
        best = logs[n]
        for l in range(n + 1):
            for k in range(n_len - n):
                if k + l == 0:
                    continue
                value = (k * logs[n - l] + l * logs[n + k]) / (k + l)
                best = min(best, value)
        out.append(best)
    return out


class TestMakeSequence:
    def test_factorial(self):
        seq = qk.make_sequence(qk.SequenceSpec(family="factorial", horizon=4))
        assert seq.logs == pytest.approx([0.0, 0.0, math.log(2), math.log(6)], abs=1e-12)

    def test_power_nn(self):
        seq = qk.make_sequence(qk.SequenceSpec(family="power_nn", horizon=3))
        assert seq.logs == pytest.approx([0.0, 0.0, 2 * math.log(2)], abs=1e-12)

    def test_denjoy1_closed_form(self):
        seq = qk.make_sequence(
            qk.SequenceSpec(family="denjoy1", horizon=4, params={"C": 1.0})
        )
        assert seq.logs[3] == pytest.approx(3 * math.log(3 * math.log(3)), rel=1e-15)
        assert seq.filled == (0, 1)
        assert seq.logs[1] == 0.0

    def test_denjoy2_validity_padding(self):
        seq = qk.make_sequence(
            qk.SequenceSpec(family="denjoy2", horizon=6, params={"C": 2.0})
        )
        assert seq.filled == (0, 1, 2)
        expected = 4 * math.log(2.0 * 4 * math.log(4) * math.log(math.log(4)))
        assert seq.logs[4] == pytest.approx(expected, rel=1e-15)

    def test_gevrey_scales_factorial(self):
        seq = qk.make_sequence(
            qk.SequenceSpec(family="gevrey", horizon=6, params={"s": 2.0})
        )
        fact = qk.make_sequence(qk.SequenceSpec(family="factorial", horizon=6))
        assert np.allclose(seq.as_array(), 2.0 * fact.as_array(), atol=1e-12)

    def test_explicit_forces_normalization(self):
        seq = qk.make_sequence(
            qk.SequenceSpec(family="explicit", logs=(7.0, 1.0, 2.0))
        )
        assert seq.logs[0] == 0.0

    @pytest.mark.parametrize(
        "spec_kwargs",
        [
            dict(family="nope", horizon=5),
            dict(family="gevrey", horizon=5, params={"s": -1.0}),
            dict(family="gevrey", horizon=5),
            dict(family="denjoy1", horizon=5, params={"C": 0.0}),
            dict(family="factorial", horizon=2),
        ],
    )
    def test_invalid_specs_rejected(self, spec_kwargs):
        with pytest.raises(qk.ValidationError):
            qk.SequenceSpec(**spec_kwargs)

    def test_bad_logsequence_rejected(self):
        with pytest.raises(qk.ValidationError):
            qk.LogSequence(logs=(1.0, 2.0))
        with pytest.raises(qk.ValidationError):
            qk.LogSequence(logs=(0.0, math.inf))

    def test_spec_json_round_trip(self):
        spec = qk.SequenceSpec(family="denjoy1", horizon=10, params={"C": 3.0})
        again = qk.SequenceSpec.from_json(spec.to_json())
        assert again == spec
        explicit = qk.SequenceSpec.from_json({"family": "explicit", "logs": [0, 1, 2]})
        assert explicit.logs == (0.0, 1.0, 2.0)


class TestConvexRegularize:
    def test_nonconvex_example(self):
        reg = qk.convex_regularize(qk.LogSequence(logs=(0.0, 3.0, 1.0, 4.0)))
        assert reg.logs_c == pytest.approx([0.0, 0.5, 1.0, 4.0], abs=1e-12)
        assert reg.principal == (0, 2, 3)

    def test_convex_input_is_fixed_point(self, factorial_40):
        reg = qk.convex_regularize(factorial_40)
        assert reg.logs_c == factorial_40.logs
        assert reg.principal == tuple(range(40))

    def test_constant_sequence(self):
        reg = qk.convex_regularize(qk.LogSequence(logs=(0.0, 0.0, 0.0)))
        assert reg.logs_c == (0.0, 0.0, 0.0)
        assert reg.principal == (0, 1, 2)

    def test_two_point_degenerate(self):
        reg = qk.convex_regularize(qk.LogSequence(logs=(0.0, 5.0)))
        assert reg.logs_c == (0.0, 5.0)
        assert reg.principal == (0, 1)

    def test_endpoints_always_principal(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            seq = random_logsequence(rng, int(rng.integers(2, 30)))
            reg = qk.convex_regularize(seq)
            assert 0 in reg.principal and seq.length - 1 in reg.principal

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            seq = random_logsequence(rng, int(rng.integers(3, 41)))
            reg = qk.convex_regularize(seq)
            oracle = hull_oracle(seq.logs)
            assert np.allclose(reg.logs_c, oracle, atol=1e-9)

    def test_idempotent(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            seq = random_logsequence(rng, int(rng.integers(3, 41)))
            reg = qk.convex_regularize(seq)
            again = qk.convex_regularize(qk.LogSequence(logs=reg.logs_c))
            assert np.allclose(again.logs_c, reg.logs_c, atol=1e-12)

    def test_minorant_operator_monotone(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(3, 30))
            lo = random_logsequence(rng, n)
            bump = rng.uniform(0.0, 5.0, n)
            bump[0] = 0.0
            hi = qk.LogSequence(logs=tuple(lo.as_array() + bump))
            reg_lo = qk.convex_regularize(lo)
            reg_hi = qk.convex_regularize(hi)
            assert np.all(reg_lo.as_array() <= reg_hi.as_array() + 1e-12)

    @given(
        st.lists(st.floats(min_value=-50.0, max_value=50.0), min_size=2, max_size=24)
    )
    @settings(max_examples=150, deadline=None)
    def test_hull_invariants_hypothesis(self, tail):
        seq = qk.LogSequence(logs=(0.0, *tail))
        reg = qk.convex_regularize(seq)
        logs = seq.as_array()
        hull = reg.as_array()
        scale = max(1.0, float(np.max(np.abs(logs))))
        assert np.all(hull <= logs + 1e-9 * scale)
        if seq.length >= 3:
            assert qk.is_log_convex(qk.LogSequence(logs=(0.0, *hull[1:])), tol=1e-9 * scale)
        for idx in reg.principal:
            assert hull[idx] == pytest.approx(logs[idx], abs=1e-9 * scale)

    def test_vertex_scan_drops_collinear_points(self):
        # interior point on a straight segment: on the hull but not a vertex
        assert _lower_hull_vertices([0.0, 1.0, 2.0, 5.0]) == [0, 2, 3]


class TestDerivedSequences:
    def test_ratio_factorial(self, factorial_40):
        r = qk.ratio_sequence(factorial_40)
        expected = [-math.log(n + 1) for n in range(39)]
        assert np.allclose(r, expected, atol=1e-12)

    def test_ratio_constant(self):
        r = qk.ratio_sequence(qk.LogSequence(logs=(0.0, 0.0, 0.0)))
        assert np.allclose(r, 0.0)

    def test_ratio_direct_subtraction(self):
        r = qk.ratio_sequence(qk.LogSequence(logs=(0.0, 0.5, 1.0, 4.0)))
        assert np.allclose(r, [-0.5, -0.5, -3.0], atol=1e-12)

    def test_root_factorial(self, factorial_40):
        rho = qk.root_sequence(factorial_40)
        assert rho[1] == pytest.approx(math.log(2) / 2)

    def test_root_power_nn(self):
        seq = qk.make_sequence(qk.SequenceSpec(family="power_nn", horizon=12))
        rho = qk.root_sequence(seq)
        assert np.allclose(rho, [math.log(n) for n in range(1, 12)], atol=1e-12)

    def test_log_convex_monotonicity_both_parts(self):
        # successive quotients M_{n+1}/M_n nondecreasing, i.e. the ratio
        # values L_n - L_{n+1} nonincreasing; roots nondecreasing
        rng = np.random.default_rng(23)
        for _ in range(60):
            seq = random_logconvex(rng, int(rng.integers(3, 40)))
            r = qk.ratio_sequence(seq)
            rho = qk.root_sequence(seq)
            assert np.all(np.diff(r) <= 1e-12)
            assert np.all(np.diff(rho) >= -1e-12)

    def test_is_log_convex_examples(self, factorial_40):
        assert qk.is_log_convex(factorial_40)
        assert not qk.is_log_convex(qk.LogSequence(logs=(0.0, 3.0, 1.0, 4.0)))
        reg = qk.convex_regularize(qk.LogSequence(logs=(0.0, 3.0, 1.0, 4.0)))
        assert qk.is_log_convex(qk.LogSequence(logs=reg.logs_c))


def test_hull_oracle_with_negative_dips():
    # families like the double-log one dip below the normalization level
    rng = np.random.default_rng(29)
    for _ in range(40):
        n = int(rng.integers(3, 41))
        logs = rng.uniform(-10.0, 10.0, n)
        logs[0] = 0.0
        seq = qk.LogSequence(logs=tuple(float(v) for v in logs))
        reg = qk.convex_regularize(seq)
        assert np.allclose(reg.logs_c, hull_oracle(seq.logs), atol=1e-9)


def test_denjoy2_dip_becomes_principal_vertex():
    seq = qk.make_sequence(
        qk.SequenceSpec(family="denjoy2", horizon=30, params={"C": 1.0})
    )
    reg = qk.convex_regularize(seq)
    assert seq.logs[3] < 0  # the first valid entry dips below the padding
    assert 3 in reg.principal
    assert reg.logs_c[1] <= 0.0 and reg.logs_c[2] <= 0.0
