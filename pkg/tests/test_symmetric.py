import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sampvar.process import FiniteJoint, GaussianStationary, IIDProcess, iid_to_finite_joint, scale_process
from sampvar.symmetric import (
    ExponentPattern,
    InsufficientSampleSizeError,
    SymmetricMomentTable,
    build_tables,
    enumerate_symmetric_moment,
    group_patterns,
    symmetric_moment,
)

from conftest import ar1, markov_chain, three_point


def test_group_sizes():
    assert [len(group_patterns(g)) for g in (1, 2, 3, 4)] == [2, 5, 11, 22]


def test_pattern_canonical_and_labels():
    p = ExponentPattern.parse("1.3.2.1")
    assert p.exponents == (3, 2, 1, 1)
    assert str(p) == "3.2.1.1"
    assert p.order == 7 and p.arity == 4
    assert p.symmetry == 2
    assert sorted(p.arrangements()) == sorted(set(itertools.permutations((3, 2, 1, 1))))


def test_symmetry_times_arrangements_is_factorial():
    for g in (1, 2, 3, 4):
        for p in group_patterns(g):
            assert p.symmetry * len(p.arrangements()) == math.factorial(p.arity)


class TestExamples:
    def test_iid_second_moment(self):
        for n in (1, 5, 30):
            assert symmetric_moment(IIDProcess.normal(), "2", n) == 1.0

    def test_constant(self):
        assert symmetric_moment(FiniteJoint.constant(1.7, 4), "1.1", 4) == pytest.approx(1.7**2, rel=1e-15)

    def test_ar1_pair(self):
        model = GaussianStationary(lambda h: 0.5 ** abs(h))
        expected = (4 * 0.5 + 2 * 0.25) / 6
        assert symmetric_moment(model, "1.1", 3) == pytest.approx(expected, rel=1e-15)
        assert enumerate_symmetric_moment(model, "1.1", 3) == pytest.approx(expected, rel=1e-15)

    def test_rademacher_squares(self):
        assert symmetric_moment(IIDProcess.rademacher(), "2.2", 4) == 1.0

    def test_iid_normal_group2(self):
        (_, t2) = build_tables(IIDProcess.normal(), 10, 2)
        assert [t2[k] for k in ("4", "2.2", "3.1", "2.1.1", "1.1.1.1")] == [3.0, 1.0, 0.0, 0.0, 0.0]

    def test_markov_tables(self):
        tables = build_tables(markov_chain(8), 8, 4)
        assert sum(len(t) for t in tables) == 40
        assert all(math.isfinite(v) for t in tables for v in t.entries.values())
        assert tables[0]["2"] == pytest.approx(1 / 3, abs=1e-12)

    def test_n7_group4_refused(self):
        with pytest.raises(InsufficientSampleSizeError):
            build_tables(IIDProcess.normal(), 7, 4)

    def test_arity_exceeds_n(self):
        with pytest.raises(InsufficientSampleSizeError, match="insufficient sample size"):
            symmetric_moment(IIDProcess.normal(), "1.1.1", 2)


@pytest.mark.parametrize(
    "label,model,n",
    [
        ("iid-three-point", three_point(), 8),
        ("iid-normal", IIDProcess.normal(1.2, 0.3), 9),
        ("markov", markov_chain(8), 8),
        ("markov-n10", markov_chain(10), 10),
        ("ar1", ar1(0.5), 10),
        ("gaussian-tabulated", GaussianStationary([1.0, -0.3, 0.2, 0.05]), 9),
    ],
)
def test_fast_path_matches_enumeration(label, model, n):
    for g in (1, 2, 3, 4):
        for p in group_patterns(g):
            fast = symmetric_moment(model, p, n)
            slow = symmetric_moment(model, p, n, method="enumerate")
            assert fast == pytest.approx(slow, rel=1e-12, abs=1e-12), (label, str(p))


def test_enumeration_independent_of_workers():
    model = ar1(0.3)
    p = ExponentPattern.parse("1.1.1.1.1.1.1.1")
    assert enumerate_symmetric_moment(model, p, 18, workers=2) == enumerate_symmetric_moment(model, p, 18)


def test_enumeration_cap():
    with pytest.raises(ValueError, match="refused"):
        enumerate_symmetric_moment(IIDProcess.normal(), "1.1.1.1.1.1", 65)


def test_wrong_method():
    with pytest.raises(ValueError):
        symmetric_moment(IIDProcess.normal(), "2", 3, method="stationary")


def test_exchangeable_permutation_invariance():
    fj = iid_to_finite_joint(IIDProcess.discrete([0.0, 1.0, 3.0], [0.2, 0.5, 0.3]), 6)
    perm = [3, 0, 5, 4, 1, 2]
    permuted = FiniteJoint(fj.atoms[:, perm], fj.probs)
    for p in group_patterns(3):
        assert symmetric_moment(permuted, p, 6) == pytest.approx(symmetric_moment(fj, p, 6), rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 5.0), st.sampled_from(["markov", "ar1", "iid"]))
def test_scaling_law(c, kind):
    model = {"markov": markov_chain(6), "ar1": ar1(0.4), "iid": three_point()}[kind]
    scaled = scale_process(model, c)
    for p in group_patterns(3):
        assert symmetric_moment(scaled, p, 6) == pytest.approx(
            c**p.order * symmetric_moment(model, p, 6), rel=1e-11, abs=1e-14
        )


def test_deterministic():
    model = ar1(0.7)
    a = [symmetric_moment(model, p, 20) for p in group_patterns(4)]
    b = [symmetric_moment(model, p, 20) for p in group_patterns(4)]
    assert a == b


class TestTable:
    def test_roundtrip(self):
        (t,) = build_tables(markov_chain(4), 4, 1)[:1]
        again = SymmetricMomentTable.from_dict(t.to_dict())
        assert again.entries == t.entries
        assert list(t.to_dict()["entries"]) == ["2", "1.1"]

    def test_rejects_incomplete(self):
        with pytest.raises(ValueError):
            SymmetricMomentTable(4, 1, {ExponentPattern.parse("2"): 1.0})

    def test_rejects_non_finite(self):
        entries = {p: 0.0 for p in group_patterns(1)}
        entries[ExponentPattern.parse("2")] = np.inf
        with pytest.raises(ValueError):
            SymmetricMomentTable(4, 1, entries)
