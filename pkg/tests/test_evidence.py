"""Unit tests for the Dempster-Shafer algebra.

Expected values marked "oracle" were computed with the brute-force
reference in _oracle.py and frozen here.
"""

import math
import random

import pytest

from _oracle import combine_bruteforce, powerset
from avianwarn.evidence import (
    EvidenceError,
    Frame,
    FrameMismatchError,
    HypothesisSet,
    MassFunction,
    TotalConflictError,
    belief,
    combine,
    combine_all,
    make_frame,
    plausibility,
    rank,
    simple_support,
)

S6 = ["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"]


class TestMakeFrame:
    def test_other_appended_and_s6_is_proper_subset(self):
        frame = make_frame(S6, include_other=True)
        assert frame.labels == (*S6, "OTHER")
        assert len(frame) == 7
        s6 = frame.subset(S6)
        assert s6.issubset(frame.full_set())
        assert s6 != frame.full_set()

    def test_single_label_frame(self):
        frame = make_frame(["X"])
        assert frame.full_set() == frame.subset(["X"])
        assert len(frame.full_set()) == 1

    def test_duplicate_label_rejected(self):
        with pytest.raises(EvidenceError, match="duplicate"):
            make_frame(["A", "A"])

    def test_empty_label_list_rejected(self):
        with pytest.raises(EvidenceError):
            make_frame([])

    def test_blank_label_rejected(self):
        with pytest.raises(EvidenceError):
            make_frame(["A", "  "])

    def test_labels_trimmed(self):
        frame = make_frame([" A ", "B"])
        assert frame.labels == ("A", "B")

    def test_other_collides_with_explicit_label(self):
        with pytest.raises(EvidenceError, match="duplicate"):
            make_frame(["A", "OTHER"], include_other=True)

    def test_too_many_labels(self):
        with pytest.raises(EvidenceError, match="at most"):
            make_frame([f"L{i}" for i in range(31)])
        with pytest.raises(EvidenceError, match="at most"):
            make_frame([f"L{i}" for i in range(30)], include_other=True)
        assert len(make_frame([f"L{i}" for i in range(30)])) == 30


class TestHypothesisSet:
    @pytest.fixture()
    def frame(self):
        return make_frame(["A", "B", "C", "D"])

    def test_labels_follow_frame_order(self, frame):
        assert frame.subset(["C", "A"]).labels == ("A", "C")

    def test_set_operations(self, frame):
        ab = frame.subset(["A", "B"])
        bc = frame.subset(["B", "C"])
        assert (ab & bc) == frame.subset(["B"])
        assert (ab | bc) == frame.subset(["A", "B", "C"])
        assert ab.complement() == frame.subset(["C", "D"])
        assert ab.intersects(bc)
        assert not ab.intersects(frame.subset(["C", "D"]))

    def test_membership_and_sizes(self, frame):
        ab = frame.subset(["A", "B"])
        assert "A" in ab and "C" not in ab
        assert len(ab) == 2
        assert bool(frame.empty_set()) is False
        assert frame.full_set().is_full()

    def test_cross_frame_operations_rejected(self, frame):
        other = make_frame(["A", "B", "C"])
        with pytest.raises(FrameMismatchError):
            frame.subset(["A"]) & other.subset(["A"])

    def test_unknown_label_rejected(self, frame):
        with pytest.raises(EvidenceError, match="not in the frame"):
            frame.subset(["E"])

    def test_equal_frames_interoperate(self):
        f1 = make_frame(["A", "B"])
        f2 = make_frame(["A", "B"])
        assert f1.subset(["A"]) == f2.subset(["A"])
        assert (f1.subset(["A"]) & f2.subset(["A", "B"])) == f1.subset(["A"])


class TestMassFunction:
    @pytest.fixture()
    def frame(self):
        return make_frame(["A", "B", "C"])

    def test_empty_focal_set_rejected(self, frame):
        with pytest.raises(EvidenceError, match="empty set"):
            MassFunction(frame, {frame.empty_set(): 0.5, frame.full_set(): 0.5})

    def test_sum_must_be_one(self, frame):
        with pytest.raises(EvidenceError, match="sum"):
            MassFunction(frame, {frame.subset(["A"]): 0.5, frame.full_set(): 0.4})

    def test_negative_mass_rejected(self, frame):
        with pytest.raises(EvidenceError, match="negative"):
            MassFunction(frame, {frame.subset(["A"]): -0.1, frame.full_set(): 1.1})

    def test_tiny_masses_pruned(self, frame):
        m = MassFunction(frame, {frame.subset(["A"]): 1.0, frame.subset(["B"]): 1e-13})
        assert m.mass(["B"]) == 0.0
        assert len(m) == 1

    def test_mapping_interface(self, frame):
        m = MassFunction(frame, {frame.subset(["A"]): 0.25, frame.full_set(): 0.75})
        assert m[["A"]] == 0.25
        assert m.mass(["B"]) == 0.0
        with pytest.raises(KeyError):
            m[["B"]]
        assert set(m) == {frame.subset(["A"]), frame.full_set()}

    def test_vacuous(self, frame):
        m = MassFunction.vacuous(frame)
        assert m.mass(frame.full_set()) == 1.0
        assert len(m) == 1


class TestSimpleSupport:
    def test_depression_rule_masses(self):
        frame = make_frame(S6, include_other=True)
        m = simple_support(frame, S6, 0.7)
        assert m.mass(S6) == pytest.approx(0.7, abs=1e-12)
        assert m.mass(frame.full_set()) == pytest.approx(0.3, abs=1e-12)

    def test_singleton_support(self):
        frame = make_frame(S6, include_other=True)
        m = simple_support(frame, ["AI"], 0.9)
        assert m.mass(["AI"]) == pytest.approx(0.9, abs=1e-12)
        assert m.mass(frame.full_set()) == pytest.approx(0.1, abs=1e-12)

    def test_full_certainty_omits_ignorance(self):
        frame = make_frame(S6, include_other=True)
        m = simple_support(frame, ["AI"], 1.0)
        assert m.mass(["AI"]) == 1.0
        assert len(m) == 1

    @pytest.mark.parametrize("bpa", [0.0, -0.2, 1.0001])
    def test_bpa_out_of_range(self, bpa):
        frame = make_frame(["A", "B"])
        with pytest.raises(EvidenceError, match="bpa"):
            simple_support(frame, ["A"], bpa)

    def test_empty_focal_rejected(self):
        frame = make_frame(["A", "B"])
        with pytest.raises(EvidenceError, match="non-empty"):
            simple_support(frame, [], 0.5)


class TestCombine:
    def test_two_agreeing_sources(self, disease_frame, five_supports):
        outcome = combine(five_supports[0], five_supports[1])
        assert outcome.conflict == pytest.approx(0.0, abs=1e-12)
        assert outcome.result.mass(["AI"]) == pytest.approx(0.9, abs=1e-12)
        assert outcome.result.mass(S6) == pytest.approx(0.07, abs=1e-12)
        assert outcome.result.mass(disease_frame.full_set()) == pytest.approx(0.03, abs=1e-12)

    def test_high_conflict_step(self, disease_frame, five_supports):
        partial, _ = combine_all(five_supports[:3])
        outcome = combine(partial, five_supports[3])
        assert outcome.conflict == pytest.approx(0.8847, abs=1e-12)
        expected = {
            ("SHS",): 0.13270,
            ("AI",): 0.78057,
            ("AI", "ND", "FC"): 0.07199,
            tuple(S6): 0.01032,
            disease_frame.full_set().labels: 0.00442,
        }
        for labels, value in expected.items():
            assert outcome.result.mass(labels) == pytest.approx(value, abs=5e-5)

    def test_vacuous_identity(self, disease_frame, five_supports):
        vacuous = MassFunction.vacuous(disease_frame)
        for m in five_supports:
            left = combine(m, vacuous)
            right = combine(vacuous, m)
            assert left.conflict == 0.0 and right.conflict == 0.0
            assert left.result.allclose(m, 1e-12)
            assert right.result.allclose(m, 1e-12)

    def test_total_conflict_raises(self):
        frame = make_frame(["X", "Y"])
        mx = simple_support(frame, ["X"], 1.0)
        my = simple_support(frame, ["Y"], 1.0)
        with pytest.raises(TotalConflictError):
            combine(mx, my)

    def test_frame_mismatch(self):
        m1 = simple_support(make_frame(["A", "B"]), ["A"], 0.5)
        m2 = simple_support(make_frame(["A", "C"]), ["A"], 0.5)
        with pytest.raises(FrameMismatchError):
            combine(m1, m2)

    def test_matches_bruteforce_on_random_pair(self):
        frame = make_frame(["A", "B", "C", "D"])
        rng = random.Random(20240817)
        m1 = _random_mass(frame, rng)
        m2 = _random_mass(frame, rng)
        expected, expected_k = combine_bruteforce(
            frame.labels, _as_plain(m1), _as_plain(m2)
        )
        outcome = combine(m1, m2)
        assert outcome.conflict == pytest.approx(expected_k, abs=1e-12)
        got = _as_plain(outcome.result)
        assert set(got) == set(expected)
        for key, value in expected.items():
            assert got[key] == pytest.approx(value, abs=1e-9)


class TestCombineAll:
    def test_five_bundled_supports_reach_reference_value(self, five_supports):
        final, trace = combine_all(five_supports)
        assert final.mass(["AI"]) == pytest.approx(0.587275693312, abs=1e-9)
        assert trace == pytest.approx([0.0, 0.0, 0.8847, 0.4683434518647014], abs=1e-9)

    def test_order_invariance_sampled(self, five_supports):
        rng = random.Random(7)
        reference, _ = combine_all(five_supports)
        for _ in range(10):
            shuffled = five_supports[:]
            rng.shuffle(shuffled)
            permuted, _ = combine_all(shuffled)
            assert permuted.allclose(reference, 1e-9)

    def test_single_input_returned_unchanged(self, five_supports):
        result, trace = combine_all([five_supports[0]])
        assert result is five_supports[0]
        assert trace == []

    def test_empty_input_rejected(self):
        with pytest.raises(EvidenceError):
            combine_all([])

    def test_failure_reports_step_index(self):
        frame = make_frame(["X", "Y"])
        masses = [
            simple_support(frame, ["X"], 0.5),
            simple_support(frame, ["X"], 1.0),
            simple_support(frame, ["Y"], 1.0),
        ]
        with pytest.raises(TotalConflictError) as excinfo:
            combine_all(masses)
        assert excinfo.value.step == 2


@pytest.fixture(scope="module")
def final_mass(five_supports):
    return combine_all(five_supports)[0]


class TestBeliefPlausibility:

    def test_singleton_belief_equals_mass(self, final_mass):
        assert belief(final_mass, ["AI"]) == pytest.approx(0.58725, abs=5e-5)
        assert belief(final_mass, ["AI"]) == pytest.approx(final_mass.mass(["AI"]), abs=1e-15)

    def test_belief_of_full_frame_is_one(self, final_mass, disease_frame):
        assert belief(final_mass, disease_frame.full_set()) == pytest.approx(1.0, abs=1e-9)
        assert belief(final_mass, disease_frame.empty_set()) == 0.0

    def test_belief_of_nd_shs_pair(self, final_mass):
        # oracle: m({ND}) + m({SHS}) + m({ND,SHS})
        assert belief(final_mass, ["ND", "SHS"]) == pytest.approx(
            0.3474714518760204, abs=1e-12
        )

    def test_plausibility_of_ai(self, final_mass):
        # oracle: m({AI}) + m({AI,ND,FC}) + m(S6) + m(Θ)
        assert plausibility(final_mass, ["AI"]) == pytest.approx(
            0.652528548123982, abs=1e-12
        )

    def test_plausibility_of_full_frame_is_one(self, final_mass, disease_frame):
        assert plausibility(final_mass, disease_frame.full_set()) == pytest.approx(1.0, abs=1e-9)

    def test_plausibility_only_through_ignorance(self):
        frame = make_frame(S6, include_other=True)
        m = simple_support(frame, ["AI"], 0.9)
        assert plausibility(m, ["ND"]) == pytest.approx(0.1, abs=1e-12)

    def test_frame_mismatch_rejected(self, final_mass):
        other = make_frame(["A"])
        with pytest.raises(FrameMismatchError):
            belief(final_mass, other.subset(["A"]))
        with pytest.raises(FrameMismatchError):
            plausibility(final_mass, other.subset(["A"]))

    def test_methods_delegate(self, final_mass):
        hset = final_mass.frame.subset(["AI"])
        assert final_mass.belief(hset) == belief(final_mass, hset)
        assert final_mass.plausibility(hset) == plausibility(final_mass, hset)


class TestRank:
    def test_reference_walkthrough_head(self, five_supports):
        final, _ = combine_all(five_supports)
        head_set, head_mass = rank(final)[0]
        assert head_set.labels == ("AI",)
        assert head_mass == pytest.approx(0.58725, abs=5e-5)

    def test_vacuous_ranks_theta(self, disease_frame):
        ranked = rank(MassFunction.vacuous(disease_frame))
        assert ranked == [(disease_frame.full_set(), 1.0)]

    def test_tie_broken_by_frame_order(self):
        frame = make_frame(["A", "B"])
        m = MassFunction(frame, {frame.subset(["A"]): 0.5, frame.subset(["B"]): 0.5})
        assert [h.labels for h, _ in rank(m)] == [("A",), ("B",)]

    def test_tie_broken_by_cardinality_first(self):
        frame = make_frame(["A", "B", "C"])
        m = MassFunction(frame, {frame.subset(["A", "B"]): 0.5, frame.subset(["C"]): 0.5})
        assert [h.labels for h, _ in rank(m)] == [("C",), ("A", "B")]

    def test_deterministic_across_calls(self, five_supports):
        final, _ = combine_all(five_supports)
        assert rank(final) == rank(final)


def _random_mass(frame, rng: random.Random) -> MassFunction:
    """A random valid mass function over `frame` (1-5 focal sets)."""
    n_subsets = (1 << len(frame)) - 1
    count = rng.randint(1, min(5, n_subsets))
    masks = rng.sample(range(1, n_subsets + 1), count)
    weights = [rng.random() + 1e-3 for _ in masks]
    total = sum(weights)
    return MassFunction(
        frame, {HypothesisSet(frame, m): w / total for m, w in zip(masks, weights)}
    )


def _as_plain(m: MassFunction) -> dict:
    return {frozenset(h.labels): v for h, v in m.items()}


def test_oracle_powerset_is_exhaustive():
    assert len(powerset(["a", "b", "c", "d"])) == 16
