"""Scenario fusion tests: the relationship catalog, brackets, audit.

The two-label pair exercises one relationship at a time; the Bayesian
five-label pair and the complement-heavy four-label pair exercise the
whole catalog at once, including the model-aware class naming of the
results.
"""

import math

import pytest

from conftest import (
    bayesian_scenario,
    four_label_sources,
    negation_scenario,
    two_label_sources,
)

from fusionkit import (
    Annotation,
    EmptinessModel,
    Frame,
    RedistContext,
    Relationship,
    Reliability,
    UftOptions,
    UftScenario,
    World,
    conjunctive,
    disjunctive,
    exclusive_disjunctive,
    make_bba,
    mixed,
    redistribute,
    reroute_mass,
    scenario_from_json,
    uft_fuse,
    uft_fuse_dynamic,
)
from fusionkit.errors import InputError, NoOtherHypotheses


def fuse_pair(frame, s1, s2, model, rel, side=None, options=None):
    annotations = ()
    if rel is not None:
        annotations = (
            Annotation(
                (frame.atoms_of("A"), frame.atoms_of("B")),
                rel,
                side=frame.atoms_of(side) if side else None,
            ),
        )
    scenario = UftScenario(
        (s1, s2),
        model=model,
        reliability=Reliability.all_reliable(),
        annotations=annotations,
        options=options or UftOptions(),
    )
    return uft_fuse(scenario)


class TestRelationshipCatalog:
    """Each relationship routes the pair's intersection mass differently."""

    def setup_method(self):
        self.frame, self.s1, self.s2 = two_label_sources()
        self.free = EmptinessModel.free(self.frame)
        self.excl = EmptinessModel.from_exprs(self.frame, ("A&B",))

    def expect(self, result, a, b, union, inter=0.0):
        assert result.mass("A") == pytest.approx(a, abs=1e-3)
        assert result.mass("B") == pytest.approx(b, abs=1e-3)
        assert result.mass("A|B") == pytest.approx(union, abs=1e-3)
        assert result.mass("A&B") == pytest.approx(inter, abs=1e-3)
        assert result.m_uft.total() == pytest.approx(1.0)

    def test_consensus_keeps_the_intersection(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.free,
                      Relationship.CONSENSUS)
        self.expect(r, 0.24, 0.42, 0.06, 0.28)

    def test_no_interest_splits_proportionally(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.free,
                      Relationship.NEITHER_INTERSECTION_NOR_UNION_INTEREST)
        self.expect(r, 0.356, 0.584, 0.06)

    def test_optimistic_splits_proportionally(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.OPTIMISTIC_BOTH)
        self.expect(r, 0.356, 0.584, 0.06)

    def test_one_right_unknown_goes_to_union(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.ONE_RIGHT_UNKNOWN)
        self.expect(r, 0.24, 0.42, 0.34)

    def test_unannotated_empty_defaults_to_union(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl, None)
        self.expect(r, 0.24, 0.42, 0.34)

    def test_pessimistic_goes_to_union(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.PESSIMISTIC_BOTH)
        self.expect(r, 0.24, 0.42, 0.34)

    def test_very_pessimistic_closed_goes_to_ignorance(self):
        frame, s1, s2 = four_label_sources()
        model = EmptinessModel.from_exprs(frame, ("A&B",))
        r = fuse_pair(frame, s1, s2, model,
                      Relationship.VERY_PESSIMISTIC_CLOSED)
        assert r.mass("A") == pytest.approx(0.24)
        assert r.mass("B") == pytest.approx(0.42)
        assert r.mass("A|B") == pytest.approx(0.06)
        assert r.mass("A|B|C|D") == pytest.approx(0.28)

    def test_very_pessimistic_open_drops_the_mass(self):
        frame = Frame(("A", "B"), world=World.OPEN)
        _, s1, s2 = two_label_sources(frame)
        model = EmptinessModel.from_exprs(frame, ("A&B",))
        r = fuse_pair(frame, s1, s2, model,
                      Relationship.VERY_PESSIMISTIC_OPEN)
        assert r.mass("A") == pytest.approx(0.24)
        assert r.mass("B") == pytest.approx(0.42)
        assert r.mass("A|B") == pytest.approx(0.06)
        assert r.m_uft.mass(0) == pytest.approx(0.28)

    def test_right_is_sends_mass_to_that_side(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.RIGHT_IS, side="A")
        self.expect(r, 0.52, 0.42, 0.06)

    def test_neither_right_splits_over_the_others(self):
        frame, s1, s2 = four_label_sources()
        model = EmptinessModel.from_exprs(frame, ("A&B",))
        r = fuse_pair(frame, s1, s2, model, Relationship.NEITHER_RIGHT)
        assert r.mass("A") == pytest.approx(0.24)
        assert r.mass("B") == pytest.approx(0.42)
        assert r.mass("A|B") == pytest.approx(0.06)
        assert r.mass("C") == pytest.approx(0.14)
        assert r.mass("D") == pytest.approx(0.14)

    def test_neither_right_without_others_raises(self):
        with pytest.raises(NoOtherHypotheses):
            fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.NEITHER_RIGHT)

    def test_neither_right_no_others_drops_the_mass(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.NEITHER_RIGHT_NO_OTHERS)
        assert r.m_uft.mass(0) == pytest.approx(0.28)
        assert r.m_uft.total() == pytest.approx(1.0)

    def test_unknown_default_keeps_and_defers(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.free,
                      Relationship.UNKNOWN_DEFAULT)
        self.expect(r, 0.24, 0.42, 0.06, 0.28)
        ab = self.frame.atoms_of("A&B").bits
        assert r.deferred == ((ab, pytest.approx(0.28)),)

    def test_unknown_default_escalates_when_model_empty(self):
        r = fuse_pair(self.frame, self.s1, self.s2, self.excl,
                      Relationship.UNKNOWN_DEFAULT)
        self.expect(r, 0.24, 0.42, 0.34)
        assert r.deferred == ()


class TestReliabilityModes:
    def setup_method(self):
        self.frame, self.s1, self.s2 = two_label_sources()

    def run(self, reliability):
        return uft_fuse(
            UftScenario((self.s1, self.s2), model=None,
                        reliability=reliability)
        )

    def test_unreliable_sources_use_disjunctive(self):
        r = self.run(Reliability.some_unknown_unreliable())
        assert r.mass("A") == pytest.approx(0.08)
        assert r.mass("B") == pytest.approx(0.20)
        assert r.mass("A|B") == pytest.approx(0.72)

    def test_exactly_one_reliable_uses_exclusive_or(self):
        # The raw rule leaves the matching-operand mass on the empty
        # set; the scenario pipeline then routes each such term to the
        # union of its operands.
        r = self.run(Reliability.exactly_one_reliable_unknown())
        direct = exclusive_disjunctive(self.s1, self.s2)
        assert direct.mass(0) == pytest.approx(0.34)
        assert r.mass("A\\B") == pytest.approx(direct.mass("A\\B")) \
            == pytest.approx(0.22)
        assert r.mass("B\\A") == pytest.approx(0.16)
        assert r.mass("(A\\B)|(B\\A)") == pytest.approx(0.28)
        assert r.mass("A") == pytest.approx(0.08)
        assert r.mass("B") == pytest.approx(0.20)
        assert r.mass("A|B") == pytest.approx(0.06)

    def test_grouping_tree_matches_mixed_rule(self):
        frame = Frame(("A", "B", "C"))
        m1 = make_bba(frame, {"A": 0.6, "A|B": 0.4})
        m2 = make_bba(frame, {"B": 0.5, "A|B|C": 0.5})
        m3 = make_bba(frame, {"A|C": 0.7, "C": 0.3})
        tree = ("and", 0, ("or", 1, 2))
        r = uft_fuse(
            UftScenario((m1, m2, m3), model=None,
                        reliability=Reliability.mixed_grouping(tree))
        )
        direct = mixed((m1, m2, m3), tree)
        assert dict(r.m_uft.entries) == pytest.approx(dict(direct.entries))

    def test_discounts_then_conjunctive(self):
        frame, s1, s2 = four_label_sources()
        r = uft_fuse(
            UftScenario((s1, s2), model=None,
                        reliability=Reliability.discounts((1.0, 0.8)))
        )
        assert r.mass("A") == pytest.approx(0.232)
        assert r.mass("B") == pytest.approx(0.436)
        assert r.mass("A|B") == pytest.approx(0.108)
        assert r.mass("A&B") == pytest.approx(0.224)

    def test_discounts_length_checked(self):
        with pytest.raises(Exception):
            uft_fuse(
                UftScenario((self.s1, self.s2), model=None,
                            reliability=Reliability.discounts((1.0,)))
            )


class TestBayesianScenario:
    """Five hypotheses, two Bayesian sources, nine annotated pairs."""

    def setup_method(self):
        (self.frame, self.m1, self.m2,
         self.model, self.scenario) = bayesian_scenario()
        self.result = uft_fuse(self.scenario)

    def test_conjunctive_cells(self):
        m12, _ = conjunctive(self.m1, self.m2)
        expected = {
            "A": 0.10, "C": 0.03, "E": 0.02,
            "A&B": 0.04, "A&C": 0.17, "A&D": 0.20, "A&E": 0.09,
            "B&C": 0.06, "B&D": 0.08, "B&E": 0.02,
            "C&D": 0.04, "C&E": 0.07, "D&E": 0.08,
        }
        for cell, v in expected.items():
            assert m12.mass(cell) == pytest.approx(v, abs=1e-3), cell

    def test_fused_row(self):
        r = self.result
        assert r.mass("A") == pytest.approx(0.324, abs=1e-3)
        assert r.mass("B") == pytest.approx(0.040, abs=1e-3)
        assert r.mass("C") == pytest.approx(0.119, abs=1e-3)
        assert r.mass("D") == pytest.approx(0.0, abs=1e-3)
        assert r.mass("E") == pytest.approx(0.027, abs=1e-3)
        assert r.mass("A&B") == pytest.approx(0.04, abs=1e-3)
        assert r.mass("B&C") == pytest.approx(0.06, abs=1e-3)
        assert r.mass("A|D") == pytest.approx(0.20, abs=1e-3)
        assert r.mass("B|D") == pytest.approx(0.08, abs=1e-3)
        assert r.mass("C|D") == pytest.approx(0.04, abs=1e-3)
        assert r.mass("A|B|C|D|E") == pytest.approx(0.07, abs=1e-3)
        assert r.m_uft.total() == pytest.approx(1.0)

    def test_proportional_transfers_in_audit(self):
        ac = self.frame.atoms_of("A&C").bits
        a, c = self.frame.atoms_of("A").bits, self.frame.atoms_of("C").bits
        splits = sorted(
            (
                {bits: v for bits, v in rec.targets}
                for rec in self.result.audit
                if rec.result == ac
            ),
            key=lambda d: sum(d.values()),
        )
        assert len(splits) == 2
        assert splits[0][a] == pytest.approx(0.013, abs=1e-3)
        assert splits[0][c] == pytest.approx(0.007, abs=1e-3)
        assert splits[1][a] == pytest.approx(0.094, abs=1e-3)
        assert splits[1][c] == pytest.approx(0.056, abs=1e-3)

    def test_no_interest_transfer_in_audit(self):
        be = self.frame.atoms_of("B&E").bits
        b, e = self.frame.atoms_of("B").bits, self.frame.atoms_of("E").bits
        (rec,) = [r for r in self.result.audit if r.result == be]
        targets = {bits: v for bits, v in rec.targets}
        assert targets[b] == pytest.approx(0.013, abs=1e-3)
        assert targets[e] == pytest.approx(0.007, abs=1e-3)

    def test_deferred_records_unknown_pair(self):
        bc = self.frame.atoms_of("B&C").bits
        assert self.result.deferred == ((bc, pytest.approx(0.06)),)

    def test_lower_bracket(self):
        lo = self.result.m_lower_closed
        assert lo.mass(self.frame.universe_bits) == pytest.approx(0.85)
        assert lo.mass("A") == pytest.approx(0.10)
        assert lo.mass("C") == pytest.approx(0.03)
        assert lo.mass("E") == pytest.approx(0.02)
        assert self.result.m_lower_open.mass(0) == pytest.approx(0.85)

    def test_middle_bracket(self):
        mid = self.result.m_middle
        expected = {
            "A": 0.10, "C": 0.03, "E": 0.02,
            "A|B": 0.04, "A|C": 0.17, "A|D": 0.20, "A|E": 0.09,
            "B|C": 0.06, "B|D": 0.08, "B|E": 0.02,
            "C|D": 0.04, "C|E": 0.07, "D|E": 0.08,
        }
        for cell, v in expected.items():
            assert mid.mass(cell) == pytest.approx(v, abs=1e-3), cell
        assert mid.total() == pytest.approx(1.0)

    def test_upper_bracket(self):
        up = self.result.m_upper
        assert up.mass("A") == pytest.approx(0.400, abs=5e-3)
        assert up.mass("B") == pytest.approx(0.084, abs=5e-3)
        assert up.mass("C") == pytest.approx(0.178, abs=5e-3)
        assert up.mass("D") == pytest.approx(0.227, abs=5e-3)
        assert up.mass("E") == pytest.approx(0.111, abs=5e-3)
        assert up.total() == pytest.approx(1.0)

    def test_bracket_ordering_on_singleton_belief(self):
        r = self.result
        for label in self.frame.labels:
            lo = r.m_lower_closed.mass(label)
            hi = r.m_upper.mass(label)
            assert lo <= hi + 1e-12


class TestNegationScenario:
    """Complement and nested composites as focal elements."""

    def setup_method(self):
        (self.frame, self.m1, self.m2,
         self.model, self.scenario) = negation_scenario()
        self.result = uft_fuse(self.scenario)

    def test_conjunctive_cells(self):
        m12, _ = conjunctive(self.m1, self.m2)
        expected = {
            "A": 0.08, "B": 0.09, "~B": 0.02,
            "A&C": 0.17, "B|C": 0.03, "A&B": 0.14,
            "A&~B": 0.08, "A&(B|C)": 0.14, "B&A&C": 0.07,
            "~B&A&C": 0.04, "~B&(B|C)": 0.07,
        }
        for cell, v in expected.items():
            assert m12.mass(cell) == pytest.approx(v, abs=1e-3), cell
        # The contradictory product B against ~B lands in the ledger.
        _, ledger = conjunctive(self.m1, self.m2)
        assert ledger.total() == pytest.approx(0.07)

    def test_fused_row(self):
        r = self.result
        assert r.mass("A") == pytest.approx(0.277, abs=1e-3)
        assert r.mass("B") == pytest.approx(0.318, abs=1e-3)
        assert r.mass("D") == pytest.approx(0.035, abs=1e-3)
        assert r.mass("~B") == pytest.approx(0.020, abs=1e-3)
        assert r.mass("A|C") == pytest.approx(0.170, abs=1e-3)
        assert r.mass("A|B|C") == pytest.approx(0.140, abs=1e-3)
        assert r.mass("A|B|C|D") == pytest.approx(0.040, abs=1e-3)
        assert r.m_uft.total() == pytest.approx(1.0)

    def test_composite_classes_collapse(self):
        # B|C and B name the same class under this model, and the
        # consensus cell A&~B collapses onto A.
        assert self.model.name_of(self.frame.atoms_of("B|C")) == "B"
        assert self.model.reduce(self.frame.atoms_of("A&~B")) == \
            self.model.reduce(self.frame.atoms_of("A"))

    def test_upper_bracket_keeps_composite_focal_sets(self):
        up = self.result.m_upper
        assert up.mass("A") == pytest.approx(0.296, abs=1e-3)
        assert up.mass("B") == pytest.approx(0.230, abs=1e-3)
        assert up.mass("~B") == pytest.approx(0.126, abs=1e-3)
        assert up.mass("A&C") == pytest.approx(0.219, abs=1e-3)
        assert up.mass("B|C") == pytest.approx(0.129, abs=1e-3)
        assert up.total() == pytest.approx(1.0)

    def test_neither_right_excludes_covered_hypotheses(self):
        # The discarded sides jointly cover everything, yet A and D are
        # still available: neither side contains them on its own.
        nr = self.frame.atoms_of("~B&(B|C)").bits
        recs = [r for r in self.result.audit
                if r.relationship is Relationship.NEITHER_RIGHT]
        targets = {}
        for rec in recs:
            assert rec.result == nr
            for bits, v in rec.targets:
                targets[bits] = targets.get(bits, 0.0) + v
        assert targets == {
            self.frame.atoms_of("A").bits: pytest.approx(0.035),
            self.frame.atoms_of("D").bits: pytest.approx(0.035),
        }

    def test_brackets_total_one(self):
        r = self.result
        for b in (r.m_lower_closed, r.m_lower_open, r.m_middle, r.m_upper):
            assert b.total() == pytest.approx(1.0)


class TestRedistribute:
    def setup_method(self):
        self.frame, self.s1, self.s2 = two_label_sources()
        self.model = EmptinessModel.from_exprs(self.frame, ("A&B",))
        a, b = self.frame.atoms_of("A"), self.frame.atoms_of("B")
        self.term = (
            (a.bits, b.bits),
            a.bits & b.bits,
            0.08,
        )

    def ctx(self, annotation=None, **options):
        return RedistContext(
            frame=self.frame,
            model=self.model,
            sources=(self.s1, self.s2),
            annotation=annotation,
            options=UftOptions(**options),
        )

    def test_each_relationship_conserves_mass(self):
        a, b = self.frame.atoms_of("A"), self.frame.atoms_of("B")
        for rel in Relationship:
            side = a if rel is Relationship.RIGHT_IS else None
            ann = Annotation((a, b), rel, side=side)
            try:
                targets = redistribute(self.term, rel, self.ctx(ann))
            except NoOtherHypotheses:
                assert rel is Relationship.NEITHER_RIGHT
                continue
            assert math.fsum(v for _, v in targets) == pytest.approx(0.08)

    def test_right_is_requires_side(self):
        with pytest.raises(InputError):
            redistribute(self.term, Relationship.RIGHT_IS, self.ctx())

    def test_side_rejected_for_other_relationships(self):
        a, b = self.frame.atoms_of("A"), self.frame.atoms_of("B")
        with pytest.raises(InputError):
            Annotation((a, b), Relationship.CONSENSUS, side=a)

    def test_side_must_belong_to_pair(self):
        a, b = self.frame.atoms_of("A"), self.frame.atoms_of("B")
        with pytest.raises(InputError):
            Annotation((a, b), Relationship.RIGHT_IS,
                       side=self.frame.atoms_of("A|B"))

    def test_neither_right_proportional_option(self):
        frame, s1, s2 = four_label_sources()
        model = EmptinessModel.from_exprs(frame, ("A&B",))
        s1 = make_bba(frame, {"A": 0.2, "B": 0.5, "C": 0.2, "A|B": 0.1})
        s2 = make_bba(frame, {"A": 0.4, "B": 0.4, "D": 0.1, "A|B": 0.1})
        a, b = frame.atoms_of("A"), frame.atoms_of("B")
        ann = Annotation((a, b), Relationship.NEITHER_RIGHT)
        ctx = RedistContext(
            frame=frame, model=model, sources=(s1, s2), annotation=ann,
            options=UftOptions(neither_right_proportional=True),
        )
        term = ((a.bits, b.bits), a.bits & b.bits, 0.08)
        targets = dict(redistribute(term, Relationship.NEITHER_RIGHT, ctx))
        c, d = frame.atoms_of("C").bits, frame.atoms_of("D").bits
        assert targets[c] == pytest.approx(0.08 * 2 / 3)
        assert targets[d] == pytest.approx(0.08 * 1 / 3)


class TestDeferredWorkflow:
    def test_reroute_deferred_mass(self):
        frame, s1, s2 = two_label_sources()
        r = fuse_pair(frame, s1, s2, None, Relationship.UNKNOWN_DEFAULT)
        assert r.deferred
        updated = reroute_mass(r.m_uft, "A&B", [("A", 1.0), ("B", 1.0)])
        assert updated.mass("A&B") == 0.0
        assert updated.mass("A") == pytest.approx(0.24 + 0.14)
        assert updated.mass("B") == pytest.approx(0.42 + 0.14)
        assert updated.total() == pytest.approx(1.0)

    def test_reroute_missing_source_is_identity(self):
        frame, s1, _ = two_label_sources()
        assert reroute_mass(s1, "A&B", [("A", 1.0)]) == s1

    def test_reroute_needs_positive_weights(self):
        frame, s1, _ = two_label_sources()
        with pytest.raises(InputError):
            reroute_mass(s1, "A", [("B", 0.0)])


class TestDynamicFusion:
    def test_single_step_matches_static(self):
        frame, s1, s2 = two_label_sources()
        running = uft_fuse_dynamic(s1, [s2])
        static = uft_fuse(
            UftScenario((s1, s2), model=None,
                        reliability=Reliability.all_reliable())
        )
        assert running == static.m_uft

    def test_decay_discounts_the_running_state(self):
        frame, s1, s2 = two_label_sources()
        from fusionkit import discount

        running = uft_fuse_dynamic(s1, [s2], decay=0.8)
        static = uft_fuse(
            UftScenario((discount(s1, 0.8), s2), model=None,
                        reliability=Reliability.all_reliable())
        )
        assert running == static.m_uft

    def test_per_step_model_override(self):
        # The running state lives on model-reduced classes, so queries
        # go through the same reduction.
        frame, s1, s2 = two_label_sources()
        model = EmptinessModel.from_exprs(frame, ("A&B",))
        running = uft_fuse_dynamic(s1, [(s2, {"model": model})])
        assert running.mass("A&B") == 0.0
        union = model.reduce(frame.atoms_of("A|B"))
        assert running.mass(union) == pytest.approx(0.34)


class TestScenarioValidation:
    def test_duplicate_annotation_subjects_rejected(self):
        frame, s1, s2 = two_label_sources()
        a, b = frame.atoms_of("A"), frame.atoms_of("B")
        with pytest.raises(InputError):
            UftScenario(
                (s1, s2),
                model=None,
                annotations=(
                    Annotation((a, b), Relationship.CONSENSUS),
                    Annotation((b, a), Relationship.PESSIMISTIC_BOTH),
                ),
            )

    def test_needs_two_sources(self):
        frame, s1, _ = two_label_sources()
        with pytest.raises(InputError):
            UftScenario((s1,), model=None)


class TestJsonScenario:
    DOC = {
        "frame": ["A", "B"],
        "model": ["A&B"],
        "sources": [
            {"A": 0.2, "B": 0.5, "A|B": 0.3},
            {"A": 0.4, "B": 0.4, "A|B": 0.2},
        ],
        "annotations": [
            {"pair": ["A", "B"], "rel": "right_is", "side": "A"}
        ],
    }

    def test_scenario_round_trip(self):
        scenario = scenario_from_json(self.DOC)
        r = uft_fuse(scenario)
        assert r.mass("A") == pytest.approx(0.52)
        assert r.mass("B") == pytest.approx(0.42)
        assert r.mass("A|B") == pytest.approx(0.06)

    def test_result_json_uses_class_names(self):
        r = uft_fuse(scenario_from_json(self.DOC))
        doc = r.to_json()
        assert doc["m_uft"]["masses"] == {
            "A": pytest.approx(0.52),
            "B": pytest.approx(0.42),
            "A|B": pytest.approx(0.06),
        }
        assert len(doc["audit"]) == 9
        assert doc["deferred"] == []

    def test_grouping_tree_leaves_are_one_based_in_documents(self):
        doc = {
            "frame": ["A", "B"],
            "sources": [
                {"A": 0.2, "B": 0.5, "A|B": 0.3},
                {"A": 0.4, "B": 0.4, "A|B": 0.2},
            ],
            "reliability": {"kind": "mixed_grouping",
                            "tree": ["and", 1, 2]},
        }
        r = uft_fuse(scenario_from_json(doc))
        assert r.mass("A&B") == pytest.approx(0.28)
