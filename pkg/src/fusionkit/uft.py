"""Scenario-driven unified fusion.

A :class:`UftScenario` bundles the sources with everything known about
the problem: which intersections the emptiness model rules out, how the
sources' reliability should shape the combination step, and optional
per-pair relationship annotations saying where the mass landing on each
contested intersection must go.  :func:`uft_fuse` expands the
combination into individual product terms, routes every term through
its relationship, and returns the fused assignment together with
pessimism brackets and a complete transfer audit.

Routing policy for a term with operands (X from source 1, Y from
source 2, ...) and result R:

* an annotation is looked up by the canonical set its pair intersects
  to; union-style targets are built from the annotated pair, while
  proportional splits follow the term's own operands and their masses;
* unannotated terms keep their mass when R is not model-empty and fall
  back to the pessimistic union of the operands when it is.

The pessimism brackets ignore annotations and the model: every genuine
intersection term (result below all of its operands) is treated as
conflict and sent to total ignorance (closed-world floor), the empty
set (open-world floor), the union of its operands (middle), or split
back onto the operands proportionally to their masses (upper).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .algebra import AtomSet, EmptinessModel, Frame, World
from .errors import (
    BadGrouping,
    FrameMismatch,
    InputError,
    LengthMismatch,
    NoOtherHypotheses,
    SchemaError,
)
from .mass import Bba, discount, make_bba
from .rules import _count_leaves, _union_escalate, product_terms


class Relationship(Enum):
    """What is known about the pair behind a contested intersection."""

    CONSENSUS = "consensus"
    NEITHER_INTERSECTION_NOR_UNION_INTEREST = "neither_intersection_nor_union_interest"
    OPTIMISTIC_BOTH = "optimistic_both"
    ONE_RIGHT_UNKNOWN = "one_right_unknown"
    RIGHT_IS = "right_is"
    PESSIMISTIC_BOTH = "pessimistic_both"
    VERY_PESSIMISTIC_CLOSED = "very_pessimistic_closed"
    VERY_PESSIMISTIC_OPEN = "very_pessimistic_open"
    NEITHER_RIGHT = "neither_right"
    NEITHER_RIGHT_NO_OTHERS = "neither_right_no_others"
    UNKNOWN_DEFAULT = "unknown_default"


_PROPORTIONAL = (
    Relationship.NEITHER_INTERSECTION_NOR_UNION_INTEREST,
    Relationship.OPTIMISTIC_BOTH,
)


@dataclass(frozen=True)
class Annotation:
    """Relationship annotation for the intersection of a pair of sets."""

    pair: tuple[AtomSet, AtomSet]
    rel: Relationship
    side: AtomSet | None = None

    def __post_init__(self):
        x, y = self.pair
        if x.frame != y.frame:
            raise FrameMismatch("annotation pair spans two frames")
        if self.rel is Relationship.RIGHT_IS:
            if self.side is None:
                raise InputError("right_is needs a side")
            if self.side.bits not in (x.bits, y.bits):
                raise InputError("side must be one of the annotated pair")
        elif self.side is not None:
            raise InputError(f"{self.rel.value} does not take a side")

    @property
    def subject_bits(self) -> int:
        x, y = self.pair
        return x.bits & y.bits

    @property
    def union_bits(self) -> int:
        x, y = self.pair
        return x.bits | y.bits


class ReliabilityKind(Enum):
    ALL_RELIABLE = "all_reliable"
    SOME_UNKNOWN_UNRELIABLE = "some_unknown_unreliable"
    EXACTLY_ONE_RELIABLE_UNKNOWN = "exactly_one_reliable_unknown"
    MIXED_GROUPING = "mixed_grouping"
    DISCOUNTS = "discounts"


@dataclass(frozen=True)
class Reliability:
    """How much the sources are trusted, deciding the combination step.

    All reliable -> conjunctive; some sources of unknown/unreliable
    standing -> disjunctive; exactly one reliable but unknown which ->
    exclusive disjunctive; a grouping tree mixes and/or per subgroup;
    explicit discount factors shade each source toward ignorance and
    then combine conjunctively.
    """

    kind: ReliabilityKind = ReliabilityKind.ALL_RELIABLE
    grouping: tuple | None = None
    alphas: tuple[float, ...] | None = None

    @classmethod
    def all_reliable(cls):
        return cls(ReliabilityKind.ALL_RELIABLE)

    @classmethod
    def some_unknown_unreliable(cls):
        return cls(ReliabilityKind.SOME_UNKNOWN_UNRELIABLE)

    @classmethod
    def exactly_one_reliable_unknown(cls):
        return cls(ReliabilityKind.EXACTLY_ONE_RELIABLE_UNKNOWN)

    @classmethod
    def mixed_grouping(cls, tree):
        return cls(ReliabilityKind.MIXED_GROUPING, grouping=tree)

    @classmethod
    def discounts(cls, alphas):
        return cls(ReliabilityKind.DISCOUNTS, alphas=tuple(float(a) for a in alphas))


@dataclass(frozen=True)
class UftOptions:
    #: Split "neither right" mass proportionally to the other
    #: hypotheses' summed source masses instead of equally.
    neither_right_proportional: bool = False
    #: Report the middle bracket as the mean of the two extreme
    #: brackets instead of the union-transfer estimate.
    middle_from_average: bool = False


@dataclass(frozen=True)
class UftScenario:
    sources: tuple[Bba, ...]
    model: EmptinessModel | None = None
    reliability: Reliability = field(default_factory=Reliability.all_reliable)
    annotations: tuple[Annotation, ...] = ()
    options: UftOptions = field(default_factory=UftOptions)

    def __post_init__(self):
        if len(self.sources) < 2:
            raise InputError("a scenario needs at least two sources")
        frame = self.sources[0].frame
        for s in self.sources:
            if s.frame != frame:
                raise FrameMismatch("sources disagree on the frame")
        if self.model is not None and self.model.frame != frame:
            raise FrameMismatch("model belongs to a different frame")
        if self.reliability.kind is ReliabilityKind.DISCOUNTS:
            if len(self.reliability.alphas or ()) != len(self.sources):
                raise LengthMismatch("one discount factor per source required")
        seen: dict = {}
        for ann in self.annotations:
            if ann.pair[0].frame != frame:
                raise FrameMismatch("annotation belongs to a different frame")
            if ann.subject_bits in seen:
                raise InputError(
                    "two annotations target the same intersection "
                    f"({frame.name_of(ann.subject_bits)})"
                )
            seen[ann.subject_bits] = ann

    @property
    def frame(self) -> Frame:
        return self.sources[0].frame


@dataclass(frozen=True)
class TransferRecord:
    """Audit entry: one product term and where its mass went."""

    operands: tuple[int, ...]
    result: int
    mass: float
    relationship: Relationship | None  # None = kept without annotation
    targets: tuple[tuple[int, float], ...]

    def to_json(self, frame: Frame) -> dict:
        rel = self.relationship.value if self.relationship else "kept"
        return {
            "operands": [frame.name_of(b) for b in self.operands],
            "result": frame.name_of(self.result),
            "mass": self.mass,
            "relationship": rel,
            "targets": [[frame.name_of(b), v] for b, v in self.targets],
        }


@dataclass(frozen=True)
class UftResult:
    m_uft: Bba
    m_lower_closed: Bba
    m_lower_open: Bba
    m_middle: Bba
    m_upper: Bba
    audit: tuple[TransferRecord, ...]
    deferred: tuple[tuple[int, float], ...] = ()
    model: EmptinessModel | None = None

    def mass(self, key) -> float:
        """Fused mass of a set, looked up modulo the scenario model.

        The fused assignment lives on equivalence classes, so a query
        for any member of a class (say A when A and B are disjoint)
        returns the class mass.
        """
        frame = self.m_uft.frame
        a = frame.atoms_of(key) if not isinstance(key, int) else AtomSet(frame, key)
        bits = a.bits if isinstance(a, AtomSet) else a
        if self.model is not None:
            bits &= ~self.model.forced_empty_bits
        return self.m_uft.mass(bits)

    def _uft_masses_json(self) -> dict:
        b = self.m_uft
        if self.model is None:
            return b.to_json()
        doc = b.to_json()
        doc["masses"] = {self.model.name_of(bits): v for bits, v in b.entries}
        return doc

    def to_json(self) -> dict:
        frame = self.m_uft.frame
        return {
            "m_uft": self._uft_masses_json(),
            "m_lower_closed": self.m_lower_closed.to_json(),
            "m_lower_open": self.m_lower_open.to_json(),
            "m_middle": self.m_middle.to_json(),
            "m_upper": self.m_upper.to_json(),
            "audit": [t.to_json(frame) for t in self.audit],
            "deferred": [[frame.name_of(b), v] for b, v in self.deferred],
        }


# --- term expansion ----------------------------------------------------------


def _step_terms(scenario: UftScenario):
    """Expand the reliability-selected combination into product terms."""
    rel = scenario.reliability
    sources = scenario.sources
    if rel.kind is ReliabilityKind.DISCOUNTS:
        sources = tuple(discount(s, a) for s, a in zip(sources, rel.alphas))

    frame = scenario.frame
    if rel.kind is ReliabilityKind.MIXED_GROUPING:
        seen: set = set()
        _count_leaves(rel.grouping, seen, len(sources))
        if len(seen) != len(sources):
            raise BadGrouping("every source must appear exactly once")

        def result_bits(ops):
            def ev(tree):
                if isinstance(tree, int):
                    return ops[tree]
                _, l, r = tree
                return ev(l) & ev(r) if tree[0] == "and" else ev(l) | ev(r)

            return ev(rel.grouping)

    elif rel.kind is ReliabilityKind.SOME_UNKNOWN_UNRELIABLE:
        def result_bits(ops):
            bits = 0
            for b in ops:
                bits |= b
            return bits

    elif rel.kind is ReliabilityKind.EXACTLY_ONE_RELIABLE_UNKNOWN:
        def result_bits(ops):
            bits = 0
            for b in ops:
                bits ^= b
            return bits

    else:  # conjunctive step
        def result_bits(ops):
            bits = frame.universe_bits
            for b in ops:
                bits &= b
            return bits

    for ops, p in product_terms(sources):
        yield sources, ops, result_bits(ops), p


# --- redistribution ----------------------------------------------------------


@dataclass(frozen=True)
class RedistContext:
    """Everything :func:`redistribute` needs besides the term itself."""

    frame: Frame
    model: EmptinessModel
    sources: tuple[Bba, ...]
    annotation: Annotation | None = None
    options: UftOptions = field(default_factory=UftOptions)


def _proportional_split(ops, p, ctx: RedistContext):
    shares = [ctx.sources[i].mass(b) for i, b in enumerate(ops)]
    den = math.fsum(shares)
    if den == 0.0:
        bits = 0
        for b in ops:
            bits |= b
        return [(_union_escalate(ctx.frame, bits, ctx.model), p)]
    out = []
    left = p
    for i, b in enumerate(ops):
        x = left if i == len(ops) - 1 else shares[i] * p / den
        out.append((b, x))
        left -= x
    return out


def _other_singletons(ctx: RedistContext, sides):
    """Hypotheses not covered by either discarded side.

    Tested side by side rather than against the union: a hypothesis
    jointly covered by the two sides together still counts as other
    when neither side contains it on its own.
    """
    frame = ctx.frame
    out = []
    for lab in frame.labels:
        bits = frame.label_bits(lab)
        if all(bits & ~s for s in sides):
            out.append(bits)
    return out


def redistribute(term, rel: Relationship, ctx: RedistContext):
    """Route one product term (ops, result, mass); returns
    [(target bits, mass), ...] summing exactly to the term's mass."""
    ops, result, p = term
    bits_all = 0
    for b in ops:
        bits_all |= b
    ann = ctx.annotation
    union_bits = ann.union_bits if ann is not None else bits_all

    if rel is Relationship.CONSENSUS:
        return [(result, p)]
    if rel in _PROPORTIONAL:
        return _proportional_split(ops, p, ctx)
    if rel in (Relationship.ONE_RIGHT_UNKNOWN, Relationship.PESSIMISTIC_BOTH):
        return [(_union_escalate(ctx.frame, union_bits, ctx.model), p)]
    if rel is Relationship.RIGHT_IS:
        if ann is None or ann.side is None:
            raise InputError("right_is needs an annotated side")
        return [(ann.side.bits, p)]
    if rel is Relationship.VERY_PESSIMISTIC_CLOSED:
        return [(ctx.frame.universe_bits, p)]
    if rel is Relationship.VERY_PESSIMISTIC_OPEN:
        return [(0, p)]
    if rel is Relationship.NEITHER_RIGHT:
        sides = (
            tuple(a.bits for a in ann.pair) if ann is not None else tuple(ops)
        )
        targets = _other_singletons(ctx, sides)
        if not targets:
            raise NoOtherHypotheses(
                "no hypothesis outside "
                f"{ctx.frame.name_of(union_bits)} to receive the mass"
            )
        if ctx.options.neither_right_proportional:
            weights = [
                math.fsum(s.mass(t) for s in ctx.sources) for t in targets
            ]
            wsum = math.fsum(weights)
        else:
            wsum = 0.0
        if wsum == 0.0:
            weights = [1.0] * len(targets)
            wsum = float(len(targets))
        out, left = [], p
        for i, t in enumerate(targets):
            x = left if i == len(targets) - 1 else weights[i] * p / wsum
            out.append((t, x))
            left -= x
        return out
    if rel is Relationship.NEITHER_RIGHT_NO_OTHERS:
        return [(0, p)]
    if rel is Relationship.UNKNOWN_DEFAULT:
        if ctx.model.is_empty(AtomSet(ctx.frame, result)):
            return [(_union_escalate(ctx.frame, union_bits, ctx.model), p)]
        return [(result, p)]
    raise ValueError(f"unhandled relationship {rel!r}")


# --- the fusion itself -------------------------------------------------------


def uft_fuse(scenario: UftScenario) -> UftResult:
    frame = scenario.frame
    model = scenario.model or EmptinessModel.free(frame)
    ann_by_subject = {a.subject_bits: a for a in scenario.annotations}

    fused: dict = {}
    audit = []
    deferred: dict = {}
    lower_closed: dict = {}
    lower_open: dict = {}
    middle: dict = {}
    upper: dict = {}

    for sources, ops, result, p in _step_terms(scenario):
        ann = ann_by_subject.get(result)
        ctx = RedistContext(frame, model, sources, ann, scenario.options)
        if ann is not None:
            rel = ann.rel
        elif model.is_empty(AtomSet(frame, result)):
            rel = Relationship.PESSIMISTIC_BOTH
        else:
            rel = None

        if rel is None:
            targets = [(result, p)]
        else:
            targets = redistribute((ops, result, p), rel, ctx)
            if rel is Relationship.UNKNOWN_DEFAULT and targets == [(result, p)]:
                deferred[result] = deferred.get(result, 0.0) + p
        for b, v in targets:
            fused[b] = fused.get(b, 0.0) + v
        audit.append(TransferRecord(ops, result, p, rel, tuple(targets)))

        # pessimism brackets: free-algebra view, annotations ignored
        and_bits = frame.universe_bits
        or_bits = 0
        for b in ops:
            and_bits &= b
            or_bits |= b
        if result == and_bits and result not in ops:
            full = frame.universe_bits
            lower_closed[full] = lower_closed.get(full, 0.0) + p
            lower_open[0] = lower_open.get(0, 0.0) + p
            middle[or_bits] = middle.get(or_bits, 0.0) + p
            for b, v in _proportional_split(
                ops, p, RedistContext(frame, EmptinessModel.free(frame), sources)
            ):
                upper[b] = upper.get(b, 0.0) + v
        else:
            for acc in (lower_closed, lower_open, middle, upper):
                acc[result] = acc.get(result, 0.0) + p

    reduced: dict = {}
    for b, v in fused.items():
        rb = b & ~model.forced_empty_bits
        reduced[rb] = reduced.get(rb, 0.0) + v

    m_lower_closed = Bba._from_masses(frame, lower_closed)
    m_upper = Bba._from_masses(frame, upper)
    if scenario.options.middle_from_average:
        avg: dict = {}
        for b, v in lower_closed.items():
            avg[b] = avg.get(b, 0.0) + v / 2
        for b, v in upper.items():
            avg[b] = avg.get(b, 0.0) + v / 2
        m_middle = Bba._from_masses(frame, avg)
    else:
        m_middle = Bba._from_masses(frame, middle)

    return UftResult(
        m_uft=Bba._from_masses(frame, reduced),
        m_lower_closed=m_lower_closed,
        m_lower_open=Bba._from_masses(frame, lower_open),
        m_middle=m_middle,
        m_upper=m_upper,
        audit=tuple(audit),
        deferred=tuple(sorted(deferred.items())),
        model=model,
    )


def reroute_mass(b: Bba, source_set, targets) -> Bba:
    """Move all mass from one set onto weighted targets.

    Supports the deferred-decision workflow: mass kept on an
    intersection under an unknown relationship can be re-routed once the
    model is settled.  ``targets`` is a list of (set, weight) pairs.
    """
    frame = b.frame
    src = frame.atoms_of(source_set)
    p = b.mass(src)
    if p == 0.0:
        return b
    weighted = [(frame.atoms_of(t).bits, w) for t, w in targets]
    wsum = math.fsum(w for _, w in weighted)
    if wsum <= 0:
        raise InputError("target weights must sum to a positive value")
    out = {bits: v for bits, v in b.entries if bits != src.bits}
    left = p
    for i, (bits, w) in enumerate(weighted):
        x = left if i == len(weighted) - 1 else w * p / wsum
        out[bits] = out.get(bits, 0.0) + x
        left -= x
    return Bba._from_masses(frame, out)


def uft_fuse_dynamic(initial: Bba, stream, *, model: EmptinessModel | None = None,
                     annotations: tuple = (), options: UftOptions | None = None,
                     decay: float = 1.0) -> Bba:
    """Fold a stream of reports into a running fused assignment.

    Before each step the running assignment is discounted by ``decay``
    (1.0 keeps it untouched).  Stream items are either bbas or
    ``(bba, updates)`` pairs where ``updates`` may carry per-step
    ``model``, ``annotations`` or ``options`` overrides.
    """
    running = initial
    options = options or UftOptions()
    for item in stream:
        if isinstance(item, tuple):
            nxt, updates = item
        else:
            nxt, updates = item, {}
        scen = UftScenario(
            sources=(discount(running, decay), nxt),
            model=updates.get("model", model),
            annotations=tuple(updates.get("annotations", annotations)),
            options=updates.get("options", options),
        )
        running = uft_fuse(scen).m_uft
    return running


# --- JSON loading ------------------------------------------------------------


def fusion_inputs_from_json(doc: dict):
    """Frame, sources and emptiness model from a scenario document.

    The document needs "frame" (labels) and "sources" (one object of
    expression -> mass each); "world" and "model" (list of expressions
    forced empty) are optional.
    """
    if not isinstance(doc, dict):
        raise SchemaError("/", "scenario must be an object")
    for key in ("frame", "sources"):
        if key not in doc:
            raise SchemaError(f"/{key}", "missing required field")
    try:
        world = World(doc.get("world", "closed"))
    except ValueError:
        raise SchemaError("/world", f"unknown world {doc.get('world')!r}") from None
    frame = Frame(tuple(doc["frame"]), world)
    sources = []
    for i, masses in enumerate(doc["sources"]):
        if not isinstance(masses, dict):
            raise SchemaError(f"/sources/{i}", "source must be an object of masses")
        try:
            sources.append(make_bba(frame, masses.items()))
        except InputError as exc:
            raise SchemaError(f"/sources/{i}", str(exc)) from exc
    model = EmptinessModel.from_exprs(frame, doc.get("model", []))
    return frame, tuple(sources), model


def scenario_from_json(doc: dict) -> UftScenario:
    """Build a scenario from its JSON document form."""
    frame, sources, model = fusion_inputs_from_json(doc)

    rdoc = doc.get("reliability", {"kind": "all_reliable"})
    try:
        kind = ReliabilityKind(rdoc.get("kind", "all_reliable"))
    except ValueError:
        raise SchemaError("/reliability/kind", f"unknown kind {rdoc.get('kind')!r}") from None
    grouping = None
    if kind is ReliabilityKind.MIXED_GROUPING:
        grouping = _tree_from_json(rdoc.get("tree"), "/reliability/tree")
    alphas = tuple(rdoc["alphas"]) if kind is ReliabilityKind.DISCOUNTS else None
    reliability = Reliability(kind, grouping=grouping, alphas=alphas)

    annotations = []
    for i, adoc in enumerate(doc.get("annotations", [])):
        ptr = f"/annotations/{i}"
        try:
            x, y = adoc["pair"]
            rel = Relationship(adoc["rel"])
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(ptr, f"bad annotation: {exc}") from None
        side = frame.atoms_of(adoc["side"]) if "side" in adoc else None
        annotations.append(
            Annotation((frame.atoms_of(x), frame.atoms_of(y)), rel, side)
        )

    odoc = doc.get("options", {})
    options = UftOptions(
        neither_right_proportional=bool(odoc.get("neither_right_proportional", False)),
        middle_from_average=bool(odoc.get("middle_from_average", False)),
    )
    return UftScenario(sources, model, reliability, tuple(annotations), options)


def _tree_from_json(node, ptr: str):
    """Grouping trees arrive as ["and"|"or", left, right] with 1-based
    leaves in documents; internally leaves are 0-based indices."""
    if isinstance(node, int):
        return node - 1
    if isinstance(node, list) and len(node) == 3 and node[0] in ("and", "or"):
        return (node[0], _tree_from_json(node[1], ptr), _tree_from_json(node[2], ptr))
    raise SchemaError(ptr, f"bad grouping node {node!r}")
