"""Combination rules for crisp belief assignments.

Every intersection-style rule is built on one pipeline: the n-ary
conjunctive product is expanded term by term; terms landing on sets the
emptiness model declares empty are diverted into a
:class:`ConflictLedger` instead of the output.  Each named rule is then
just a disposal policy for the ledger:

* Dempster        -- renormalize the surviving mass (all-or-nothing conflict).
* Yager           -- pour the conflict onto total ignorance.
* Smets (TBM)     -- leave the conflict on the empty set (open world).
* Dubois-Prade /
  DSm hybrid      -- move each conflicting term to the union of its
                     operands, escalating to total ignorance when that
                     union is itself empty.
* PCR5            -- split each conflicting term between its two operand
                     sets in proportion to those operands' own masses.

Disjunctive, exclusive-disjunctive, mixed-grouping and averaging rules
do not produce conflict and bypass the ledger.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

from .algebra import EmptinessModel, Frame, World
from .errors import BadGrouping, FrameMismatch, TotalConflict
from .mass import Bba

_TOTAL_CONFLICT_TOL = 1e-12


class RuleId(Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"
    EXCLUSIVE_DISJUNCTIVE = "exclusive_disjunctive"
    MIXED = "mixed"
    DEMPSTER = "dempster"
    YAGER = "yager"
    SMETS_TBM = "smets_tbm"
    DUBOIS_PRADE = "dubois_prade"
    DSMH = "dsmh"
    MURPHY_AVERAGE = "murphy_average"
    PCR5 = "pcr5"


@dataclass(frozen=True)
class LedgerEntry:
    """One conjunctive product term whose result set is model-empty."""

    operands: tuple[int, ...]  # one focal-set bitmask per source
    result: int
    product: float


@dataclass(frozen=True)
class ConflictLedger:
    """Audit trail of conflicting product terms.

    The ledger plus the surviving output always account for the full raw
    conjunctive mass, so any disposal policy can be replayed from it.
    """

    frame: Frame
    entries: tuple[LedgerEntry, ...]

    def total(self) -> float:
        return math.fsum(e.product for e in self.entries)

    def to_json(self) -> list:
        name = self.frame.name_of
        return [
            {
                "operands": [name(b) for b in e.operands],
                "result": name(e.result),
                "mass": e.product,
            }
            for e in self.entries
        ]


def _check_sources(sources) -> Frame:
    if len(sources) < 2:
        raise ValueError("need at least two sources")
    frame = sources[0].frame
    for s in sources[1:]:
        if s.frame != frame:
            raise FrameMismatch("sources disagree on the frame")
    return frame


def product_terms(sources):
    """All cross products of focal sets: (operand bitmasks, product mass)."""
    focal_lists = [s.crisp_items() for s in sources]
    for combo in itertools.product(*focal_lists):
        p = 1.0
        for _, v in combo:
            p *= v
        if p == 0.0:
            continue
        yield tuple(b for b, _ in combo), p


def conjunctive(*sources, model: EmptinessModel | None = None):
    """N-ary conjunctive rule.

    Returns ``(bba, ledger)``: masses on model-empty intersections go to
    the ledger, everything else to the bba.  Under the free model the
    ledger only ever holds mass landing on the structurally empty set.
    """
    frame = _check_sources(sources)
    model = model or EmptinessModel.free(frame)
    out: dict = {}
    entries = []
    for ops, p in product_terms(sources):
        bits = frame.universe_bits
        for b in ops:
            bits &= b
        if bits & ~model.forced_empty_bits == 0:
            entries.append(LedgerEntry(ops, bits, p))
        else:
            out[bits] = out.get(bits, 0.0) + p
    return Bba._from_masses(frame, out), ConflictLedger(frame, tuple(entries))


def disjunctive(*sources) -> Bba:
    """N-ary disjunctive rule: products land on unions, no conflict."""
    frame = _check_sources(sources)
    out: dict = {}
    for ops, p in product_terms(sources):
        bits = 0
        for b in ops:
            bits |= b
        out[bits] = out.get(bits, 0.0) + p
    return Bba._from_masses(frame, out)


def exclusive_disjunctive(*sources) -> Bba:
    """Products land on symmetric differences ("exactly one of them").

    Identical focal pairs land on the empty set; that mass is reported
    on the empty set and left to the caller's world mode.  For more than
    two sources the symmetric difference folds pairwise (bitmask xor is
    associative, so the fold order is immaterial).
    """
    frame = _check_sources(sources)
    out: dict = {}
    for ops, p in product_terms(sources):
        bits = 0
        for b in ops:
            bits ^= b
        out[bits] = out.get(bits, 0.0) + p
    return Bba._from_masses(frame, out)


def _count_leaves(tree, seen: set, n: int):
    if isinstance(tree, int):
        if not 0 <= tree < n:
            raise BadGrouping(f"source index {tree} out of range")
        if tree in seen:
            raise BadGrouping(f"source index {tree} used twice")
        seen.add(tree)
        return
    if not (isinstance(tree, (list, tuple)) and len(tree) == 3 and tree[0] in ("and", "or")):
        raise BadGrouping(f"bad grouping node {tree!r}")
    _count_leaves(tree[1], seen, n)
    _count_leaves(tree[2], seen, n)


def mixed(sources, grouping) -> Bba:
    """Mixed conjunctive/disjunctive rule driven by a grouping tree.

    ``grouping`` is a binary tree of ``("and", left, right)`` /
    ``("or", left, right)`` nodes with 0-based source indices as leaves;
    every source must appear exactly once.  Masses are combined in the
    free algebra; a term landing on the structurally empty set stays
    there (with an or-node at the root this cannot happen unless a
    source already carries mass on the empty set).
    """
    frame = _check_sources(sources)
    seen: set = set()
    _count_leaves(grouping, seen, len(sources))
    if len(seen) != len(sources):
        raise BadGrouping("every source must appear exactly once in the grouping")

    def ev(tree, ops):
        if isinstance(tree, int):
            return ops[tree]
        _, l, r = tree
        if tree[0] == "and":
            return ev(l, ops) & ev(r, ops)
        return ev(l, ops) | ev(r, ops)

    out: dict = {}
    for ops, p in product_terms(sources):
        bits = ev(grouping, ops)
        out[bits] = out.get(bits, 0.0) + p
    return Bba._from_masses(frame, out)


def murphy_average(*sources) -> Bba:
    """Plain arithmetic mean of the sources' masses."""
    frame = _check_sources(sources)
    out: dict = {}
    k = len(sources)
    for s in sources:
        for bits, v in s.crisp_items():
            out[bits] = out.get(bits, 0.0) + v / k
    return Bba._from_masses(frame, out)


def _union_escalate(frame: Frame, bits: int, model: EmptinessModel) -> int:
    """Union target for a conflicting term, escalated until non-empty."""
    if bits & ~model.forced_empty_bits:
        return bits
    full = frame.universe_bits
    if full & ~model.forced_empty_bits:
        return full
    # Degenerate model where even total ignorance is declared empty.
    return 0 if frame.world is World.OPEN else full


def dsmh_transfer(out: dict, ledger: ConflictLedger, model: EmptinessModel) -> None:
    for e in ledger.entries:
        bits = 0
        for b in e.operands:
            bits |= b
        target = _union_escalate(ledger.frame, bits, model)
        out[target] = out.get(target, 0.0) + e.product


def pcr5(m1: Bba, m2: Bba, model: EmptinessModel | None = None) -> Bba:
    """Proportional conflict redistribution, variant 5.

    Each conflicting product ``m1(X) * m2(Y)`` is split back onto X and
    Y in proportion to ``m1(X)`` and ``m2(Y)``.  A zero denominator
    (possible only for degenerate inputs) sends the term to ``X | Y``.
    More than two sources are handled by :func:`fuse_many` as a left
    fold; the fold is quasi-associative, not associative.
    """
    out_bba, ledger = conjunctive(m1, m2, model=model)
    model = model or EmptinessModel.free(m1.frame)
    out = dict(out_bba.entries)
    for e in ledger.entries:
        bx, by = e.operands
        a = m1.mass(bx)
        b = m2.mass(by)
        den = a + b
        if den == 0.0:
            target = _union_escalate(m1.frame, bx | by, model)
            out[target] = out.get(target, 0.0) + e.product
            continue
        x = a * e.product / den
        out[bx] = out.get(bx, 0.0) + x
        out[by] = out.get(by, 0.0) + (e.product - x)
    return Bba._from_masses(m1.frame, out)


def combine(rule: RuleId | str, m1: Bba, m2: Bba,
            model: EmptinessModel | None = None) -> Bba:
    """Dispatch a two-source combination by rule id."""
    if isinstance(rule, str):
        rule = RuleId(rule)
    if rule is RuleId.DISJUNCTIVE:
        return disjunctive(m1, m2)
    if rule is RuleId.EXCLUSIVE_DISJUNCTIVE:
        return exclusive_disjunctive(m1, m2)
    if rule is RuleId.MURPHY_AVERAGE:
        return murphy_average(m1, m2)
    if rule is RuleId.MIXED:
        raise BadGrouping("the mixed rule needs a grouping tree; call mixed()")
    if rule is RuleId.PCR5:
        return pcr5(m1, m2, model)

    out_bba, ledger = conjunctive(m1, m2, model=model)
    if rule is RuleId.CONJUNCTIVE:
        return out_bba
    out = dict(out_bba.entries)
    frame = m1.frame
    model = model or EmptinessModel.free(frame)
    k = ledger.total()
    if rule is RuleId.DEMPSTER:
        keep = math.fsum(v for _, v in out_bba.entries)
        if keep <= _TOTAL_CONFLICT_TOL:
            raise TotalConflict(f"conflict mass {k} leaves nothing to normalize")
        return Bba._from_masses(frame, {b: v / keep for b, v in out.items()})
    if rule is RuleId.YAGER:
        if k:
            full = frame.universe_bits
            out[full] = out.get(full, 0.0) + k
        return Bba._from_masses(frame, out)
    if rule is RuleId.SMETS_TBM:
        if k:
            out[0] = out.get(0, 0.0) + k
        return Bba._from_masses(frame, out)
    if rule in (RuleId.DUBOIS_PRADE, RuleId.DSMH):
        dsmh_transfer(out, ledger, model)
        return Bba._from_masses(frame, out)
    raise ValueError(f"unhandled rule {rule!r}")


def fuse_many(rule: RuleId | str, sources, model: EmptinessModel | None = None,
              grouping=None) -> Bba:
    """N-ary fusion: native for symmetric rules, left fold otherwise."""
    if isinstance(rule, str):
        rule = RuleId(rule)
    sources = list(sources)
    if rule is RuleId.MIXED:
        if grouping is None:
            raise BadGrouping("the mixed rule needs a grouping tree")
        return mixed(sources, grouping)
    if rule is RuleId.CONJUNCTIVE:
        return conjunctive(*sources, model=model)[0]
    if rule is RuleId.DISJUNCTIVE:
        return disjunctive(*sources)
    if rule is RuleId.EXCLUSIVE_DISJUNCTIVE:
        return exclusive_disjunctive(*sources)
    if rule is RuleId.MURPHY_AVERAGE:
        return murphy_average(*sources)
    acc = sources[0]
    for nxt in sources[1:]:
        acc = combine(rule, acc, nxt, model)
    return acc
