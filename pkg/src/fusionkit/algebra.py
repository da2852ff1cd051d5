"""Canonical set algebra over a finite frame of hypotheses.

The frame's hypotheses need not be exclusive, so the working universe is
the closure of the hypothesis sets under union, intersection and
complement.  Every element of that closure is represented canonically as
a bitmask over the ``2**n - 1`` nonempty regions of the n-set Venn
diagram (the "atoms": for each nonempty subset S of hypotheses, the
region inside every member of S and outside every non-member).  The
region outside all hypotheses is not part of the universe: complement is
taken relative to the union of all hypotheses, and an open world is
expressed by allowing mass on the empty set rather than by an extra
outside region.

Bitmask equality is therefore semantic set equality, and the whole
algebra has ``2**(2**n - 1)`` distinct elements.

All types here are immutable and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations, product

from .errors import (
    DuplicateLabel,
    ExprSyntaxError,
    FrameMismatch,
    TooFewHypotheses,
    TooManyHypotheses,
    UnknownLabel,
)

#: Hard cap on frame size: atom bitmasks must stay cheap machine integers
#: and the algebra has 2**(2**n - 1) elements, which is already 2**63 at
#: n = 6.
MAX_HYPOTHESES = 6

#: Reserved spelling of the empty set in the expression grammar.
EMPTY_NAME = "empty"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class World(Enum):
    """Closed world: total mass lives on nonempty sets.  Open world:
    mass on the empty set is meaningful (absent/unknown hypothesis)."""

    CLOSED = "closed"
    OPEN = "open"


@lru_cache(maxsize=None)
def _label_masks(n: int) -> tuple[int, ...]:
    # Atom for label-subset s (1 <= s < 2**n) sits at bit position s - 1.
    masks = [0] * n
    for s in range(1, 1 << n):
        for i in range(n):
            if s >> i & 1:
                masks[i] |= 1 << (s - 1)
    return tuple(masks)


@dataclass(frozen=True)
class Frame:
    """An ordered tuple of hypothesis labels plus a world mode."""

    labels: tuple[str, ...]
    world: World = World.CLOSED

    def __post_init__(self):
        if len(self.labels) < 2:
            raise TooFewHypotheses("a frame needs at least 2 hypotheses")
        if len(self.labels) > MAX_HYPOTHESES:
            raise TooManyHypotheses(
                f"at most {MAX_HYPOTHESES} hypotheses supported, got {len(self.labels)}"
            )
        seen = set()
        for lab in self.labels:
            if not _IDENT_RE.fullmatch(lab):
                raise UnknownLabel(f"label {lab!r} is not a valid identifier")
            if lab == EMPTY_NAME:
                raise UnknownLabel(f"label {EMPTY_NAME!r} is reserved")
            if lab in seen:
                raise DuplicateLabel(f"label {lab!r} repeated")
            seen.add(lab)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def atom_count(self) -> int:
        return (1 << self.n) - 1

    @property
    def universe_bits(self) -> int:
        return (1 << self.atom_count) - 1

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown hypothesis {label!r}") from None

    def label_bits(self, label: str) -> int:
        return _label_masks(self.n)[self.label_index(label)]

    def singleton(self, label: str) -> "AtomSet":
        return AtomSet(self, self.label_bits(label))

    def empty(self) -> "AtomSet":
        return AtomSet(self, 0)

    def full(self) -> "AtomSet":
        """Total ignorance: the union of every hypothesis."""
        return AtomSet(self, self.universe_bits)

    def atoms_of(self, expr: "str | AtomSet") -> "AtomSet":
        if isinstance(expr, AtomSet):
            if expr.frame != self:
                raise FrameMismatch("expression belongs to a different frame")
            return expr
        return parse_expr(self, expr)

    def name_of(self, a: "AtomSet | int") -> str:
        bits = a.bits if isinstance(a, AtomSet) else a
        return _format_bits(self.labels, bits)


def build_frame(labels, world: World | str = World.CLOSED) -> Frame:
    """Validate labels and return a frame."""
    if isinstance(world, str):
        world = World(world)
    return Frame(tuple(labels), world)


@dataclass(frozen=True, order=False)
class AtomSet:
    """A canonical element of the frame's set algebra (bitmask of atoms)."""

    frame: Frame
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= self.frame.universe_bits:
            raise ValueError(f"bits {self.bits:#x} outside the frame universe")

    @property
    def is_empty_set(self) -> bool:
        """Structurally empty (no atoms), as opposed to model-empty."""
        return self.bits == 0

    def _check(self, other: "AtomSet") -> None:
        if self.frame != other.frame:
            raise FrameMismatch("operands belong to different frames")

    def __or__(self, other: "AtomSet") -> "AtomSet":
        self._check(other)
        return AtomSet(self.frame, self.bits | other.bits)

    def __and__(self, other: "AtomSet") -> "AtomSet":
        self._check(other)
        return AtomSet(self.frame, self.bits & other.bits)

    def __sub__(self, other: "AtomSet") -> "AtomSet":
        self._check(other)
        return AtomSet(self.frame, self.bits & ~other.bits)

    def __invert__(self) -> "AtomSet":
        return AtomSet(self.frame, self.frame.universe_bits & ~self.bits)

    def issubset(self, other: "AtomSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __le__(self, other: "AtomSet") -> bool:
        return self.issubset(other)

    def __lt__(self, other: "AtomSet") -> bool:
        return self.issubset(other) and self.bits != other.bits

    @property
    def atom_positions(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.frame.atom_count) if self.bits >> p & 1)

    @property
    def name(self) -> str:
        return self.frame.name_of(self)

    def __repr__(self):
        return f"AtomSet({self.name!r})"


class SetOpKind(Enum):
    UNION = "union"
    INTERSECTION = "intersection"
    COMPLEMENT = "complement"
    DIFFERENCE = "difference"


def set_op(kind: SetOpKind | str, a: AtomSet, b: AtomSet | None = None) -> AtomSet:
    """Functional dispatch over the four set operations."""
    if isinstance(kind, str):
        kind = SetOpKind(kind)
    if kind is SetOpKind.COMPLEMENT:
        if b is not None:
            raise ValueError("complement is unary")
        return ~a
    if b is None:
        raise ValueError(f"{kind.value} needs two operands")
    if kind is SetOpKind.UNION:
        return a | b
    if kind is SetOpKind.INTERSECTION:
        return a & b
    return a - b


def superpower_cardinality(n: int) -> int:
    """Number of distinct sets generated by n hypotheses under
    union/intersection/complement (empty set included)."""
    if n < 2:
        raise TooFewHypotheses("need at least 2 hypotheses")
    return 1 << ((1 << n) - 1)


# --- emptiness models -------------------------------------------------------


@dataclass(frozen=True)
class EmptinessModel:
    """Declares which Venn atoms are known to be empty.

    The free model declares nothing; a fully exclusive (Shafer-style)
    model declares every atom shared by two or more hypotheses empty.
    """

    frame: Frame
    forced_empty_bits: int = 0

    def __post_init__(self):
        if not 0 <= self.forced_empty_bits <= self.frame.universe_bits:
            raise ValueError("forced-empty bits outside the frame universe")

    @classmethod
    def free(cls, frame: Frame) -> "EmptinessModel":
        return cls(frame, 0)

    @classmethod
    def from_exprs(cls, frame: Frame, exprs) -> "EmptinessModel":
        """Model in which each given set expression is declared empty."""
        bits = 0
        for e in exprs:
            bits |= frame.atoms_of(e).bits
        return cls(frame, bits)

    @classmethod
    def exclusive(cls, frame: Frame) -> "EmptinessModel":
        """All distinct hypotheses pairwise disjoint."""
        bits = 0
        for p in range(frame.atom_count):
            s = p + 1
            if s & (s - 1):  # atom belongs to two or more hypotheses
                bits |= 1 << p
        return cls(frame, bits)

    @property
    def is_free(self) -> bool:
        return self.forced_empty_bits == 0

    def is_empty(self, a: AtomSet) -> bool:
        if a.frame != self.frame:
            raise FrameMismatch("set belongs to a different frame")
        return a.bits & ~self.forced_empty_bits == 0

    def reduce(self, a: AtomSet) -> AtomSet:
        """Drop forced-empty atoms, mapping a set to its model
        equivalence-class representative."""
        if a.frame != self.frame:
            raise FrameMismatch("set belongs to a different frame")
        return AtomSet(self.frame, a.bits & ~self.forced_empty_bits)

    def name_of(self, a: "AtomSet | int") -> str:
        """Readable name for an equivalence class modulo this model.

        Picks the simplest set expression whose reduction equals the
        class, so reduced masks keep familiar names (the class of A
        under a model where A and B are disjoint prints as A, not as
        the free-algebra complement form).
        """
        bits = a.bits if isinstance(a, AtomSet) else a
        bits &= ~self.forced_empty_bits
        return _format_bits(self.frame.labels, bits, self.forced_empty_bits)


def is_model_empty(a: AtomSet, model: EmptinessModel) -> bool:
    """True when every atom of ``a`` is declared empty by ``model``.

    The structurally empty set is model-empty under every model.
    """
    return model.is_empty(a)


# --- expression parsing -----------------------------------------------------
#
# Grammar (tightest first):  ~x  |  x & y  |  x \ y , x | y  (left-assoc,
# difference shares the lowest level with union).  Parentheses group.
# Identifiers are hypothesis labels; "empty" denotes the empty set.

_TOKEN_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[()&|~\\])")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ExprSyntaxError(f"bad character {text[pos:].lstrip()[0]!r} in {text!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, frame: Frame, text: str):
        self.frame = frame
        self.tokens = _tokenize(text)
        self.pos = 0
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> int:
        if not self.tokens:
            raise ExprSyntaxError("empty expression")
        bits = self.expr()
        if self.peek() is not None:
            raise ExprSyntaxError(f"trailing input at {self.peek()!r} in {self.text!r}")
        return bits

    def expr(self) -> int:
        bits = self.term()
        while self.peek() in ("|", "\\"):
            op = self.take()
            rhs = self.term()
            bits = bits | rhs if op == "|" else bits & ~rhs
        return bits

    def term(self) -> int:
        bits = self.factor()
        while self.peek() == "&":
            self.take()
            bits &= self.factor()
        return bits

    def factor(self) -> int:
        tok = self.take()
        if tok is None:
            raise ExprSyntaxError(f"unexpected end of expression in {self.text!r}")
        if tok == "~":
            return self.frame.universe_bits & ~self.factor()
        if tok == "(":
            bits = self.expr()
            if self.take() != ")":
                raise ExprSyntaxError(f"missing ')' in {self.text!r}")
            return bits
        if tok == EMPTY_NAME:
            return 0
        if _IDENT_RE.fullmatch(tok):
            return self.frame.label_bits(tok)
        raise ExprSyntaxError(f"unexpected token {tok!r} in {self.text!r}")


def parse_expr(frame: Frame, text: str) -> AtomSet:
    return AtomSet(frame, _Parser(frame, text).parse())


def atoms_of(expr: str | AtomSet, frame: Frame) -> AtomSet:
    """Canonicalize a set expression over the frame's hypotheses."""
    return frame.atoms_of(expr)


# --- canonical display names ------------------------------------------------


@lru_cache(maxsize=None)
def _format_bits(labels: tuple[str, ...], bits: int, forced: int = 0) -> str:
    """Deterministic, re-parseable display name for a canonical set.

    Tries short forms first: unions of (possibly complemented)
    hypotheses, then intersections, then two-level mixes; falls back to
    the disjunction of explicit Venn atoms.

    With a nonzero ``forced`` mask of model-empty atoms, ``bits`` is a
    reduced equivalence-class mask and the returned name is the first
    candidate whose reduction equals it, so classes keep the readable
    representative (A rather than A-minus-forced-atoms).
    """
    if bits == 0:
        return EMPTY_NAME
    n = len(labels)
    masks = _label_masks(n)
    universe = (1 << ((1 << n) - 1)) - 1
    live = universe & ~forced
    if forced and bits == live:
        return _format_bits(labels, universe)

    def literal(i: int, neg: bool) -> tuple[str, int]:
        if neg:
            return f"~{labels[i]}", universe & ~masks[i]
        return labels[i], masks[i]

    def candidates(r: int):
        # fewest complements first, so classes modulo a model keep
        # their positive representative where one exists
        for pols in sorted(product((False, True), repeat=r), key=sum):
            for idxs in combinations(range(n), r):
                yield [literal(i, neg) for i, neg in zip(idxs, pols)]

    for r in range(1, n + 1):
        for lits in candidates(r):
            m = 0
            for _, lm in lits:
                m |= lm
            if m & live == bits:
                return "|".join(s for s, _ in lits)
        if r >= 2:
            for lits in candidates(r):
                m = universe
                for _, lm in lits:
                    m &= lm
                if m & live == bits:
                    return "&".join(s for s, _ in lits)

    # one literal combined with a union / intersection of others
    for i in range(n):
        for neg in (False, True):
            ls, lm = literal(i, neg)
            for r in range(2, n):
                for idxs in combinations([j for j in range(n) if j != i], r):
                    for pols in product((False, True), repeat=r):
                        group = [literal(j, gneg) for j, gneg in zip(idxs, pols)]
                        um, im = 0, universe
                        for _, gm in group:
                            um |= gm
                            im &= gm
                        names = [s for s, _ in group]
                        if lm & um & live == bits:
                            return f"{ls}&({'|'.join(names)})"
                        if (lm | im) & live == bits:
                            return f"{ls}|({'&'.join(names)})"

    # fall back to explicit atoms
    parts = []
    for p in range((1 << n) - 1):
        if bits >> p & 1:
            s = p + 1
            conj = "&".join(
                lab if s >> i & 1 else f"~{lab}" for i, lab in enumerate(labels)
            )
            parts.append(f"({conj})")
    return "|".join(parts)
