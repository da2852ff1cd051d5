"""Neutrosophic triples and their operators.

A proposition carries three degrees at once: truth T, indeterminacy I
and falsity F.  Components are crisp numbers or closed intervals and
the sum T+I+F is deliberately unconstrained, which lets the triple
express incomplete (sum < 1) and contradictory (sum > 1) information.

Internally every component is handled as an interval, a crisp value a
standing for [a, a]; that makes the interval formulas the single code
path.  Combination outputs are not normalised by default and their
components may exceed 1 when the inputs are over-specified; use
:func:`ns_normalize` (with a :class:`NormPolicy` target) to rescale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

from .errors import InputError, IntervalNotSupported, LengthMismatch, OutOfRange, ZeroNorm
from .tcn import TConorm, TNorm, tconorm, tnorm


def _iv(c) -> tuple[float, float]:
    """Component as a (lo, hi) interval; crisp a becomes [a, a]."""
    if isinstance(c, (int, float)):
        return (float(c), float(c))
    lo, hi = c
    return (float(lo), float(hi))


def _crisp(iv: tuple[float, float]):
    lo, hi = iv
    return lo if lo == hi else (lo, hi)


@dataclass(frozen=True)
class NsTriple:
    """Degrees of truth, indeterminacy and falsity.

    Each component is a float or a (lo, hi) pair with 0 <= lo <= hi.
    """

    t: float | tuple
    i: float | tuple
    f: float | tuple

    def __post_init__(self):
        for name in ("t", "i", "f"):
            lo, hi = _iv(getattr(self, name))
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InputError(f"component {name} is not finite")
            if lo < 0.0:
                raise OutOfRange(f"component {name} below 0")
            if lo > hi:
                raise InputError(f"component {name} has reversed bounds")

    @property
    def is_crisp(self) -> bool:
        return all(lo == hi for lo, hi in self.intervals)

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return (_iv(self.t), _iv(self.i), _iv(self.f))

    def crisp_components(self) -> tuple[float, float, float]:
        if not self.is_crisp:
            raise IntervalNotSupported("operation needs crisp components")
        return tuple(lo for lo, _ in self.intervals)

    def to_json(self):
        if self.is_crisp:
            return list(self.crisp_components())
        (tl, th), (il, ih), (fl, fh) = self.intervals
        return {"t": [tl, th], "i": [il, ih], "f": [fl, fh]}

    @classmethod
    def from_json(cls, doc) -> "NsTriple":
        if isinstance(doc, (list, tuple)) and len(doc) == 3:
            return cls(*(float(v) for v in doc))
        if isinstance(doc, dict):
            def comp(key):
                v = doc.get(key)
                if isinstance(v, (int, float)):
                    return float(v)
                if isinstance(v, (list, tuple)) and len(v) == 2:
                    return (float(v[0]), float(v[1]))
                raise InputError(f"bad component {key!r}: {v!r}")

            return cls(comp("t"), comp("i"), comp("f"))
        raise InputError(f"bad triple document {doc!r}")


#: Designated false and true elements.
NS_ZERO = NsTriple(0.0, 0.0, 1.0)
NS_ONE = NsTriple(1.0, 0.0, 0.0)


def ns_leq(x: NsTriple, y: NsTriple) -> bool:
    """Partial order: truth may only rise, indeterminacy and falsity
    may only fall (endpointwise for intervals)."""
    (t1, i1, f1), (t2, i2, f2) = x.intervals, y.intervals
    return (
        t1[0] <= t2[0] and t1[1] <= t2[1]
        and i1[0] >= i2[0] and i1[1] >= i2[1]
        and f1[0] >= f2[0] and f1[1] >= f2[1]
    )


def ns_contains(a: NsTriple, b: NsTriple) -> bool:
    """Membership-wise containment; the pointwise condition coincides
    with the partial order."""
    return ns_leq(a, b)


class NsRecipe(Enum):
    """A T-norm paired with its dual T-conorm."""

    MIN = "min"
    ALGEBRAIC_PRODUCT = "product"
    BOUNDED = "bounded"


_RECIPE_PAIR = {
    NsRecipe.MIN: (TNorm.MIN, TConorm.MAX),
    NsRecipe.ALGEBRAIC_PRODUCT: (TNorm.PRODUCT, TConorm.PROB_SUM),
    NsRecipe.BOUNDED: (TNorm.BOUNDED, TConorm.BOUNDED_SUM),
}


def _iv_op(fn, kind, a, b):
    return (fn(kind, a[0], b[0]), fn(kind, a[1], b[1]))


def n_norm(recipe: NsRecipe, x: NsTriple, y: NsTriple) -> NsTriple:
    """Neutrosophic conjunction: T by the recipe's T-norm, I and F by
    the dual T-conorm, endpointwise on intervals."""
    norm, conorm = _RECIPE_PAIR[recipe]
    (t1, i1, f1), (t2, i2, f2) = x.intervals, y.intervals
    return NsTriple(
        _crisp(_iv_op(tnorm, norm, t1, t2)),
        _crisp(_iv_op(tconorm, conorm, i1, i2)),
        _crisp(_iv_op(tconorm, conorm, f1, f2)),
    )


def n_conorm(recipe: NsRecipe, x: NsTriple, y: NsTriple) -> NsTriple:
    """Neutrosophic disjunction: T by the dual T-conorm, I and F by the
    recipe's T-norm."""
    norm, conorm = _RECIPE_PAIR[recipe]
    (t1, i1, f1), (t2, i2, f2) = x.intervals, y.intervals
    return NsTriple(
        _crisp(_iv_op(tconorm, conorm, t1, t2)),
        _crisp(_iv_op(tnorm, norm, i1, i2)),
        _crisp(_iv_op(tnorm, norm, f1, f2)),
    )


def ns_and_interval(x: NsTriple, y: NsTriple) -> NsTriple:
    """Interval conjunction with the min/max recipe."""
    return n_norm(NsRecipe.MIN, x, y)


def ns_or_interval(x: NsTriple, y: NsTriple) -> NsTriple:
    """Interval disjunction with the min/max recipe."""
    return n_conorm(NsRecipe.MIN, x, y)


def ns_not(x: NsTriple) -> NsTriple:
    """Complement: swap truth and falsity, reflect indeterminacy."""
    t, i, f = x.intervals
    if i[1] > 1.0:
        raise OutOfRange("indeterminacy above 1 cannot be reflected")
    return NsTriple(_crisp(f), _crisp((1.0 - i[1], 1.0 - i[0])), _crisp(t))


def ns_negate(x: NsTriple) -> NsTriple:
    """Weak negation: swap truth and falsity, keep indeterminacy."""
    t, i, f = x.intervals
    return NsTriple(_crisp(f), _crisp(i), _crisp(t))


# --- measures ----------------------------------------------------------------


def vector_norm(x: NsTriple) -> float:
    """Component sum T+I+F of a crisp triple."""
    t, i, f = x.crisp_components()
    return t + i + f


class NormPolicy(Enum):
    NONE = "none"
    PRODUCT_OF_NORMS = "product_of_norms"
    AVERAGE_OF_NORMS = "average_of_norms"
    CUSTOM = "custom"


def norm_target(policy: NormPolicy, x: NsTriple, y: NsTriple,
                custom=None) -> float | None:
    """Component-sum target for the combination of two triples, or None
    when the result should stay as computed."""
    if policy is NormPolicy.NONE:
        return None
    if policy is NormPolicy.PRODUCT_OF_NORMS:
        return vector_norm(x) * vector_norm(y)
    if policy is NormPolicy.AVERAGE_OF_NORMS:
        return (vector_norm(x) + vector_norm(y)) / 2.0
    if policy is NormPolicy.CUSTOM:
        if custom is None:
            raise InputError("custom policy needs a function")
        return float(custom(x, y))
    raise InputError(f"unknown policy {policy!r}")


def ns_normalize(x: NsTriple, target: float = 1.0) -> NsTriple:
    """Rescale a crisp triple so its component sum equals ``target``."""
    s = vector_norm(x)
    if s <= 0.0:
        raise ZeroNorm("component sum is zero")
    t, i, f = x.crisp_components()
    k = target / s
    return NsTriple(t * k, i * k, f * k)


class NsClass(Enum):
    INTUITIONISTIC = "intuitionistic"
    PARACONSISTENT = "paraconsistent"
    PLAUSIBLY_NORMALIZED = "plausibly_normalized"


def classify_ns(x: NsTriple) -> frozenset:
    """Which of the sum-of-components regimes the triple can satisfy.

    The labels can overlap: an interval triple whose component sum
    straddles 1 admits a normalized selection while also admitting
    sub- or over-selections.
    """
    sup_sum = math.fsum(hi for _, hi in x.intervals)
    inf_sum = math.fsum(lo for lo, _ in x.intervals)
    labels = set()
    if sup_sum < 1.0:
        labels.add(NsClass.INTUITIONISTIC)
    if inf_sum > 1.0:
        labels.add(NsClass.PARACONSISTENT)
    if inf_sum <= 1.0 <= sup_sum:
        labels.add(NsClass.PLAUSIBLY_NORMALIZED)
    return frozenset(labels)


# --- graded allocation operators ---------------------------------------------

_COMPONENTS = ("t", "i", "f")


def _crisp_map(x: NsTriple) -> dict:
    t, i, f = x.crisp_components()
    return {"t": t, "i": i, "f": f}


def ns_combine_graded(order: tuple[str, str, str], *xs: NsTriple) -> NsTriple:
    """Combine crisp triples by prevailing-component allocation.

    Expand the product (T1+I1+F1)(T2+I2+F2)... and send every monomial
    to the strongest component it mentions, ``order`` listing the
    components weakest first.  Because each monomial lands in exactly
    one component, the component sum of the output is the product of
    the inputs' component sums.
    """
    if sorted(order) != ["f", "i", "t"]:
        raise InputError(f"order must permute t, i, f: {order!r}")
    if len(xs) < 2:
        raise InputError("need at least two triples")
    rank = {c: k for k, c in enumerate(order)}
    maps = [_crisp_map(x) for x in xs]
    acc = {"t": 0.0, "i": 0.0, "f": 0.0}
    for picks in itertools.product(_COMPONENTS, repeat=len(xs)):
        v = 1.0
        for m, c in zip(maps, picks):
            v *= m[c]
        acc[max(picks, key=rank.get)] += v
    return NsTriple(acc["t"], acc["i"], acc["f"])


def c_tif(x: NsTriple, y: NsTriple) -> NsTriple:
    """Conjunction where falsity prevails over indeterminacy over truth:
    (T1T2, I1I2+I1T2+T1I2, all monomials touching an F)."""
    return ns_combine_graded(("t", "i", "f"), x, y)


def c_itf(x: NsTriple, y: NsTriple) -> NsTriple:
    """Conjunction where truth absorbs the truth-indeterminacy cross
    terms: (T1T2+T1I2+T2I1, I1I2, all monomials touching an F)."""
    return ns_combine_graded(("i", "t", "f"), x, y)


def d_fti(x: NsTriple, y: NsTriple) -> NsTriple:
    """Disjunction where truth prevails over indeterminacy over
    falsity: (all monomials touching a T, I1I2+I1F2+I2F1, F1F2)."""
    return ns_combine_graded(("f", "i", "t"), x, y)


def d_fti_pessimistic(x: NsTriple, y: NsTriple) -> NsTriple:
    """Disjunction focused on indeterminacy: I also absorbs the
    truth-indeterminacy cross terms, leaving T = T1T2+T1F2+T2F1."""
    return ns_combine_graded(("f", "t", "i"), x, y)


def c3_tif(x: NsTriple, y: NsTriple, z: NsTriple) -> NsTriple:
    """Three-way conjunction under the falsity-prevails order."""
    return ns_combine_graded(("t", "i", "f"), x, y, z)


def d3_fti(x: NsTriple, y: NsTriple, z: NsTriple) -> NsTriple:
    """Three-way disjunction under the truth-prevails order."""
    return ns_combine_graded(("f", "i", "t"), x, y, z)


# --- k-law composition --------------------------------------------------------


@dataclass(frozen=True)
class NsVector:
    """k aligned triples, exposing the T, I and F component vectors."""

    triples: tuple[NsTriple, ...]

    def __post_init__(self):
        if len(self.triples) < 2:
            raise LengthMismatch("a vector needs k >= 2 triples")

    @property
    def k(self) -> int:
        return len(self.triples)

    def component(self, name: str) -> tuple[float, ...]:
        return tuple(_crisp_map(x)[name] for x in self.triples)


def _check_lengths(*vectors):
    k = len(vectors[0])
    if k < 2:
        raise LengthMismatch("component vectors need k >= 2 entries")
    for v in vectors[1:]:
        if len(v) != k:
            raise LengthMismatch("component vectors differ in length")
    return k


def klaw_same(z) -> float:
    """Same-symbol composition: the plain product z1 z2 ... zk."""
    k = len(z)
    if k < 2:
        raise LengthMismatch("component vectors need k >= 2 entries")
    return math.prod(z)


def klaw_mixed(z, w) -> float:
    """Two-symbol composition: sum over the 2^k - 2 selections that use
    both symbols, each selection contributing one factor per index."""
    k = _check_lengths(z, w)
    total = 0.0
    for picks in itertools.product((0, 1), repeat=k):
        if all(p == 0 for p in picks) or all(p == 1 for p in picks):
            continue
        v = 1.0
        for idx, p in enumerate(picks):
            v *= (z, w)[p][idx]
        total += v
    return total


def klaw3(z, w, u) -> float:
    """Three-symbol composition: sum over selections using all three
    symbols at least once (for k = 3, the six permutations)."""
    k = _check_lengths(z, w, u)
    total = 0.0
    for picks in itertools.product((0, 1, 2), repeat=k):
        if len(set(picks)) != 3:
            continue
        v = 1.0
        for idx, p in enumerate(picks):
            v *= (z, w, u)[p][idx]
        total += v
    return total


def klaw_term_count(kind: str, k: int) -> int:
    """Number of monomials the composition expands to."""
    if kind == "same":
        return 1
    if kind == "mixed":
        return (1 << k) - 2
    if kind == "triple":
        return 3 ** k - 3 * (1 << k) + 3
    raise InputError(f"unknown kind {kind!r}")
