"""Fuzzy-valued combination rules and the configurable master rule.

The classical rules weight every pair of focal sets by the *product* of
the two masses.  The rules in this module replace that product with a
T-norm (and, where a renormalising denominator is needed, the dual
T-conorm).  Because T-norms other than the product are not bilinear,
the raw outputs generally do not sum to one; each rule documents how it
deals with that.

:func:`ufr_combine` is the master formula the fixed rules are special
cases of: pick a set operation for the results, a combiner for the pair
values, a predicate marking which results may not keep mass, and a
routing policy (with per-side weights) for the marked mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .algebra import EmptinessModel
from .errors import (
    DegenerateWeights,
    FrameMismatch,
    InputError,
    SchemaError,
    TotalConflict,
    ZeroDenominator,
    ZeroTotalMass,
)
from .mass import Bba
from .rules import ConflictLedger, LedgerEntry, _union_escalate


class TNorm(Enum):
    MIN = "min"
    PRODUCT = "product"
    BOUNDED = "bounded"


class TConorm(Enum):
    MAX = "max"
    PROB_SUM = "prob_sum"
    BOUNDED_SUM = "bounded_sum"


#: Each T-norm with the T-conorm it is dual to under x -> 1-x.
DUAL_CONORM = {
    TNorm.MIN: TConorm.MAX,
    TNorm.PRODUCT: TConorm.PROB_SUM,
    TNorm.BOUNDED: TConorm.BOUNDED_SUM,
}


def tnorm(kind: TNorm, a: float, b: float) -> float:
    if kind is TNorm.MIN:
        return min(a, b)
    if kind is TNorm.PRODUCT:
        return a * b
    if kind is TNorm.BOUNDED:
        return max(0.0, a + b - 1.0)
    raise InputError(f"unknown T-norm {kind!r}")


def tconorm(kind: TConorm, a: float, b: float) -> float:
    if kind is TConorm.MAX:
        return max(a, b)
    if kind is TConorm.PROB_SUM:
        return a + b - a * b
    if kind is TConorm.BOUNDED_SUM:
        return min(1.0, a + b)
    raise InputError(f"unknown T-conorm {kind!r}")


def _check_pair(m1: Bba, m2: Bba):
    if m1.frame != m2.frame:
        raise FrameMismatch("sources disagree on the frame")
    return m1.frame


def _tn_terms(m1: Bba, m2: Bba, norm: TNorm):
    for b1, v1 in m1.crisp_items():
        for b2, v2 in m2.crisp_items():
            v = tnorm(norm, v1, v2)
            if v != 0.0:
                yield b1, v1, b2, v2, v


def tcn_conjunctive(m1: Bba, m2: Bba, *, norm: TNorm = TNorm.MIN,
                    model: EmptinessModel | None = None):
    """Conjunctive rule with T-norm-valued terms.

    Returns the (generally unnormalised) combined assignment plus the
    ledger of terms whose intersection the model forces empty.
    """
    frame = _check_pair(m1, m2)
    model = model or EmptinessModel.free(frame)
    out: dict = {}
    ledger = []
    for b1, _, b2, _, v in _tn_terms(m1, m2, norm):
        bits = b1 & b2
        if bits & ~model.forced_empty_bits == 0:
            ledger.append(LedgerEntry((b1, b2), bits, v))
        else:
            out[bits] = out.get(bits, 0.0) + v
    return Bba._from_masses(frame, out), ConflictLedger(frame, tuple(ledger))


def tn_family(m1: Bba, m2: Bba, *, norm: TNorm = TNorm.MIN,
              variant: str = "dempster",
              model: EmptinessModel | None = None) -> Bba:
    """Dempster/Yager/open-world analogues on T-norm-valued terms.

    ``dempster`` rescales the surviving sets by their own total,
    ``yager`` hands the conflict to total ignorance, ``smets`` leaves it
    on the empty set.  Only ``dempster`` returns a normalised result.
    """
    frame = _check_pair(m1, m2)
    out, ledger = tcn_conjunctive(m1, m2, norm=norm, model=model)
    k = ledger.total()
    masses = {b: v for b, v in out.entries}
    if variant == "dempster":
        keep = math.fsum(masses.values())
        if keep <= 1e-12:
            raise TotalConflict("all combined mass fell on empty sets")
        return Bba._from_masses(frame, {b: v / keep for b, v in masses.items()})
    if variant == "yager":
        full = frame.universe_bits
        masses[full] = masses.get(full, 0.0) + k
        return Bba._from_masses(frame, masses)
    if variant == "smets":
        if k:
            masses[0] = masses.get(0, 0.0) + k
        return Bba._from_masses(frame, masses)
    raise InputError(f"unknown variant {variant!r}")


def tcn_pcr5_original(m1: Bba, m2: Bba, *, norm: TNorm = TNorm.MIN,
                      conorm: TConorm | None = None,
                      model: EmptinessModel | None = None) -> Bba:
    """Proportional conflict transfer where each side of a conflicting
    pair gets its mass times T-norm over T-conorm of the pair, then the
    whole assignment is rescaled to sum to one."""
    frame = _check_pair(m1, m2)
    model = model or EmptinessModel.free(frame)
    conorm = conorm or DUAL_CONORM[norm]
    out: dict = {}
    for b1, v1, b2, v2, v in _tn_terms(m1, m2, norm):
        bits = b1 & b2
        if bits & ~model.forced_empty_bits:
            out[bits] = out.get(bits, 0.0) + v
            continue
        den = tconorm(conorm, v1, v2)
        if den == 0.0:
            raise ZeroDenominator(
                "conflicting pair with zero T-conorm value"
            )
        ratio = v / den
        out[b1] = out.get(b1, 0.0) + v1 * ratio
        out[b2] = out.get(b2, 0.0) + v2 * ratio
    total = math.fsum(out.values())
    if total <= 0.0:
        raise ZeroTotalMass("nothing to rescale")
    return Bba._from_masses(frame, {b: v / total for b, v in out.items()})


def pcr5v2_tn(m1: Bba, m2: Bba, *, norm: TNorm = TNorm.MIN,
              model: EmptinessModel | None = None,
              normalize: bool = False) -> Bba:
    """Conflict transfer that splits each conflicting pair's T-norm
    value between the two sides proportionally to their masses.

    The split of value ``v`` carried by the pair (X, Y) is
    ``m1(X) v / (m1(X)+m2(Y))`` to X and the remainder to Y, which
    conserves ``v`` exactly.  Pass ``normalize=True`` to rescale the
    result by its own total at the end.
    """
    frame = _check_pair(m1, m2)
    model = model or EmptinessModel.free(frame)
    out: dict = {}
    for b1, v1, b2, v2, v in _tn_terms(m1, m2, norm):
        bits = b1 & b2
        if bits & ~model.forced_empty_bits:
            out[bits] = out.get(bits, 0.0) + v
            continue
        den = v1 + v2
        if den == 0.0:
            target = _union_escalate(frame, b1 | b2, model)
            out[target] = out.get(target, 0.0) + v
            continue
        x = v1 * v / den
        out[b1] = out.get(b1, 0.0) + x
        out[b2] = out.get(b2, 0.0) + (v - x)
    if normalize:
        total = math.fsum(out.values())
        if total <= 0.0:
            raise ZeroTotalMass("nothing to rescale")
        out = {b: v / total for b, v in out.items()}
    return Bba._from_masses(frame, out)


# --- master formula ----------------------------------------------------------


class StarOp(Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


class TransferPolicy(Enum):
    #: Split the marked value back onto the pair, per side weights.
    PAIR_PROPORTIONAL = "pair_proportional"
    #: Drop the marked value (combine with normalize=True for the
    #: classical normalised rule).
    DISCARD = "discard"
    #: Send the marked value to the union of the pair.
    UNION = "union"
    #: Send the marked value to total ignorance.
    IGNORANCE = "ignorance"


@dataclass(frozen=True)
class UfrConfig:
    """Parameters of the master combination formula.

    ``combiner`` values every pair of focal sets, ``star`` maps the pair
    to a result set, ``transferable`` marks results that may not keep
    mass, and ``transfer`` says where that mass goes instead.  Weights
    apply per side under ``pair_proportional``: either the literal
    string ``"source_mass"`` or ``"constant:K"`` for a fixed K.
    """

    star: StarOp = StarOp.CONJUNCTIVE
    combiner: TNorm = TNorm.PRODUCT
    transferable: str | tuple = "model_empty"
    transfer: TransferPolicy = TransferPolicy.PAIR_PROPORTIONAL
    weight_1: str = "source_mass"
    weight_2: str = "source_mass"
    normalize: bool = False

    @classmethod
    def from_json(cls, doc: dict) -> "UfrConfig":
        if not isinstance(doc, dict):
            raise SchemaError("/", "config must be an object")
        try:
            star = StarOp(doc.get("star", "conjunctive"))
            combiner = TNorm(doc.get("combiner", "product"))
            transfer = TransferPolicy(doc.get("transfer", "pair_proportional"))
        except ValueError as exc:
            raise SchemaError("/", str(exc)) from None
        transferable = doc.get("transferable", "model_empty")
        if isinstance(transferable, list):
            transferable = tuple(transferable)
        return cls(
            star=star,
            combiner=combiner,
            transferable=transferable,
            transfer=transfer,
            weight_1=doc.get("weight_1", "source_mass"),
            weight_2=doc.get("weight_2", "source_mass"),
            normalize=bool(doc.get("normalize", False)),
        )


def _weight(spec: str, source_mass: float) -> float:
    if spec == "source_mass":
        return source_mass
    if spec.startswith("constant:"):
        try:
            return float(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad weight constant in {spec!r}") from None
    raise InputError(f"unknown weight spec {spec!r}")


def ufr_combine(m1: Bba, m2: Bba, config: UfrConfig,
                model: EmptinessModel | None = None) -> Bba:
    """Evaluate the master combination formula.

    With the product combiner, conjunctive star, model-empty transfer
    marking, source-mass weights and no final rescaling this reproduces
    the proportional-conflict rule exactly; swapping the transfer policy
    to discard-and-normalize reproduces the classical normalised rule.
    """
    frame = _check_pair(m1, m2)
    model = model or EmptinessModel.free(frame)

    if isinstance(config.transferable, tuple):
        marked = {frame.atoms_of(e).bits for e in config.transferable}

        def is_marked(bits: int) -> bool:
            return bits in marked

    elif config.transferable == "model_empty":
        def is_marked(bits: int) -> bool:
            return bits & ~model.forced_empty_bits == 0

    elif config.transferable == "never":
        def is_marked(bits: int) -> bool:
            return False

    else:
        raise InputError(f"unknown transferable spec {config.transferable!r}")

    out: dict = {}
    for b1, v1, b2, v2, v in _tn_terms(m1, m2, config.combiner):
        bits = b1 & b2 if config.star is StarOp.CONJUNCTIVE else b1 | b2
        if not is_marked(bits):
            out[bits] = out.get(bits, 0.0) + v
            continue
        if config.transfer is TransferPolicy.DISCARD:
            continue
        if config.transfer is TransferPolicy.UNION:
            target = _union_escalate(frame, b1 | b2, model)
            out[target] = out.get(target, 0.0) + v
            continue
        if config.transfer is TransferPolicy.IGNORANCE:
            full = frame.universe_bits
            out[full] = out.get(full, 0.0) + v
            continue
        w1 = _weight(config.weight_1, v1)
        w2 = _weight(config.weight_2, v2)
        den = w1 + w2
        if den == 0.0:
            if v > 0.0:
                raise DegenerateWeights(
                    "marked value with zero total routing weight"
                )
            continue
        x = w1 * v / den
        out[b1] = out.get(b1, 0.0) + x
        out[b2] = out.get(b2, 0.0) + (v - x)

    if config.normalize:
        total = math.fsum(out.values())
        if total <= 0.0:
            raise ZeroTotalMass("nothing to rescale")
        out = {b: v / total for b, v in out.items()}
    return Bba._from_masses(frame, out)
