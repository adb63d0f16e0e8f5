"""Closed-form root decisions for measures with three to six atoms.

For p in this range the root question is settled by explicit support
identities and weight identities, and a positive answer comes with an
explicit small witness:

* p = 3: the support must be geometric and the middle mass must satisfy
  a2^2 = 4 a1 a3; the witness has two atoms.
* p = 4: never; the four-atom family admits no root at all.
* p = 5: geometric support, a2^2 a5 = a4^2 a1, and
  a3 = a2^2/(4 a1) + 2 sqrt(a1 a5); three-atom witness.
* p = 6: after excluding the forbidden square/product coincidences, the
  squares of atoms 2 and 5 select one of three patterns; two of them admit
  roots under three product-of-mass identities (three-atom witness), the
  mixed pattern never does.

The witness returned squares to the measure itself; its existence is
equivalent to solvability of the reweighted self-convolution problem in
this atom range, so the outcome doubles as the subnormality answer.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

import mpmath
from mpmath import workprec

from .diagram import Violation, geometric_profile
from .measures import (
    RATIONAL,
    REAL,
    AtomicMeasure,
    MeasureError,
    Position,
    make_measure,
)
from .scalars import close_rel, sqrt_fraction, to_mpf
from .solver import (
    IMPOSSIBLE,
    WITNESS,
    DEFAULT_CONFIG,
    SolverConfig,
    Verdict,
    verify_witness,
)


class _Checker:
    """Mode-aware equality/positivity for weight identities."""

    def __init__(self, mu: AtomicMeasure, config: SolverConfig):
        self.real = mu.mode == REAL
        self.bits = config.precision_bits
        self.tol = to_mpf(config.tolerance, config.precision_bits)

    def eq(self, x, y) -> bool:
        if self.real:
            return close_rel(to_mpf(x, self.bits), to_mpf(y, self.bits), self.tol)
        return x == y

    def pos(self, x) -> bool:
        if self.real:
            return x > self.tol
        return x > 0


def classify_small(
    mu: AtomicMeasure,
    config: SolverConfig = DEFAULT_CONFIG,
) -> Verdict:
    """Closed-form verdict for 3 <= p <= 6; errors outside that range."""
    mu.require_no_zero_atom("classify_small")
    p = mu.p
    if not 3 <= p <= 6:
        raise MeasureError(
            f"closed forms cover 3 to 6 atoms, not p={p}; use the generic solver")
    if any(pos.k == 1 for pos in mu.support):
        raise MeasureError(
            "closed forms require rational atom positions; apply "
            "power_positions(mu, 2) first")
    checker = _Checker(mu, config)
    if p == 3:
        return _three_atoms(mu, checker, config)
    if p == 4:
        return _four_atoms(config)
    if p == 5:
        return _five_atoms(mu, checker, config)
    return _six_atoms(mu, checker, config)


def _impossible(rule: str, indices: Tuple[int, ...], message: str,
                config: SolverConfig) -> Verdict:
    return Verdict(IMPOSSIBLE, certificate=Violation(rule, indices, message),
                   precision_bits=config.precision_bits)


def _four_atoms(config: SolverConfig) -> Verdict:
    from .solver import _FOUR_ATOM_VIOLATION

    return Verdict(IMPOSSIBLE, certificate=_FOUR_ATOM_VIOLATION,
                   precision_bits=config.precision_bits)


def _three_atoms(mu: AtomicMeasure, checker: _Checker,
                 config: SolverConfig) -> Verdict:
    lam = [pos.q for pos in mu.support]
    a = list(mu.weights)
    if lam[1] * lam[1] != lam[0] * lam[2]:
        return _impossible(
            "three-atom-support", (1, 2, 3),
            "a three-atom measure admits a root only when the square of the "
            "middle atom equals the product of the outer atoms", config)
    if not checker.eq(a[1] * a[1], 4 * a[0] * a[2]):
        return _impossible(
            "three-atom-weights", (1, 2, 3),
            "the middle mass must satisfy a2^2 = 4*a1*a3", config)
    ratio = lam[1] / lam[0]
    witness = _sqrt_witness(mu, [(Fraction(1), a[0]),
                                 (ratio, a[2])], config)
    return _verified(witness, mu, config)


def _five_atoms(mu: AtomicMeasure, checker: _Checker,
                config: SolverConfig) -> Verdict:
    if geometric_profile(mu.support) is None:
        return _impossible(
            "five-atom-support", (),
            "a five-atom measure admits a root only on a geometric support",
            config)
    lam = [pos.q for pos in mu.support]
    a = list(mu.weights)
    if not checker.eq(a[1] * a[1] * a[4], a[3] * a[3] * a[0]):
        return _impossible(
            "five-atom-weights", (1, 2, 4, 5),
            "the masses must satisfy a2^2*a5 = a4^2*a1", config)
    # a3 = a2^2/(4 a1) + 2 sqrt(a1 a5), tested squared to stay exact
    gap = a[2] - a[1] * a[1] / (4 * a[0])
    if not (checker.pos(gap) and checker.eq(gap * gap, 4 * a[0] * a[4])):
        return _impossible(
            "five-atom-weights", (1, 2, 3, 5),
            "the middle mass must satisfy a3 = a2^2/(4*a1) + 2*sqrt(a1*a5)",
            config)
    ratio = lam[1] / lam[0]
    half = _half_weight(a[1], a[0], mu, config)
    witness = _sqrt_witness(mu, [
        (Fraction(1), a[0]),
        (ratio, None, half),
        (ratio * ratio, a[4]),
    ], config)
    return _verified(witness, mu, config)


def _six_atoms(mu: AtomicMeasure, checker: _Checker,
               config: SolverConfig) -> Verdict:
    lam = [pos.q for pos in mu.support]
    a = list(mu.weights)
    sq2 = lam[1] * lam[1]
    sq5 = lam[4] * lam[4]
    j = next((m for m in range(2, 6) if sq2 == lam[0] * lam[m]), None)
    i = next((m for m in range(4) if sq5 == lam[m] * lam[5]), None)
    if j is None:
        return _impossible(
            "boundary-products", (2,),
            "the square of atom 2 coincides with no other pairwise product",
            config)
    if i is None:
        return _impossible(
            "boundary-products", (5,),
            "the square of atom 5 coincides with no other pairwise product",
            config)
    if j == 5:
        return _impossible(
            "extreme-square-match", (2, 1, 6),
            "the square of atom 2 equals the product of the extreme atoms, "
            "which forces p = 3", config)
    if i == 0:
        return _impossible(
            "extreme-square-match", (5, 1, 6),
            "the square of atom 5 equals the product of the extreme atoms, "
            "which forces p = 3", config)
    if j == 4:
        return _impossible(
            "six-atom-wide-square", (2, 1, 5),
            "the square of atom 2 equals the product of atoms 1 and 5", config)
    if i == 1:
        return _impossible(
            "six-atom-wide-square", (5, 2, 6),
            "the square of atom 5 equals the product of atoms 2 and 6", config)
    if (j, i) == (3, 2):
        return _impossible(
            "six-atom-crossed-squares", (2, 4, 3, 5),
            "the squares of atoms 2 and 5 match the crossed products of "
            "atoms 1,4 and 3,6", config)
    if (j, i) == (2, 3):
        return _impossible(
            "six-atom-middle-case", (2, 3, 5),
            "the square of atom 2 matches atoms 1,3 while the square of atom "
            "5 matches atoms 4,6; this pattern never carries a root", config)
    if (j, i) == (3, 3):
        # squares of atoms 2 and 5 match (1,4) and (4,6)
        if lam[2] * lam[2] != lam[0] * lam[5]:
            return _impossible(
                "six-atom-case-support", (3, 1, 6),
                "this pattern requires the square of atom 3 to equal the "
                "product of the extreme atoms", config)
        identities = [
            (a[1] * a[1], 4 * a[0] * a[3], "a2^2 = 4*a1*a4", (2, 1, 4)),
            (a[2] * a[2], 4 * a[0] * a[5], "a3^2 = 4*a1*a6", (3, 1, 6)),
            (a[4] * a[4], 4 * a[3] * a[5], "a5^2 = 4*a4*a6", (5, 4, 6)),
        ]
        # witness atoms sit at sqrt(lam_1), sqrt(lam_4), sqrt(lam_6)
        anchors = (0, 3, 5)
        rels = (Fraction(1), lam[1] / lam[0], lam[2] / lam[0])
    else:  # (j, i) == (2, 2): squares match (1,3) and (3,6)
        if lam[3] * lam[3] != lam[0] * lam[5]:
            return _impossible(
                "six-atom-case-support", (4, 1, 6),
                "this pattern requires the square of atom 4 to equal the "
                "product of the extreme atoms", config)
        identities = [
            (a[1] * a[1], 4 * a[0] * a[2], "a2^2 = 4*a1*a3", (2, 1, 3)),
            (a[3] * a[3], 4 * a[0] * a[5], "a4^2 = 4*a1*a6", (4, 1, 6)),
            (a[4] * a[4], 4 * a[2] * a[5], "a5^2 = 4*a3*a6", (5, 3, 6)),
        ]
        # witness atoms sit at sqrt(lam_1), sqrt(lam_3), sqrt(lam_6)
        anchors = (0, 2, 5)
        rels = (Fraction(1), lam[1] / lam[0], lam[3] / lam[0])
    for lhs, rhs, text, indices in identities:
        if not checker.eq(lhs, rhs):
            return _impossible(
                "six-atom-case-weights", indices,
                f"the masses must satisfy {text}", config)
    witness = _sqrt_witness(mu, [
        (rel, a[anchor]) for rel, anchor in zip(rels, anchors)
    ], config)
    return _verified(witness, mu, config)


# ---------------------------------------------------------------------------
# witness construction
# ---------------------------------------------------------------------------

def _half_weight(a2, a1, mu: AtomicMeasure, config: SolverConfig):
    """a2 / (2 sqrt(a1)), exact when possible."""
    if mu.mode == RATIONAL:
        root = sqrt_fraction(a1)
        if root is not None:
            return a2 / (2 * root)
    with workprec(config.precision_bits):
        return to_mpf(a2, config.precision_bits) / (
            2 * mpmath.sqrt(to_mpf(a1, config.precision_bits)))


def _sqrt_witness(mu: AtomicMeasure, spec: List[tuple],
                  config: SolverConfig) -> AtomicMeasure:
    """Build the witness sqrt-measure: entries are (relative position,
    mass-to-square-root) or (relative position, None, explicit mass).
    Positions are rel * sqrt(lam_1), exact over the radical base lam_1."""
    lam1 = mu.support[0].q
    atoms = []
    exact = mu.mode == RATIONAL
    weights = []
    for entry in spec:
        if entry[1] is not None:
            value = entry[1]
            if exact and isinstance(value, Fraction):
                weights.append(sqrt_fraction(value))  # None when irrational
            else:
                weights.append(None)
        else:
            weights.append(entry[2] if isinstance(entry[2], Fraction) and exact else None)
    all_exact = exact and all(w is not None for w in weights)
    bits = config.precision_bits
    for entry, w in zip(spec, weights):
        rel = entry[0]
        pos = Position(rel, 1, lam1)
        if all_exact:
            atoms.append((pos, w))
        else:
            with workprec(bits):
                if entry[1] is not None:
                    mass = mpmath.sqrt(to_mpf(entry[1], bits))
                else:
                    mass = to_mpf(entry[2], bits)
            atoms.append((pos, mass))
    mode = RATIONAL if all_exact else REAL
    return make_measure(atoms, mode=mode, base=lam1, bits=bits)


def _verified(witness: AtomicMeasure, mu: AtomicMeasure,
              config: SolverConfig) -> Verdict:
    if not verify_witness(witness, mu, config):
        raise RuntimeError(
            "closed-form witness failed re-verification; this contradicts the "
            "characterization and indicates a bug")
    notes = ("witness squares to the measure itself",)
    if witness.mode == REAL and mu.mode == RATIONAL:
        notes += ("witness masses are irrational; emitted as reals",)
    return Verdict(WITNESS, witness=witness, precision_bits=config.precision_bits,
                   notes=notes)
