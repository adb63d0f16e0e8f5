"""Finitely atomic measures on (0, infinity) with exact atom positions.

A position is q * sqrt(s)^k with q a positive rational, k in {0, 1} and s a
positive rational "radical base" shared by all atoms of a measure.  This is
the smallest class closed under the pairwise products that multiplicative
convolution produces, while keeping position equality decidable: support
combinatorics must never depend on floating point.

Masses are either exact rationals ("rational" mode) or arbitrary-precision
reals ("real" mode).  A mass sitting at the origin is stored separately as
``zero_mass`` and is only consumed by :func:`strip_zero_atom`; every other
operation requires it to be absent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

import mpmath
from mpmath import mpf, workprec

from .scalars import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_TOLERANCE,
    ScalarError,
    close_rel,
    format_rational,
    mpf_to_fraction,
    parse_rational,
    sqrt_fraction,
    to_mpf,
)

RATIONAL = "rational"
REAL = "real"


class MeasureError(ValueError):
    """Structured validation/usage error for measure operations."""


class IncompatibleBasesError(MeasureError):
    pass


class ZeroAtomError(MeasureError):
    pass


# ---------------------------------------------------------------------------
# positions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Position:
    """Exact atom position q * sqrt(base)^k, q > 0 rational, k in {0, 1}."""

    q: Fraction
    k: int
    base: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "base", Fraction(self.base))
        if self.q <= 0:
            raise MeasureError(f"position must be positive, got {self.q}")
        if self.k not in (0, 1):
            raise MeasureError(f"radical exponent must be 0 or 1, got {self.k}")
        if self.base <= 0:
            raise MeasureError(f"radical base must be positive, got {self.base}")
        if self.k == 1:
            root = sqrt_fraction(self.base)
            if root is not None:
                # collapse sqrt of a perfect square so equality stays syntactic
                object.__setattr__(self, "q", self.q * root)
                object.__setattr__(self, "k", 0)

    @staticmethod
    def of(value: Union["Position", Fraction, int, str], base: Fraction = Fraction(1)) -> "Position":
        if isinstance(value, Position):
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        return Position(Fraction(value), 0, base)

    def squared(self) -> Fraction:
        """value^2, always rational; the canonical comparison key.

        Injective over a common base: q1^2 = q2^2 * s would make s a square
        of a rational, and square bases are collapsed at construction.
        """
        return self.q * self.q * (self.base if self.k else 1)

    def rebase(self, base: Fraction) -> "Position":
        if self.k == 1 and base != self.base:
            raise IncompatibleBasesError(
                f"cannot move radical position {self} to base {base}")
        return Position(self.q, self.k, base)

    def __mul__(self, other: "Position") -> "Position":
        if self.base != other.base:
            raise IncompatibleBasesError(
                f"positions over different radical bases: {self.base} vs {other.base}")
        k = self.k + other.k
        q = self.q * other.q
        if k == 2:
            return Position(q * self.base, 0, self.base)
        return Position(q, k, self.base)

    def __truediv__(self, other: "Position") -> "Position":
        if self.base != other.base:
            raise IncompatibleBasesError(
                f"positions over different radical bases: {self.base} vs {other.base}")
        k = self.k - other.k
        q = self.q / other.q
        if k == -1:
            return Position(q / self.base, 1, self.base)
        return Position(q, k, self.base)

    def power(self, n: int) -> "Position":
        if n < 1:
            raise MeasureError("positions admit positive integer powers only")
        k = self.k * n
        q = self.q ** n * self.base ** (k // 2)
        return Position(q, k % 2, self.base)

    def scale(self, x: Fraction) -> "Position":
        x = Fraction(x)
        if x <= 0:
            raise MeasureError(f"scale factor must be positive, got {x}")
        return Position(self.q * x, self.k, self.base)

    def is_rational(self) -> bool:
        return self.k == 0

    def as_fraction(self) -> Fraction:
        if self.k != 0:
            raise MeasureError(f"{self} is irrational")
        return self.q

    def to_mpf(self, bits: int = DEFAULT_PRECISION_BITS) -> mpf:
        with workprec(bits):
            value = mpmath.mpmathify(self.q)
            if self.k:
                value *= mpmath.sqrt(mpmath.mpmathify(self.base))
            return value

    def _key(self):
        return (self.q, self.k, self.base if self.k else None)

    def __eq__(self, other):
        if not isinstance(other, Position):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: "Position"):
        return self.squared() < other.squared()

    def __le__(self, other: "Position"):
        return self.squared() <= other.squared()

    def __str__(self):
        if self.k == 0:
            return format_rational(self.q)
        if self.q == 1:
            return f"sqrt({format_rational(self.base)})"
        return f"{format_rational(self.q)}*sqrt({format_rational(self.base)})"

    def __repr__(self):
        return f"Position({self})"


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

Weight = Union[Fraction, mpf]
AtomLike = Tuple[Union[Position, Fraction, int, str], Union[Weight, int, str]]


@dataclass(frozen=True)
class AtomicMeasure:
    """Immutable finitely atomic measure; atoms sorted by position."""

    base: Fraction
    mode: str
    atoms: Tuple[Tuple[Position, Weight], ...]
    zero_mass: Weight = Fraction(0)

    @property
    def p(self) -> int:
        return len(self.atoms)

    @property
    def support(self) -> Tuple[Position, ...]:
        return tuple(pos for pos, _ in self.atoms)

    @property
    def weights(self) -> Tuple[Weight, ...]:
        return tuple(w for _, w in self.atoms)

    def weight_at(self, pos: Position) -> Optional[Weight]:
        for candidate, w in self.atoms:
            if candidate == pos:
                return w
        return None

    def total_mass(self) -> Weight:
        with workprec(512):  # exact for rationals, lossless for real sums
            total = self.zero_mass
            for _, w in self.atoms:
                total = total + w
            return total

    def has_zero_atom(self) -> bool:
        return _weight_nonzero(self.zero_mass)

    def require_no_zero_atom(self, op: str) -> None:
        if self.has_zero_atom():
            raise ZeroAtomError(
                f"{op} requires a measure without mass at the origin; "
                "apply strip_zero_atom first")

    def is_exact(self) -> bool:
        return self.mode == RATIONAL

    def to_real(self, bits: int = DEFAULT_PRECISION_BITS) -> "AtomicMeasure":
        if self.mode == REAL:
            return self
        return AtomicMeasure(
            self.base,
            REAL,
            tuple((pos, to_mpf(w, bits)) for pos, w in self.atoms),
            to_mpf(self.zero_mass, bits) if _weight_nonzero(self.zero_mass) else Fraction(0),
        )

    def __str__(self):
        parts = []
        if self.has_zero_atom():
            parts.append(f"{_weight_str(self.zero_mass)}*d(0)")
        parts.extend(f"{_weight_str(w)}*d({pos})" for pos, w in self.atoms)
        return " + ".join(parts) if parts else "0"

    def describe(self) -> str:
        return f"{self.p}-atom {self.mode} measure: {self}"


def _weight_nonzero(w: Weight) -> bool:
    return w != 0


def _weight_str(w: Weight) -> str:
    if isinstance(w, Fraction):
        return format_rational(w)
    return mpmath.nstr(w, 12)


def make_measure(
    atoms: Iterable[AtomLike],
    mode: str = RATIONAL,
    base: Optional[Fraction] = None,
    zero_mass: Union[Weight, int, str] = 0,
    bits: int = DEFAULT_PRECISION_BITS,
) -> AtomicMeasure:
    """Validate, sort and build a measure from (position, weight) pairs."""
    if mode not in (RATIONAL, REAL):
        raise MeasureError(f"unknown scalar mode {mode!r}")
    pairs = list(atoms)
    inferred = Fraction(base) if base is not None else None
    if inferred is None:
        for pos_like, _ in pairs:
            if isinstance(pos_like, Position):
                inferred = pos_like.base
                break
    if inferred is None:
        inferred = Fraction(1)

    built: List[Tuple[Position, Weight]] = []
    zero = _convert_weight(zero_mass, mode, bits)
    for pos_like, w in pairs:
        weight = _convert_weight(w, mode, bits)
        if isinstance(pos_like, Position):
            pos = pos_like if pos_like.base == inferred else pos_like.rebase(inferred)
        else:
            raw = parse_rational(pos_like) if isinstance(pos_like, str) else Fraction(pos_like)
            if raw == 0:
                if weight <= 0:
                    raise MeasureError("mass at the origin must be positive")
                zero = zero + weight
                continue
            pos = Position(raw, 0, inferred)
        if weight <= 0:
            raise MeasureError(f"weight at {pos} must be positive, got {weight}")
        if mode == REAL and weight <= to_mpf(DEFAULT_TOLERANCE, bits):
            raise MeasureError(
                f"weight at {pos} lies below the comparison tolerance")
        built.append((pos, weight))

    built.sort(key=lambda item: item[0].squared())
    for left, right in zip(built, built[1:]):
        if left[0].squared() == right[0].squared():
            raise MeasureError(f"duplicate position {left[0]}")
    if not built:
        raise MeasureError("a measure needs at least one atom on (0, inf)")
    return AtomicMeasure(inferred, mode, tuple(built), zero)


def _convert_weight(w, mode: str, bits: int) -> Weight:
    if mode == RATIONAL:
        if isinstance(w, mpf):
            raise MeasureError("rational mode cannot hold floating weights")
        if isinstance(w, str):
            return parse_rational(w)
        return Fraction(w)
    if isinstance(w, mpf):
        return w
    if isinstance(w, str):
        with workprec(bits):
            try:
                return +mpmath.mpmathify(Fraction(w))
            except (ValueError, ZeroDivisionError):
                return mpmath.mpf(w)
    return to_mpf(Fraction(w) if not isinstance(w, Fraction) else w, bits)


def dirac(position, weight=1, mode: str = RATIONAL, base: Fraction = Fraction(1)) -> AtomicMeasure:
    return make_measure([(position, weight)], mode=mode, base=base)


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def _common_base(mu: AtomicMeasure, nu: AtomicMeasure) -> Fraction:
    if mu.base == nu.base:
        return mu.base
    if all(pos.k == 0 for pos in mu.support):
        return nu.base
    if all(pos.k == 0 for pos in nu.support):
        return mu.base
    raise IncompatibleBasesError(
        f"radical bases {mu.base} and {nu.base} are incompatible")


def _mode_join(mu: AtomicMeasure, nu: AtomicMeasure) -> str:
    return REAL if REAL in (mu.mode, nu.mode) else RATIONAL


def convolve(mu: AtomicMeasure, nu: AtomicMeasure, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    """Multiplicative convolution: atoms at all pairwise products x*y with
    mass summed over coinciding products."""
    mu.require_no_zero_atom("convolve")
    nu.require_no_zero_atom("convolve")
    base = _common_base(mu, nu)
    mode = _mode_join(mu, nu)
    mu_atoms = [(pos.rebase(base) if pos.k == 0 else pos, w) for pos, w in mu.atoms]
    nu_atoms = [(pos.rebase(base) if pos.k == 0 else pos, w) for pos, w in nu.atoms]
    if mode == REAL:
        mu_atoms = [(pos, to_mpf(w, bits)) for pos, w in mu_atoms]
        nu_atoms = [(pos, to_mpf(w, bits)) for pos, w in nu_atoms]
    merged = {}
    with workprec(bits):
        for px, wx in mu_atoms:
            for py, wy in nu_atoms:
                key = px * py
                mass = wx * wy
                if key in merged:
                    merged[key] = merged[key] + mass
                else:
                    merged[key] = mass
    atoms = sorted(merged.items(), key=lambda item: item[0].squared())
    return AtomicMeasure(base, mode, tuple(atoms))


def t_weight(mu: AtomicMeasure, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    """Multiply each mass by its position (the density-t reweighting)."""
    mu.require_no_zero_atom("t_weight")
    atoms = []
    for pos, w in mu.atoms:
        if mu.mode == RATIONAL:
            if pos.k != 0:
                raise MeasureError(
                    f"t_weight at irrational position {pos} leaves the rational "
                    "field; use real mode")
            atoms.append((pos, w * pos.q))
        else:
            with workprec(bits):
                atoms.append((pos, w * pos.to_mpf(bits)))
    return AtomicMeasure(mu.base, mu.mode, tuple(atoms))


def moment(mu: AtomicMeasure, n: int, bits: int = DEFAULT_PRECISION_BITS):
    """n-th power moment.  Exact (Fraction) whenever every contribution is
    rational, otherwise an mpf at the given precision."""
    if n < 0:
        raise MeasureError("moment order must be nonnegative")
    mu.require_no_zero_atom("moment")
    exact = mu.mode == RATIONAL and all(
        pos.k == 0 or n % 2 == 0 for pos, _ in mu.atoms)
    if exact:
        total = Fraction(0)
        for pos, w in mu.atoms:
            value = pos.q ** n * pos.base ** ((pos.k * n) // 2)
            total += w * value
        return total
    with workprec(bits):
        total = mpf(0)
        for pos, w in mu.atoms:
            total += to_mpf(w, bits) * pos.to_mpf(bits) ** n
        return total


def scale_positions(mu: AtomicMeasure, x: Union[Fraction, int, str]) -> AtomicMeasure:
    x = parse_rational(x) if isinstance(x, str) else Fraction(x)
    if x <= 0:
        raise MeasureError(f"scale factor must be positive, got {x}")
    mu.require_no_zero_atom("scale_positions")
    return AtomicMeasure(mu.base, mu.mode,
                         tuple((pos.scale(x), w) for pos, w in mu.atoms))


def power_positions(mu: AtomicMeasure, n: int) -> AtomicMeasure:
    if not isinstance(n, int) or n < 1:
        raise MeasureError("power_positions takes a positive integer exponent")
    mu.require_no_zero_atom("power_positions")
    return AtomicMeasure(mu.base, mu.mode,
                         tuple((pos.power(n), w) for pos, w in mu.atoms))


def strip_zero_atom(mu: AtomicMeasure) -> Tuple[Weight, AtomicMeasure]:
    """Split off the mass at the origin.  Everything downstream analyses the
    restriction to (0, inf); root existence is unaffected by the split."""
    if not mu.atoms:
        raise MeasureError("measure carries mass only at the origin")
    if not mu.has_zero_atom():
        return (Fraction(0) if mu.mode == RATIONAL else mpf(0)), mu
    return mu.zero_mass, AtomicMeasure(mu.base, mu.mode, mu.atoms)


def normalize(mu: AtomicMeasure, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    total = mu.total_mass()
    if not _weight_nonzero(total):
        raise MeasureError("cannot normalize a measure with zero total mass")
    with workprec(bits):
        atoms = tuple((pos, w / total) for pos, w in mu.atoms)
        zero = mu.zero_mass / total if _weight_nonzero(mu.zero_mass) else mu.zero_mass
    return AtomicMeasure(mu.base, mu.mode, atoms, zero)


def measures_equal(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    tol: Optional[mpf] = None,
) -> bool:
    """Atom-by-atom equality; positions exactly, weights exactly or within a
    relative tolerance when either side is real."""
    if mu.p != nu.p:
        return False
    if mu.has_zero_atom() != nu.has_zero_atom():
        return False
    pairs = list(zip(mu.atoms, nu.atoms))
    if mu.has_zero_atom():
        pairs.append(((None, mu.zero_mass), (None, nu.zero_mass)))
    for (pos_a, w_a), (pos_b, w_b) in pairs:
        if pos_a is not None and pos_a.squared() != pos_b.squared():
            return False
        if isinstance(w_a, Fraction) and isinstance(w_b, Fraction):
            if w_a != w_b:
                return False
        else:
            if tol is None:
                raise MeasureError("comparing real weights requires a tolerance")
            if not close_rel(to_mpf(w_a, 300), to_mpf(w_b, 300), tol):
                return False
    return True


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

def measure_to_json_dict(mu: AtomicMeasure) -> dict:
    atoms = []
    if mu.has_zero_atom():
        atoms.append({"pos_q": "0", "pos_k": 0, "weight": _weight_json(mu.zero_mass)})
    for pos, w in mu.atoms:
        atoms.append({
            "pos_q": format_rational(pos.q),
            "pos_k": pos.k,
            "weight": _weight_json(w),
        })
    return {
        "radical_base": format_rational(mu.base),
        "mode": mu.mode,
        "atoms": atoms,
    }


def _weight_json(w: Weight) -> str:
    if isinstance(w, Fraction):
        return format_rational(w)
    # exact dyadic form: parses back to the identical mpf, so emission is
    # byte-stable under reload
    return format_rational(mpf_to_fraction(w))


def measure_from_json_dict(data: dict, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    try:
        base = parse_rational(str(data["radical_base"]))
        mode = data["mode"]
        raw_atoms = data["atoms"]
    except (KeyError, TypeError) as exc:
        raise MeasureError(f"malformed measure document: missing {exc}") from exc
    if mode not in (RATIONAL, REAL):
        raise MeasureError(f"unknown scalar mode {mode!r}")
    atoms: List[AtomLike] = []
    zero: Union[Weight, int] = 0
    for index, atom in enumerate(raw_atoms):
        try:
            q = parse_rational(str(atom["pos_q"]))
            k = int(atom["pos_k"])
            weight = str(atom["weight"])
        except (KeyError, TypeError, ValueError, ScalarError) as exc:
            raise MeasureError(f"atom {index}: {exc}") from exc
        if k not in (0, 1):
            raise MeasureError(f"atom {index}: pos_k must be 0 or 1")
        if q == 0:
            if k != 0:
                raise MeasureError(f"atom {index}: the origin cannot carry a radical")
            zero_w = _convert_weight(weight, mode, bits)
            if zero_w <= 0:
                raise MeasureError(f"atom {index}: weight must be positive")
            zero = zero_w if zero == 0 else zero + zero_w
            continue
        if q < 0:
            raise MeasureError(f"atom {index}: negative positions are not modeled")
        try:
            parsed = _convert_weight(weight, mode, bits)
            if parsed <= 0:
                raise MeasureError("weight must be positive")
            atoms.append((Position(q, k, base), parsed))
        except MeasureError as exc:
            raise MeasureError(f"atom {index}: {exc}") from exc
    try:
        return make_measure(atoms, mode=mode, base=base, zero_mass=zero, bits=bits)
    except MeasureError as exc:
        raise MeasureError(str(exc)) from exc


def dumps_measure(mu: AtomicMeasure) -> str:
    return json.dumps(measure_to_json_dict(mu), indent=2) + "\n"


def loads_measure(text: str, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureError(f"invalid JSON: {exc}") from exc
    return measure_from_json_dict(data, bits=bits)


def load_measure(path: str, bits: int = DEFAULT_PRECISION_BITS) -> AtomicMeasure:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_measure(handle.read(), bits=bits)


def save_measure(mu: AtomicMeasure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_measure(mu))
