"""Product diagrams of a support and the structural certificate rules.

For a support x_1 < ... < x_p the pairwise products x_i*x_j (i <= j) form a
triangular array.  A product value is *uniquely represented* (UR) when only
one unordered index pair realizes it.  If the reweighted self-convolution of
a measure on this support is to admit a square root, a family of purely
combinatorial conditions on the UR/non-UR pattern must hold; any failure is
returned as a :class:`Violation`, which constitutes a sound impossibility
certificate independent of the weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .measures import AtomicMeasure, MeasureError, Position

Pair = Tuple[int, int]  # 0-based, i <= j


# ---------------------------------------------------------------------------
# diagram and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiagramEntry:
    position: Position
    pairs: Tuple[Pair, ...]

    @property
    def is_ur(self) -> bool:
        return len(self.pairs) == 1


@dataclass(frozen=True, eq=False)
class ProductDiagram:
    p: int
    entries: Tuple[DiagramEntry, ...]
    _by_pair: Dict[Pair, int] = field(repr=False, default_factory=dict)

    @property
    def card(self) -> int:
        return len(self.entries)

    def entry_of_pair(self, i: int, j: int) -> DiagramEntry:
        return self.entries[self._by_pair[(min(i, j), max(i, j))]]

    def is_ur_pair(self, i: int, j: int) -> bool:
        return self.entry_of_pair(i, j).is_ur

    def product(self, i: int, j: int) -> Position:
        return self.entry_of_pair(i, j).position

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "card": self.card,
            "entries": [
                {
                    "product": str(entry.position),
                    "pairs": [[i + 1, j + 1] for i, j in entry.pairs],
                    "uniquely_represented": entry.is_ur,
                }
                for entry in self.entries
            ],
        }


@dataclass(frozen=True, eq=False)
class URClassification:
    ur: Tuple[Position, ...]
    nur: Tuple[Position, ...]

    def summary(self) -> dict:
        return {
            "ur_count": len(self.ur),
            "nur_count": len(self.nur),
            "nur_products": [str(pos) for pos in self.nur],
        }


def _support_of(source: Union[AtomicMeasure, Sequence[Position]]) -> Tuple[Position, ...]:
    if isinstance(source, AtomicMeasure):
        source.require_no_zero_atom("support analysis")
        return source.support
    return tuple(source)


def pair_diagram(support: Union[AtomicMeasure, Sequence[Position]]) -> ProductDiagram:
    """Group all p(p+1)/2 pairwise products by exact equality of value."""
    points = _support_of(support)
    p = len(points)
    if p < 1:
        raise MeasureError("empty support")
    keys = [pos.squared() for pos in points]
    for a, b in zip(keys, keys[1:]):
        if a >= b:
            raise MeasureError("support must be strictly increasing without duplicates")
    grouped: Dict[Fraction, List[Pair]] = {}
    products: Dict[Fraction, Position] = {}
    for i in range(p):
        for j in range(i, p):
            prod = points[i] * points[j]
            key = prod.squared()
            grouped.setdefault(key, []).append((i, j))
            products[key] = prod
    entries = tuple(
        DiagramEntry(products[key], tuple(sorted(grouped[key])))
        for key in sorted(grouped)
    )
    by_pair: Dict[Pair, int] = {}
    for index, entry in enumerate(entries):
        for pair in entry.pairs:
            by_pair[pair] = index
    return ProductDiagram(p, entries, by_pair)


def classify_ur(diagram: ProductDiagram) -> URClassification:
    ur = tuple(e.position for e in diagram.entries if e.is_ur)
    nur = tuple(e.position for e in diagram.entries if not e.is_ur)
    return URClassification(ur, nur)


# ---------------------------------------------------------------------------
# geometric profile
# ---------------------------------------------------------------------------

def geometric_profile(
    support: Union[AtomicMeasure, Sequence[Position]],
) -> Optional[Tuple[Position, Position]]:
    """Return (first atom, common ratio) when the support is a geometric
    progression, else None.  Cross-checked against the equivalent counting
    criterion card = 2p - 1 on the product diagram."""
    points = _support_of(support)
    p = len(points)
    if p == 1:
        profile: Optional[Tuple[Position, Position]] = (
            points[0], Position(Fraction(1), 0, points[0].base))
    else:
        ratio = points[1] / points[0]
        profile = (points[0], ratio)
        for left, right in zip(points, points[1:]):
            if (right / left).squared() != ratio.squared():
                profile = None
                break
    count = pair_diagram(points).card
    if (profile is not None) != (count == 2 * p - 1):
        raise RuntimeError(
            "geometric profile and diagram count disagree; this contradicts "
            "the counting equivalence and indicates a bug")
    return profile


# ---------------------------------------------------------------------------
# cardinality bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CardinalityCheck:
    p: int
    card: int
    lower: int
    upper: Optional[int]
    ok: bool

    def bounds(self) -> Tuple[int, Optional[int]]:
        return (self.lower, self.upper)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "card": self.card,
            "lower": self.lower,
            "upper": self.upper,
            "ok": self.ok,
        }


def cardinality_check(source: Union[AtomicMeasure, Sequence[Position]]) -> CardinalityCheck:
    """Compare card(supp of the reweighted self-convolution) against the
    bounds 2p-1 <= card <= floor(((p-1)^2 + 6)/2); the upper bound applies
    for p >= 4 and its failure certifies that no square root exists."""
    points = _support_of(source)
    p = len(points)
    card = pair_diagram(points).card
    lower = 2 * p - 1
    upper = ((p - 1) ** 2 + 6) // 2 if p >= 4 else None
    ok = card >= lower and (upper is None or card <= upper)
    return CardinalityCheck(p, card, lower, upper, ok)


# ---------------------------------------------------------------------------
# violations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """A failed necessary condition; a sound proof that no root exists.

    ``indices`` are 1-based atom indices witnessing the failed rule.
    """

    rule: str
    indices: Tuple[int, ...]
    message: str

    def render(self) -> str:
        return f"[{self.rule}] {self.message}"

    def to_json_dict(self) -> dict:
        return {
            "rule": self.rule,
            "indices": list(self.indices),
            "message": self.message,
        }


def _v(rule: str, indices: Sequence[int], message: str) -> Violation:
    return Violation(rule, tuple(int(i) + 1 for i in indices), message)


def _check_boundary_products(diagram: ProductDiagram) -> List[Violation]:
    """The squares of the second and next-to-last atoms, and the extreme
    cross products, are forced to coincide with some other product."""
    p = diagram.p
    out: List[Violation] = []
    if p < 3:
        return out
    members: List[Tuple[Pair, str]] = [
        ((1, 1), "the square of atom 2"),
        ((p - 2, p - 2), f"the square of atom {p - 1}"),
        ((0, p - 1), f"the product of atoms 1 and {p}"),
    ]
    if p >= 4:
        members.append(((0, p - 2), f"the product of atoms 1 and {p - 1}"))
        members.append(((1, p - 1), f"the product of atoms 2 and {p}"))
    seen = set()
    for pair, label in members:
        if pair in seen:
            continue
        seen.add(pair)
        if diagram.is_ur_pair(*pair):
            out.append(_v(
                "boundary-products", pair,
                f"{label} ({diagram.product(*pair)}) coincides with no other "
                "pairwise product, but a square root requires it to"))
    return out


def _check_cardinality(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    if p < 4:
        return []
    upper = ((p - 1) ** 2 + 6) // 2
    if diagram.card > upper:
        return [_v(
            "support-cardinality", (),
            f"{diagram.card} distinct pairwise products exceed the admissible "
            f"maximum {upper} for {p} atoms")]
    return []


def _check_extreme_square(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    if p < 4:
        return out
    extreme = diagram.product(0, p - 1).squared()
    if diagram.product(1, 1).squared() == extreme:
        out.append(_v(
            "extreme-square-match", (1, 0, p - 1),
            "the square of atom 2 equals the product of the extreme atoms, "
            f"which forces p = 3 but p = {p}"))
    if diagram.product(p - 2, p - 2).squared() == extreme:
        out.append(_v(
            "extreme-square-match", (p - 2, 0, p - 1),
            f"the square of atom {p - 1} equals the product of the extreme "
            f"atoms, which forces p = 3 but p = {p}"))
    return out


def _check_double_extreme(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    if p < 5:
        return []
    if (diagram.product(1, 1).squared() == diagram.product(0, p - 2).squared()
            and diagram.product(p - 2, p - 2).squared() == diagram.product(1, p - 1).squared()):
        return [_v(
            "double-extreme-match", (1, p - 2),
            f"the squares of atoms 2 and {p - 1} match the opposite near-extreme "
            f"products simultaneously, which forces p = 4 but p = {p}")]
    return []


def _check_doubly_ur_column(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    if p < 3:
        return out
    for k in range(1, p - 1):
        if diagram.is_ur_pair(0, k) and diagram.is_ur_pair(1, k):
            out.append(_v(
                "doubly-ur-column", (0, 1, k),
                f"the products of atom {k + 1} with both atoms 1 and 2 are "
                "uniquely represented, but at least one must coincide"))
        if diagram.is_ur_pair(p - 2, k) and diagram.is_ur_pair(p - 1, k):
            out.append(_v(
                "doubly-ur-column", (p - 2, p - 1, k),
                f"the products of atom {k + 1} with both atoms {p - 1} and {p} "
                "are uniquely represented, but at least one must coincide"))
    full = [k for k in range(1, p - 1)
            if diagram.is_ur_pair(0, k) and diagram.is_ur_pair(p - 1, k)]
    if len(full) >= 2:
        out.append(_v(
            "doubly-ur-column", (full[0], full[1]),
            f"atoms {full[0] + 1} and {full[1] + 1} both form uniquely "
            f"represented products with the two extreme atoms; only one may"))
    elif len(full) == 1:
        k = full[0]
        if diagram.product(k, k).squared() != diagram.product(0, p - 1).squared():
            out.append(_v(
                "doubly-ur-column", (k,),
                f"atom {k + 1} forms uniquely represented products with both "
                "extreme atoms, so its square must equal their product; it "
                "does not"))
    return out


def _check_ur_diagonals_edge(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    for i in range(p):
        for j in range(i + 1, p):
            if (diagram.is_ur_pair(i, i) and diagram.is_ur_pair(j, j)
                    and diagram.is_ur_pair(i, j)):
                out.append(_v(
                    "ur-diagonals-edge", (i, j),
                    f"the squares of atoms {i + 1} and {j + 1} and their mutual "
                    "product are all uniquely represented, which is impossible"))
    return out


def _check_ur_corner_triangle(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    for i in range(p):
        if not diagram.is_ur_pair(i, i):
            continue
        others = [j for j in range(p) if j != i]
        for j, k in combinations(others, 2):
            if (diagram.is_ur_pair(i, j) and diagram.is_ur_pair(i, k)
                    and diagram.is_ur_pair(j, k)):
                out.append(_v(
                    "ur-corner-triangle", (i, j, k),
                    f"the square of atom {i + 1} and the three products among "
                    f"atoms {i + 1}, {j + 1}, {k + 1} are all uniquely "
                    "represented, which is impossible"))
    return out


def _check_ur_chain_midpoint(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    for i in range(p):
        for k in range(i + 1, p):
            if not (diagram.is_ur_pair(i, i) and diagram.is_ur_pair(k, k)):
                continue
            for j in range(p):
                if j in (i, k):
                    continue
                if diagram.is_ur_pair(i, j) and diagram.is_ur_pair(j, k):
                    if diagram.product(j, j).squared() != diagram.product(i, k).squared():
                        out.append(_v(
                            "ur-chain-midpoint", (i, j, k),
                            f"the chain of uniquely represented products through "
                            f"atoms {i + 1}, {j + 1}, {k + 1} forces the square of "
                            f"atom {j + 1} to equal the product of atoms {i + 1} "
                            f"and {k + 1}; it does not"))
    return out


def _check_ur_rectangle(diagram: ProductDiagram) -> List[Violation]:
    p = diagram.p
    out: List[Violation] = []
    for quad in combinations(range(p), 4):
        a, b, c, d = quad
        cycles = (
            ((a, b), (b, c), (c, d), (d, a)),
            ((a, b), (b, d), (d, c), (c, a)),
            ((a, c), (c, b), (b, d), (d, a)),
        )
        for cycle in cycles:
            if all(diagram.is_ur_pair(*pair) for pair in cycle):
                out.append(_v(
                    "ur-rectangle", quad,
                    f"atoms {a + 1}, {b + 1}, {c + 1}, {d + 1} carry a four-cycle "
                    "of uniquely represented products, which is impossible"))
                break
    return out


def _check_six_atom_rules(diagram: ProductDiagram) -> List[Violation]:
    if diagram.p != 6:
        return []
    out: List[Violation] = []
    sq2 = diagram.product(1, 1).squared()
    sq5 = diagram.product(4, 4).squared()
    if sq2 == diagram.product(0, 4).squared():
        out.append(_v(
            "six-atom-wide-square", (1, 0, 4),
            "the square of atom 2 equals the product of atoms 1 and 5, which "
            "six-atom supports with a root never satisfy"))
    if sq5 == diagram.product(1, 5).squared():
        out.append(_v(
            "six-atom-wide-square", (4, 1, 5),
            "the square of atom 5 equals the product of atoms 2 and 6, which "
            "six-atom supports with a root never satisfy"))
    if (sq2 == diagram.product(0, 3).squared()
            and sq5 == diagram.product(2, 5).squared()):
        out.append(_v(
            "six-atom-crossed-squares", (1, 3, 2, 4),
            "the squares of atoms 2 and 5 match the crossed products of atoms "
            "1,4 and 3,6 simultaneously, which six-atom supports with a root "
            "never satisfy"))
    return out


_RULE_SEQUENCE = (
    _check_boundary_products,
    _check_cardinality,
    _check_extreme_square,
    _check_double_extreme,
    _check_doubly_ur_column,
    _check_ur_diagonals_edge,
    _check_ur_corner_triangle,
    _check_ur_chain_midpoint,
    _check_ur_rectangle,
    _check_six_atom_rules,
)


def structural_certificate(
    source: Union[AtomicMeasure, Sequence[Position]],
    exhaustive: bool = False,
) -> Union[Optional[Violation], List[Violation]]:
    """Run the necessary-condition rules in fixed cheapest-first order.

    Returns the first Violation (or None), or every violation when
    ``exhaustive`` is set.  All rules are weight-independent.
    """
    points = _support_of(source)
    if len(points) < 2:
        return [] if exhaustive else None
    diagram = pair_diagram(points)
    found: List[Violation] = []
    for rule in _RULE_SEQUENCE:
        violations = rule(diagram)
        if violations:
            if not exhaustive:
                return violations[0]
            found.extend(violations)
    return found if exhaustive else None


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

MAX_RENDER_ATOMS = 12


def render_diagram(source: Union[AtomicMeasure, Sequence[Position]]) -> str:
    """ASCII triangular table of pairwise products; '*' marks products with
    several index pairs, and the coincidence classes are listed below."""
    points = _support_of(source)
    p = len(points)
    if p > MAX_RENDER_ATOMS:
        raise MeasureError(
            f"diagram rendering supports at most {MAX_RENDER_ATOMS} atoms; "
            "use the JSON output instead")
    diagram = pair_diagram(points)
    cells = {}
    width = 4
    for i in range(p):
        for j in range(i, p):
            entry = diagram.entry_of_pair(i, j)
            text = str(entry.position) + ("*" if not entry.is_ur else "")
            cells[(i, j)] = text
            width = max(width, len(text) + 2)
    header = "i\\j".rjust(5) + "".join(str(j + 1).rjust(width) for j in range(p))
    lines = [
        f"pairwise products of {p} atoms "
        f"({diagram.card} distinct, * = multiple index pairs)",
        header,
    ]
    for i in range(p):
        row = str(i + 1).rjust(5) + " " * (width * i)
        row += "".join(cells[(i, j)].rjust(width) for j in range(i, p))
        lines.append(row)
    classes = [e for e in diagram.entries if not e.is_ur]
    if classes:
        lines.append("coincidence classes:")
        for entry in classes:
            refs = " = ".join(f"({i + 1},{j + 1})" for i, j in entry.pairs)
            lines.append(f"  {entry.position}: {refs}")
    else:
        lines.append("all products uniquely represented")
    return "\n".join(lines)
