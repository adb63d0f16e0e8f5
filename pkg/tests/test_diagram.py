from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alsq.diagram import (
    cardinality_check,
    classify_ur,
    geometric_profile,
    pair_diagram,
    render_diagram,
    structural_certificate,
)
from alsq.measures import MeasureError, Position, make_measure, scale_positions

F = Fraction


def _support(values):
    return [Position(F(v), 0, F(1)) for v in values]


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------

def test_powers_of_two_give_nine_products():
    diagram = pair_diagram(_support([1, 2, 4, 8, 16]))
    assert diagram.card == 9
    assert [e.position.q for e in diagram.entries] == [2 ** k for k in range(9)]


def test_six_atom_example_gives_fifteen_products(six_atom_exact):
    diagram = pair_diagram(six_atom_exact)
    assert diagram.card == 15
    assert [int(e.position.q) for e in diagram.entries] == [
        1, 3, 6, 9, 18, 27, 36, 54, 81, 108, 162, 216, 324, 648, 1296]


def test_two_atom_diagram_complete():
    diagram = pair_diagram(_support([1, 2]))
    assert [(e.position.q, e.pairs) for e in diagram.entries] == [
        (1, ((0, 0),)), (2, ((0, 1),)), (4, ((1, 1),))]


def test_every_pair_appears_exactly_once():
    diagram = pair_diagram(_support([1, 3, 6, 9, 18, 36]))
    seen = [pair for entry in diagram.entries for pair in entry.pairs]
    assert len(seen) == 21 and len(set(seen)) == 21


def test_duplicate_support_rejected():
    with pytest.raises(MeasureError):
        pair_diagram(_support([1, 1, 2]))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classification_powers_of_two():
    c = classify_ur(pair_diagram(_support([1, 2, 4, 8, 16])))
    assert sorted(pos.q for pos in c.ur) == [1, 2, 128, 256]


def test_classification_six_atom_coincidences(six_atom_exact):
    diagram = pair_diagram(six_atom_exact)
    assert diagram.entry_of_pair(1, 2).pairs == ((0, 4), (1, 2))  # value 18
    assert diagram.entry_of_pair(2, 2).pairs == ((0, 5), (2, 2))  # value 36


def test_two_atoms_all_unique():
    c = classify_ur(pair_diagram(_support([1, 2])))
    assert len(c.ur) == 3 and not c.nur


@settings(max_examples=50)
@given(st.lists(st.integers(1, 60), min_size=2, max_size=7, unique=True))
def test_corner_products_always_unique(values):
    support = _support(sorted(values))
    diagram = pair_diagram(support)
    p = diagram.p
    for pair in ((0, 0), (0, 1), (p - 2, p - 1), (p - 1, p - 1)):
        assert diagram.is_ur_pair(*pair)


# ---------------------------------------------------------------------------
# geometric profile
# ---------------------------------------------------------------------------

def test_profile_examples(six_atom_exact):
    a, r = geometric_profile(_support([1, 3, 9, 27]))
    assert (a.q, r.q) == (1, 3)
    assert geometric_profile(six_atom_exact.support) is None
    a, r = geometric_profile(_support([1, 2, 4, 8, 16]))
    assert (a.q, r.q) == (1, 2)
    assert pair_diagram(_support([1, 2, 4, 8, 16])).card == 9


def test_profile_with_radical_ratio():
    # 1, sqrt(2), 2 is geometric with ratio sqrt(2)
    support = [Position(F(1), 0, F(2)), Position(F(1), 1, F(2)),
               Position(F(2), 0, F(2))]
    a, r = geometric_profile(support)
    assert r == Position(F(1), 1, F(2))


@settings(max_examples=60)
@given(st.fractions(min_value=F(6, 5), max_value=F(4), max_denominator=6),
       st.integers(2, 7), st.booleans(), st.integers(5, 40))
def test_profile_iff_minimal_product_count(ratio, p, perturb, denom):
    points = [ratio ** k for k in range(p)]
    if perturb:
        points[-1] *= 1 + F(1, denom)
        points = sorted(set(points))
    support = _support_from(points)
    profile = geometric_profile(support)
    count = pair_diagram(support).card
    assert (profile is not None) == (count == 2 * len(points) - 1)


def _support_from(points):
    return [Position(F(v), 0, F(1)) for v in points]


# ---------------------------------------------------------------------------
# cardinality bounds
# ---------------------------------------------------------------------------

def test_bounds_for_six_atoms(six_atom_exact):
    check = cardinality_check(six_atom_exact)
    assert check.bounds() == (11, 15) and check.ok


def test_bounds_attained_below(five_atom_real):
    check = cardinality_check(five_atom_real)
    assert check.card == 9 == check.lower


def test_bounds_for_four_atoms():
    check = cardinality_check(_support([1, 2, 4, 8]))
    assert check.bounds() == (7, 7) and check.ok
    loose = cardinality_check(_support([2, 3, 5, 7]))
    assert loose.card == 10 and not loose.ok


# ---------------------------------------------------------------------------
# structural certificates
# ---------------------------------------------------------------------------

def test_unique_second_square_is_refuted():
    violation = structural_certificate(_support([1, 2, 3, 5, 7, 11]))
    assert violation is not None and violation.rule == "boundary-products"
    assert 2 in violation.indices


def test_six_atom_example_passes_all_rules(six_atom_exact):
    assert structural_certificate(six_atom_exact) is None


def test_three_atoms_need_middle_square_coincidence():
    assert structural_certificate(_support([1, 2, 4])) is None
    violation = structural_certificate(_support([1, 2, 5]))
    assert violation is not None and violation.rule == "boundary-products"


def test_two_atoms_always_refuted():
    violation = structural_certificate(_support([1, 2]))
    assert violation is not None and violation.rule == "ur-diagonals-edge"


def test_exhaustive_mode_returns_every_violation():
    violations = structural_certificate(_support([1, 2, 3, 5, 7, 11]),
                                        exhaustive=True)
    assert isinstance(violations, list) and len(violations) > 1
    rules = {v.rule for v in violations}
    assert "boundary-products" in rules


def test_certificates_ignore_weights_and_scaling():
    mu = make_measure([(1, F(1, 9)), (2, F(5, 9)), (5, F(3, 9))])
    direct = structural_certificate(mu)
    scaled = structural_certificate(scale_positions(mu, F(7, 3)))
    assert direct.rule == scaled.rule and direct.indices == scaled.indices


def test_wide_square_rule_for_six_atoms():
    # second atom squared equals product of first and fifth
    support = _support([1, 4, 6, 8, 16, 50])
    violation = structural_certificate(support)
    assert violation is not None


def test_violation_json_shape():
    violation = structural_certificate(_support([1, 2, 5]))
    data = violation.to_json_dict()
    assert set(data) == {"rule", "indices", "message"}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def test_render_single_atom():
    text = render_diagram(_support([3]))
    assert "9" in text and "uniquely represented" in text


def test_render_marks_coincidences(six_atom_exact):
    text = render_diagram(six_atom_exact)
    assert "9*" in text and "(1,4) = (2,2)" in text


def test_render_three_atom_chain():
    # geometric three-atom support: five products, middle one doubly realized
    text = render_diagram(_support([1, 2, 4]))
    assert "4*" in text and "(1,3) = (2,2)" in text


def test_render_rejects_large_supports():
    with pytest.raises(MeasureError):
        render_diagram(_support(list(range(1, 15))))


def test_render_alignment_is_stable(six_atom_exact):
    lines = render_diagram(six_atom_exact).splitlines()
    rows = [l for l in lines if l.strip() and l.lstrip()[0].isdigit()]
    assert len({len(r) for r in rows if r.endswith("1296")}) <= 1
