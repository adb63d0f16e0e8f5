from fractions import Fraction

from alsq.analyze import AnalyzeOptions, analyze
from alsq.measures import Position, make_measure

F = Fraction


def test_report_fields_for_six_atom_example(six_atom_exact):
    report = analyze(six_atom_exact)
    assert report.p == 6
    assert report.card == 15
    assert report.bounds == (11, 15)
    assert report.geometric is None
    assert report.structural is None
    assert report.ur_summary["nur_count"] == 6
    assert report.agreement is True
    assert report.sqrt_verdict.outcome == "witness"
    assert report.aluthge_verdict.outcome == "witness"
    assert report.zero_mass is None


def test_report_is_deterministic(six_atom_exact):
    a = analyze(six_atom_exact).to_json_dict()
    b = analyze(six_atom_exact).to_json_dict()
    assert a == b


def test_zero_atom_is_stripped_and_noted():
    mu = make_measure([(0, F(1, 3)), (1, F(1, 3)), (2, F(1, 6)),
                       (4, F(1, 6))])
    report = analyze(mu)
    assert report.zero_mass == "1/3"
    assert report.p == 3
    assert any("origin" in note for note in report.notes)
    # the verdict matches the restriction: (1/3, 1/6, 1/6) is not admissible
    assert report.aluthge_verdict.outcome == "impossible"


def test_zero_atom_root_verdict_matches_restriction():
    body = [(1, F(1, 4)), (2, F(1, 2)), (4, F(1, 4))]
    with_zero = analyze(make_measure([(0, F(1, 5))] + body))
    without = analyze(make_measure(body))
    assert with_zero.aluthge_verdict.outcome == without.aluthge_verdict.outcome
    assert with_zero.sqrt_verdict.outcome == without.sqrt_verdict.outcome


def test_shift_tables_optional(six_atom_exact):
    plain = analyze(six_atom_exact)
    assert plain.shift_tables is None
    with_tables = analyze(six_atom_exact, AnalyzeOptions(shift_terms=5))
    assert with_tables.shift_tables["terms"] == 5
    assert len(with_tables.shift_tables["rows"]) == 5


def test_radical_positions_skip_search_paths():
    mu = make_measure([(Position(F(k), 1, F(2)), F(1, 3)) for k in (1, 2, 3)])
    report = analyze(mu)
    assert report.sqrt_verdict is None
    assert any("skipped" in note for note in report.notes)
    assert report.small_verdict is None
    assert report.aluthge_verdict is not None


def test_render_contains_key_lines(five_atom_real):
    text = analyze(five_atom_real).render()
    assert "9 distinct" in text
    assert "geometric, start 1, ratio 2" in text
    assert "square root  : witness" in text


def test_single_atom_report():
    report = analyze(make_measure([(F(9, 4), 2)]))
    assert report.p == 1
    assert report.card == 1
    assert report.bounds == (1, None)
    assert report.sqrt_verdict.outcome == "witness"
    assert report.aluthge_verdict.outcome == "witness"
    assert report.small_verdict is None
    assert "[1, -]" in report.render()


def test_two_atom_report_is_refuted():
    report = analyze(make_measure([(1, F(1, 2)), (2, F(1, 2))]))
    assert report.sqrt_verdict.outcome == "impossible"
    assert report.aluthge_verdict.outcome == "impossible"
    assert report.structural is not None
