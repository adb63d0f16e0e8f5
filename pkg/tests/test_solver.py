from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf, workprec

from alsq.diagram import Violation
from alsq.generate import GeneratorSpec, generate
from alsq.measures import (
    MeasureError,
    Position,
    ZeroAtomError,
    convolve,
    dirac,
    make_measure,
    power_positions,
    scale_positions,
    t_weight,
)
from alsq.solver import (
    IMPOSSIBLE,
    UNDETERMINED,
    WITNESS,
    PartialAssignment,
    SolverConfig,
    aluthge_subnormal,
    build_system,
    propagate_ur,
    solve_weights,
    sqrt_of,
    verify_witness,
)

F = Fraction


def _aluthge_system(mu):
    target = convolve(mu, t_weight(mu))
    system = build_system(target, mu.support)
    assert not isinstance(system, Violation)
    return system


# ---------------------------------------------------------------------------
# system construction
# ---------------------------------------------------------------------------

def test_build_system_three_atom_values(three_atom_square):
    # expected equations derived by expanding a_i a_j (x_i + x_j) by hand:
    # b1^2 = 1/16, 2 b1 b2 = 3/8, 2 b1 b3 + b2^2 = 13/16, 2 b2 b3 = 3/4,
    # b3^2 = 1/4
    system = _aluthge_system(three_atom_square)
    table = {tuple(eq.pairs): eq.rhs for eq in system.equations}
    assert table[((0, 0),)] == F(1, 16)
    assert table[((0, 1),)] == F(3, 8)
    assert table[((0, 2), (1, 1))] == F(13, 16)
    assert table[((1, 2),)] == F(3, 4)
    assert table[((2, 2),)] == F(1, 4)


def test_build_system_two_atom_complete():
    nu = make_measure([(1, F(1, 2)), (2, F(1, 2))])
    target = convolve(nu, nu)
    system = build_system(target, nu.support)
    table = {tuple(eq.pairs): eq.rhs for eq in system.equations}
    assert table == {((0, 0),): F(1, 4), ((0, 1),): F(1, 2),
                     ((1, 1),): F(1, 4)}


def test_build_system_detects_missing_product():
    target = make_measure([(v, F(1, 6)) for v in (1, 2, 3, 6, 9)])
    support = [Position(F(v), 0, F(1)) for v in (1, 2, 3)]
    result = build_system(target, support)
    assert isinstance(result, Violation)
    assert result.rule == "support-product-mismatch"


def test_system_pairs_partition_all_indices(three_atom_square):
    system = _aluthge_system(three_atom_square)
    pairs = [pair for eq in system.equations for pair in eq.pairs]
    assert sorted(pairs) == [(i, j) for i in range(3) for j in range(i, 3)]


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def test_propagation_resolves_three_atom_system(three_atom_square):
    assignment = propagate_ur(_aluthge_system(three_atom_square))
    assert isinstance(assignment, PartialAssignment)
    assert assignment.values == {0: F(1, 4), 1: F(3, 4), 2: F(1, 2)}


def test_propagation_single_atom():
    assignment = propagate_ur(_aluthge_system(dirac(1)))
    assert assignment.values == {0: F(1)}


def test_propagation_first_mass_of_sharp_example(five_atom_real):
    assignment = propagate_ur(_aluthge_system(five_atom_real))
    with workprec(128):
        assert abs(assignment.values[0] - mpf(1) / 8) < mpf(2) ** -100


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 80), min_size=1, max_size=6, unique=True),
       st.lists(st.fractions(min_value=F(1, 8), max_value=F(3),
                             max_denominator=8), min_size=6, max_size=6))
def test_propagation_always_resolves_boundary_atoms(values, raw_weights):
    support = sorted(values)
    mu = make_measure(list(zip(support, raw_weights[:len(support)])))
    assignment = propagate_ur(_aluthge_system(mu))
    if isinstance(assignment, Violation):
        return
    p = mu.p
    for index in {0, 1, p - 2, p - 1}:
        if 0 <= index < p:
            assert index in assignment.values


# ---------------------------------------------------------------------------
# full solve
# ---------------------------------------------------------------------------

def test_solve_three_atom_witness(three_atom_square):
    target = convolve(three_atom_square, t_weight(three_atom_square))
    verdict = solve_weights(_aluthge_system(three_atom_square))
    assert verdict.outcome == WITNESS
    assert verdict.witness.weights == (F(1, 4), F(3, 4), F(1, 2))
    assert convolve(verdict.witness, verdict.witness).atoms == target.atoms


def test_solve_uniform_three_atoms_impossible():
    mu = make_measure([(1, F(1, 3)), (2, F(1, 3)), (4, F(1, 3))])
    verdict = solve_weights(_aluthge_system(mu))
    assert verdict.outcome == IMPOSSIBLE
    assert verdict.certificate.rule == "equation-mismatch"


def test_conflicting_derivations_name_both_paths():
    # on candidate support {1,2,4} the mass chain forces b3 = 1 along the
    # products while the square at 16 forces b3 = 3
    target = make_measure([(1, 1), (2, 2), (4, 3), (8, 2), (16, 9)])
    support = [Position(F(v), 0, F(1)) for v in (1, 2, 4)]
    system = build_system(target, support)
    result = propagate_ur(system)
    assert isinstance(result, Violation)
    assert result.rule == "propagation-conflict"
    assert "vs" in result.message
    verdict = sqrt_of(target)
    assert verdict.outcome == IMPOSSIBLE


# ---------------------------------------------------------------------------
# the transform decision
# ---------------------------------------------------------------------------

def test_transform_verdicts_for_examples(five_atom_real, six_atom_exact,
                                         three_atom_square):
    assert aluthge_subnormal(five_atom_real).outcome == WITNESS
    assert aluthge_subnormal(six_atom_exact).outcome == WITNESS
    assert aluthge_subnormal(three_atom_square).outcome == WITNESS


def test_transform_impossible_for_any_four_atoms():
    geometric = make_measure([(2 ** k, F(1, 4)) for k in range(4)])
    ragged = make_measure([(v, F(1, 4)) for v in (1, 2, 3, 7)])
    for mu in (geometric, ragged):
        verdict = aluthge_subnormal(mu)
        assert verdict.outcome == IMPOSSIBLE


def test_transform_mass_convention(three_atom_square):
    # the witness carries total mass sqrt(gamma_1) when mu is a probability
    from alsq.measures import moment
    verdict = aluthge_subnormal(three_atom_square)
    mass = verdict.witness.total_mass()
    assert mass * mass == moment(three_atom_square, 1)


def test_transform_rejects_zero_atom():
    mu = make_measure([(0, F(1, 2)), (1, F(1, 2))])
    with pytest.raises(ZeroAtomError):
        aluthge_subnormal(mu)


def test_transform_nonunit_first_atom_exact_square():
    mu = make_measure([(4, F(1, 4)), (8, F(1, 2)), (16, F(1, 4))])
    verdict = aluthge_subnormal(mu)
    assert verdict.outcome == WITNESS and verdict.witness.mode == "rational"
    target = convolve(mu, t_weight(mu))
    assert convolve(verdict.witness, verdict.witness).atoms == target.atoms


def test_transform_nonunit_first_atom_nonsquare():
    mu = make_measure([(3, F(1, 4)), (6, F(1, 2)), (12, F(1, 4))])
    verdict = aluthge_subnormal(mu)
    assert verdict.outcome == WITNESS and verdict.witness.mode == "real"
    assert verify_witness(verdict.witness, convolve(mu, t_weight(mu)))


# ---------------------------------------------------------------------------
# the square root decision
# ---------------------------------------------------------------------------

def test_sqrt_of_six_atom_example(six_atom_exact):
    verdict = sqrt_of(six_atom_exact)
    expected = make_measure([(1, F(1, 2)), (3, F(1, 3)), (6, F(1, 6))])
    assert verdict.outcome == WITNESS
    assert verdict.witness.atoms == expected.atoms


def test_sqrt_of_three_atom_square(three_atom_square):
    verdict = sqrt_of(three_atom_square)
    assert verdict.outcome == WITNESS
    assert verdict.witness.weights == (F(1, 2), F(1, 2))


def test_sqrt_of_four_atoms_impossible():
    mu = make_measure([(3 ** k, F(1, 4)) for k in range(4)])
    assert sqrt_of(mu).outcome == IMPOSSIBLE


def test_sqrt_of_two_atoms_impossible():
    verdict = sqrt_of(make_measure([(1, F(1, 2)), (2, F(1, 2))]))
    assert verdict.outcome == IMPOSSIBLE
    assert verdict.certificate.rule == "candidates-exhausted"


def test_sqrt_of_single_atom_radical_witness():
    verdict = sqrt_of(dirac(2, 1))
    assert verdict.outcome == WITNESS
    pos = verdict.witness.support[0]
    assert pos.squared() == 2  # the atom sits at sqrt(2)


def test_sqrt_of_radical_positions_not_searched():
    mu = make_measure([(Position(F(1), 1, F(2)), 1)])
    with pytest.raises(MeasureError, match="power_positions"):
        sqrt_of(mu)


def test_sqrt_no_candidate_top_atom():
    # no atom squares to the product of the extremes: instant refutation
    mu = make_measure([(1, F(1, 3)), (2, F(1, 3)), (3, F(1, 3))])
    verdict = sqrt_of(mu)
    assert verdict.outcome == IMPOSSIBLE
    assert verdict.certificate.rule == "candidates-exhausted"


def test_candidate_cap_gives_undetermined(six_atom_exact):
    verdict = sqrt_of(six_atom_exact, SolverConfig(max_candidates=0))
    assert verdict.outcome == UNDETERMINED


def test_second_radical_falls_back_to_numerics():
    # masses force sqrt(2) for the first root atom and sqrt(3) for the last;
    # after opening the first extension the solver must continue numerically,
    # and the remaining mismatch is decisive
    target = make_measure([(1, 2), (2, 4), (4, F(13, 2)), (8, 10), (16, 12),
                           (32, 6), (64, 3)])
    support = [Position(F(v), 0, F(1)) for v in (1, 2, 4, 8)]
    system = build_system(target, support)
    partial = propagate_ur(system)
    assert partial.mode == "real"
    assert any("second radical" in note for note in partial.notes)
    assert solve_weights(system, partial).outcome == IMPOSSIBLE
    assert sqrt_of(target).outcome == IMPOSSIBLE


def test_real_mode_root_with_two_radical_masses():
    # same support, but masses actually of the form (sqrt2, sqrt2, sqrt3,
    # sqrt3) squared; only the real path can represent the witness
    import mpmath
    from mpmath import workprec

    with workprec(128):
        s2, s3, s6 = mpmath.sqrt(2), mpmath.sqrt(3), mpmath.sqrt(6)
        masses = [2, 4, 2 * s6 + 2, 4 * s6, 2 * s6 + 3, 6, 3]
    target = make_measure(list(zip((1, 2, 4, 8, 16, 32, 64), masses)),
                          mode="real")
    verdict = sqrt_of(target)
    assert verdict.outcome == WITNESS
    assert verify_witness(verdict.witness, target)


# ---------------------------------------------------------------------------
# cross-cutting invariants
# ---------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 5, 6]))
def test_sqrt_witness_implies_transform_witness(seed, p):
    mu = generate(GeneratorSpec(p, "with-root", seed)).measure
    if sqrt_of(mu).outcome == WITNESS:
        assert aluthge_subnormal(mu).outcome == WITNESS


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4, 5, 6]),
       st.sampled_from([F(1, 2), F(3), F(9), F(2, 5)]))
def test_transform_verdict_scaling_invariant(seed, p, factor):
    mode = "with-aluthge-root" if p != 4 else "arbitrary"
    mu = generate(GeneratorSpec(p, mode, seed)).measure
    assert aluthge_subnormal(mu).outcome == \
        aluthge_subnormal(scale_positions(mu, factor)).outcome


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4, 5, 6]),
       st.integers(2, 3))
def test_transform_verdict_power_invariant(seed, p, k):
    mode = "with-aluthge-root" if p != 4 else "arbitrary"
    mu = generate(GeneratorSpec(p, mode, seed)).measure
    assert aluthge_subnormal(mu).outcome == \
        aluthge_subnormal(power_positions(mu, k)).outcome


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 5, 6]))
def test_transform_witness_support_matches_measure(seed, p):
    mu = generate(GeneratorSpec(p, "with-aluthge-root", seed)).measure
    verdict = aluthge_subnormal(mu)
    assert verdict.outcome == WITNESS
    assert [q.squared() for q in verdict.witness.support] == \
        [q.squared() for q in mu.support]


def test_verdict_json_shape(three_atom_square):
    data = aluthge_subnormal(three_atom_square).to_json_dict()
    assert set(data) == {"outcome", "witness", "certificate", "residual",
                         "precision_bits", "notes"}
    assert data["outcome"] == "witness"
    assert data["witness"]["mode"] == "rational"
    assert data["certificate"] is None

    bad = make_measure([(1, F(1, 3)), (2, F(1, 3)), (4, F(1, 3))])
    data = aluthge_subnormal(bad).to_json_dict()
    assert data["outcome"] == "impossible"
    assert set(data["certificate"]) == {"rule", "indices", "message"}
