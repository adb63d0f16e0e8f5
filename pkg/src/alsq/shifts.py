"""Bridge between measures and the attached weighted shift.

A probability measure on [0, inf) with power moments g_0 = 1, g_1, g_2, ...
corresponds to the shift with weights alpha_n = sqrt(g_{n+1} / g_n); its
Aluthge transform is again a shift with weights sqrt(alpha_n alpha_{n+1}).
The derived moment identity

    (aluthge moment_n)^2 * g_1 = g_n * g_{n+1}

holds for all n and is used as a cross-check, together with positive
semidefiniteness of the two Hankel matrices built from any claimed moment
sequence.  Minimal linear recurrences of exact moment sequences recover the
atom count and the characteristic polynomial of the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf, workprec

from .measures import AtomicMeasure, MeasureError, moment, normalize
from .scalars import DEFAULT_PRECISION_BITS, DEFAULT_TOLERANCE, to_mpf


def moment_sequence(mu: AtomicMeasure, count: int,
                    bits: int = DEFAULT_PRECISION_BITS) -> List:
    """g_0 .. g_{count-1}; exact Fractions whenever the measure allows it."""
    return [moment(mu, n, bits=bits) for n in range(count)]


def weights_from_measure(mu: AtomicMeasure, count: int,
                         bits: int = DEFAULT_PRECISION_BITS) -> List[mpf]:
    """Shift weights alpha_0 .. alpha_{count-1} of the normalized measure."""
    if count < 1:
        raise MeasureError("at least one weight must be requested")
    prob = normalize(mu, bits=bits)
    gammas = moment_sequence(prob, count + 1, bits=bits)
    with workprec(bits):
        return [mpmath.sqrt(to_mpf(gammas[n + 1], bits) / to_mpf(gammas[n], bits))
                for n in range(count)]


def aluthge_weights(alpha: Sequence[mpf],
                    bits: int = DEFAULT_PRECISION_BITS) -> List[mpf]:
    """Geometric means of consecutive weights; one entry shorter."""
    if len(alpha) < 2:
        raise MeasureError("need at least two weights")
    with workprec(bits):
        return [mpmath.sqrt(alpha[n] * alpha[n + 1]) for n in range(len(alpha) - 1)]


def moments_from_weights(alpha: Sequence[mpf],
                         bits: int = DEFAULT_PRECISION_BITS) -> List[mpf]:
    """g_0 = 1 and g_k = alpha_0^2 ... alpha_{k-1}^2."""
    with workprec(bits):
        gammas = [mpf(1)]
        for a in alpha:
            gammas.append(gammas[-1] * a * a)
        return gammas


def aluthge_moment_sequence(mu: AtomicMeasure, count: int,
                            bits: int = DEFAULT_PRECISION_BITS) -> List[mpf]:
    """Moments of the Aluthge-transformed shift, g~_0 .. g~_{count-1}."""
    alpha = weights_from_measure(mu, count, bits=bits)
    return moments_from_weights(aluthge_weights(alpha, bits=bits), bits=bits)


def hankel_psd(
    gammas: Sequence,
    n: int,
    bits: int = DEFAULT_PRECISION_BITS,
    tol: Fraction = DEFAULT_TOLERANCE,
) -> Tuple[bool, bool]:
    """Positive semidefiniteness of (g_{i+j}) and (g_{i+j+1}) for i,j <= n,
    via symmetric eigenvalues with threshold -tol * trace."""
    if len(gammas) < 2 * n + 2:
        raise MeasureError(
            f"need {2 * n + 2} moments for order {n}, got {len(gammas)}")
    with workprec(bits):
        values = [to_mpf(g, bits) for g in gammas]
        results = []
        for offset in (0, 1):
            size = n + 1
            matrix = mpmath.matrix(size, size)
            for i in range(size):
                for j in range(size):
                    matrix[i, j] = values[i + j + offset]
            eigenvalues, _ = mpmath.eigsy(matrix)
            trace = mpmath.fsum(matrix[i, i] for i in range(size))
            threshold = -to_mpf(tol, bits) * trace
            results.append(min(eigenvalues) > threshold)
    return results[0], results[1]


# ---------------------------------------------------------------------------
# exact linear recurrences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceCoefficients:
    """g_{n+order} = c_{order-1} g_{n+order-1} + ... + c_0 g_n."""

    order: int
    coefficients: Tuple[Fraction, ...]

    def holds_for(self, gammas: Sequence[Fraction]) -> bool:
        r = self.order
        for n in range(len(gammas) - r):
            predicted = sum(self.coefficients[j] * gammas[n + j] for j in range(r))
            if predicted != gammas[n + r]:
                return False
        return True

    def characteristic_polynomial(self) -> Tuple[Fraction, ...]:
        """Coefficients of t^order - c_{order-1} t^{order-1} - ... - c_0,
        from the constant term upward."""
        return tuple(-c for c in self.coefficients) + (Fraction(1),)


def minimal_recurrence(
    gammas: Sequence[Fraction],
    max_order: int,
) -> Optional[RecurrenceCoefficients]:
    """Smallest-order exact linear recurrence satisfied by all entries.

    Works over the rationals only; rank decisions are ill-posed in floating
    point.  Needs len(gammas) >= 2 * max_order.
    """
    seq = [Fraction(g) for g in gammas]
    if len(seq) < 2 * max_order:
        raise MeasureError(
            f"need at least {2 * max_order} exact moments for order "
            f"{max_order}, got {len(seq)}")
    for order in range(1, max_order + 1):
        rows = [[seq[n + j] for j in range(order)] + [seq[n + order]]
                for n in range(len(seq) - order)]
        solution = _solve_exact(rows, order)
        if solution is None:
            continue
        candidate = RecurrenceCoefficients(order, tuple(solution))
        if candidate.holds_for(seq):
            return candidate
    return None


def _solve_exact(rows: List[List[Fraction]], width: int) -> Optional[List[Fraction]]:
    """Gaussian elimination over Q on an overdetermined augmented system;
    None when inconsistent, free variables pinned to zero."""
    matrix = [row[:] for row in rows]
    pivots: List[Tuple[int, int]] = []
    row = 0
    for col in range(width):
        pivot = next((r for r in range(row, len(matrix)) if matrix[r][col] != 0),
                     None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        lead = matrix[row][col]
        matrix[row] = [value / lead for value in matrix[row]]
        for r in range(len(matrix)):
            if r != row and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [value - factor * keep
                             for value, keep in zip(matrix[r], matrix[row])]
        pivots.append((row, col))
        row += 1
        if row == len(matrix):
            break
    for r in range(row, len(matrix)):
        if matrix[r][width] != 0 and all(v == 0 for v in matrix[r][:width]):
            return None
    solution = [Fraction(0)] * width
    for r, col in pivots:
        solution[col] = matrix[r][width]
    return solution


def support_characteristic(mu: AtomicMeasure) -> Tuple[Fraction, ...]:
    """Coefficients of prod(t - position) from the constant term upward;
    rational positions required."""
    coeffs = [Fraction(1)]
    for pos in mu.support:
        root = pos.as_fraction()
        coeffs = ([Fraction(0)] + coeffs[:])
        for idx in range(len(coeffs) - 1):
            coeffs[idx] -= root * coeffs[idx + 1]
    return tuple(coeffs)
