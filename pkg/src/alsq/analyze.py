"""Full analysis of a measure: support combinatorics, both root decisions,
closed-form agreement, and optional shift tables."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import mpmath
from mpmath import workprec

from .closed_forms import classify_small
from .diagram import (
    cardinality_check,
    classify_ur,
    geometric_profile,
    pair_diagram,
    structural_certificate,
)
from .measures import (
    AtomicMeasure,
    MeasureError,
    dumps_measure,
    strip_zero_atom,
)
from .shifts import (
    aluthge_weights,
    moments_from_weights,
    weights_from_measure,
)
from .solver import DEFAULT_CONFIG, SolverConfig, Verdict, aluthge_subnormal, sqrt_of


@dataclass(frozen=True)
class AnalyzeOptions:
    config: SolverConfig = DEFAULT_CONFIG
    shift_terms: int = 0  # 0 disables the tables
    run_sqrt: bool = True
    run_aluthge: bool = True


@dataclass
class AnalysisReport:
    digest: str
    mode: str
    p: int
    zero_mass: Optional[str]
    card: int
    bounds: tuple
    geometric: Optional[tuple]
    ur_summary: dict
    structural: Optional[dict]
    sqrt_verdict: Optional[Verdict]
    aluthge_verdict: Optional[Verdict]
    small_verdict: Optional[Verdict]
    agreement: Optional[bool]
    shift_tables: Optional[dict]
    notes: List[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "schema": "alsq/1",
            "input_digest": self.digest,
            "mode": self.mode,
            "p": self.p,
            "zero_mass": self.zero_mass,
            "card": self.card,
            "bounds": list(self.bounds),
            "geometric_profile": list(self.geometric) if self.geometric else None,
            "ur": self.ur_summary,
            "structural_certificate": self.structural,
            "sqrt": self.sqrt_verdict.to_json_dict() if self.sqrt_verdict else None,
            "aluthge": self.aluthge_verdict.to_json_dict() if self.aluthge_verdict else None,
            "closed_form": self.small_verdict.to_json_dict() if self.small_verdict else None,
            "agreement": self.agreement,
            "shift_tables": self.shift_tables,
            "notes": self.notes,
        }

    def render(self) -> str:
        lines = [
            f"input digest : {self.digest[:16]}",
            f"atoms        : {self.p} ({self.mode} mode)"
            + (f", mass {self.zero_mass} at the origin (stripped)"
               if self.zero_mass else ""),
            f"products     : {self.card} distinct, admissible range "
            f"[{self.bounds[0]}, {self.bounds[1] if self.bounds[1] else '-'}]",
            "support      : "
            + (f"geometric, start {self.geometric[0]}, ratio {self.geometric[1]}"
               if self.geometric else "not geometric"),
            f"ur pattern   : {self.ur_summary['ur_count']} unique / "
            f"{self.ur_summary['nur_count']} shared products",
        ]
        if self.structural:
            lines.append(f"structure    : violated - {self.structural['message']}")
        else:
            lines.append("structure    : all necessary conditions hold")
        if self.sqrt_verdict:
            lines.append(f"square root  : {self.sqrt_verdict.outcome}")
            if self.sqrt_verdict.witness is not None:
                lines.append(f"    root = {self.sqrt_verdict.witness}")
            if self.sqrt_verdict.certificate is not None:
                lines.append(f"    {self.sqrt_verdict.certificate.render()}")
        if self.aluthge_verdict:
            lines.append(f"transform    : {self.aluthge_verdict.outcome}"
                         + (" (subnormal)" if self.aluthge_verdict.is_witness else ""))
            if self.aluthge_verdict.witness is not None:
                lines.append(f"    root of reweighted square = "
                             f"{self.aluthge_verdict.witness}")
            if self.aluthge_verdict.certificate is not None:
                lines.append(f"    {self.aluthge_verdict.certificate.render()}")
        if self.small_verdict is not None:
            mark = "agrees" if self.agreement else "DISAGREES"
            lines.append(f"closed form  : {self.small_verdict.outcome} "
                         f"({mark} with the generic solver)")
        for note in self.notes:
            lines.append(f"note         : {note}")
        if self.shift_tables:
            lines.append("shift tables :")
            header = f"    {'n':>3} {'alpha':>22} {'aluthge alpha':>22} " \
                     f"{'gamma':>22} {'aluthge gamma':>22}"
            lines.append(header)
            rows = self.shift_tables["rows"]
            for row in rows:
                lines.append("    {:>3} {:>22} {:>22} {:>22} {:>22}".format(*row))
        return "\n".join(lines)


def analyze(mu: AtomicMeasure, options: AnalyzeOptions = AnalyzeOptions()) -> AnalysisReport:
    digest = hashlib.sha256(dumps_measure(mu).encode("utf-8")).hexdigest()
    zero_note: Optional[str] = None
    zero, body = strip_zero_atom(mu)
    if mu.has_zero_atom():
        zero_note = str(zero) if isinstance(zero, Fraction) else mpmath.nstr(zero, 12)
    config = options.config
    notes: List[str] = []

    diagram = pair_diagram(body)
    classification = classify_ur(diagram)
    card = cardinality_check(body)
    profile = geometric_profile(body.support)
    geometric = (str(profile[0]), str(profile[1])) if profile else None
    violation = structural_certificate(body) if body.p >= 2 else None

    sqrt_verdict = None
    if options.run_sqrt:
        try:
            sqrt_verdict = sqrt_of(body, config)
        except MeasureError as exc:
            notes.append(f"square-root search skipped: {exc}")
    aluthge_verdict = aluthge_subnormal(body, config) if options.run_aluthge else None

    small_verdict = None
    agreement = None
    if 3 <= body.p <= 6 and all(pos.k == 0 for pos in body.support):
        small_verdict = classify_small(body, config)
        if aluthge_verdict is not None:
            agreement = small_verdict.outcome == aluthge_verdict.outcome

    shift_tables = None
    if options.shift_terms > 0:
        shift_tables = _shift_tables(body, options.shift_terms, config)

    if zero_note:
        notes.insert(0, "analysis applies to the restriction away from the "
                        "origin; root existence is unaffected")

    return AnalysisReport(
        digest=digest,
        mode=mu.mode,
        p=body.p,
        zero_mass=zero_note,
        card=card.card,
        bounds=card.bounds(),
        geometric=geometric,
        ur_summary=classification.summary(),
        structural=violation.to_json_dict() if violation else None,
        sqrt_verdict=sqrt_verdict,
        aluthge_verdict=aluthge_verdict,
        small_verdict=small_verdict,
        agreement=agreement,
        shift_tables=shift_tables,
        notes=notes,
    )


def _shift_tables(mu: AtomicMeasure, terms: int, config: SolverConfig) -> dict:
    bits = config.precision_bits
    alpha = weights_from_measure(mu, terms + 1, bits=bits)
    tilde = aluthge_weights(alpha, bits=bits)
    gammas = moments_from_weights(alpha, bits=bits)
    tilde_gammas = moments_from_weights(tilde, bits=bits)
    rows = []
    with workprec(bits):
        for n in range(terms):
            rows.append((
                n,
                mpmath.nstr(alpha[n], 15),
                mpmath.nstr(tilde[n], 15) if n < len(tilde) else "",
                mpmath.nstr(gammas[n], 15),
                mpmath.nstr(tilde_gammas[n], 15) if n < len(tilde_gammas) else "",
            ))
    return {"terms": terms, "rows": rows}
