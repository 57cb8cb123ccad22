"""
Concurrent valuation algebras and the reasoning predicates built on them.

A CVA pairs a sequential OVA (;, skip) with a commutative parallel OVA (||, run) on the
same prealgebra, linked by the weak exchange law

    (a || b) ; (c || d)  <=  (a ; c) || (b ; d)

and the neutral laws skip <= skip || skip and run ; run <= run.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import logging
from typing import TYPE_CHECKING, Any, Union

from cva_lab.exceptions import DomainError
from cva_lab.ova import comparison_windows, check_ova_axioms
from cva_lab.report import CheckReport, LawValidator
from cva_lab.sampling import Budget, ValuationSampler
from cva_lab.topology import canonical
from cva_lab.valuations import Prealgebra, Valuation

if TYPE_CHECKING:
    from cva_lab.ova import OvaInstance
    from cva_lab.report import LawEvidence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CvaInstance:
    """
    A concurrent valuation algebra.

    Parameters
    -----------
    name : str
        Model name used in reports.
    seq : OvaInstance
        Sequential composition with neutral skip.
    par : OvaInstance
        Parallel composition with neutral run; must be commutative.
    """

    name: str
    seq: OvaInstance
    par: OvaInstance

    def __post_init__(self) -> None:
        if not self.par.commutative:
            raise DomainError(f"parallel operator {self.par.name} of a CVA must be commutative")
        if self.seq.prealgebra != self.par.prealgebra:
            raise DomainError("sequential and parallel operators must share one prealgebra")

    @property
    def prealgebra(self) -> Prealgebra:
        return self.seq.prealgebra

    def skip(self, a) -> Valuation:
        return self.seq.epsilon(a)

    def run(self, a) -> Valuation:
        return self.par.epsilon(a)


def hoare(p: Valuation, a: Valuation, q: Valuation, cva: CvaInstance, window: int | None = None) -> bool:
    """The Hoare triple {p} a {q}: p ; a <= q."""
    return cva.prealgebra.leq(cva.seq(p, a), q, window)


def jones(
    p: Valuation, r: Valuation, a: Valuation, g: Valuation, q: Valuation, cva: CvaInstance, window: int | None = None
) -> bool:
    """The Jones quintuple with rely r and guarantee g: {p} r || a {q} and a <= g."""
    return hoare(p, cva.par(r, a), q, cva, window) and cva.prealgebra.leq(a, g, window)


def refines(a: Valuation, b: Valuation, algebra: Union[CvaInstance, OvaInstance, Prealgebra]) -> bool:
    """a <= b in the refinement order."""
    pa = algebra if isinstance(algebra, Prealgebra) else algebra.prealgebra
    return pa.leq(a, b)


def _encoder(pa: Prealgebra):
    def encode(**values: Valuation) -> dict:
        return {name: pa.encode(v) for name, v in values.items()}

    return encode


def exchange_sides(cva: CvaInstance, a, b, c, d) -> tuple[Valuation, Valuation]:
    """Both sides of the weak exchange law."""
    lhs = cva.seq(cva.par(a, b), cva.par(c, d))
    rhs = cva.par(cva.seq(a, c), cva.seq(b, d))
    return lhs, rhs


@dataclass
class CheckWeakExchange:
    """
    Check the weak exchange law on arbitrary domains and on single domains.

    Parameters
    -----------
    cva : CvaInstance
        Algebra under test.
    """

    cva: CvaInstance

    def check(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        sampler: ValuationSampler,
    ) -> None:
        """
        Check weak exchange on sampled quadruples, globally and on single domains.

        Parameters
        -----------
        reasons : list[str]
            A list of error strings to update if a law fails. These are higher
            severity and invalidate the structure under test.
        warnings : list[str]
            A list of warning strings to update with lower-severity findings.
        evidence : LawEvidence
            Instance tallies, counterexamples and properties to update.
        sampler : ValuationSampler
            Source of the quadruples (a, b, c, d) and of the comparison window.
        """
        validator = LawValidator()
        pa = self.cva.prealgebra
        encode = _encoder(pa)
        _, window = comparison_windows(self.cva.seq, sampler)
        for law in ("cva.weak_exchange", "cva.local_weak_exchange"):
            evidence.touch(law)

        for a, b, c, d in sampler.instances(4):
            lhs, rhs = exchange_sides(self.cva, a, b, c, d)
            validator.check_law(
                reasons, warnings, evidence, "cva.weak_exchange", pa.leq(lhs, rhs, window),
                lambda a=a, b=b, c=c, d=d, lhs=lhs, rhs=rhs: encode(a=a, b=b, c=c, d=d, left=lhs, right=rhs),
            )

        for _, a, b, c, d in sampler.local_instances(4):
            lhs, rhs = exchange_sides(self.cva, a, b, c, d)
            validator.check_law(
                reasons, warnings, evidence, "cva.local_weak_exchange", pa.leq(lhs, rhs, window),
                lambda a=a, b=b, c=c, d=d, lhs=lhs, rhs=rhs: encode(a=a, b=b, c=c, d=d, left=lhs, right=rhs),
            )


@dataclass
class CheckNeutralLaws:
    """Check skip_A <= skip_A || skip_A and run_A ; run_A <= run_A on every open set."""

    cva: CvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        cva = self.cva
        pa = cva.prealgebra
        window, _ = comparison_windows(cva.seq, sampler)
        for law in ("cva.neutral_skip", "cva.neutral_run"):
            evidence.touch(law)
        for a in pa.topology.opens:
            skip, run = cva.skip(a), cva.run(a)
            validator.check_law(
                reasons, warnings, evidence, "cva.neutral_skip", pa.leq(skip, cva.par(skip, skip), window),
                {"domain": canonical(a)},
            )
            validator.check_law(
                reasons, warnings, evidence, "cva.neutral_run", pa.leq(cva.seq(run, run), run, window),
                {"domain": canonical(a)},
            )


@dataclass
class CheckDerivedNeutralProps:
    """Check skip_A <= run_A, skip_A || skip_A = skip_A and run_A ; run_A = run_A."""

    cva: CvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        cva = self.cva
        pa = cva.prealgebra
        window, _ = comparison_windows(cva.seq, sampler)
        for law in ("cva.skip_le_run", "cva.skip_par_idempotent", "cva.run_seq_idempotent"):
            evidence.touch(law)
        for a in pa.topology.opens:
            skip, run = cva.skip(a), cva.run(a)
            where = {"domain": canonical(a)}
            validator.check_law(reasons, warnings, evidence, "cva.skip_le_run", pa.leq(skip, run, window), where)
            validator.check_law(
                reasons, warnings, evidence, "cva.skip_par_idempotent",
                pa.equal(cva.par(skip, skip), skip, window), where,
            )
            validator.check_law(
                reasons, warnings, evidence, "cva.run_seq_idempotent",
                pa.equal(cva.seq(run, run), run, window), where,
            )


@dataclass
class CheckConcurrencyRule:
    """
    Check that {p} a {q} and {p'} a' {q'} imply {p || p'} a || a' {q || q'}.

    Postconditions are drawn as random coarsenings of p ; a so that most premises hold;
    a share of independent postconditions keeps vacuous instances in the mix.
    """

    cva: CvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        cva = self.cva
        pa = cva.prealgebra
        encode = _encoder(pa)
        _, window = comparison_windows(cva.seq, sampler)
        evidence.touch("cva.concurrency_rule")
        premises = 0
        for i, (p, a, p2, a2) in enumerate(sampler.instances(4)):
            q = sampler.coarsening(cva.seq(p, a))
            q2 = sampler.valuation() if i % 4 == 3 else sampler.coarsening(cva.seq(p2, a2))
            if not (hoare(p, a, q, cva, window) and hoare(p2, a2, q2, cva, window)):
                continue
            premises += 1
            conclusion = hoare(cva.par(p, p2), cva.par(a, a2), cva.par(q, q2), cva, window)
            validator.check_law(
                reasons, warnings, evidence, "cva.concurrency_rule", conclusion,
                lambda p=p, a=a, q=q, p2=p2, a2=a2, q2=q2: encode(p=p, a=a, q=q, p2=p2, a2=a2, q2=q2),
            )
        logger.debug("concurrency rule: %d instances satisfied both premises", premises)


def neutrals_coincide(cva: CvaInstance, window: int | None = None) -> bool:
    """Whether skip_A = run_A on every open set."""
    pa = cva.prealgebra
    return all(pa.equal(cva.skip(a), cva.run(a), window) for a in pa.topology.opens)


@dataclass
class CheckSeqLePar:
    """Check a ; b <= a || b, which follows from weak exchange when the neutrals coincide."""

    cva: CvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        cva = self.cva
        pa = cva.prealgebra
        encode = _encoder(pa)
        neutral_window, window = comparison_windows(cva.seq, sampler)
        coincide = neutrals_coincide(cva, neutral_window)
        evidence.properties["neutrals_coincide"] = coincide
        if not coincide:
            warnings.append("SEQ LE PAR --> cva.seq_le_par: skipped, skip and run differ.")
            return
        evidence.touch("cva.seq_le_par")
        for a, b in sampler.instances(2):
            lhs, rhs = cva.seq(a, b), cva.par(a, b)
            validator.check_law(
                reasons, warnings, evidence, "cva.seq_le_par", pa.leq(lhs, rhs, window),
                lambda a=a, b=b: encode(a=a, b=b),
            )


def _strict(cva: CvaInstance, window, quadruple) -> dict | None:
    pa = cva.prealgebra
    lhs, rhs = exchange_sides(cva, *quadruple)
    if pa.leq(lhs, rhs, window) and not pa.equal(lhs, rhs, window):
        encode = _encoder(pa)
        a, b, c, d = quadruple
        return encode(a=a, b=b, c=c, d=d, left=lhs, right=rhs)
    return None


@dataclass
class FindStrictExchange:
    """
    Search for a, b, c, d where (a || b) ; (c || d) is strictly below (a ; c) || (b ; d).

    Quadruples of distinct one-step traces on a single domain come first; random
    instances follow.
    """

    cva: CvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        pa = self.cva.prealgebra
        _, window = comparison_windows(self.cva.seq, sampler)

        def candidates():
            for a in pa.topology.opens:
                steps = [t for t in sampler.universe(a) if pa.tuples.length(t) == 1]
                for chosen in sampler.pick(list(combinations(steps, 4))):
                    yield tuple(Valuation(a, frozenset([t])) for t in chosen)
            yield from sampler.instances(4)

        for quadruple in candidates():
            witness = _strict(self.cva, window, quadruple)
            if witness is not None:
                evidence.witnesses["cva.strict_exchange"] = witness
                break
        evidence.properties["strict_exchange_found"] = "cva.strict_exchange" in evidence.witnesses


def _cva_report(name: str, checks: list, cva: CvaInstance, budget: Budget | None) -> CheckReport:
    sampler = ValuationSampler(cva.prealgebra, budget or Budget())
    return CheckReport.from_checks(name=name, checks=checks, sampler=sampler, window=sampler.window())


def check_weak_exchange(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check (a || b) ; (c || d) <= (a ; c) || (b ; d) globally and per domain."""
    return _cva_report(f"weak exchange {cva.name}", [CheckWeakExchange(cva)], cva, budget)


def check_neutral_laws(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    return _cva_report(f"neutral laws {cva.name}", [CheckNeutralLaws(cva)], cva, budget)


def check_derived_neutral_props(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    return _cva_report(f"derived neutral laws {cva.name}", [CheckDerivedNeutralProps(cva)], cva, budget)


def check_concurrency_rule(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    return _cva_report(f"concurrency rule {cva.name}", [CheckConcurrencyRule(cva)], cva, budget)


def check_seq_le_par(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check a ; b <= a || b; skipped with a warning unless skip and run coincide."""
    return _cva_report(f"seq below par {cva.name}", [CheckSeqLePar(cva)], cva, budget)


def find_strict_exchange_witness(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    """Search for an instance where the weak exchange law is a strict inequality."""
    return _cva_report(f"strict exchange {cva.name}", [FindStrictExchange(cva)], cva, budget)


def check_cva(cva: CvaInstance, budget: Budget | None = None) -> CheckReport:
    """Both OVA suites, weak exchange, neutral laws and their consequences, and the concurrency rule."""
    checks: list[Any] = [
        CheckWeakExchange(cva),
        CheckNeutralLaws(cva),
        CheckDerivedNeutralProps(cva),
        CheckConcurrencyRule(cva),
        CheckSeqLePar(cva),
    ]
    reports = [
        check_ova_axioms(cva.seq, budget),
        check_ova_axioms(cva.par, budget),
        _cva_report(f"cva laws {cva.name}", checks, cva, budget),
    ]
    return CheckReport.merge(f"cva {cva.name}", reports)
