"""
Ordered valuation algebras: combine operators, neutral elements, extension and law checks.

An OVA is a prealgebra together with an associative, monotone combine operator whose
output domain is the union of the operand domains, and a neutral global element
satisfying the two combination identities. Extension b -> e_A * b is the right
adjoint of restriction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import TYPE_CHECKING, Any, Union

from cva_lab.exceptions import DomainError, UnsupportedOperationError
from cva_lab.report import CheckReport, LawValidator
from cva_lab.sampling import Budget, ValuationSampler
from cva_lab.topology import canonical, inclusions
from cva_lab.valuations import Prealgebra, Valuation

if TYPE_CHECKING:
    from typing import Callable, Iterable

    from cva_lab.report import LawEvidence

    Combine = Callable[[Valuation, Valuation], Valuation]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalOperatorFamily:
    """
    Binary operators on the valuations of a single domain, one per open set.

    Parameters
    -----------
    name : str
        Name used in reports.
    local : Callable
        `local(A, a, b)` combines two valuations on the domain A.
    """

    name: str
    local: Callable[[frozenset, Valuation, Valuation], Valuation]

    @classmethod
    def from_trace_operator(cls, name: str, op: Callable[[Any, Any], Iterable[Any]]) -> LocalOperatorFamily:
        """Lift a trace operator returning the (possibly empty) set of results to valuations."""

        def local(domain: frozenset, a: Valuation, b: Valuation) -> Valuation:
            return Valuation(domain, frozenset(r for t in a.content for s in b.content for r in op(t, s)))

        return cls(name=name, local=local)

    def apply(self, domain: frozenset, a: Valuation, b: Valuation) -> Valuation:
        if a.domain != domain or b.domain != domain:
            raise DomainError(f"local operator {self.name} needs both operands on {canonical(domain)}")
        return self.local(domain, a, b)


@dataclass(frozen=True)
class OvaInstance:
    """
    An ordered valuation algebra.

    Parameters
    -----------
    name : str
        Name used in reports.
    prealgebra : Prealgebra
        Valuations and restriction.
    combine : Callable
        The combine operator on valuations of any domains.
    neutral : Callable
        Open set to neutral valuation e_A.
    commutative : bool
        Whether the combine operator is expected to commute.
    relational : bool
        Whether the OVA is the OVA of relations of a tuple system (combine is the relational join).
    family : LocalOperatorFamily or None
        Local operators the combine operator extends, when known.
    """

    name: str
    prealgebra: Prealgebra
    combine: Combine
    neutral: Callable[[frozenset], Valuation]
    commutative: bool = False
    relational: bool = False
    family: LocalOperatorFamily | None = None

    def __call__(self, a: Valuation, b: Valuation) -> Valuation:
        return self.combine(a, b)

    def epsilon(self, a) -> Valuation:
        return self.neutral(self.prealgebra.topology.require_open(a))


@dataclass(frozen=True)
class ExtendedOperator:
    """
    The extension of a family of local operators: a * b = (a up U) *_U (b up U), U = d a | d b.

    Extension to U uses the preimage of restriction when `source` is a prealgebra and
    e_U * b when it is an OVA.
    """

    family: LocalOperatorFamily
    source: Union[Prealgebra, OvaInstance]

    @property
    def prealgebra(self) -> Prealgebra:
        return self.source if isinstance(self.source, Prealgebra) else self.source.prealgebra

    def _up(self, v: Valuation, u: frozenset) -> Valuation:
        if isinstance(self.source, Prealgebra):
            return self.source.extend(v, u)
        return extend(v, u, self.source)

    def __call__(self, a: Valuation, b: Valuation) -> Valuation:
        pa = self.prealgebra
        u = pa.topology.require_open(a.domain | b.domain)
        return self.family.apply(u, self._up(a, u), self._up(b, u))


def extend_local_operator(family: LocalOperatorFamily, source: Union[Prealgebra, OvaInstance]) -> ExtendedOperator:
    """Extend a family of local operators to valuations of any domains."""
    return ExtendedOperator(family=family, source=source)


def extend(b: Valuation, a, ova: OvaInstance) -> Valuation:
    """
    Extension of `b` to the larger open set `a`, computed as e_A * b.

    Raises
    -------
    DomainError
        If `a` is not open or does not contain the domain of `b`.
    """
    a = ova.prealgebra.topology.require_open(a)
    if not b.domain <= a:
        raise DomainError(f"cannot extend from {canonical(b.domain)} to {canonical(a)}")
    return ova.combine(ova.neutral(a), b)


def meet(a: Valuation, b: Valuation, ova: OvaInstance) -> Valuation:
    """
    Greatest lower bound of two valuations in a relational OVA.

    Raises
    -------
    UnsupportedOperationError
        If `ova` is not an OVA of relations.
    """
    if not ova.relational:
        raise UnsupportedOperationError(f"meet is only computed for relational OVAs, not {ova.name}")
    u = ova.prealgebra.topology.require_open(a.domain | b.domain)
    return Valuation(u, extend(a, u, ova).content & extend(b, u, ova).content)


def comparison_windows(ova: OvaInstance, sampler: ValuationSampler) -> tuple[int | None, int | None]:
    """Comparison windows for laws with neutral elements and for plain products."""
    neutral_window = sampler.window()
    product_window = neutral_window if ova.prealgebra.tuples.reducing else None
    return neutral_window, product_window


def _encoder(pa: Prealgebra):
    def encode(**values: Valuation) -> dict:
        return {name: pa.encode(v) for name, v in values.items()}

    return encode


@dataclass
class CheckNeutralGlobal:
    """
    Check that the neutral element is a global element.

    Parameters
    -----------
    ova : OvaInstance
        Algebra under test.
    """

    ova: OvaInstance

    def check(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        sampler: ValuationSampler,
    ) -> None:
        """
        Check that e restricted to B is e_B for every inclusion B <= A.

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
            Source of the comparison window; every inclusion of the space is checked.
        """
        validator = LawValidator()
        pa = self.ova.prealgebra
        window, _ = comparison_windows(self.ova, sampler)
        evidence.touch("ova.neutral_global")
        for b, a in inclusions(pa.topology):
            restricted = pa.restrict(self.ova.epsilon(a), b)
            validator.check_law(
                reasons, warnings, evidence, "ova.neutral_global",
                pa.equal(restricted, self.ova.epsilon(b), window),
                lambda a=a, b=b: {"domain": canonical(a), "subdomain": canonical(b)},
            )


@dataclass
class CheckSemigroup:
    """
    Check associativity, monotonicity in the refinement order and the labelling axiom.

    Parameters
    -----------
    ova : OvaInstance
        Algebra under test.
    """

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        _, window = comparison_windows(ova, sampler)
        for law in ("ova.associativity", "ova.monotonicity", "ova.labelling"):
            evidence.touch(law)

        for a, b in sampler.instances(2):
            ab = ova(a, b)
            validator.check_law(
                reasons, warnings, evidence, "ova.labelling", ab.domain == a.domain | b.domain,
                lambda a=a, b=b: encode(a=a, b=b),
            )
            a2, b2 = sampler.coarsening(a), sampler.coarsening(b)
            validator.check_law(
                reasons, warnings, evidence, "ova.monotonicity",
                pa.leq(ab, ova(a2, b2), window),
                lambda a=a, b=b, a2=a2, b2=b2: encode(a=a, b=b, a_coarse=a2, b_coarse=b2),
            )

        for a, b, c in sampler.instances(3):
            lhs = ova(ova(a, b), c)
            rhs = ova(a, ova(b, c))
            validator.check_law(
                reasons, warnings, evidence, "ova.associativity", pa.equal(lhs, rhs, window),
                lambda a=a, b=b, c=c, lhs=lhs, rhs=rhs: encode(a=a, b=b, c=c, left=lhs, right=rhs),
            )


@dataclass
class CheckNeutrality:
    """Check e_(d a) * a = a = a * e_(d a)."""

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        window, _ = comparison_windows(ova, sampler)
        for law in ("ova.neutrality_left", "ova.neutrality_right"):
            evidence.touch(law)
        for (a,) in sampler.instances(1):
            e = ova.epsilon(a.domain)
            left = ova(e, a)
            right = ova(a, e)
            validator.check_law(
                reasons, warnings, evidence, "ova.neutrality_left", pa.equal(left, a, window),
                lambda a=a, left=left: encode(a=a, result=left),
            )
            validator.check_law(
                reasons, warnings, evidence, "ova.neutrality_right", pa.equal(right, a, window),
                lambda a=a, right=right: encode(a=a, result=right),
            )


@dataclass
class CheckCombination:
    """Check (a * b)|d a = a * b|(d a & d b) and (a * b)|d b = a|(d a & d b) * b."""

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        _, window = comparison_windows(ova, sampler)
        for law in ("ova.combination_left", "ova.combination_right"):
            evidence.touch(law)
        for a, b in sampler.instances(2):
            ab = ova(a, b)
            overlap = a.domain & b.domain
            left = pa.restrict(ab, a.domain)
            left_expected = ova(a, pa.restrict(b, overlap))
            validator.check_law(
                reasons, warnings, evidence, "ova.combination_left", pa.equal(left, left_expected, window),
                lambda a=a, b=b: encode(a=a, b=b),
            )
            right = pa.restrict(ab, b.domain)
            right_expected = ova(pa.restrict(a, overlap), b)
            validator.check_law(
                reasons, warnings, evidence, "ova.combination_right", pa.equal(right, right_expected, window),
                lambda a=a, b=b: encode(a=a, b=b),
            )


@dataclass
class CheckCommutativity:
    """Check a * b = b * a, first on pairs of one-trace valuations, then on sampled pairs."""

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        _, window = comparison_windows(ova, sampler)
        evidence.touch("ova.commutativity")
        pairs = list(sampler.singleton_pairs()) + list(sampler.instances(2))
        for a, b in pairs:
            ab, ba = ova(a, b), ova(b, a)
            ok = validator.check_law(
                reasons, warnings, evidence, "ova.commutativity", pa.equal(ab, ba, window),
                lambda a=a, b=b, ab=ab, ba=ba: encode(a=a, b=b, ab=ab, ba=ba),
            )
            if not ok:
                break


@dataclass
class CheckStrongNeutrality:
    """
    Check extend(e_B, A) = e_A for every inclusion, and e_A * e_B = e_(A | B) when that holds.

    Parameters
    -----------
    ova : OvaInstance
        Algebra under test.
    """

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        window, _ = comparison_windows(ova, sampler)
        evidence.touch("ova.strong_neutrality")

        empty = ova.epsilon(frozenset())
        evidence.properties["neutral_on_empty_domain_is_singleton"] = len(empty) == 1

        strong = True
        for b, a in inclusions(pa.topology):
            extended = extend(ova.epsilon(b), a, ova)
            strong &= validator.check_law(
                reasons, warnings, evidence, "ova.strong_neutrality",
                pa.equal(extended, ova.epsilon(a), window),
                lambda a=a, b=b, extended=extended: {
                    "domain": canonical(a),
                    "subdomain": canonical(b),
                    "extended": pa.encode(extended),
                    "expected": pa.encode(ova.epsilon(a)),
                },
            )
        evidence.properties["strongly_neutral"] = strong
        if not strong:
            return

        evidence.touch("ova.neutral_product")
        opens = pa.topology.opens
        for a in opens:
            for b in opens:
                product = ova(ova.epsilon(a), ova.epsilon(b))
                validator.check_law(
                    reasons, warnings, evidence, "ova.neutral_product",
                    pa.equal(product, ova.epsilon(a | b), window),
                    lambda a=a, b=b: {"left": canonical(a), "right": canonical(b)},
                )


@dataclass
class CheckAdjunction:
    """
    Check that extension is right adjoint to restriction, with its corollaries.

    Covers the Galois equivalence, restriction after extension, extension after
    restriction, two-step extension, extension of the capped universe, and agreement of
    e_A * b with the preimage of restriction.
    """

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        window, _ = comparison_windows(ova, sampler)
        laws = (
            "ova.galois", "ova.insertion_closure", "ova.extensive",
            "ova.functoriality", "ova.top_preserved", "ova.extension_agrees",
        )
        for law in laws:
            evidence.touch(law)

        for b_dom, a_dom, (a,), (b,) in sampler.inclusion_instances(1, 1):
            up = extend(b, a_dom, ova)
            below = pa.restrict(a, b_dom).content <= b.content
            validator.check_law(
                reasons, warnings, evidence, "ova.galois", below == (a.content <= up.content),
                lambda a=a, b=b, up=up: encode(a=a, b=b, extended=up),
            )
            validator.check_law(
                reasons, warnings, evidence, "ova.insertion_closure", pa.restrict(up, b_dom) == b,
                lambda b=b, up=up: encode(b=b, extended=up),
            )
            back = extend(pa.restrict(a, b_dom), a_dom, ova)
            validator.check_law(
                reasons, warnings, evidence, "ova.extensive", a.content <= back.content,
                lambda a=a, back=back: encode(a=a, extended=back),
            )
            validator.check_law(
                reasons, warnings, evidence, "ova.extension_agrees",
                pa.equal(up, pa.extend(b, a_dom), window),
                lambda b=b, up=up, a_dom=a_dom: encode(b=b, extended=up, preimage=pa.extend(b, a_dom)),
            )

        for c_dom, b_dom, a_dom, c in sampler.chain_instances():
            two_step = extend(extend(c, b_dom, ova), a_dom, ova)
            one_step = extend(c, a_dom, ova)
            validator.check_law(
                reasons, warnings, evidence, "ova.functoriality", pa.equal(two_step, one_step, window),
                lambda c=c, b_dom=b_dom, two_step=two_step, one_step=one_step: {
                    **encode(c=c, two_step=two_step, one_step=one_step), "via": canonical(b_dom),
                },
            )

        for b_dom, a_dom in inclusions(pa.topology):
            up = extend(pa.top(b_dom), a_dom, ova)
            validator.check_law(
                reasons, warnings, evidence, "ova.top_preserved", pa.equal(up, pa.top(a_dom), window),
                lambda a_dom=a_dom, b_dom=b_dom: {"domain": canonical(a_dom), "subdomain": canonical(b_dom)},
            )


@dataclass
class CheckLocalOperators:
    """
    Check the two hypotheses under which extended local operators form an OVA.

    Parameters
    -----------
    family : LocalOperatorFamily
        Local operators under test.
    prealgebra : Prealgebra
        Supplies restriction and the preimage extension.
    """

    family: LocalOperatorFamily
    prealgebra: Prealgebra

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        pa = self.prealgebra
        op = self.family.apply
        encode = _encoder(pa)
        window = sampler.window() if pa.tuples.reducing else None
        for law in ("ova.local_associativity", "ova.local_monotonicity", "ova.extension_commutation"):
            evidence.touch(law)

        for a_dom, x, y, z in sampler.local_instances(3):
            lhs = op(a_dom, op(a_dom, x, y), z)
            rhs = op(a_dom, x, op(a_dom, y, z))
            validator.check_law(
                reasons, warnings, evidence, "ova.local_associativity", pa.equal(lhs, rhs, window),
                lambda x=x, y=y, z=z: encode(x=x, y=y, z=z),
            )

        for a_dom, x, y in sampler.local_instances(2):
            x2, y2 = sampler.enlargement(x), sampler.enlargement(y)
            small = pa.truncate(op(a_dom, x, y), window) if window else op(a_dom, x, y)
            large = pa.truncate(op(a_dom, x2, y2), window) if window else op(a_dom, x2, y2)
            validator.check_law(
                reasons, warnings, evidence, "ova.local_monotonicity", small.content <= large.content,
                lambda x=x, y=y, x2=x2, y2=y2: encode(x=x, y=y, x_large=x2, y_large=y2),
            )

        for b_dom, a_dom, _, (b1, b2) in sampler.inclusion_instances(0, 2):
            lhs = pa.extend(op(b_dom, b1, b2), a_dom)
            rhs = op(a_dom, pa.extend(b1, a_dom), pa.extend(b2, a_dom))
            validator.check_law(
                reasons, warnings, evidence, "ova.extension_commutation", pa.equal(lhs, rhs, window),
                lambda b1=b1, b2=b2, a_dom=a_dom, lhs=lhs, rhs=rhs: {
                    **encode(b1=b1, b2=b2, left=lhs, right=rhs), "domain": canonical(a_dom),
                },
            )


@dataclass
class CheckMeet:
    """Check that the meet of a relational OVA agrees with its combine operator."""

    ova: OvaInstance
    law_id: str = field(default="ova.meet", init=False)

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        window, _ = comparison_windows(ova, sampler)
        evidence.touch(self.law_id)
        for a, b in sampler.instances(2):
            m = meet(a, b, ova)
            validator.check_law(
                reasons, warnings, evidence, self.law_id, pa.equal(m, ova(a, b), window),
                lambda a=a, b=b, m=m: encode(a=a, b=b, meet=m),
            )


@dataclass
class CheckMeetIsGlb:
    """
    Check that the meet is the greatest lower bound of its arguments.

    Lower bounds are scanned over every valuation on every domain containing both
    arguments' domains, so pairs are only checked where those lattices are small.
    """

    ova: OvaInstance

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        ova = self.ova
        pa = ova.prealgebra
        encode = _encoder(pa)
        window, _ = comparison_windows(ova, sampler)
        evidence.touch("ova.meet_glb")
        lattices: dict[frozenset, list[Valuation]] = {}
        for a, b in sampler.instances(2):
            u = a.domain | b.domain
            above = [w for w in pa.topology.opens if u <= w]
            if sum(sampler.lattice_size(w) for w in above) > sampler.budget.exhaustive_limit:
                logger.debug("meet: too many lower bounds above %s, skipped", canonical(u))
                continue
            for w in above:
                if w not in lattices:
                    lattices[w] = sampler.lattice(w)
            m = meet(a, b, ova)
            bounds = (c for w in above for c in lattices[w])
            missed = next(
                (c for c in bounds if pa.leq(c, a, window) and pa.leq(c, b, window) and not pa.leq(c, m, window)),
                None,
            )
            validator.check_law(
                reasons, warnings, evidence, "ova.meet_glb",
                pa.leq(m, a, window) and pa.leq(m, b, window) and missed is None,
                lambda a=a, b=b, m=m, missed=missed: encode(
                    a=a, b=b, meet=m, **({} if missed is None else {"lower_bound": missed})
                ),
            )


def _report(name: str, checks: list, ova_or_pa: Union[OvaInstance, Prealgebra], budget: Budget | None) -> CheckReport:
    pa = ova_or_pa if isinstance(ova_or_pa, Prealgebra) else ova_or_pa.prealgebra
    sampler = ValuationSampler(pa, budget or Budget())
    logger.debug("checking %s with seed %d", name, sampler.budget.seed)
    return CheckReport.from_checks(name=name, checks=checks, sampler=sampler, window=sampler.window())


def check_ova_axioms(ova: OvaInstance, budget: Budget | None = None) -> CheckReport:
    """
    Check the OVA axioms of `ova` on sampled or enumerated valuations.

    The neutral element must be global; combine must be associative, monotone and
    labelled; the neutral must be two-sided; both combination identities must hold.
    Commutative and relational instances additionally check commutativity and the meet.
    """
    checks: list[Any] = [
        CheckNeutralGlobal(ova),
        CheckSemigroup(ova),
        CheckNeutrality(ova),
        CheckCombination(ova),
    ]
    if ova.commutative:
        checks.append(CheckCommutativity(ova))
    if ova.relational:
        checks.extend([CheckMeet(ova), CheckMeetIsGlb(ova)])
    return _report(f"ova {ova.name}", checks, ova, budget)


def check_commutativity(ova: OvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check a * b = b * a; order-sensitive operators fail on a pair of one-trace valuations."""
    return _report(f"commutativity {ova.name}", [CheckCommutativity(ova)], ova, budget)


def check_meet(ova: OvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check that the meet of a relational OVA is its combine operator and the greatest lower bound."""
    return _report(f"meet {ova.name}", [CheckMeet(ova), CheckMeetIsGlb(ova)], ova, budget)


def check_strong_neutrality(ova: OvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check extend(e_B, A) = e_A for all inclusions B <= A."""
    return _report(f"strong neutrality {ova.name}", [CheckStrongNeutrality(ova)], ova, budget)


def check_adjunction(ova: OvaInstance, budget: Budget | None = None) -> CheckReport:
    """Check the adjunction between restriction and extension and its corollaries."""
    return _report(f"adjunction {ova.name}", [CheckAdjunction(ova)], ova, budget)


def check_helper_hypotheses(
    family: LocalOperatorFamily, prealgebra: Prealgebra, budget: Budget | None = None
) -> CheckReport:
    """
    Check local monotonicity and extension-commutation of a family of local operators.

    Together with associativity of each local operator these make the extended
    operator an ordered semigroup on all valuations.
    """
    return _report(f"local operators {family.name}", [CheckLocalOperators(family, prealgebra)], prealgebra, budget)
