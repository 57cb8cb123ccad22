"""
Morphisms between algebras on the same space, and the stuttering quotient.

A lax morphism f satisfies, for a on A and C <= A,

* monotonicity: a <= b implies f(a) <= f(b);
* naturality: f(a)|C <= f(a|C);
* multiplicativity: f(a) * f(b) <= f(a * b);
* unitality: e'_A <= f(e_A).

Colax morphisms satisfy the reversed inequalities (monotonicity excepted); strong
morphisms satisfy both.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import TYPE_CHECKING, Literal

from cva_lab.cva import CvaInstance
from cva_lab.exceptions import DomainError
from cva_lab.models import ModelConfig, build_model
from cva_lab.ova import comparison_windows
from cva_lab.report import CheckReport, LawEvidence, LawValidator
from cva_lab.sampling import Budget, ValuationSampler
from cva_lab.topology import canonical, discrete_topology
from cva_lab.tuples import stutter_reduce
from cva_lab.valuations import Valuation

if TYPE_CHECKING:
    from typing import Callable

    from cva_lab.ova import OvaInstance
    from cva_lab.valuations import Prealgebra

logger = logging.getLogger(__name__)

Mode = Literal["lax", "colax", "strong"]
Level = Literal["ova", "cva"]


@dataclass(frozen=True)
class MorphismCandidate:
    """
    A family of domain-preserving maps between two algebras, given as one executable map.

    Parameters
    -----------
    name : str
        Name used in reports.
    source : CvaInstance
        Domain algebra.
    target : CvaInstance
        Codomain algebra; must live on the same space.
    apply : Callable
        Maps a source valuation on A to a target valuation on A.
    """

    name: str
    source: CvaInstance
    target: CvaInstance
    apply: Callable[[Valuation], Valuation]

    def __call__(self, a: Valuation) -> Valuation:
        image = self.apply(a)
        if image.domain != a.domain:
            raise DomainError(f"morphism {self.name} moved {canonical(a.domain)} to {canonical(image.domain)}")
        return image


def stutter_quotient(a: Valuation) -> Valuation:
    """Reduce every trace of a state valuation to its stutter-free word."""
    return Valuation(a.domain, frozenset(stutter_reduce(t) for t in a.content))


def identity_morphism(model: CvaInstance) -> MorphismCandidate:
    return MorphismCandidate(name=f"identity on {model.name}", source=model, target=model, apply=lambda a: a)


def stutter_quotient_morphism(state: CvaInstance, relative: CvaInstance) -> MorphismCandidate:
    """The quotient from state traces to stutter-free traces."""
    if state.prealgebra.tuples.reducing or not relative.prealgebra.tuples.reducing:
        raise DomainError("the stutter quotient maps the state model to the relative model")
    _require_same_space(state, relative)
    return MorphismCandidate(name="stutter quotient", source=state, target=relative, apply=stutter_quotient)


def _require_same_space(source: CvaInstance, target: CvaInstance) -> None:
    if source.prealgebra.topology != target.prealgebra.topology:
        raise DomainError("source and target algebras live on different spaces")


def _directions(mode: Mode) -> tuple[str, ...]:
    return {"lax": ("lax",), "colax": ("colax",), "strong": ("lax", "colax")}[mode]


def _holds(target: Prealgebra, lax_small: Valuation, lax_large: Valuation, directions, window) -> bool:
    """Lax means `lax_small <= lax_large`; colax the reverse."""
    ok = True
    if "lax" in directions:
        ok &= target.leq(lax_small, lax_large, window)
    if "colax" in directions:
        ok &= target.leq(lax_large, lax_small, window)
    return ok


@dataclass
class CheckMorphism:
    """
    Check monotonicity, naturality, multiplicativity and unitality of a morphism candidate.

    Parameters
    -----------
    morphism : MorphismCandidate
        Maps under test.
    mode : "lax", "colax" or "strong"
        Direction of the inequalities.
    level : "ova" or "cva"
        "ova" checks the sequential operators only; "cva" checks both pairs.
    """

    morphism: MorphismCandidate
    mode: Mode = "strong"
    level: Level = "cva"

    def _pairs(self) -> list[tuple[str, OvaInstance, OvaInstance]]:
        m = self.morphism
        pairs = [("seq", m.source.seq, m.target.seq)]
        if self.level == "cva":
            pairs.append(("par", m.source.par, m.target.par))
        return pairs

    def check(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        sampler: ValuationSampler,
    ) -> None:
        """
        Check the morphism laws in the directions fixed by the mode.

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
            Source of valuations on the source algebra.
        """
        validator = LawValidator()
        f = self.morphism
        source = f.source.prealgebra
        target = f.target.prealgebra
        directions = _directions(self.mode)
        window = target.window(sampler.max_length)
        product_window = comparison_windows(f.target.seq, sampler)[1]

        def encode(**values: Valuation) -> dict:
            return {name: source.encode(v) for name, v in values.items()}

        evidence.touch("morphism.monotonicity")
        for (a,) in sampler.instances(1):
            b = sampler.coarsening(a)
            validator.check_law(
                reasons, warnings, evidence, "morphism.monotonicity", target.leq(f(a), f(b), window),
                lambda a=a, b=b: encode(a=a, b=b),
            )

        evidence.touch("morphism.naturality")
        for c_dom, _, (a,), _ in sampler.inclusion_instances(1, 0):
            restricted_image = target.restrict(f(a), c_dom)
            image_of_restriction = f(source.restrict(a, c_dom))
            validator.check_law(
                reasons, warnings, evidence, "morphism.naturality",
                _holds(target, restricted_image, image_of_restriction, directions, window),
                lambda a=a, c_dom=c_dom: {**encode(a=a), "subdomain": canonical(c_dom)},
            )

        for label, src, tgt in self._pairs():
            law = f"morphism.multiplicativity_{label}"
            evidence.touch(law)
            pairs = list(sampler.singleton_pairs()) + list(sampler.instances(2))
            for a, b in pairs:
                validator.check_law(
                    reasons, warnings, evidence, law,
                    _holds(target, tgt(f(a), f(b)), f(src(a, b)), directions, product_window),
                    lambda a=a, b=b: encode(a=a, b=b),
                )

            law = f"morphism.unitality_{label}"
            evidence.touch(law)
            for dom in source.topology.opens:
                validator.check_law(
                    reasons, warnings, evidence, law,
                    _holds(target, tgt.epsilon(dom), f(src.epsilon(dom)), directions, window),
                    {"domain": canonical(dom)},
                )


@dataclass
class CheckExtensionPreservation:
    """Check f(extend(b, A)) <= extend(f(b), A) with extension as the preimage of restriction."""

    morphism: MorphismCandidate

    def check(self, reasons: list[str], warnings: list[str], evidence: LawEvidence, sampler: ValuationSampler) -> None:
        validator = LawValidator()
        f = self.morphism
        source = f.source.prealgebra
        target = f.target.prealgebra
        window = target.window(sampler.max_length)
        evidence.touch("morphism.extension_preservation")
        for _, a_dom, _, (b,) in sampler.inclusion_instances(0, 1):
            lhs = f(source.extend(b, a_dom))
            rhs = target.extend(f(b), a_dom)
            validator.check_law(
                reasons, warnings, evidence, "morphism.extension_preservation", target.leq(lhs, rhs, window),
                lambda b=b, a_dom=a_dom: {"b": source.encode(b), "domain": canonical(a_dom)},
            )


def check_morphism(
    m: MorphismCandidate, mode: Mode = "strong", level: Level = "cva", budget: Budget | None = None
) -> CheckReport:
    """
    Check that `m` is a lax, colax or strong morphism of OVAs or CVAs.

    Raises
    -------
    DomainError
        If source and target live on different spaces.
    """
    _require_same_space(m.source, m.target)
    sampler = ValuationSampler(m.source.prealgebra, budget or Budget())
    return CheckReport.from_checks(
        name=f"{mode} {level} morphism {m.name}",
        checks=[CheckMorphism(m, mode, level)],
        sampler=sampler,
        window=m.target.prealgebra.window(sampler.max_length),
    )


def check_extension_preservation(m: MorphismCandidate, budget: Budget | None = None) -> CheckReport:
    _require_same_space(m.source, m.target)
    sampler = ValuationSampler(m.source.prealgebra, budget or Budget())
    return CheckReport.from_checks(
        name=f"extension preservation {m.name}",
        checks=[CheckExtensionPreservation(m)],
        sampler=sampler,
        window=m.target.prealgebra.window(sampler.max_length),
    )


def _monotone_maps(source: Prealgebra, target: Prealgebra, sources: list, images: list, top, unit):
    """Every monotone assignment sources -> images sending `top` to `unit`, built by backtracking."""

    def grow(assigned: dict):
        if len(assigned) == len(sources):
            yield dict(assigned)
            return
        v = sources[len(assigned)]
        for w in ([unit] if v == top else images):
            if all(
                (not source.leq(u, v) or target.leq(fu, w)) and (not source.leq(v, u) or target.leq(w, fu))
                for u, fu in assigned.items()
            ):
                assigned[v] = w
                yield from grow(assigned)
                del assigned[v]

    yield from grow({})


def check_gamma_sigma_obstruction(
    values=(0, 1), cap: int = 2, atoms=("x",), max_maps: int = 2**16
) -> CheckReport:
    """
    Certify the two facts ruling out interesting strong morphisms between action and state traces.

    The two neutral elements of the action model coincide while those of the state
    model differ, so no strong morphism from actions to states preserves both units. A
    strong morphism from states to actions sends the capped universe to iota, and
    monotonicity then forces every image below iota. The second fact is checked by
    enumerating every monotone map with f(top) = iota on each domain with at most
    `max_maps` candidate maps.
    """
    topology = discrete_topology(atoms)
    action = build_model(ModelConfig(model="action", topology=topology, values=list(values), cap=cap))
    state = build_model(ModelConfig(model="state", topology=topology, values=list(values), cap=cap))
    validator = LawValidator()
    reasons: list[str] = []
    warnings: list[str] = []
    evidence = LawEvidence()

    for law in (
        "obstruction.action_neutrals_coincide", "obstruction.state_neutrals_differ",
        "obstruction.below_top", "obstruction.below_iota",
    ):
        evidence.touch(law)

    for a in topology.opens:
        where = {"domain": canonical(a)}
        validator.check_law(
            reasons, warnings, evidence, "obstruction.action_neutrals_coincide", action.skip(a) == action.run(a), where
        )
        validator.check_law(
            reasons, warnings, evidence, "obstruction.state_neutrals_differ", state.skip(a) != state.run(a), where
        )
        top = state.run(a)
        for v in state.prealgebra.valuations(a):
            validator.check_law(
                reasons, warnings, evidence, "obstruction.below_top", state.prealgebra.leq(v, top),
                lambda v=v: state.prealgebra.encode(v),
            )
        iota = action.run(a)
        sources = list(state.prealgebra.valuations(a))
        images = list(action.prealgebra.valuations(a))
        if len(images) ** len(sources) > max_maps:
            logger.debug("obstruction: too many candidate maps on %s, skipped", canonical(a))
            continue
        for f in _monotone_maps(state.prealgebra, action.prealgebra, sources, images, top, iota):
            validator.check_law(
                reasons, warnings, evidence, "obstruction.below_iota",
                all(action.prealgebra.leq(w, iota) for w in f.values()),
                lambda f=f, a=a: {
                    "domain": canonical(a),
                    "map": [
                        {"source": state.prealgebra.encode(v), "image": action.prealgebra.encode(w)}
                        for v, w in f.items()
                    ],
                },
            )

    evidence.properties["no_unit_preserving_strong_morphism_action_to_state"] = all(
        law not in evidence.counterexamples
        for law in ("obstruction.action_neutrals_coincide", "obstruction.state_neutrals_differ")
    )
    return CheckReport.from_evidence(
        name="action/state obstruction",
        reasons=reasons,
        warnings=warnings,
        evidence=evidence,
        cap=cap,
    )
