"""Law-check reports and the catalog-driven law validator."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
import logging
from typing import TYPE_CHECKING, Any, Dict, List, Optional

from monty.serialization import loadfn
from pydantic import BaseModel, Field

from cva_lab.settings import CvaLabSettings

if TYPE_CHECKING:
    from typing import Callable, Sequence, Union

    from cva_lab.sampling import Sampler

    Witness = Union[dict, Callable[[], dict], None]

logger = logging.getLogger(__name__)

SETTINGS = CvaLabSettings()
_law_catalog = loadfn(SETTINGS.LAW_CATALOG_FILENAME)


@dataclass
class LawEvidence:
    """
    Per-law tallies collected while checks run.

    Parameters
    -----------
    instances : dict[str, int]
        Number of instances each law was evaluated on.
    counterexamples : dict[str, dict]
        First serialized counterexample per failing law.
    properties : dict[str, bool]
        Informational facts that are neither reasons nor warnings.
    witnesses : dict[str, dict]
        Serialized search results, e.g. a strict weak-exchange instance.
    """

    instances: dict[str, int] = field(default_factory=dict)
    counterexamples: dict[str, dict] = field(default_factory=dict)
    properties: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)

    def touch(self, law_id: str) -> None:
        self.instances.setdefault(law_id, 0)


class LawValidator:
    """
    Record the outcome of a law on one instance, routing failures by catalog severity.

    Attrs
    ---------
    _default_schema : dict[str,Any]
        Pads catalog entries that omit a key.
    """

    _default_schema: dict[str, Any] = {
        "tag": "law",
        "comment": "law violated.",
        "severity": "reason",
        "truncated": False,
    }

    def __init__(self, catalog: dict[str, dict] | None = None) -> None:
        self.catalog = _law_catalog if catalog is None else catalog

    def entry(self, law_id: str) -> dict[str, Any]:
        return {**self._default_schema, **self.catalog.get(law_id, {})}

    def check_law(
        self,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        law_id: str,
        holds: bool,
        witness: Witness = None,
    ) -> bool:
        """
        Tally one instance of `law_id` and report it if it fails.

        Only the first failure of a law appends a message and stores a counterexample.

        Parameters
        -----------
        reasons : list[str]
            Failures that invalidate the structure under test.
        warnings : list[str]
            Failures that are only worth flagging.
        evidence : LawEvidence
            Tallies to update.
        law_id : str
            Key into the law catalog.
        holds : bool
            Whether the law held on this instance.
        witness : dict, callable returning a dict, or None
            Serialized instance; callables are only evaluated on failure.
        """
        evidence.instances[law_id] = evidence.instances.get(law_id, 0) + 1
        if holds:
            return True
        if law_id in evidence.counterexamples:
            return False

        entry = self.entry(law_id)
        evidence.counterexamples[law_id] = (witness() if callable(witness) else witness) or {}
        severity_to_list = {"reason": reasons, "warning": warnings}
        severity_to_list[entry["severity"]].append(
            f"{entry['tag'].upper()} --> {law_id}: {entry['comment']}"
        )
        logger.debug("law %s failed after %d instances", law_id, evidence.instances[law_id])
        return False


class CheckReport(BaseModel):
    """
    Result of a law-check run.
    """

    name: str = Field(..., description="What was checked, e.g. the model and operator")

    valid: bool = Field(False, description="Whether every law held on every instance")

    law_ids: List[str] = Field([], description="Laws evaluated in this run")

    reasons: List[str] = Field([], description="Law violations, formatted 'TAG --> law_id: comment'")

    warnings: List[str] = Field([], description="Lower-severity findings and truncation notices")

    instances_tested: Dict[str, int] = Field({}, description="Instances evaluated per law")

    counterexample: Optional[Dict[str, Any]] = Field(None, description="First counterexample, fully serialized")

    counterexamples: Dict[str, Dict[str, Any]] = Field({}, description="First counterexample per failing law")

    properties: Dict[str, bool] = Field({}, description="Informational facts established by the run")

    witnesses: Dict[str, Dict[str, Any]] = Field({}, description="Search results that are not violations")

    seed: int = Field(SETTINGS.SEED, description="Seed of the valuation sampler")

    cap: Optional[int] = Field(None, description="Length cap L_max of the model")

    window: Optional[int] = Field(None, description="Length up to which truncated comparisons are made")

    mode: str = Field("exhaustive", description="exhaustive, sampled, or mixed")

    last_updated: datetime = Field(
        description="Last updated date for this document",
        default_factory=lambda: datetime.now(timezone.utc),
    )

    @classmethod
    def from_checks(
        cls,
        name: str,
        checks: Sequence[Any],
        sampler: Sampler,
        window: int | None = None,
    ) -> CheckReport:
        """
        Run every check against one sampler and collect the results.

        Each check exposes `check(reasons, warnings, evidence, sampler)`.
        """
        reasons: list[str] = []
        warnings: list[str] = []
        evidence = LawEvidence()
        for check in checks:
            check.check(reasons=reasons, warnings=warnings, evidence=evidence, sampler=sampler)

        cap = sampler.cap
        if window is not None and any(
            LawValidator().entry(law)["truncated"] for law in evidence.instances
        ):
            warnings.append(f"TRUNCATION --> comparisons involving capped universes use traces of length <= {window}.")

        return cls.from_evidence(
            name=name,
            reasons=reasons,
            warnings=warnings,
            evidence=evidence,
            seed=sampler.budget.seed,
            cap=cap,
            window=window,
            mode=sampler.mode,
        )

    @classmethod
    def from_evidence(
        cls,
        name: str,
        reasons: list[str],
        warnings: list[str],
        evidence: LawEvidence,
        **kwargs,
    ) -> CheckReport:
        first = None
        for law_id in evidence.instances:
            if law_id in evidence.counterexamples:
                first = {"law_id": law_id, **evidence.counterexamples[law_id]}
                break
        return cls(
            name=name,
            valid=len(reasons) == 0,
            law_ids=list(evidence.instances),
            reasons=reasons,
            warnings=warnings,
            instances_tested=dict(evidence.instances),
            counterexample=first,
            counterexamples=dict(evidence.counterexamples),
            properties=dict(evidence.properties),
            witnesses=dict(evidence.witnesses),
            **kwargs,
        )

    @classmethod
    def merge(cls, name: str, reports: Sequence[CheckReport]) -> CheckReport:
        """Combine several reports into one; valid only if all are."""
        modes = {r.mode for r in reports}
        merged = cls(
            name=name,
            valid=all(r.valid for r in reports),
            seed=reports[0].seed if reports else SETTINGS.SEED,
            cap=reports[0].cap if reports else None,
            window=min((r.window for r in reports if r.window is not None), default=None),
            mode=modes.pop() if len(modes) == 1 else "mixed",
        )
        for report in reports:
            prefix = f"{report.name}: " if len(reports) > 1 else ""
            merged.law_ids.extend(law for law in report.law_ids if law not in merged.law_ids)
            merged.reasons.extend(prefix + r for r in report.reasons)
            merged.warnings.extend(prefix + w for w in report.warnings if prefix + w not in merged.warnings)
            for law, n in report.instances_tested.items():
                merged.instances_tested[law] = merged.instances_tested.get(law, 0) + n
            for law, ce in report.counterexamples.items():
                merged.counterexamples.setdefault(law, ce)
            merged.properties.update({f"{prefix}{k}": v for k, v in report.properties.items()})
            merged.witnesses.update(report.witnesses)
            if merged.counterexample is None and report.counterexample is not None:
                merged.counterexample = report.counterexample
        return merged

    def to_json(self) -> str:
        """Deterministic JSON rendering; the timestamp is left out so reruns are byte identical."""
        return self.model_dump_json(indent=2, exclude={"last_updated"})

    def to_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.valid else 'FAIL'} (seed={self.seed}, cap={self.cap}, {self.mode})"]
        for law in self.law_ids:
            status = "FAIL" if law in self.counterexamples else "ok"
            lines.append(f"  {law:<36} {self.instances_tested.get(law, 0):>7}  {status}")
        lines.extend(f"  reason: {r}" for r in self.reasons)
        lines.extend(f"  warning: {w}" for w in self.warnings)
        lines.extend(f"  property: {k} = {v}" for k, v in sorted(self.properties.items()))
        return "\n".join(lines)
