"""Command-line front end: `cva-lab <command> --model ... --space ...`."""
from __future__ import annotations

import argparse
from functools import reduce
import json
import logging
from pathlib import Path
import sys
from typing import TYPE_CHECKING, Any, Dict, List, Literal, Optional, Union

from monty.serialization import loadfn
from pydantic import BaseModel, Field, ValidationError

from cva_lab.cva import CvaInstance, check_cva, hoare, jones, refines
from cva_lab.exceptions import CvaLabError, ParseError, UnsupportedOperationError
from cva_lab.inference import InferenceProblem, Knowledgebase, solve_inference, solve_inference_semijoin
from cva_lab.models import MODEL_IDS, build_model, make_config
from cva_lab.morphisms import check_morphism, identity_morphism, stutter_quotient_morphism
from cva_lab.ova import check_ova_axioms
from cva_lab.sampling import Budget
from cva_lab.settings import CvaLabSettings
from cva_lab.topology import alexandrov_from_graph, canonical, generate_topology
from cva_lab.tuples import check_tuple_system

if TYPE_CHECKING:
    from typing import Sequence

    from cva_lab.ova import OvaInstance
    from cva_lab.report import CheckReport
    from cva_lab.topology import Topology
    from cva_lab.valuations import Valuation

logger = logging.getLogger(__name__)

SETTINGS = CvaLabSettings()

COMMANDS = (
    "check-ova",
    "check-cva",
    "check-tuple-system",
    "check-morphism",
    "eval",
    "hoare",
    "jones",
    "refine",
    "infer",
)

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class RunConfig(BaseModel):
    """
    One validated CLI invocation.
    """

    command: Literal[COMMANDS] = Field(..., description="Subcommand to run")

    model: Literal[MODEL_IDS] = Field(..., description="Model identifier")

    space: Path = Field(..., description="Space definition file")

    values: List[Union[int, str]] = Field(SETTINGS.DEFAULT_VALUES, description="Value set of every atom")

    cap: int = Field(SETTINGS.DEFAULT_CAP, description="Length cap of enumerated universes")

    budget: Budget = Field(default_factory=Budget, description="Sampling budget of law checks")

    output_format: Literal["json", "text"] = Field("json", description="Rendering of the result")

    out: Optional[Path] = Field(None, description="Write the result here instead of stdout")

    op: Literal["seq", "par"] = Field("par", description="Combine operator for check-ova and infer")

    kind: Literal["identity", "stutter-quotient"] = Field("identity", description="Morphism candidate")

    mode: Literal["lax", "colax", "strong"] = Field("strong", description="Morphism inequality direction")

    level: Literal["ova", "cva"] = Field("cva", description="Operators a morphism must respect")

    expr: Optional[str] = Field(None, description="Expression over named valuations, e.g. 'a seq b'")

    valuation_files: Dict[str, Path] = Field({}, description="Named valuation files")

    kb: List[Path] = Field([], description="Knowledgebase valuation files")

    queries: List[List[str]] = Field([], description="Query domains")

    naive: bool = Field(False, description="Answer queries from the full joint valuation")


def _load(path: Union[str, Path]) -> Any:
    """Load a JSON or YAML file, reporting syntax errors with their line."""
    path = Path(path)
    try:
        return loadfn(path)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=str(path), line=exc.lineno) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"not a text file ({exc.reason})", path=str(path)) from exc


def parse_space_file(path: Union[str, Path]) -> Topology:
    """
    Read a space definition.

    Two forms are accepted::

        {"ground": ["a", ...], "subbasis": [["a", "d"], ...]}
        {"graph": {"nodes": ["a", ...], "edges": [{"label": "d", "ends": ["a", "b"]}, ...]}}
    """
    obj = _load(path)
    if not isinstance(obj, dict):
        raise ParseError("a space file holds a JSON object", path=str(path))
    if "graph" in obj:
        graph = obj["graph"]
        try:
            edges = [(edge["label"], edge["ends"]) for edge in graph.get("edges", [])]
            nodes = graph["nodes"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed graph entry: {exc}", path=str(path)) from exc
        return alexandrov_from_graph(nodes, edges)
    if "ground" not in obj:
        raise ParseError("a space file needs 'ground' and 'subbasis', or 'graph'", path=str(path))
    return generate_topology(obj["ground"], obj.get("subbasis", []))


def parse_valuation_file(path: Union[str, Path], model: Union[CvaInstance, OvaInstance]) -> Valuation:
    """Read a valuation of `model`; a trace that does not fit the model is reported by index."""
    return model.prealgebra.decode(_load(path), path=str(path))


def _require_cva(model: Union[CvaInstance, OvaInstance], command: str) -> CvaInstance:
    if not isinstance(model, CvaInstance):
        raise UnsupportedOperationError(f"{command} needs a concurrent model, not {model.name}")
    return model


def _operator(model: Union[CvaInstance, OvaInstance], op: str) -> OvaInstance:
    if isinstance(model, CvaInstance):
        return model.seq if op == "seq" else model.par
    if op == "seq":
        raise UnsupportedOperationError(f"{model.name} has no sequential operator")
    return model


def _named(cfg: RunConfig, model, *names: str) -> list[Valuation]:
    missing = [n for n in names if n not in cfg.valuation_files]
    if missing:
        raise ParseError(f"missing valuation file(s) for {', '.join(missing)}")
    return [parse_valuation_file(cfg.valuation_files[n], model) for n in names]


def _evaluate(cfg: RunConfig, model) -> Valuation:
    """Left-to-right evaluation of `name op name op ...`."""
    tokens = (cfg.expr or "").split()
    if len(tokens) % 2 == 0 or any(t not in ("seq", "par") for t in tokens[1::2]):
        raise ParseError(f"cannot parse expression {cfg.expr!r}; expected 'a seq b' or 'a par b'")
    operands = _named(cfg, model, *tokens[0::2])
    ops = [_operator(model, t) for t in tokens[1::2]]
    return reduce(lambda acc, step: step[0](acc, step[1]), zip(ops, operands[1:]), operands[0])


def _budget(args: argparse.Namespace) -> Budget:
    overrides = {
        "samples": args.samples,
        "max_traces": args.max_traces,
        "max_length": args.max_length,
        "seed": args.seed,
    }
    return Budget(**{k: v for k, v in overrides.items() if v is not None})


def _check(cfg: RunConfig, topology: Topology, model) -> CheckReport:
    if cfg.command == "check-ova":
        return check_ova_axioms(_operator(model, cfg.op), cfg.budget)
    if cfg.command == "check-cva":
        return check_cva(_require_cva(model, cfg.command), cfg.budget)
    if cfg.command == "check-tuple-system":
        return check_tuple_system(model.prealgebra.tuples, topology, cfg.budget)
    if cfg.kind == "identity":
        candidate = identity_morphism(_require_cva(model, cfg.command))
    else:
        state, relative = (
            build_model(make_config(model=m, topology=topology, values=cfg.values, cap=cfg.cap))
            for m in ("state", "relative")
        )
        candidate = stutter_quotient_morphism(state, relative)
    return check_morphism(candidate, mode=cfg.mode, level=cfg.level, budget=cfg.budget)


def dispatch(cfg: RunConfig) -> tuple[int, Union[CheckReport, dict]]:
    """
    Run one command and return its exit code and result.

    Law checks return their report with exit code 0 when valid and 1 otherwise; the
    predicates (hoare, jones, refine) return 1 when false; eval and infer return valuations.
    """
    logger.info("dispatching %s on the %s model, space %s", cfg.command, cfg.model, cfg.space)
    logger.debug("settings overrides: %s", SETTINGS.as_dict())
    topology = parse_space_file(cfg.space)
    model = build_model(make_config(model=cfg.model, topology=topology, values=cfg.values, cap=cfg.cap))
    pa = model.prealgebra

    if cfg.command.startswith("check-"):
        report = _check(cfg, topology, model)
        return (EXIT_OK if report.valid else EXIT_FAIL), report

    if cfg.command == "eval":
        return EXIT_OK, pa.encode(_evaluate(cfg, model))

    if cfg.command in ("hoare", "jones", "refine"):
        if cfg.command == "hoare":
            p, a, q = _named(cfg, model, "p", "a", "q")
            holds = hoare(p, a, q, _require_cva(model, cfg.command))
        elif cfg.command == "jones":
            p, r, a, g, q = _named(cfg, model, "p", "r", "a", "g", "q")
            holds = jones(p, r, a, g, q, _require_cva(model, cfg.command))
        else:
            a, b = _named(cfg, model, "a", "b")
            holds = refines(a, b, model)
        return (EXIT_OK if holds else EXIT_FAIL), {"command": cfg.command, "holds": holds}

    items = [parse_valuation_file(path, model) for path in cfg.kb]
    if isinstance(model, CvaInstance):
        kb = Knowledgebase(items=tuple(items), model=model, op=cfg.op)
    else:
        kb = Knowledgebase(items=tuple(items), model=_operator(model, cfg.op))
    problem = InferenceProblem(kb=kb, queries=tuple(frozenset(q) for q in cfg.queries))
    solve = solve_inference if cfg.naive or cfg.op == "seq" else solve_inference_semijoin
    answers = solve(problem)
    return EXIT_OK, {
        "answers": [{"query": canonical(q), "valuation": pa.encode(answers[q])} for q in problem.queries]
    }


def _render(result: Union[CheckReport, dict], output_format: str) -> str:
    if isinstance(result, dict):
        return json.dumps(result, sort_keys=True, indent=2)
    return result.to_text() if output_format == "text" else result.to_json()


def _valuation_args(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        parser.add_argument(f"--{name}", metavar="FILE", help=f"Valuation file for {name}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, choices=MODEL_IDS, help="Model identifier")
    common.add_argument("--space", required=True, help="Space definition file (JSON)")
    common.add_argument("--values", default=None, help="Comma-separated value set, or a count k for 0..k-1")
    common.add_argument("--cap", type=int, default=SETTINGS.DEFAULT_CAP, help="Length cap of enumerated universes")
    common.add_argument("--seed", type=int, default=None, help="Sampler seed")
    common.add_argument("--samples", type=int, default=None, help="Sampled instances per law")
    common.add_argument("--max-traces", type=int, default=None, help="Largest sampled valuation")
    common.add_argument("--max-length", type=int, default=None, help="Longest sampled trace")
    common.add_argument("--format", dest="output_format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="Write the result to this file")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    parser = argparse.ArgumentParser(prog="cva-lab", description="Check and compute with concurrent valuation algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-ova", parents=[common], help="Check the OVA axioms of one operator")
    p.add_argument("--op", choices=("seq", "par"), default="par")
    sub.add_parser("check-cva", parents=[common], help="Check the full CVA law suite")
    sub.add_parser("check-tuple-system", parents=[common], help="Check the model's tuple system")

    p = sub.add_parser("check-morphism", parents=[common], help="Check a morphism candidate")
    p.add_argument("--kind", choices=("identity", "stutter-quotient"), default="identity")
    p.add_argument("--mode", choices=("lax", "colax", "strong"), default="strong")
    p.add_argument("--level", choices=("ova", "cva"), default="cva")

    p = sub.add_parser("eval", parents=[common], help="Evaluate 'a seq b' or 'a par b' over named files")
    p.add_argument("--expr", required=True)
    p.add_argument("--val", action="append", default=[], metavar="NAME=FILE", help="Bind a name to a valuation file")

    _valuation_args(sub.add_parser("hoare", parents=[common], help="Decide {p} a {q}"), "p", "a", "q")
    _valuation_args(sub.add_parser("jones", parents=[common], help="Decide the rely/guarantee quintuple"),
                    "p", "r", "a", "g", "q")
    _valuation_args(sub.add_parser("refine", parents=[common], help="Decide a <= b"), "a", "b")

    p = sub.add_parser("infer", parents=[common], help="Answer queries over a knowledgebase")
    p.add_argument("--kb", required=True, help="Comma-separated valuation files")
    p.add_argument("--op", choices=("seq", "par"), default="par")
    p.add_argument("--query", action="append", required=True, help="Comma-separated query atoms; repeatable")
    p.add_argument("--naive", action="store_true", help="Restrict the full joint valuation")
    return parser


def _values(raw: str | None) -> list[Union[int, str]]:
    if raw is None:
        return list(SETTINGS.DEFAULT_VALUES)
    if raw.strip().isdigit():
        return list(range(int(raw)))
    return [int(v) if v.strip().lstrip("-").isdigit() else v.strip() for v in raw.split(",") if v.strip()]


def _split(raw: str) -> list[str]:
    return [part.strip() for part in raw.replace(" ", ",").split(",") if part.strip()]


def to_run_config(args: argparse.Namespace) -> RunConfig:
    named: dict[str, str] = {}
    for binding in getattr(args, "val", []):
        name, sep, path = binding.partition("=")
        if not sep:
            raise ParseError(f"expected NAME=FILE, got {binding!r}")
        named[name] = path
    for name in ("p", "r", "a", "g", "q", "b"):
        if getattr(args, name, None) is not None:
            named[name] = getattr(args, name)
    return RunConfig(
        command=args.command,
        model=args.model,
        space=args.space,
        values=_values(args.values),
        cap=args.cap,
        budget=_budget(args),
        output_format=args.output_format,
        out=args.out,
        op=getattr(args, "op", "par"),
        kind=getattr(args, "kind", "identity"),
        mode=getattr(args, "mode", "strong"),
        level=getattr(args, "level", "cva"),
        expr=getattr(args, "expr", None),
        valuation_files=named,
        kb=_split(args.kb) if getattr(args, "kb", None) else [],
        queries=[_split(q) for q in getattr(args, "query", None) or []],
        naive=getattr(args, "naive", False),
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the `cva-lab` console script; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = to_run_config(args)
        code, result = dispatch(cfg)
        rendered = _render(result, cfg.output_format)
        if cfg.out is not None:
            cfg.out.write_text(rendered + "\n")
        else:
            print(rendered)
    except (CvaLabError, OSError, ValidationError) as exc:
        print(f"cva-lab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
