"""
cva-lab is a workbench for concurrent valuation algebras over finite spaces. It builds
the action, state and relative trace models and a relational database model, turns
their algebraic laws into executable checks, and answers inference queries over
knowledgebases of valuations.
"""
from cva_lab.cva import CvaInstance, check_cva, hoare, jones, refines  # noqa: F401
from cva_lab.inference import (  # noqa: F401
    InferenceProblem,
    Knowledgebase,
    solve_inference,
    solve_inference_semijoin,
)
from cva_lab.models import ModelConfig, build_model, make_config  # noqa: F401
from cva_lab.ova import OvaInstance, check_ova_axioms  # noqa: F401
from cva_lab.report import CheckReport  # noqa: F401
from cva_lab.sampling import Budget  # noqa: F401
from cva_lab.topology import Topology, alexandrov_from_graph, discrete_topology, generate_topology  # noqa: F401
from cva_lab.valuations import Prealgebra, Valuation  # noqa: F401
