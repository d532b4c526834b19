"""causal-spec: causal models as first-class requirements artifacts.

Declare a causal DAG in a small text DSL, then derive the things a
requirements engineer actually ships: path classifications, adjustment
sets, testable independence statements, data/model requirements, and
runtime monitor definitions.
"""

from .analysis import (
    AdjustmentSet,
    ObservabilityGap,
    PathAnalysis,
    PathReport,
    backdoor_sets,
    classify_exposure_paths,
    enumerate_paths,
    find_instruments,
    minimal_backdoor_set,
    observability_gap_reports,
    observability_gaps,
)
from .citest import CiTestResult, ci_test, fisher_z, g_test, validate_model
from .derivation import (
    MonitorSpec,
    RequirementArtifact,
    derive_monitors,
    derive_requirements,
    derive_test_cases,
)
from .dsl import ModelDocument, load, parse, parse_json, serialize, to_dsl, to_json
from .errors import (
    CausalSpecError,
    CiTestError,
    CycleError,
    MonitorError,
    ParseError,
    PathLimitError,
    RoleError,
    ScmError,
    UnknownNodeError,
)
from .graph import Dag, d_separated, simple_paths
from .implications import (
    CiStatement,
    implied_independencies,
    local_markov_basis,
    make_statement,
    observable_independencies,
    verify,
)
from .monitor import Alarm, MonitorState, StreamSample, ingest, new_state, run_stream
from .scm import Dataset, ScmSpec, from_document, log_density, sample

__version__ = "0.1.0"

__all__ = [
    "AdjustmentSet",
    "Alarm",
    "CausalSpecError",
    "CiStatement",
    "CiTestError",
    "CiTestResult",
    "CycleError",
    "Dag",
    "Dataset",
    "ModelDocument",
    "MonitorError",
    "MonitorSpec",
    "MonitorState",
    "ObservabilityGap",
    "ParseError",
    "PathAnalysis",
    "PathLimitError",
    "PathReport",
    "RequirementArtifact",
    "RoleError",
    "ScmError",
    "ScmSpec",
    "StreamSample",
    "UnknownNodeError",
    "backdoor_sets",
    "ci_test",
    "classify_exposure_paths",
    "d_separated",
    "derive_monitors",
    "derive_requirements",
    "derive_test_cases",
    "enumerate_paths",
    "find_instruments",
    "fisher_z",
    "from_document",
    "g_test",
    "implied_independencies",
    "ingest",
    "load",
    "local_markov_basis",
    "log_density",
    "make_statement",
    "minimal_backdoor_set",
    "new_state",
    "observability_gap_reports",
    "observability_gaps",
    "observable_independencies",
    "parse",
    "parse_json",
    "run_stream",
    "sample",
    "serialize",
    "simple_paths",
    "to_dsl",
    "to_json",
    "validate_model",
    "verify",
]
