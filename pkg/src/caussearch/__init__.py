"""caussearch: causal structure learning over mixed tabular data.

Constraint-based (PC, FCI) and score-based (FGES, GRaSP) searches with
background-knowledge tiers, bootstrap edge-stability analysis, four graph
serializations, a simulation harness, and a single facade class tying it
together. See SearchSession for the common entry point.
"""

from .bootstrap import (
    EdgeStatTable,
    bootstrap_search,
    consensus_graph,
    derive_seed,
    graphs_to_probs,
)
from .data import (
    CONTINUOUS,
    ColumnKind,
    CovarianceModel,
    Dataset,
    VariableKind,
    covariance,
    discrete,
    from_columns,
    load_tabular,
    one_hot_embed,
    parse_tabular,
    resample,
    save_tabular,
)
from .errors import (
    CausSearchError,
    ConfigError,
    DataError,
    IncompatibilityError,
    KnowledgeError,
    NotADagError,
    ParseError,
    SingularityError,
)
from .facade import SearchResult, SearchSession
from .graph_io import (
    PcalgMatrix,
    from_pcalg,
    parse_edge_list,
    to_dot,
    to_edge_list_string,
    to_lavaan,
    to_pcalg,
)
from .graphs import (
    Endpoint,
    EdgeType,
    MixedGraph,
    ancestors,
    cpdag_of,
    d_separated,
    dag_extension,
    is_dag,
    meek_closure,
)
from .knowledge import Knowledge
from .metrics import structural_metrics
from .search import SearchConfig, fci_search, fges_search, grasp_search, pc_search
from .simulate import OracleTest, SemModel, oracle_test, random_dag, random_sem, simulate
from .stats import (
    DegenerateGaussianScore,
    FisherZTest,
    ScoreBasedTest,
    SemBicScore,
    TestResult,
    fisher_z,
)

__version__ = "0.1.0"

__all__ = [
    "CONTINUOUS",
    "CausSearchError",
    "ColumnKind",
    "ConfigError",
    "CovarianceModel",
    "DataError",
    "Dataset",
    "DegenerateGaussianScore",
    "EdgeStatTable",
    "EdgeType",
    "Endpoint",
    "FisherZTest",
    "IncompatibilityError",
    "Knowledge",
    "KnowledgeError",
    "MixedGraph",
    "NotADagError",
    "OracleTest",
    "ParseError",
    "PcalgMatrix",
    "ScoreBasedTest",
    "SearchConfig",
    "SearchResult",
    "SearchSession",
    "SemBicScore",
    "SemModel",
    "SingularityError",
    "TestResult",
    "VariableKind",
    "ancestors",
    "bootstrap_search",
    "consensus_graph",
    "covariance",
    "cpdag_of",
    "d_separated",
    "dag_extension",
    "derive_seed",
    "discrete",
    "fci_search",
    "fges_search",
    "fisher_z",
    "from_columns",
    "from_pcalg",
    "graphs_to_probs",
    "grasp_search",
    "is_dag",
    "load_tabular",
    "meek_closure",
    "one_hot_embed",
    "oracle_test",
    "parse_edge_list",
    "parse_tabular",
    "pc_search",
    "random_dag",
    "random_sem",
    "resample",
    "save_tabular",
    "simulate",
    "structural_metrics",
    "to_dot",
    "to_edge_list_string",
    "to_lavaan",
    "to_pcalg",
]
