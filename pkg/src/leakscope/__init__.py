"""Resource-leak detection for Java methods via resource-oriented intentions.

The pipeline: parse one method (:func:`parse_method`), obtain an intention
set from a provider (:func:`infer` or :func:`rule_based_infer`), build the
control-flow graph (:func:`build_cfg`), enumerate pruned entry-to-exit paths
(:func:`enumerate_paths`), and run the two-stage analysis
(:func:`analyze_method` / :func:`detect`).
"""

from .anchoring import IntentionAnchors
from .cfg import Cfg, CfgEdge, CfgNode, NodeKind, build_cfg, validate_cfg
from .detector import (
    BranchPair,
    LeakReport,
    LeakVerdict,
    analyze_method,
    detect,
    propagate,
    stage1,
    stage2,
)
from .errors import (
    DatasetFormatError,
    FixtureLookupError,
    JavaSyntaxError,
    LeakScopeError,
    PathExplosionError,
    ProviderError,
    ProviderTransportError,
    UnsupportedConstructError,
)
from .evaluation import (
    REFERENCE_RESULTS,
    EvalPair,
    MetricsReport,
    SnippetRecord,
    eval_detection,
    eval_intentions,
    evaluate,
    load_dataset,
    var_matches_type,
)
from .intentions import (
    Intention,
    IntentionKind,
    IntentionSet,
    acquire,
    parse_answer,
    query,
    release,
    render_answer,
    validate,
)
from .javasrc import MethodSnippet, parse_method, scan_file
from .paths import (
    DEFAULT_MAX_PATHS,
    ControlFlowPath,
    enumerate_exhaustive,
    enumerate_paths,
    format_path,
    path_intervals,
)
from .prompting import TEMPLATE_ID, PromptRequest, number_snippet, render_prompt, request_for
from .providers import (
    DEFAULT_KNOWLEDGE_TABLE,
    FixtureProvider,
    KnowledgeTable,
    ProviderConfig,
    RemoteChatProvider,
    RuleBasedProvider,
    infer,
    make_provider,
    rule_based_infer,
    snippet_hash,
)

__version__ = "0.1.0"
