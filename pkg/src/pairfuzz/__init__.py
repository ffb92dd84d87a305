"""pairfuzz: differential fuzzing of library APIs via inferred relational pairs.

The pipeline ranks candidate API pairs from signatures and descriptions,
synthesizes cross-API invocations (argument matching or doc templates),
verifies value/status equivalence over traced inputs through a crash-isolated
executor, and fuzzes the verified pairs for inconsistencies, iterating until
no new API gets covered.
"""

from .corpus import ApiEntry, ArgSpec, CorpusDb, InvocationRecord, load_corpus
from .driver import CampaignConfig, CampaignReport, run
from .protocol import ExecutorClient, MockExecutor, Status, Tolerance
from .synthesizer import InvocationPlan, MatchingTemplate
from .values import ValueRepr
from .verifier import PairVerdict, Verdict

__all__ = [
    "ApiEntry",
    "ArgSpec",
    "CorpusDb",
    "InvocationRecord",
    "load_corpus",
    "CampaignConfig",
    "CampaignReport",
    "run",
    "ExecutorClient",
    "MockExecutor",
    "Status",
    "Tolerance",
    "InvocationPlan",
    "MatchingTemplate",
    "ValueRepr",
    "PairVerdict",
    "Verdict",
]

__version__ = "0.1.0"
