"""Call-graph extraction, comparison and evaluation toolkit for JavaScript."""

from .compare import MergedGraph, diff, merge, set_validity, venn_regions
from .extractor import ExtractionMode, build_flow_graph, extract_call_graph, propagate
from .model import CallGraph, CallEdge, FunctionNode, NodeKey, canonicalize, deserialize, serialize

__version__ = "0.1.0"

__all__ = [
    "CallEdge", "CallGraph", "ExtractionMode", "FunctionNode", "MergedGraph", "NodeKey",
    "build_flow_graph", "canonicalize", "deserialize", "diff", "extract_call_graph", "merge",
    "propagate", "serialize", "set_validity", "venn_regions",
]
