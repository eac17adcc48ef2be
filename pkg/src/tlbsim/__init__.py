"""tlbsim: trace-driven simulation of TLB coalescing schemes.

The library models a process memory mapping (`memmap`), aligned page-table
annotations and their maintenance (`aligned`), alignment-set selection
(`kselect`), generic set-associative TLB arrays (`tlb`), the aligned-entry
coalescing MMU (`kaligned`) and six reference schemes (`baselines`), plus a
trace/driver/reporting harness (`trace`, `harness`) and a CLI (`cli`).
"""

from .aligned import (AlignedAnnotation, AlignmentSet, AnnotationStore,
                      aligned_vpn, alignment_class, annotate_table,
                      compute_contiguity, update_on_unmap)
from .baselines import (AnchorMmu, BaseMmu, ClusterMmu, ColtMmu, RangeTlb,
                        RmmMmu, ThpMmu, anchor_static_search,
                        model_anchor_distance)
from .errors import (ConfigError, MappingFormatError, TraceFormatError,
                     UnmappedAccessError)
from .harness import (LatencyModel, SimConfig, SimReport, emit_report,
                      run_simulation)
from .kaligned import KAlignedMmu, Predictor, predictor_accuracy, probe_order
from .kselect import (SIZE_RANGE_TABLE, determine_k, reevaluate_k,
                      size_to_alignment)
from .memmap import (PAGE_SIZE, ContiguityChunk, ContiguityHistogram,
                     PageMapping, PageTable, build_histogram,
                     classify_contiguity, generate_synthetic_mapping,
                     load_mapping, save_mapping, scan_contiguity_chunks)
from .tlb import TlbArray, TlbEntry, coverage_of, index_of
from .trace import AccessTrace, generate_trace, load_trace, save_trace

__version__ = "0.1.0"

__all__ = [
    "AccessTrace", "AlignedAnnotation", "AlignmentSet", "AnchorMmu",
    "AnnotationStore", "BaseMmu", "ClusterMmu", "ColtMmu", "ConfigError",
    "ContiguityChunk", "ContiguityHistogram", "KAlignedMmu", "LatencyModel",
    "MappingFormatError", "PAGE_SIZE", "PageMapping", "PageTable",
    "Predictor", "RangeTlb", "RmmMmu", "SIZE_RANGE_TABLE", "SimConfig",
    "SimReport", "ThpMmu", "TlbArray", "TlbEntry", "TraceFormatError",
    "UnmappedAccessError", "aligned_vpn", "alignment_class",
    "anchor_static_search", "annotate_table", "build_histogram",
    "classify_contiguity", "compute_contiguity", "coverage_of",
    "determine_k", "emit_report", "generate_synthetic_mapping",
    "generate_trace", "index_of", "load_mapping", "load_trace",
    "model_anchor_distance", "predictor_accuracy", "probe_order",
    "reevaluate_k", "run_simulation", "save_mapping", "save_trace",
    "scan_contiguity_chunks", "size_to_alignment", "update_on_unmap",
]
