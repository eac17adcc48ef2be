"""Aligned page-table annotations.

A page table is decorated with aligned entries: for every alignment width k
in the active set, a VPN whose k low bits are zero may record how many pages
are contiguously mapped in its 2^k-page window (itself included).  These
annotations are what the fill path consults to pick a coalesced TLB entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional

if TYPE_CHECKING:
    from .memmap import PageTable

MAX_WIDTH = 11
MAX_PSI = 8  # the lookup predictor encodes the width in 4 bits, |K| <= 8


def aligned_vpn(vpn: int, k: int) -> int:
    """Clear the k least-significant bits of a VPN."""
    if k < 0:
        raise ValueError(f"alignment width must be >= 0, got {k}")
    return vpn & ~((1 << k) - 1)


@dataclass(frozen=True)
class AlignmentSet:
    """The set of alignment widths in use, plus the selection knobs.

    theta is the target fraction of contiguous pages the selected widths
    must cover; psi caps the cardinality.  Both are carried along so a
    re-evaluation can rerun the selection with identical policy.
    """

    widths: frozenset[int]
    theta: float = 0.9
    psi: int = 4

    def __init__(self, widths: Iterable[int], theta: float = 0.9, psi: int = 4):
        ws = frozenset(int(w) for w in widths)
        if any(w < 1 or w > MAX_WIDTH for w in ws):
            raise ValueError(f"alignment widths must be in [1, {MAX_WIDTH}]: {sorted(ws)}")
        if psi > MAX_PSI:
            raise ValueError(f"psi must be <= {MAX_PSI}, got {psi}")
        if len(ws) > psi:
            raise ValueError(f"|K| = {len(ws)} exceeds psi = {psi}")
        object.__setattr__(self, "widths", ws)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "psi", psi)

    def descending(self) -> tuple[int, ...]:
        return tuple(sorted(self.widths, reverse=True))

    def min_width(self) -> int:
        if not self.widths:
            raise ValueError("empty alignment set has no minimum width")
        return min(self.widths)

    def __len__(self) -> int:
        return len(self.widths)

    def __iter__(self):
        return iter(self.descending())

    def __contains__(self, k: int) -> bool:
        return k in self.widths


def alignment_class(vpn: int, kset: AlignmentSet | Iterable[int]) -> Optional[int]:
    """The width a VPN is classified as: the largest k in K dividing it.

    A VPN aligned to several widths in K takes the largest (every smaller
    width in K divides it too, so no information is lost).  Returns None when
    no width in K divides the VPN.
    """
    widths = kset.widths if isinstance(kset, AlignmentSet) else kset
    best = None
    for k in widths:
        if vpn & ((1 << k) - 1) == 0 and (best is None or k > best):
            best = k
    return best


def compute_contiguity(pt: "PageTable", vpn_k: int, k: int) -> int:
    """Length of the contiguous run starting at vpn_k, capped at 2^k pages.

    The run requires consecutive VPNs mapped to consecutive PPNs with
    identical permissions; it is 0 when vpn_k itself is unmapped.
    """
    if vpn_k & ((1 << k) - 1):
        raise ValueError(f"vpn 0x{vpn_k:x} is not {k}-bit aligned")
    ppns = pt.ppn_map
    base_ppn = ppns.get(vpn_k)
    if base_ppn is None:
        return 0
    perms = pt.perm_map
    perm = perms[vpn_k]
    run = 1
    limit = 1 << k
    while run < limit:
        v = vpn_k + run
        p = ppns.get(v)
        if p is None or p != base_ppn + run or perms[v] != perm:
            break
        run += 1
    return run


@dataclass(slots=True)
class AlignedAnnotation:
    """One aligned entry: its VPN, classified width, and recorded contiguity."""

    vpn: int
    width: int
    contiguity: int


class AnnotationStore:
    """All aligned annotations for one page table under one alignment set.

    Annotation positions are the min(K)-aligned VPNs whose 2^min(K)-page
    granule holds at least one mapped page; each position is classified by
    its largest dividing width.  `work` counts the annotations written by the
    initial traversal (the maintenance-cost model: one table walk touches
    N/2^min(K) aligned entries regardless of how many widths K holds).
    """

    def __init__(self, kset: AlignmentSet):
        self.kset = kset
        self.annotations: dict[int, AlignedAnnotation] = {}
        self.work = 0

    def get(self, vpn: int) -> Optional[AlignedAnnotation]:
        return self.annotations.get(vpn)

    def __len__(self) -> int:
        return len(self.annotations)

    def __iter__(self):
        return iter(self.annotations.values())


def annotate_table(pt: "PageTable", kset: AlignmentSet) -> AnnotationStore:
    """Build the annotation store for a page table in one traversal."""
    store = AnnotationStore(kset)
    if not kset.widths:
        return store
    k_min = kset.min_width()
    widths_desc = kset.descending()
    positions = sorted({aligned_vpn(v, k_min) for v in pt.ppn_map})
    ann = store.annotations
    for pos in positions:
        width = k_min
        for k in widths_desc:  # largest dividing width wins
            if pos & ((1 << k) - 1) == 0:
                width = k
                break
        ann[pos] = AlignedAnnotation(pos, width, compute_contiguity(pt, pos, width))
    store.work = len(ann)
    return store


def update_on_unmap(pt: "PageTable", store: AnnotationStore, vpn: int) -> bool:
    """Remove one mapping and refresh every annotation whose window holds it.

    Returns the shootdown signal, which is always raised: the simulator must
    translate it into a full TLB flush.  Annotations keep their position even
    when their contiguity drops to zero; only a full annotate_table pass
    relocates them.
    """
    if vpn not in pt.ppn_map:
        raise KeyError(f"vpn 0x{vpn:x} is not mapped")
    pt.unmap(vpn)
    for k in store.kset.widths:
        pos = vpn & ~((1 << k) - 1)
        a = store.annotations.get(pos)
        if a is not None and vpn - a.vpn < (1 << a.width):
            a.contiguity = compute_contiguity(pt, a.vpn, a.width)
    return True
