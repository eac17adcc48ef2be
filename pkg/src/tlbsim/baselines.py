"""Reference translation schemes sharing the TLB core.

Base is a conventional two-level TLB.  THP promotes aligned fully-contiguous
512-page regions to 2 MiB entries.  COLT coalesces the contiguous run inside
an aligned 8-page block into one entry at fill time; Cluster does the same
into a dedicated 320-entry sub-array keyed by cluster with a presence
bitmap.  RMM backs the L2 with a 32-entry fully associative range TLB over
large contiguity chunks.  Anchor keeps per-distance anchor entries recording
contiguity up to the next anchor, with the L2 index shifted by the anchor
distance.

These are modeled at comparison fidelity, not bit-exactness with their
original hardware proposals.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterable, Optional

from .memmap import PageTable, scan_contiguity_chunks
from .mmu import CO_HIT, FILL_COALESCED, FILL_REGULAR, L1_HIT, L2_HIT, L2_GEOMETRY, WALK, MmuBase
from .tlb import ANCHOR, CLUSTER, COALESCED, HUGE, REGULAR, TlbArray, coverage_of

HUGE_PAGE_PAGES = 512  # 2 MiB of 4 KiB pages
COLT_BLOCK = 8
CLUSTER_BLOCK = 8
CLUSTER_REGULAR_GEOMETRY = (128, 6)  # 768 entries
CLUSTER_ARRAY_GEOMETRY = (64, 5)  # 320 entries
RANGE_TLB_ENTRIES = 32
RMM_MIN_RANGE = 512  # ranges below huge-page scale never pay off (configurable)
ANCHOR_DISTANCES = tuple(1 << i for i in range(1, 12))  # 2 .. 2048


class BaseMmu(MmuBase):
    """Conventional two-level TLB: regular 4 KiB entries only."""

    scheme = "base"

    def __init__(self, pt: PageTable, l2_geometry=L2_GEOMETRY):
        super().__init__(pt)
        self.l2 = TlbArray(*l2_geometry, name="l2")
        self._arrays.append(self.l2)

    def _translate_slow(self, vpn: int) -> int:
        e = self.l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        self.last_fill = FILL_REGULAR
        self.l2.fill(vpn, ppn, REGULAR)
        self.l1_4k.fill(vpn, ppn)
        return ppn

    def l2_coverage(self) -> int:
        return coverage_of((self.l2,))


class ThpMmu(BaseMmu):
    """Base plus transparent 2 MiB promotion.

    A region promotes only when 512 consecutive pages are fully mapped,
    permission-uniform, and 512-page aligned in both address spaces (the
    hardware huge-page constraint); everything else stays 4 KiB.
    """

    scheme = "thp"

    def __init__(self, pt: PageTable, l2_geometry=L2_GEOMETRY):
        super().__init__(pt, l2_geometry)
        self._promoted: dict[int, int] = {}
        self._rebuild()

    def _rebuild(self) -> None:
        promoted = {}
        ppns = self.pt.ppn_map
        for chunk in scan_contiguity_chunks(self.pt):
            base_ppn = ppns[chunk.start_vpn]
            end = chunk.start_vpn + chunk.size
            h = -chunk.start_vpn % HUGE_PAGE_PAGES + chunk.start_vpn  # align up
            while h + HUGE_PAGE_PAGES <= end:
                hppn = base_ppn + (h - chunk.start_vpn)
                if hppn % HUGE_PAGE_PAGES == 0:
                    promoted[h >> 9] = hppn >> 9
                h += HUGE_PAGE_PAGES
        self._promoted = promoted

    def promoted_regions(self) -> int:
        return len(self._promoted)

    def _translate_slow(self, vpn: int) -> int:
        hv = vpn >> 9
        e = self.l1_2m.probe(hv, HUGE)
        if e is not None:
            self.n_l1 += 1
            self.last_outcome = L1_HIT
            return (e.ppn << 9) | (vpn & 511)
        e = self.l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        e = self.l2.probe(hv, HUGE)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_2m.fill(hv, e.ppn, HUGE)
            return (e.ppn << 9) | (vpn & 511)
        hppn = self._promoted.get(hv)
        if hppn is not None:
            self.n_walk += 1
            self.last_outcome = WALK
            self.last_fill = FILL_REGULAR
            self.l2.fill(hv, hppn, HUGE)
            self.l1_2m.fill(hv, hppn, HUGE)
            return (hppn << 9) | (vpn & 511)
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        self.last_fill = FILL_REGULAR
        self.l2.fill(vpn, ppn, REGULAR)
        self.l1_4k.fill(vpn, ppn)
        return ppn


class ColtMmu(BaseMmu):
    """HW coalescing of up to 8 contiguous pages per entry, at fill time."""

    scheme = "colt"

    def _translate_slow(self, vpn: int) -> int:
        l2 = self.l2
        e = l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        block = vpn & ~(COLT_BLOCK - 1)
        e = l2.probe(block, COALESCED)
        if e is not None:
            off = vpn - block - e.payload
            if 0 <= off < e.contiguity:
                self.n_co_by[1] += 1
                self.last_outcome = CO_HIT
                self.last_lookups = 1
                ppn = e.ppn + off
                self.l1_4k.fill(vpn, ppn)
                return ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        lo, length = _block_run(self._ppn, self._perm, vpn, block, COLT_BLOCK)
        if length >= 2:
            l2.fill(block, self._ppn[lo], COALESCED, 0, length, payload=lo - block)
            self.last_fill = FILL_COALESCED
        else:
            l2.fill(vpn, ppn, REGULAR)
            self.last_fill = FILL_REGULAR
        self.l1_4k.fill(vpn, ppn)
        return ppn


def _block_run(ppns, perms, vpn, block, block_pages):
    """The contiguous permission-uniform run containing vpn inside its block."""
    ppn = ppns[vpn]
    perm = perms[vpn]
    lo = vpn
    while lo > block:
        p = ppns.get(lo - 1)
        if p is None or p != ppns[lo] - 1 or perms[lo - 1] != perm:
            break
        lo -= 1
    hi = vpn
    top = block + block_pages - 1
    while hi < top:
        p = ppns.get(hi + 1)
        if p is None or p != ppns[hi] + 1 or perms[hi + 1] != perm:
            break
        hi += 1
    return lo, hi - lo + 1


class ClusterMmu(MmuBase):
    """Split regular / clustered sub-arrays; clusters carry presence bitmaps.

    A fill routes to the clustered array when at least 2 pages of the
    aligned 8-page cluster share the filled page's virtual-to-physical
    delta; singleton pages would only waste clustered capacity.
    """

    scheme = "cluster"

    def __init__(self, pt: PageTable):
        super().__init__(pt)
        self.l2 = TlbArray(*CLUSTER_REGULAR_GEOMETRY, name="l2-regular")
        self.cluster = TlbArray(*CLUSTER_ARRAY_GEOMETRY, index_shift=3, name="l2-cluster")
        self._arrays += [self.l2, self.cluster]

    def _translate_slow(self, vpn: int) -> int:
        e = self.l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        block = vpn & ~(CLUSTER_BLOCK - 1)
        e = self.cluster.probe(block, CLUSTER)
        if e is not None and (e.payload >> (vpn - block)) & 1:
            self.n_co_by[1] += 1
            self.last_outcome = CO_HIT
            self.last_lookups = 1
            ppn = e.ppn + (vpn - block)
            self.l1_4k.fill(vpn, ppn)
            return ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        base_ppn = ppn - (vpn - block)
        perm = self._perm[vpn]
        bitmap = 0
        count = 0
        for off in range(CLUSTER_BLOCK):
            v = block + off
            p = self._ppn.get(v)
            if p is not None and p == base_ppn + off and self._perm[v] == perm:
                bitmap |= 1 << off
                count += 1
        if count >= 2:
            self.cluster.fill(block, base_ppn, CLUSTER, 0, count, payload=bitmap)
            self.last_fill = FILL_COALESCED
        else:
            self.l2.fill(vpn, ppn, REGULAR)
            self.last_fill = FILL_REGULAR
        self.l1_4k.fill(vpn, ppn)
        return ppn

    def l2_coverage(self) -> int:
        # The clustered sub-array is extra hardware; reach is reported for
        # the shared-structure L2 only, keeping schemes comparable.
        return coverage_of((self.l2,))


class _RangeEntry:
    __slots__ = ("start", "length", "ppn0", "stamp")

    def __init__(self, start, length, ppn0):
        self.start = start
        self.length = length
        self.ppn0 = ppn0
        self.stamp = 0


class RangeTlb:
    """Small fully associative TLB of variable-length ranges, LRU replaced."""

    def __init__(self, capacity: int = RANGE_TLB_ENTRIES):
        self.capacity = capacity
        self.entries: list[_RangeEntry] = []
        self._tick = 0
        self.probes = 0
        self.hits = 0
        self.misses = 0

    def lookup(self, vpn: int) -> Optional[_RangeEntry]:
        self.probes += 1
        for e in self.entries:
            if e.start <= vpn < e.start + e.length:
                self._tick += 1
                e.stamp = self._tick
                self.hits += 1
                return e
        self.misses += 1
        return None

    def insert(self, start: int, length: int, ppn0: int) -> None:
        for e in self.entries:
            if e.start == start:
                self._tick += 1
                e.stamp = self._tick
                return
        if len(self.entries) >= self.capacity:
            victim = min(self.entries, key=lambda e: e.stamp)
            self.entries.remove(victim)
        e = _RangeEntry(start, length, ppn0)
        self._tick += 1
        e.stamp = self._tick
        self.entries.append(e)

    def flush(self) -> None:
        self.entries.clear()


class RmmMmu(BaseMmu):
    """Regular L2 backed by a range TLB over large contiguity chunks."""

    scheme = "rmm"

    def __init__(self, pt: PageTable, min_range: int = RMM_MIN_RANGE,
                 l2_geometry=L2_GEOMETRY):
        super().__init__(pt, l2_geometry)
        self.min_range = min_range
        self.range_tlb = RangeTlb()
        self._rebuild()

    def _rebuild(self) -> None:
        ppns = self.pt.ppn_map
        self._ranges = [(c.start_vpn, c.size, ppns[c.start_vpn])
                        for c in scan_contiguity_chunks(self.pt) if c.size >= self.min_range]
        self._range_starts = [r[0] for r in self._ranges]

    def flush_all(self) -> None:
        super().flush_all()
        self.range_tlb.flush()

    def _translate_slow(self, vpn: int) -> int:
        e = self.l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        r = self.range_tlb.lookup(vpn)
        if r is not None:
            self.n_co_by[1] += 1
            self.last_outcome = CO_HIT
            self.last_lookups = 1
            ppn = r.ppn0 + (vpn - r.start)
            self.l1_4k.fill(vpn, ppn)
            return ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        i = bisect_right(self._range_starts, vpn) - 1
        if i >= 0:
            start, length, ppn0 = self._ranges[i]
            if vpn < start + length:
                self.range_tlb.insert(start, length, ppn0)
                self.last_fill = FILL_COALESCED
                self.l1_4k.fill(vpn, ppn)
                return ppn
        self.l2.fill(vpn, ppn, REGULAR)
        self.last_fill = FILL_REGULAR
        self.l1_4k.fill(vpn, ppn)
        return ppn


class AnchorMmu(MmuBase):
    """Anchor entries every `distance` pages, recording contiguity onward.

    An anchor exists only where the anchor VPN itself is mapped; a chunk
    whose pages precede its first anchor is not coalesced, which is the
    scheme's structural weakness on mixed contiguity.  The L2 index is
    shifted by the anchor distance so an anchor and the VPNs it covers
    co-index.
    """

    scheme = "anchor"

    def __init__(self, pt: PageTable, distance: int, l2_geometry=L2_GEOMETRY):
        if distance < 2 or distance & (distance - 1):
            raise ValueError(f"anchor distance must be a power of two >= 2, got {distance}")
        super().__init__(pt)
        self.distance = distance
        self._dmask = ~(distance - 1)
        sets, ways = l2_geometry
        self.l2 = TlbArray(sets, ways, index_shift=distance.bit_length() - 1, name="l2")
        self._arrays.append(self.l2)
        self._rebuild()

    def _rebuild(self) -> None:
        d = self.distance
        contig: dict[int, int] = {}
        for chunk in scan_contiguity_chunks(self.pt):
            end = chunk.start_vpn + chunk.size
            a = chunk.start_vpn + (-chunk.start_vpn % d)
            while a < end:
                contig[a] = min(d, end - a)
                a += d
        self._anchor_contig = contig

    def _translate_slow(self, vpn: int) -> int:
        l2 = self.l2
        e = l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        a_vpn = vpn & self._dmask
        e = l2.probe(a_vpn, ANCHOR)
        if e is not None and vpn - a_vpn < e.contiguity:
            self.n_co_by[1] += 1
            self.last_outcome = CO_HIT
            self.last_lookups = 1
            ppn = e.ppn + (vpn - a_vpn)
            self.l1_4k.fill(vpn, ppn)
            return ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        c = self._anchor_contig.get(a_vpn, 0)
        if vpn - a_vpn < c:
            l2.fill(a_vpn, self._ppn[a_vpn], ANCHOR, 0, c)
            self.last_fill = FILL_COALESCED
        else:
            l2.fill(vpn, ppn, REGULAR)
            self.last_fill = FILL_REGULAR
        self.l1_4k.fill(vpn, ppn)
        return ppn

    def l2_coverage(self) -> int:
        return coverage_of((self.l2,))


def _trace_vpns(trace) -> list[int]:
    if hasattr(trace, "page_numbers"):
        return trace.page_numbers().tolist()
    return [int(v) for v in trace]


def anchor_static_search(pt: PageTable, trace,
                         distances: Iterable[int] = ANCHOR_DISTANCES) -> tuple[int, dict[int, int]]:
    """Exhaustively simulate every candidate distance; fewest walks wins.

    Returns (best distance, walks per distance).  Ties go to the smaller
    distance.
    """
    vpns = _trace_vpns(trace)
    walks_by_d: dict[int, int] = {}
    best_d = None
    for d in sorted(distances):
        mmu = AnchorMmu(pt, d)
        translate = mmu.translate
        for vpn in vpns:
            translate(vpn)
        walks_by_d[d] = mmu.n_walk
        if best_d is None or mmu.n_walk < walks_by_d[best_d]:
            best_d = d
    return best_d, walks_by_d


def model_anchor_distance(pt: PageTable, capacity: int = 1024,
                          distances: Iterable[int] = ANCHOR_DISTANCES) -> int:
    """Pick a distance from the mapping alone (the dynamic mode's heuristic).

    Scores each candidate by the pages its anchors would cover, derated when
    the anchor entries needed to do so exceed the L2 capacity.  This is an
    approximation of periodic re-selection, not a re-simulation.
    """
    chunks = scan_contiguity_chunks(pt)
    best_d, best_score = None, -1.0
    for d in sorted(distances):
        covered = 0
        entries = 0
        for c in chunks:
            first = c.start_vpn + (-c.start_vpn % d)
            cov = c.start_vpn + c.size - first
            if cov > 0:
                covered += cov
                entries += -(-cov // d)
        score = float(covered) if entries <= capacity else covered * capacity / entries
        if score > best_score:
            best_d, best_score = d, score
    return best_d if best_d is not None else 16
