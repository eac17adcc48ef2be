"""Process memory mappings and their contiguity structure.

The page table here is the simulator's ground truth: an ordered association
of 4 KiB virtual page numbers to physical page numbers with r/w/x
permissions.  Contiguity chunks (maximal runs contiguous in both address
spaces with uniform permissions) are what every coalescing scheme feeds on,
so this module also scans for them, histograms them, classifies a mapping's
contiguity type, and generates the synthetic mappings used throughout the
experiments.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import MappingFormatError
from .kselect import size_to_alignment

PAGE_SIZE = 4096
PAGE_SHIFT = 12

# Size bands (pages).  The first three drive both the synthetic generator and
# the mapping classifier; "huge" only shows up when binning real mappings.
SMALL_BAND = (1, 63)
MEDIUM_BAND = (64, 511)
LARGE_BAND = (512, 1024)
BAND_NAMES = ("small", "medium", "large", "huge")

MIXED_WEIGHTS = {"small": 0.4, "medium": 0.4, "large": 0.2}

_VALID_PERM = frozenset("rwx-")


def band_of(size: int) -> str:
    """Bin a chunk size into small/medium/large/huge."""
    if size <= SMALL_BAND[1]:
        return "small"
    if size <= MEDIUM_BAND[1]:
        return "medium"
    if size <= LARGE_BAND[1]:
        return "large"
    return "huge"


@dataclass(frozen=True, slots=True)
class PageMapping:
    """One page-table entry: virtual page, physical page, permissions."""

    vpn: int
    ppn: int
    perm: str = "rw-"

    def __post_init__(self):
        if len(self.perm) != 3 or any(c not in _VALID_PERM for c in self.perm):
            raise ValueError(f"bad permission triple {self.perm!r}")


@dataclass(frozen=True, slots=True)
class ContiguityChunk:
    """A maximal run of pages contiguous in both address spaces."""

    start_vpn: int
    size: int


@dataclass(frozen=True)
class ContiguityHistogram:
    """Chunk-size histogram: sorted, distinct (size, freq) bins."""

    bins: tuple[tuple[int, int], ...]

    @property
    def chunk_count(self) -> int:
        return sum(freq for _, freq in self.bins)

    @property
    def total_pages(self) -> int:
        return sum(size * freq for size, freq in self.bins)

    def pages_by_band(self) -> dict[str, int]:
        out = dict.fromkeys(BAND_NAMES, 0)
        for size, freq in self.bins:
            out[band_of(size)] += size * freq
        return out

    def chunks_by_band(self) -> dict[str, int]:
        out = dict.fromkeys(BAND_NAMES, 0)
        for size, freq in self.bins:
            out[band_of(size)] += freq
        return out


class PageTable:
    """Ordered VPN -> (PPN, perm) association for one process.

    At most one mapping per VPN; iteration is in ascending VPN order.  The
    table is treated as read-only while simulations run; `unmap` exists for
    the mapping-churn model, which owns the table exclusively.

    `ppn_map` / `perm_map` expose the underlying dicts for hot paths (the
    MMU models do one lookup per walk); treat them as read-only.
    """

    page_size = PAGE_SIZE

    def __init__(self, mappings: Iterable[PageMapping] = ()):
        self.ppn_map: dict[int, int] = {}
        self.perm_map: dict[int, str] = {}
        self._sorted: list[int] | None = None
        for m in mappings:
            self.map(m.vpn, m.ppn, m.perm)

    def map(self, vpn: int, ppn: int, perm: str = "rw-") -> None:
        if vpn in self.ppn_map:
            raise ValueError(f"vpn 0x{vpn:x} already mapped")
        self.ppn_map[vpn] = ppn
        self.perm_map[vpn] = perm
        self._sorted = None

    def unmap(self, vpn: int) -> None:
        if vpn not in self.ppn_map:
            raise KeyError(f"vpn 0x{vpn:x} is not mapped")
        del self.ppn_map[vpn]
        del self.perm_map[vpn]
        self._sorted = None

    def ppn(self, vpn: int) -> Optional[int]:
        return self.ppn_map.get(vpn)

    def lookup(self, vpn: int) -> Optional[PageMapping]:
        ppn = self.ppn_map.get(vpn)
        if ppn is None:
            return None
        return PageMapping(vpn, ppn, self.perm_map[vpn])

    def vpns(self) -> list[int]:
        if self._sorted is None:
            self._sorted = sorted(self.ppn_map)
        return self._sorted

    def mappings(self) -> Iterator[PageMapping]:
        for vpn in self.vpns():
            yield PageMapping(vpn, self.ppn_map[vpn], self.perm_map[vpn])

    def __contains__(self, vpn: int) -> bool:
        return vpn in self.ppn_map

    def __len__(self) -> int:
        return len(self.ppn_map)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PageTable):
            return NotImplemented
        return self.ppn_map == other.ppn_map and self.perm_map == other.perm_map


def scan_contiguity_chunks(pt: PageTable) -> list[ContiguityChunk]:
    """All maximal contiguity chunks, ascending, covering every mapped page.

    A chunk extends while the next VPN is mapped to the next PPN with the
    same permissions; a permission change breaks the run even when the
    physical frames continue.
    """
    chunks: list[ContiguityChunk] = []
    vpns = pt.vpns()
    if not vpns:
        return chunks
    ppns = pt.ppn_map
    perms = pt.perm_map
    start = prev = vpns[0]
    prev_ppn = ppns[start]
    perm = perms[start]
    for vpn in vpns[1:]:
        ppn = ppns[vpn]
        if vpn == prev + 1 and ppn == prev_ppn + 1 and perms[vpn] == perm:
            prev, prev_ppn = vpn, ppn
            continue
        chunks.append(ContiguityChunk(start, prev - start + 1))
        start, prev, prev_ppn, perm = vpn, vpn, ppn, perms[vpn]
    chunks.append(ContiguityChunk(start, prev - start + 1))
    return chunks


def build_histogram(chunks: Iterable[ContiguityChunk]) -> ContiguityHistogram:
    """Count chunks per size."""
    counts = Counter(c.size for c in chunks)
    return ContiguityHistogram(tuple(sorted(counts.items())))


def classify_contiguity(h: ContiguityHistogram, minority_threshold: float = 0.10) -> str:
    """Label a histogram small/medium/large/mixed by page-weighted band shares.

    A band counts when it holds at least `minority_threshold` of the
    contiguous pages; one counting band names the mapping, more than one
    makes it mixed.
    """
    total = h.total_pages
    if total == 0:
        raise ValueError("no contiguity: empty histogram")
    shares = h.pages_by_band()
    shares["large"] += shares.pop("huge")  # classification uses 512+ as large
    counting = [b for b in ("small", "medium", "large") if shares[b] / total >= minority_threshold]
    if len(counting) == 1:
        return counting[0]
    return "mixed"


def _band_range(band: str) -> tuple[int, int]:
    return {"small": SMALL_BAND, "medium": MEDIUM_BAND, "large": LARGE_BAND}[band]


def _plan_chunks(kind: str, total_pages: int, seed: int) -> list[tuple[str, int]]:
    """Draw the (band, size) sequence for a synthetic mapping.

    Pure kinds draw sizes uniformly from their band.  Mixed picks each new
    chunk's band by page-weight deficit against the 0.4/0.4/0.2 targets, so
    the realized page shares track the targets for any total.
    """
    rng = np.random.default_rng(seed)
    plan: list[tuple[str, int]] = []
    if kind in ("small", "medium", "large"):
        lo, hi = _band_range(kind)
        placed = 0
        while total_pages - placed >= lo:
            size = min(int(rng.integers(lo, hi + 1)), total_pages - placed)
            plan.append((kind, size))
            placed += size
        return plan
    if kind != "mixed":
        raise ValueError(f"unknown mapping kind {kind!r}")
    placed = dict.fromkeys(MIXED_WEIGHTS, 0)
    while True:
        remaining = total_pages - sum(placed.values())
        by_deficit = sorted(MIXED_WEIGHTS, key=lambda b: placed[b] / MIXED_WEIGHTS[b])
        band = next((b for b in by_deficit if _band_range(b)[0] <= remaining), None)
        if band is None:
            return plan
        lo, hi = _band_range(band)
        size = min(int(rng.integers(lo, hi + 1)), remaining)
        plan.append((band, size))
        placed[band] += size


def _chunk_alignment(size: int) -> int:
    width = size_to_alignment(size)
    return 1 if width is None else 1 << width


def _align_up(x: int, a: int) -> int:
    return (x + a - 1) & ~(a - 1)


def generate_synthetic_mapping(kind: str, total_pages: int, seed: int,
                               gap_spread: int = 1024) -> PageTable:
    """Build a synthetic mapping of the given contiguity type.

    Chunk sizes are uniform within the band (small 1-63, medium 64-511,
    large 512-1024 pages); mixed interleaves bands toward 0.4/0.4/0.2 page
    weights.  Each chunk sits at a virtual and physical base aligned to the
    power-of-two window that holds it (buddy-allocator style), preceded by a
    guard gap of 1..gap_spread unmapped pages: the guard keeps a contiguity
    scan recovering exactly the generated chunks, and the spread keeps the
    virtual layout sparse the way real process mappings are (a densely
    packed layout would leave the upper index bits of shifted-index TLBs
    nearly constant).  Deterministic for a fixed seed.
    """
    if total_pages < 1024:
        raise ValueError(f"total_pages must be >= 1024, got {total_pages}")
    rng = np.random.default_rng(seed ^ 0x67AD)  # independent of the size draws
    pt = PageTable()
    vcur = 1 << 20  # first free virtual page; arbitrary userspace-ish base
    pcur = 1 << 24
    ppn_map = pt.ppn_map
    perm_map = pt.perm_map
    for _, size in _plan_chunks(kind, total_pages, seed):
        align = _chunk_alignment(size)
        gap = 1 + int(rng.integers(0, max(1, gap_spread)))
        vbase = _align_up(vcur + gap, align)
        pbase = _align_up(pcur + 1, align)
        for off in range(size):
            ppn_map[vbase + off] = pbase + off
            perm_map[vbase + off] = "rw-"
        vcur = vbase + size
        pcur = pbase + size
    pt._sorted = None
    return pt


def save_mapping(pt: PageTable, path) -> None:
    """Write a pagemap-style dump: `<vpn_hex> <ppn_hex> <perm>` per line."""
    with open(path, "w") as f:
        f.write("# vpn_hex ppn_hex perm\n")
        for vpn in pt.vpns():
            f.write(f"{vpn:x} {pt.ppn_map[vpn]:x} {pt.perm_map[vpn]}\n")


def load_mapping(path) -> PageTable:
    """Parse a pagemap-style dump, enforcing VPN order and uniqueness."""
    pt = PageTable()
    last_vpn = -1
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 3:
                raise MappingFormatError(path, line_no, f"expected 3 fields, got {len(parts)}")
            try:
                vpn = int(parts[0], 16)
                ppn = int(parts[1], 16)
            except ValueError:
                raise MappingFormatError(path, line_no, f"bad hex page number in {body!r}") from None
            perm = parts[2]
            if len(perm) != 3 or any(c not in _VALID_PERM for c in perm):
                raise MappingFormatError(path, line_no, f"bad permission triple {perm!r}")
            if vpn == last_vpn:
                raise MappingFormatError(path, line_no, f"duplicate vpn 0x{vpn:x}")
            if vpn < last_vpn:
                raise MappingFormatError(path, line_no, "lines not sorted by vpn")
            pt.ppn_map[vpn] = ppn
            pt.perm_map[vpn] = perm
            last_vpn = vpn
    pt._sorted = None
    return pt
