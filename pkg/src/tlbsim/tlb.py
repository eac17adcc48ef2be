"""Set-associative TLB arrays with LRU replacement.

One array serves every scheme: entries carry a kind tag (regular, aligned,
coalesced, ...) so differently shaped translations can share the structure,
and the index function is a configurable right-shift of the tag so schemes
with coalesced entries can index above their alignment bits.  Replacement is
exact LRU via a per-array monotonic access counter.
"""

from __future__ import annotations

from operator import attrgetter
from typing import Iterator, Optional

# Entry kinds.  Values are packed into the per-set dict key next to the tag.
REGULAR = 0
HUGE = 1
ALIGNED = 2
COALESCED = 3
CLUSTER = 4
ANCHOR = 5

KIND_NAMES = {
    REGULAR: "regular",
    HUGE: "huge",
    ALIGNED: "aligned",
    COALESCED: "coalesced",
    CLUSTER: "cluster",
    ANCHOR: "anchor",
}

_KIND_BITS = 3
_by_stamp = attrgetter("lru_stamp")


def index_of(vpn: int, sets: int, k_hat: int = 0) -> int:
    """Set index for a VPN: the address bits just above the alignment bits.

    With k_hat = 0 this is the conventional `vpn mod sets`; shifting by the
    largest active alignment makes an aligned entry and every VPN it covers
    land in the same set, which the aligned lookup relies on.
    """
    return (vpn >> k_hat) & (sets - 1)


class TlbEntry:
    """One TLB slot.

    `tag_vpn` is the stored (possibly alignment-masked) virtual page number;
    `contiguity` is 0 for plain entries and the covered-page count for
    coalesced kinds; `payload` holds scheme-specific bits (COLT run offset,
    cluster presence bitmap).
    """

    __slots__ = ("tag_vpn", "ppn", "kind", "width", "contiguity", "payload",
                 "valid", "lru_stamp", "_key")

    def __init__(self, tag_vpn, ppn, kind=REGULAR, width=0, contiguity=0, payload=0):
        self.tag_vpn = tag_vpn
        self.ppn = ppn
        self.kind = kind
        self.width = width
        self.contiguity = contiguity
        self.payload = payload
        self.valid = True
        self.lru_stamp = 0
        self._key = (tag_vpn << _KIND_BITS) | kind

    def __repr__(self):
        return (f"TlbEntry(0x{self.tag_vpn:x}->0x{self.ppn:x}, {KIND_NAMES[self.kind]},"
                f" w={self.width}, c={self.contiguity}, valid={self.valid})")


class TlbArray:
    """A sets x ways array with one index function and hit/miss counters."""

    def __init__(self, sets: int, ways: int, index_shift: int = 0, name: str = ""):
        if sets < 1 or sets & (sets - 1):
            raise ValueError(f"sets must be a power of two, got {sets}")
        if ways < 1:
            raise ValueError(f"ways must be >= 1, got {ways}")
        self.sets = sets
        self.ways = ways
        self.index_shift = index_shift
        self.name = name
        self._sets: list[dict[int, TlbEntry]] = [{} for _ in range(sets)]
        self._mask = sets - 1
        self._tick = 0
        self.probes = 0
        self.hits = 0
        self.misses = 0
        self.insertions = 0
        self.evictions = 0

    @property
    def entries(self) -> int:
        return self.sets * self.ways

    def set_index(self, tag_vpn: int) -> int:
        return (tag_vpn >> self.index_shift) & self._mask

    def probe(self, tag_vpn: int, kind: int = REGULAR) -> Optional[TlbEntry]:
        """Look up (tag, kind); refreshes recency on a hit."""
        self.probes += 1
        e = self._sets[(tag_vpn >> self.index_shift) & self._mask].get(
            (tag_vpn << _KIND_BITS) | kind)
        if e is not None:
            self.hits += 1
            self._tick += 1
            e.lru_stamp = self._tick
            return e
        self.misses += 1
        return None

    def insert(self, entry: TlbEntry) -> Optional[TlbEntry]:
        """Place an entry, evicting the set's LRU victim when full.

        An entry with the same (tag, kind) is replaced in place (not an
        eviction).  Returns the evicted entry, if any.
        """
        key = (entry.tag_vpn << _KIND_BITS) | entry.kind
        entry._key = key
        d = self._sets[(entry.tag_vpn >> self.index_shift) & self._mask]
        victim = None
        old = d.get(key)
        if old is not None:
            old.valid = False
        elif len(d) >= self.ways:
            victim = min(d.values(), key=_by_stamp)
            del d[victim._key]
            victim.valid = False
            self.evictions += 1
        self._tick += 1
        entry.lru_stamp = self._tick
        entry.valid = True
        d[key] = entry
        self.insertions += 1
        return victim

    def fill(self, tag_vpn, ppn, kind=REGULAR, width=0, contiguity=0, payload=0) -> None:
        """Hot-path insert that recycles the victim's slot object."""
        key = (tag_vpn << _KIND_BITS) | kind
        d = self._sets[(tag_vpn >> self.index_shift) & self._mask]
        e = d.get(key)
        if e is None:
            if len(d) >= self.ways:
                e = min(d.values(), key=_by_stamp)
                del d[e._key]
                self.evictions += 1
            else:
                e = TlbEntry(0, 0)
            d[key] = e
            e._key = key
        e.tag_vpn = tag_vpn
        e.ppn = ppn
        e.kind = kind
        e.width = width
        e.contiguity = contiguity
        e.payload = payload
        e.valid = True
        self._tick += 1
        e.lru_stamp = self._tick
        self.insertions += 1

    def flush(self) -> None:
        """Invalidate everything; counters are accounting, not state."""
        for d in self._sets:
            for e in d.values():
                e.valid = False
            d.clear()

    def valid_entries(self) -> Iterator[TlbEntry]:
        for d in self._sets:
            yield from d.values()

    def occupancy(self) -> int:
        return sum(len(d) for d in self._sets)

    def __repr__(self):
        return (f"TlbArray({self.name or 'unnamed'}: {self.sets}x{self.ways},"
                f" shift={self.index_shift}, occ={self.occupancy()})")


def coverage_of(arrays) -> int:
    """Translation reach of the given arrays, in 4 KiB pages.

    Plain entries reach one page, huge entries 512, coalesced kinds their
    recorded contiguity (which includes the entry's own page).
    """
    total = 0
    for array in arrays:
        for e in array.valid_entries():
            k = e.kind
            if k == REGULAR:
                total += 1
            elif k == HUGE:
                total += 512
            else:
                total += e.contiguity
    return total
