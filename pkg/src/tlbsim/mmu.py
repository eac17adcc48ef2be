"""Shared MMU model: two-level TLB skeleton and per-scheme accounting.

Every scheme shares the L1 configuration (split 4 KiB / 2 MiB arrays) and
the translate contract: return the physical page number for a mapped virtual
page, raise UnmappedAccessError otherwise.  Outcome accounting is kept as
plain counters; the last access's classification is exposed through cheap
attributes and can be materialized as a TranslationEvent for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnmappedAccessError
from .tlb import TlbArray

# Translation outcome codes (`last_outcome`).
L1_HIT = 0
L2_HIT = 1  # regular lookup, including 2 MiB entries
CO_HIT = 2  # coalesced-kind hit: aligned / coalesced / cluster / range / anchor
WALK = 3

OUTCOME_NAMES = {L1_HIT: "l1_hit", L2_HIT: "l2_regular_hit", CO_HIT: "coalesced_hit", WALK: "miss"}

# Fill codes (`last_fill`).
FILL_NONE = 0
FILL_REGULAR = 1
FILL_COALESCED = 2

FILL_NAMES = {FILL_NONE: "none", FILL_REGULAR: "regular", FILL_COALESCED: "coalesced"}

# Common TLB geometry (sets, ways).
L1_4K_GEOMETRY = (16, 4)  # 64 entries
L1_2M_GEOMETRY = (8, 4)  # 32 entries
L2_GEOMETRY = (128, 8)  # 1024 entries


@dataclass(frozen=True)
class TranslationEvent:
    """What one translate did, for tests and per-access cost accounting."""

    outcome: str
    lookups_used: int
    walk_performed: bool
    fill_kind: str


class MmuBase:
    """State and accounting shared by every scheme."""

    scheme = "?"

    def __init__(self, pt):
        self.pt = pt
        self._ppn = pt.ppn_map
        self._perm = pt.perm_map
        self.l1_4k = TlbArray(*L1_4K_GEOMETRY, name="l1-4k")
        self.l1_2m = TlbArray(*L1_2M_GEOMETRY, name="l1-2m")
        self._arrays = [self.l1_4k, self.l1_2m]
        self.n_l1 = 0
        self.n_l2 = 0
        self.n_co_by = [0, 0]  # index = lookups used; schemes resize as needed
        self.n_walk = 0
        self.n_shootdowns = 0
        self.last_outcome = WALK
        self.last_lookups = 0
        self.last_fill = FILL_NONE

    # -- translate ---------------------------------------------------------
    def translate(self, vpn: int) -> int:
        """Full translation: shared L1 front end, then the scheme's path.

        The L1 probe is inlined (not via TlbArray.probe) because it runs on
        every access of every scheme; the counters it maintains are exactly
        the ones probe() would.
        """
        l1 = self.l1_4k
        l1.probes += 1
        e = l1._sets[vpn & l1._mask].get(vpn << 3)
        if e is not None:
            l1.hits += 1
            l1._tick += 1
            e.lru_stamp = l1._tick
            self.n_l1 += 1
            self.last_outcome = L1_HIT
            return e.ppn
        l1.misses += 1
        return self._translate_slow(vpn)

    def _translate_slow(self, vpn: int) -> int:
        """The scheme's translation path after an L1 (4 KiB) miss."""
        raise NotImplementedError

    def translate_event(self, vpn: int) -> tuple[int, TranslationEvent]:
        """Translate plus a materialized event record (test/debug path)."""
        ppn = self.translate(vpn)
        out = self.last_outcome
        if out == CO_HIT:
            lookups = self.last_lookups
        elif out == WALK:
            lookups = self.miss_probe_count()  # every coalesced probe failed
        else:
            lookups = 0 if out == L1_HIT else 1
        return ppn, TranslationEvent(
            outcome=OUTCOME_NAMES[out],
            lookups_used=lookups,
            walk_performed=out == WALK,
            fill_kind=FILL_NAMES[self.last_fill] if out == WALK else
            ("regular" if out in (L2_HIT, CO_HIT) else "none"),
        )

    def _walk_ppn(self, vpn: int) -> int:
        ppn = self._ppn.get(vpn)
        if ppn is None:
            raise UnmappedAccessError(vpn)
        return ppn

    # -- maintenance -------------------------------------------------------
    def flush_all(self) -> None:
        for a in self._arrays:
            a.flush()

    def _rebuild(self) -> None:
        """Recompute mapping-derived structures after a table change."""

    def apply_unmap(self, vpn: int) -> None:
        """Mapping-update event: drop one page, then a full shootdown."""
        self.pt.unmap(vpn)
        self._rebuild()
        self.n_shootdowns += 1
        self.flush_all()

    # -- reporting ---------------------------------------------------------
    def coalesced_hits(self) -> int:
        return sum(self.n_co_by[1:])

    def extra_lookups(self) -> int:
        return sum((p - 1) * n for p, n in enumerate(self.n_co_by[1:], start=1))

    def miss_probe_count(self) -> int:
        """Coalesced-structure probes charged per walk (0 for most schemes)."""
        return 0

    def l2_coverage(self) -> int:
        raise NotImplementedError
