"""The aligned-entry coalescing scheme, end to end.

Lookup order is L1, then the L2 regular lookup on the exact VPN, then the
aligned lookup: for each active width (most recently used first, the rest by
descending width) the VPN is masked and the L2 is probed for an aligned
entry whose recorded contiguity covers the access.  A miss walks the page
table and refills the L2 with the widest covering aligned entry, or the
plain entry when nothing covers.

The hit test is strict: an entry at base B with contiguity c covers offsets
0..c-1.  The count includes the base page itself, so with c = 6 at B = 8 the
access at VPN 13 (offset 5) hits while VPN 14 (offset 6, one past the run)
correctly falls through to the walk.
"""

from __future__ import annotations

from typing import Optional

from .aligned import AlignmentSet, AnnotationStore, annotate_table, update_on_unmap
from .mmu import (CO_HIT, FILL_COALESCED, FILL_REGULAR, L2_HIT, L2_GEOMETRY,
                  WALK, MmuBase)
from .tlb import ALIGNED, REGULAR, TlbArray, coverage_of


def probe_order(last_width: Optional[int], kset: AlignmentSet) -> tuple[int, ...]:
    """Aligned-lookup width order: predicted width first, rest descending."""
    desc = kset.descending()
    if last_width is None or last_width not in kset:
        return desc
    return (last_width,) + tuple(k for k in desc if k != last_width)


class Predictor:
    """Remembers the width of the last aligned hit (4-bit encodable, |K| <= 8)."""

    __slots__ = ("last_width",)

    def __init__(self):
        self.last_width: Optional[int] = None

    def update(self, width: int) -> None:
        self.last_width = width

    def reset(self) -> None:
        self.last_width = None


class KAlignedMmu(MmuBase):
    """Two-level MMU with aligned-entry coalescing in the L2."""

    scheme = "kaligned"

    def __init__(self, pt, kset: AlignmentSet, store: AnnotationStore | None = None,
                 l2_geometry: tuple[int, int] = L2_GEOMETRY):
        super().__init__(pt)
        self._l2_geometry = l2_geometry
        self.predictor = Predictor()
        self._adopt(kset, store)

    def _adopt(self, kset: AlignmentSet, store: AnnotationStore | None) -> None:
        self.kset = kset
        self.k_hat = max(kset.widths) if kset.widths else 0
        sets, ways = self._l2_geometry
        self.l2 = TlbArray(sets, ways, index_shift=self.k_hat, name="l2")
        self._arrays = [self.l1_4k, self.l1_2m, self.l2]
        self.store = store if store is not None else annotate_table(self.pt, kset)
        self._ann = self.store.annotations
        desc = tuple((k, ~((1 << k) - 1)) for k in kset.descending())
        self._desc = desc
        # One precomputed probe order per possible prediction; avoids any
        # per-access list building.
        self._orders: dict[Optional[int], tuple[tuple[int, int], ...]] = {None: desc}
        for k, mask in desc:
            self._orders[k] = ((k, mask),) + tuple(p for p in desc if p[0] != k)
        self.n_co_by = [0] * (len(kset.widths) + 1)
        self.annotation_work = self.store.work

    def adopt_kset(self, kset: AlignmentSet) -> None:
        """Switch alignment sets: rebuild annotations, flush, keep counters."""
        prior_work = self.annotation_work
        self.predictor.reset()
        self._adopt(kset, None)
        self.annotation_work += prior_work
        self.n_shootdowns += 1
        self.flush_all()

    def _translate_slow(self, vpn: int) -> int:
        l2 = self.l2
        e = l2.probe(vpn, REGULAR)
        if e is not None:
            self.n_l2 += 1
            self.last_outcome = L2_HIT
            self.l1_4k.fill(vpn, e.ppn)
            return e.ppn
        pred = self.predictor
        p = 0
        for k, mask in self._orders[pred.last_width]:
            p += 1
            t = vpn & mask
            e = l2.probe(t, ALIGNED)
            if e is not None and vpn - t < e.contiguity:
                self.n_co_by[p] += 1
                pred.last_width = k
                self.last_outcome = CO_HIT
                self.last_lookups = p
                ppn = e.ppn + (vpn - t)
                self.l1_4k.fill(vpn, ppn)
                return ppn
        ppn = self._walk_ppn(vpn)
        self.n_walk += 1
        self.last_outcome = WALK
        self.fill_l2(vpn, ppn)
        self.l1_4k.fill(vpn, ppn)
        return ppn

    def fill_l2(self, vpn: int, ppn: int) -> int:
        """Refill after a walk: widest covering aligned entry, else regular.

        Runs off the critical path in hardware; the cycle model charges
        nothing for it beyond the walk itself.
        """
        ann = self._ann
        for k, mask in self._desc:
            t = vpn & mask
            a = ann.get(t)
            if a is not None and vpn - t < a.contiguity:
                self.l2.fill(t, self._ppn[t], ALIGNED, a.width, a.contiguity)
                self.last_fill = FILL_COALESCED
                return FILL_COALESCED
        self.l2.fill(vpn, ppn, REGULAR)
        self.last_fill = FILL_REGULAR
        return FILL_REGULAR

    def apply_unmap(self, vpn: int) -> None:
        update_on_unmap(self.pt, self.store, vpn)
        self.n_shootdowns += 1
        self.predictor.reset()
        self.flush_all()

    def miss_probe_count(self) -> int:
        return len(self.kset.widths)

    def l2_coverage(self) -> int:
        return coverage_of((self.l2,))

    def aligned_hits(self) -> int:
        return self.coalesced_hits()

    def first_probe_hits(self) -> int:
        return self.n_co_by[1] if len(self.n_co_by) > 1 else 0


def predictor_accuracy(first_probe_hits: int, aligned_hits: int) -> Optional[float]:
    """Fraction of aligned hits completed in one lookup; None without hits."""
    if aligned_hits <= 0:
        return None
    return first_probe_hits / aligned_hits
