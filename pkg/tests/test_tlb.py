import numpy as np
import pytest

from tlbsim import TlbArray, TlbEntry, coverage_of, index_of
from tlbsim.tlb import ALIGNED, HUGE, REGULAR


class TestIndexing:
    def test_shifted_index(self):
        assert index_of(13, sets=128, k_hat=3) == 1

    def test_conventional_index(self):
        assert index_of(13, sets=128, k_hat=0) == 13

    def test_aligned_entry_coindexes_with_covered_vpns(self):
        # required for the aligned lookup: probing the masked VPN must land
        # in the same set the aligned entry was inserted into
        arr = TlbArray(sets=128, ways=8, index_shift=3)
        arr.insert(TlbEntry(8, 0x10, ALIGNED, width=3, contiguity=6))
        assert arr.set_index(13) == arr.set_index(8)
        assert arr.probe(8, ALIGNED) is not None

    def test_sets_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            TlbArray(sets=100, ways=4)


class TestProbeInsert:
    def test_insert_then_probe_hits(self):
        arr = TlbArray(sets=16, ways=4)
        arr.insert(TlbEntry(0x42, 0x99))
        e = arr.probe(0x42)
        assert e is not None and e.ppn == 0x99

    def test_kind_mismatch_misses(self):
        arr = TlbArray(sets=16, ways=4)
        arr.insert(TlbEntry(0x42, 0x99, ALIGNED, width=2, contiguity=4))
        assert arr.probe(0x42, REGULAR) is None
        assert arr.probe(0x42, ALIGNED) is not None

    def test_lru_evicts_first_inserted(self):
        arr = TlbArray(sets=1, ways=4)
        for tag in range(5):
            evicted = arr.insert(TlbEntry(tag, tag))
        assert evicted is not None and evicted.tag_vpn == 0
        assert arr.probe(0) is None
        assert all(arr.probe(t) is not None for t in range(1, 5))

    def test_reprobed_entry_is_not_next_victim(self):
        arr = TlbArray(sets=1, ways=2)
        arr.insert(TlbEntry(1, 1))
        arr.insert(TlbEntry(2, 2))
        arr.probe(1)  # refresh 1; victim must now be 2
        evicted = arr.insert(TlbEntry(3, 3))
        assert evicted.tag_vpn == 2

    def test_same_tag_kind_replaced_not_duplicated(self):
        arr = TlbArray(sets=1, ways=2)
        arr.insert(TlbEntry(7, 1))
        assert arr.insert(TlbEntry(7, 2)) is None
        assert arr.occupancy() == 1
        assert arr.probe(7).ppn == 2

    def test_fill_matches_insert_semantics(self):
        a, b = TlbArray(sets=1, ways=2), TlbArray(sets=1, ways=2)
        for tag in (1, 2, 3):
            a.insert(TlbEntry(tag, tag * 10))
            b.fill(tag, tag * 10)
        for tag in (1, 2, 3):
            ea, eb = a.probe(tag), b.probe(tag)
            assert (ea is None) == (eb is None)
            if ea:
                assert ea.ppn == eb.ppn
        assert a.evictions == b.evictions == 1

    def test_evicted_entry_invalidated(self):
        arr = TlbArray(sets=1, ways=1)
        first = TlbEntry(1, 1)
        arr.insert(first)
        arr.insert(TlbEntry(2, 2))
        assert first.valid is False


class TestFlushAndCounters:
    def test_flush_invalidates_everything(self):
        arr = TlbArray(sets=4, ways=2)
        for tag in range(8):
            arr.insert(TlbEntry(tag, tag))
        arr.flush()
        assert arr.occupancy() == 0
        assert all(arr.probe(t) is None for t in range(8))

    def test_flush_idempotent_and_counters_preserved(self):
        arr = TlbArray(sets=4, ways=2)
        arr.insert(TlbEntry(1, 1))
        arr.probe(1)
        arr.probe(9)
        hits, misses, probes = arr.hits, arr.misses, arr.probes
        arr.flush()
        arr.flush()
        assert (arr.hits, arr.misses, arr.probes) == (hits, misses, probes)

    def test_probe_accounting_invariant(self):
        rng = np.random.default_rng(3)
        arr = TlbArray(sets=8, ways=2)
        for _ in range(500):
            tag = int(rng.integers(0, 64))
            if rng.random() < 0.5:
                arr.insert(TlbEntry(tag, tag))
            else:
                arr.probe(tag)
            assert arr.hits + arr.misses == arr.probes


class TestCoverage:
    def test_regular_entries_count_one(self):
        arr = TlbArray(sets=16, ways=4)
        for tag in range(10):
            arr.insert(TlbEntry(tag, tag))
        assert coverage_of((arr,)) == 10

    def test_aligned_entry_counts_contiguity(self):
        arr = TlbArray(sets=16, ways=4, index_shift=3)
        arr.insert(TlbEntry(8, 10, ALIGNED, width=3, contiguity=6))
        assert coverage_of((arr,)) == 6

    def test_huge_entry_counts_512(self):
        arr = TlbArray(sets=16, ways=4)
        arr.insert(TlbEntry(3, 7, HUGE))
        assert coverage_of((arr,)) == 512

    def test_empty_is_zero(self):
        assert coverage_of((TlbArray(sets=4, ways=2),)) == 0
