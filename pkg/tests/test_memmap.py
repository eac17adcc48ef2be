import numpy as np
import pytest

from tlbsim import (ContiguityChunk, MappingFormatError, PageTable,
                    build_histogram, classify_contiguity,
                    generate_synthetic_mapping, load_mapping, save_mapping,
                    scan_contiguity_chunks)
from tlbsim.memmap import _plan_chunks, band_of

from conftest import make_table


class TestScanChunks:
    def test_figure_table_chunk_sizes(self, figure_table):
        sizes = sorted(c.size for c in scan_contiguity_chunks(figure_table))
        assert sizes == [2, 3, 6]

    def test_empty_table(self):
        assert scan_contiguity_chunks(PageTable()) == []

    def test_identity_mapping_single_chunk(self):
        pt = make_table([(100, 100, 64)])
        assert scan_contiguity_chunks(pt) == [ContiguityChunk(100, 64)]

    def test_permission_change_breaks_chunk(self):
        pt = make_table([(0x40, 0x80, 5)])
        pt.unmap(0x42)
        pt.map(0x42, 0x82, "r--")  # PPNs stay contiguous, perm does not
        sizes = sorted(c.size for c in scan_contiguity_chunks(pt))
        assert sizes == [1, 2, 2]

    def test_physical_discontinuity_breaks_chunk(self):
        pt = make_table([(0, 0, 3), (3, 100, 3)])  # virtually adjacent
        assert [c.size for c in scan_contiguity_chunks(pt)] == [3, 3]

    @pytest.mark.parametrize("k", [3, 4, 7])
    def test_perm_flip_partitions_sizes(self, k):
        pt = make_table([(0, 0, k)])
        flip = k // 2
        pt.unmap(flip)
        pt.map(flip, flip, "rwx")
        chunks = scan_contiguity_chunks(pt)
        assert sum(c.size for c in chunks) == k

    def test_partition_covers_every_page_once(self):
        rng = np.random.default_rng(5)
        pt = PageTable()
        vpn = 0
        for _ in range(200):
            vpn += int(rng.integers(1, 4))
            pt.map(vpn, int(rng.integers(0, 1 << 20)))
        chunks = scan_contiguity_chunks(pt)
        covered = sorted(v for c in chunks for v in range(c.start_vpn, c.start_vpn + c.size))
        assert covered == pt.vpns()


class TestHistogram:
    def test_direct_count(self):
        chunks = [ContiguityChunk(0, 2), ContiguityChunk(10, 3), ContiguityChunk(20, 6)]
        h = build_histogram(chunks)
        assert h.bins == ((2, 1), (3, 1), (6, 1))

    def test_empty(self):
        assert build_histogram([]).bins == ()

    def test_recount_matches_independent_pass(self):
        # mcf-like scale: enough pages that the small band yields 9000+ chunks
        pt = generate_synthetic_mapping("small", 300_000, seed=3)
        chunks = scan_contiguity_chunks(pt)
        assert len(chunks) > 9000
        h = build_histogram(chunks)
        # independent oracle: recount sizes by hand
        by_size = {}
        for c in chunks:
            by_size[c.size] = by_size.get(c.size, 0) + 1
        assert dict(h.bins) == by_size
        assert h.chunk_count == len(chunks)
        assert h.total_pages == sum(c.size for c in chunks)


class TestClassify:
    def test_all_small(self):
        h = build_histogram([ContiguityChunk(i * 64, 32) for i in range(10)])
        assert classify_contiguity(h) == "small"

    def test_all_large(self):
        h = build_histogram([ContiguityChunk(i * 2048, 700) for i in range(4)])
        assert classify_contiguity(h) == "large"

    def test_mixed_40_40_20(self):
        chunks = []
        vpn = 0
        for size, total in ((32, 40_000), (256, 40_000), (700, 19_600)):
            for _ in range(total // size):
                chunks.append(ContiguityChunk(vpn, size))
                vpn += size + 1
        assert classify_contiguity(build_histogram(chunks)) == "mixed"

    def test_minority_band_below_threshold_ignored(self):
        chunks = [ContiguityChunk(i * 40, 32) for i in range(100)]  # 3200 small pages
        chunks.append(ContiguityChunk(100_000, 256))  # 7.4% medium pages
        assert classify_contiguity(build_histogram(chunks)) == "small"

    def test_empty_histogram_error(self):
        with pytest.raises(ValueError, match="no contiguity"):
            classify_contiguity(build_histogram([]))

    def test_band_of(self):
        assert [band_of(s) for s in (1, 63, 64, 511, 512, 1024, 1025)] == [
            "small", "small", "medium", "medium", "large", "large", "huge"]


class TestGenerator:
    def test_deterministic(self):
        a = generate_synthetic_mapping("small", 5000, seed=7)
        b = generate_synthetic_mapping("small", 5000, seed=7)
        assert a == b

    def test_seeds_differ(self):
        a = generate_synthetic_mapping("small", 5000, seed=7)
        b = generate_synthetic_mapping("small", 5000, seed=8)
        assert a != b

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_large_kind_sizes_in_band(self, seed):
        pt = generate_synthetic_mapping("large", 100_000, seed=seed)
        sizes = {c.size for c in scan_contiguity_chunks(pt)}
        assert all(512 <= s <= 1024 for s in sizes)

    def test_mixed_band_shares_within_tolerance(self):
        pt = generate_synthetic_mapping("mixed", 1_000_000, seed=1)
        h = build_histogram(scan_contiguity_chunks(pt))
        shares = h.pages_by_band()
        total = h.total_pages
        assert abs(shares["small"] / total - 0.4) < 0.05
        assert abs(shares["medium"] / total - 0.4) < 0.05
        assert abs(shares["large"] / total - 0.2) < 0.05

    @pytest.mark.parametrize("kind", ["small", "medium", "large", "mixed"])
    def test_scan_roundtrips_generated_plan(self, kind):
        seed = 11
        pt = generate_synthetic_mapping(kind, 20_000, seed=seed)
        scanned = [c.size for c in scan_contiguity_chunks(pt)]
        planned = [size for _, size in _plan_chunks(kind, 20_000, seed)]
        assert scanned == planned  # guard pages forbid accidental merging

    def test_rejects_small_total(self):
        with pytest.raises(ValueError, match="1024"):
            generate_synthetic_mapping("small", 1023, seed=0)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            generate_synthetic_mapping("blended", 2048, seed=0)


class TestMappingFile:
    def test_round_trip(self, tmp_path, figure_table):
        path = tmp_path / "map.txt"
        save_mapping(figure_table, path)
        assert load_mapping(path) == figure_table

    def test_round_trip_generated(self, tmp_path):
        pt = generate_synthetic_mapping("mixed", 2048, seed=2)
        path = tmp_path / "map.txt"
        save_mapping(pt, path)
        assert load_mapping(path) == pt

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("# header\n\na 1f rw-\n  # trailing\nb 20 rw-\n")
        pt = load_mapping(path)
        assert pt.ppn_map == {0xA: 0x1F, 0xB: 0x20}

    @pytest.mark.parametrize("body,reason", [
        ("10 20 rw- extra\n", "expected 3 fields"),
        ("zz 20 rw-\n", "bad hex"),
        ("10 20 rwxx\n", "bad permission"),
        ("10 20 rw-\n10 21 rw-\n", "duplicate"),
        ("11 20 rw-\n10 21 rw-\n", "not sorted"),
    ])
    def test_format_errors_carry_line_numbers(self, tmp_path, body, reason):
        path = tmp_path / "bad.txt"
        path.write_text(body)
        with pytest.raises(MappingFormatError, match=reason) as err:
            load_mapping(path)
        assert err.value.line_no >= 1


class TestPageTable:
    def test_duplicate_vpn_rejected(self):
        pt = PageTable()
        pt.map(5, 9)
        with pytest.raises(ValueError, match="already mapped"):
            pt.map(5, 10)

    def test_iteration_ascending(self):
        pt = PageTable()
        for vpn in (9, 3, 7, 1):
            pt.map(vpn, vpn + 100)
        assert pt.vpns() == [1, 3, 7, 9]
        assert [m.vpn for m in pt.mappings()] == [1, 3, 7, 9]

    def test_unmap_missing_raises(self):
        with pytest.raises(KeyError):
            PageTable().unmap(4)
