import numpy as np
import pytest

from tlbsim import (TraceFormatError, generate_synthetic_mapping,
                    generate_trace, load_trace, save_trace)
from tlbsim.trace import AccessTrace, validate_trace

from conftest import make_table


@pytest.fixture
def small_map():
    return generate_synthetic_mapping("small", 2048, seed=5)


class TestGenerate:
    def test_sequential_walks_chunk_in_order(self):
        pt = make_table([(0x4000, 0x9000, 512)])
        trace = generate_trace(pt, "sequential", 512, seed=0)
        pages = trace.page_numbers().tolist()
        assert pages == list(range(0x4000, 0x4000 + 512))
        assert len(set(pages)) == 512

    def test_sequential_wraps(self, small_map):
        n = len(small_map)
        trace = generate_trace(small_map, "sequential", n + 10, seed=0)
        pages = trace.page_numbers().tolist()
        assert pages[:10] == pages[n:]

    @pytest.mark.parametrize("pattern", ["sequential", "strided", "random", "zipf"])
    def test_deterministic_per_seed(self, small_map, pattern):
        a = generate_trace(small_map, pattern, 5000, seed=3)
        b = generate_trace(small_map, pattern, 5000, seed=3)
        assert a == b

    @pytest.mark.parametrize("pattern", ["strided", "random", "zipf"])
    def test_seeds_differ(self, small_map, pattern):
        a = generate_trace(small_map, pattern, 5000, seed=3)
        b = generate_trace(small_map, pattern, 5000, seed=4)
        assert a != b

    @pytest.mark.parametrize("pattern", ["sequential", "strided", "random", "zipf"])
    def test_addresses_always_mapped(self, small_map, pattern):
        trace = generate_trace(small_map, pattern, 4000, seed=1)
        assert len(trace) == 4000
        assert validate_trace(trace, small_map) is None

    def test_zipf_skews_toward_hot_chunks(self, small_map):
        trace = generate_trace(small_map, "zipf", 30_000, seed=2, zipf_exponent=1.5)
        pages, counts = np.unique(trace.page_numbers(), return_counts=True)
        # hot pages exist and cold pages were skipped entirely
        assert counts.max() > 10
        assert pages.size < len(small_map)

    def test_rejects_empty_mapping(self):
        from tlbsim.memmap import PageTable
        with pytest.raises(ValueError, match="empty mapping"):
            generate_trace(PageTable(), "random", 10, seed=0)

    def test_rejects_unknown_pattern(self, small_map):
        with pytest.raises(ValueError, match="unknown trace pattern"):
            generate_trace(small_map, "pingpong", 10, seed=0)


class TestTraceFiles:
    def test_text_round_trip(self, small_map, tmp_path):
        trace = generate_trace(small_map, "zipf", 2000, seed=7)
        path = tmp_path / "t.trace"
        save_trace(trace, path, fmt="text")
        assert load_trace(path) == trace

    def test_binary_round_trip(self, small_map, tmp_path):
        trace = generate_trace(small_map, "random", 2000, seed=7)
        path = tmp_path / "t.bin"
        save_trace(trace, path, fmt="binary")
        assert load_trace(path) == trace
        assert path.read_bytes().startswith(b"TLBTRACE1")

    def test_text_format_content(self, tmp_path):
        trace = AccessTrace(np.array([0x1000, 0x2fff], dtype=np.uint64),
                            np.array([0, 1], dtype=np.uint8))
        path = tmp_path / "t.trace"
        save_trace(trace, path)
        assert path.read_text() == "1000 r\n2fff w\n"

    def test_comments_allowed(self, tmp_path):
        path = tmp_path / "t.trace"
        path.write_text("# trace\n1000 r\n\n2000 w\n")
        trace = load_trace(path)
        assert trace.page_numbers().tolist() == [1, 2]

    @pytest.mark.parametrize("line,line_no", [
        ("1000 r extra\n", 1),
        ("zz w\n", 1),
        ("1000 r\n1000 x\n", 2),
    ])
    def test_malformed_line_reports_number(self, tmp_path, line, line_no):
        path = tmp_path / "bad.trace"
        path.write_text(line)
        with pytest.raises(TraceFormatError) as err:
            load_trace(path)
        assert err.value.line_no == line_no

    def test_validate_reports_first_bad_index(self, small_map):
        good = generate_trace(small_map, "sequential", 100, seed=0)
        addrs = good.addresses.copy()
        addrs[42] = 0xDEAD000000
        bad = AccessTrace(addrs, good.ops)
        assert validate_trace(bad, small_map) == 42
