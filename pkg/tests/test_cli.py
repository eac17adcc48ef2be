import pytest

from tlbsim.cli import main
from tlbsim.harness import CSV_COLUMNS


def run(argv):
    return main(argv)


@pytest.fixture
def mapping_file(tmp_path):
    path = tmp_path / "map.txt"
    assert run(["genmap", "--kind", "small", "--pages", "2048",
                "--seed", "3", "--out", str(path)]) == 0
    return path


class TestGenmapGentrace:
    def test_genmap_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run(["genmap", "--kind", "mixed", "--pages", "2048", "--seed", "9", "--out", str(a)])
        run(["genmap", "--kind", "mixed", "--pages", "2048", "--seed", "9", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_gentrace_text_and_binary_agree(self, tmp_path, mapping_file):
        t1, t2 = tmp_path / "t.trace", tmp_path / "t.bin"
        for out, fmt in ((t1, "text"), (t2, "binary")):
            assert run(["gentrace", "--mapping", str(mapping_file), "--pattern", "zipf",
                        "--length", "500", "--seed", "4", "--format", fmt,
                        "--out", str(out)]) == 0
        from tlbsim import load_trace
        assert load_trace(t1) == load_trace(t2)


class TestScan:
    def test_scan_writes_band_csv(self, tmp_path, mapping_file):
        out = tmp_path / "hist.csv"
        assert run(["scan", "--mapping", str(mapping_file), "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "mapping,band,chunks,pages"
        assert len(lines) == 5  # four bands
        assert all(line.split(",")[1] in ("small", "medium", "large", "huge")
                   for line in lines[1:])


class TestSimulate:
    def test_simulate_with_flags(self, tmp_path, mapping_file):
        out = tmp_path / "sim.csv"
        code = run(["simulate", "--scheme", "kaligned", "--mapping", str(mapping_file),
                    "--pattern", "zipf", "--length", "2000", "--seed", "5",
                    "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3  # base reference + kaligned

    def test_config_file_with_flag_override(self, tmp_path, mapping_file):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"scheme=base\nmapping={mapping_file}\npattern=zipf\n"
            "length=1000\nseed=5\ntheta=0.9\npsi=4\n")
        out = tmp_path / "sim.csv"
        code = run(["simulate", "--config", str(cfg), "--scheme", "kaligned",
                    "--out", str(out)])
        assert code == 0
        body = out.read_text()
        assert "kaligned" in body

    def test_unknown_scheme_exits_2(self, mapping_file):
        assert run(["simulate", "--scheme", "base", "--mapping", "nonsense-kind"]) == 2

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("flavor=spicy\n")
        assert run(["simulate", "--config", str(cfg)]) == 2

    def test_trace_integrity_exits_3(self, tmp_path, mapping_file):
        bad = tmp_path / "bad.trace"
        bad.write_text("ffffff000 r\n")
        assert run(["simulate", "--scheme", "base", "--mapping", str(mapping_file),
                    "--trace", str(bad)]) == 3


class TestSweepReport:
    def sweep(self, tmp_path, name):
        out = tmp_path / name
        code = run(["sweep", "--schemes", "base,thp,kaligned", "--mappings",
                    "small,mixed", "--pages", "2048", "--seed", "17",
                    "--pattern", "zipf", "--length", "2000",
                    "--psis", "2,3", "--out", str(out)])
        assert code == 0
        return out

    def test_sweep_runs_cartesian(self, tmp_path):
        out = self.sweep(tmp_path, "sweep.csv")
        lines = out.read_text().strip().split("\n")
        # 2 mappings x (base, thp, kaligned at psi 2 and 3)
        assert len(lines) == 1 + 2 * 4

    def test_sweep_byte_identical_reruns(self, tmp_path):
        a = self.sweep(tmp_path, "a.csv")
        b = self.sweep(tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_parallel_sweep_matches_serial(self, tmp_path):
        serial = self.sweep(tmp_path, "serial.csv")
        out = tmp_path / "parallel.csv"
        assert run(["sweep", "--schemes", "base,thp,kaligned", "--mappings",
                    "small,mixed", "--pages", "2048", "--seed", "17",
                    "--pattern", "zipf", "--length", "2000",
                    "--psis", "2,3", "--jobs", "2", "--out", str(out)]) == 0
        assert out.read_bytes() == serial.read_bytes()

    def test_report_merges(self, tmp_path):
        a = self.sweep(tmp_path, "a.csv")
        merged = tmp_path / "merged.csv"
        assert run(["report", str(a), str(a), "--out", str(merged)]) == 0
        assert len(merged.read_text().strip().split("\n")) == 1 + 2 * 8
