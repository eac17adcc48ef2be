"""Command-line front end.

Subcommands: genmap, gentrace, scan, simulate, sweep, report.  Every run
option can come from a flat key=value config file (`--config`) and be
overridden by the matching flag.  Exit codes: 0 success, 2 configuration
error, 3 trace-integrity error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError, MappingFormatError, TraceFormatError, UnmappedAccessError
from .harness import (SCHEMES, SimConfig, emit_report, merge_report_files,
                      run_simulation)
from .kselect import DEFAULT_PSI, DEFAULT_THETA
from .memmap import (BAND_NAMES, PageTable, build_histogram, classify_contiguity,
                     generate_synthetic_mapping, load_mapping, save_mapping,
                     scan_contiguity_chunks)
from .trace import PATTERNS, generate_trace, load_trace, save_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRACE = 3

MAPPING_KINDS = ("small", "medium", "large", "mixed")


def parse_config_file(path) -> dict[str, str]:
    """Flat `key=value` file; `#` comments and blank lines allowed."""
    out: dict[str, str] = {}
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {body!r}")
            key, value = body.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _merged(args: argparse.Namespace, keys: dict[str, type]) -> dict:
    """CLI flags override config-file values; types come from the key table."""
    merged: dict = {}
    if getattr(args, "config", None):
        raw = parse_config_file(args.config)
        for key, value in raw.items():
            if key not in keys:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = _coerce(key, value, keys[key])
    for key, typ in keys.items():
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            merged[key] = flag
    return merged


def _coerce(key: str, value: str, typ):
    if typ is bool:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"config key {key}: expected boolean, got {value!r}")
    try:
        return typ(value)
    except ValueError:
        raise ConfigError(f"config key {key}: expected {typ.__name__}, got {value!r}") from None


def _parse_k(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace("|", ",").split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"bad K list {text!r}; expected e.g. 4,7") from None


def _load_mapping_arg(spec: str, pages: int, seed: int) -> tuple[str, PageTable]:
    """A mapping argument is a synthetic kind name or a dump file path."""
    if spec in MAPPING_KINDS:
        return f"{spec}-s{seed}", generate_synthetic_mapping(spec, pages, seed)
    import os
    label = os.path.splitext(os.path.basename(spec))[0]
    return label, load_mapping(spec)


# -- subcommands ---------------------------------------------------------------

def cmd_genmap(args) -> int:
    pt = generate_synthetic_mapping(args.kind, args.pages, args.seed)
    save_mapping(pt, args.out)
    chunks = scan_contiguity_chunks(pt)
    print(f"wrote {args.out}: {len(pt)} pages in {len(chunks)} chunks ({args.kind}, seed {args.seed})")
    return EXIT_OK


def cmd_gentrace(args) -> int:
    pt = load_mapping(args.mapping)
    trace = generate_trace(pt, args.pattern, args.length, args.seed,
                           stride=args.stride, burst=args.burst)
    save_trace(trace, args.out, fmt=args.format)
    print(f"wrote {args.out}: {len(trace)} accesses ({args.pattern}, seed {args.seed}, {args.format})")
    return EXIT_OK


def cmd_scan(args) -> int:
    pt = load_mapping(args.mapping)
    chunks = scan_contiguity_chunks(pt)
    hist = build_histogram(chunks)
    pages = hist.total_pages
    by_band_pages = hist.pages_by_band()
    by_band_chunks = hist.chunks_by_band()
    label = classify_contiguity(hist) if pages else "empty"
    print(f"{args.mapping}: {pages} mapped pages, {hist.chunk_count} chunks, contiguity type: {label}")
    for band in BAND_NAMES:
        print(f"  {band:>6}: {by_band_chunks[band]:>8} chunks, {by_band_pages[band]:>10} pages")
    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write("mapping,band,chunks,pages\n")
            for band in BAND_NAMES:
                f.write(f"{args.mapping},{band},{by_band_chunks[band]},{by_band_pages[band]}\n")
        print(f"wrote {args.out}")
    return EXIT_OK


_SIM_KEYS = {
    "scheme": str, "mapping": str, "trace": str, "seed": int, "pages": int,
    "pattern": str, "length": int, "theta": float, "psi": int, "k": str,
    "distance": int, "out": str, "api": float, "burst": int, "stride": int,
    "charge_probes": bool, "coverage_interval": int,
}


def _sim_config(opts: dict) -> SimConfig:
    cfg = SimConfig(scheme=opts.get("scheme", "base"))
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}; expected one of {SCHEMES}")
    cfg.theta = opts.get("theta", DEFAULT_THETA)
    cfg.psi = opts.get("psi", DEFAULT_PSI)
    if "k" in opts:
        cfg.k_widths = _parse_k(opts["k"])
    if "distance" in opts:
        cfg.anchor_distance = opts["distance"]
    if "api" in opts:
        cfg.accesses_per_instruction = opts["api"]
    if "charge_probes" in opts:
        cfg.charge_probes_on_miss = opts["charge_probes"]
    if "coverage_interval" in opts:
        cfg.coverage_interval = opts["coverage_interval"]
    return cfg


def _sim_inputs(opts: dict) -> tuple[str, PageTable, object]:
    if "mapping" not in opts:
        raise ConfigError("a mapping is required (--mapping kind-or-file)")
    seed = opts.get("seed", 0)
    label, pt = _load_mapping_arg(opts["mapping"], opts.get("pages", 100_000), seed)
    if "trace" in opts:
        trace = load_trace(opts["trace"])
    else:
        trace = generate_trace(pt, opts.get("pattern", "zipf"), opts.get("length", 100_000),
                               seed + 1, stride=opts.get("stride", 8),
                               burst=opts.get("burst", 64))
    return label, pt, trace


def cmd_simulate(args) -> int:
    opts = _merged(args, _SIM_KEYS)
    cfg = _sim_config(opts)
    workload, pt, trace = _sim_inputs(opts)
    report = run_simulation(pt, trace, cfg, workload=workload)
    base = None
    if cfg.scheme != "base":
        base_cfg = SimConfig(scheme="base", latency=cfg.latency)
        base = run_simulation(pt, trace, base_cfg, workload=workload)
    rel = f"{report.walks / base.walks:.4f}" if base and base.walks else "n/a"
    print(f"workload={workload} scheme={report.scheme} params={report.params} "
          f"K={'|'.join(map(str, report.k_set)) or '-'}")
    print(f"  accesses={report.accesses} l1_hits={report.l1_hits} l2_hits={report.l2_hits} "
          f"coalesced_hits={report.coalesced_hits} walks={report.walks}")
    acc = report.predictor_accuracy
    print(f"  cycles={report.cycles_total} cpa={report.cycles_per_access:.4f} "
          f"cpi={report.cycles_per_instruction:.4f} coverage={report.coverage_mean:.1f} "
          f"predictor={'n/a' if acc is None else f'{acc:.4f}'} relative_misses={rel}")
    if opts.get("out"):
        reports = [report] if base is None else [base, report]
        emit_report(reports, opts["out"])
        print(f"wrote {opts['out']}")
    return EXIT_OK


_SWEEP_KEYS = {
    "schemes": str, "mappings": str, "pages": int, "seed": int,
    "pattern": str, "length": int, "theta": float, "psis": str,
    "distance": int, "out": str, "jobs": int, "burst": int, "stride": int,
}


def _sweep_jobs(opts: dict) -> list[tuple]:
    schemes = [s.strip() for s in opts.get("schemes", "base,kaligned").split(",") if s.strip()]
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
    mappings = [m.strip() for m in opts.get("mappings", "mixed").split(",") if m.strip()]
    psis = [int(p) for p in str(opts.get("psis", opts.get("psi", "4"))).split(",")]
    jobs = []
    for mapping in mappings:
        for scheme in schemes:
            if scheme == "kaligned":
                for psi in psis:
                    jobs.append((mapping, scheme, psi, opts))
            else:
                jobs.append((mapping, scheme, None, opts))
    return jobs


def _run_sweep_job(job: tuple):
    mapping, scheme, psi, opts = job
    cfg = _sim_config({**opts, "scheme": scheme, **({"psi": psi} if psi else {})})
    workload, pt, trace = _sim_inputs({**opts, "mapping": mapping})
    return run_simulation(pt, trace, cfg, workload=workload)


def cmd_sweep(args) -> int:
    opts = _merged(args, _SWEEP_KEYS)
    if "out" not in opts:
        raise ConfigError("sweep requires --out for the CSV report")
    jobs = _sweep_jobs(opts)
    n_jobs = opts.get("jobs", 1)
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            reports = list(pool.map(_run_sweep_job, jobs))
    else:
        reports = [_run_sweep_job(j) for j in jobs]
    emit_report(reports, opts["out"])
    print(f"wrote {opts['out']}: {len(reports)} runs "
          f"({len(set(r.workload for r in reports))} workloads)")
    return EXIT_OK


def cmd_report(args) -> int:
    n = merge_report_files(args.inputs, args.out)
    print(f"wrote {args.out}: {n} rows from {len(args.inputs)} files")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tlbsim",
                                description="Trace-driven TLB coalescing simulator")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("genmap", help="generate a synthetic mapping file")
    g.add_argument("--kind", choices=MAPPING_KINDS, required=True)
    g.add_argument("--pages", type=int, default=100_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_genmap)

    g = sub.add_parser("gentrace", help="generate an access trace for a mapping")
    g.add_argument("--mapping", required=True)
    g.add_argument("--pattern", choices=PATTERNS, default="zipf")
    g.add_argument("--length", type=int, default=100_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--stride", type=int, default=8)
    g.add_argument("--burst", type=int, default=64)
    g.add_argument("--format", choices=("text", "binary"), default="text")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gentrace)

    g = sub.add_parser("scan", help="contiguity histogram of a mapping file")
    g.add_argument("--mapping", required=True)
    g.add_argument("--out", help="also write a per-band CSV")
    g.set_defaults(func=cmd_scan)

    g = sub.add_parser("simulate", help="run one scheme over one workload")
    g.add_argument("--config", help="key=value config file; flags override")
    g.add_argument("--scheme", choices=SCHEMES)
    g.add_argument("--mapping", help="synthetic kind or mapping file")
    g.add_argument("--trace", help="trace file (otherwise generated)")
    g.add_argument("--pages", type=int)
    g.add_argument("--pattern", choices=PATTERNS)
    g.add_argument("--length", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--theta", type=float)
    g.add_argument("--psi", type=int)
    g.add_argument("--k", help="explicit alignment widths, e.g. 4,7")
    g.add_argument("--distance", type=int, help="anchor distance")
    g.add_argument("--api", type=float, help="accesses per instruction")
    g.add_argument("--burst", type=int)
    g.add_argument("--stride", type=int)
    g.add_argument("--charge-probes", dest="charge_probes", action="store_true", default=None)
    g.add_argument("--no-charge-probes", dest="charge_probes", action="store_false", default=None)
    g.add_argument("--coverage-interval", dest="coverage_interval", type=int)
    g.add_argument("--out", help="write a CSV report")
    g.set_defaults(func=cmd_simulate)

    g = sub.add_parser("sweep", help="cartesian schemes x mappings x K settings")
    g.add_argument("--config", help="key=value config file; flags override")
    g.add_argument("--schemes", help="comma list, e.g. base,thp,kaligned")
    g.add_argument("--mappings", help="comma list of kinds or files")
    g.add_argument("--pages", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--pattern", choices=PATTERNS)
    g.add_argument("--length", type=int)
    g.add_argument("--theta", type=float)
    g.add_argument("--psis", help="comma list of psi values for kaligned rows")
    g.add_argument("--distance", type=int)
    g.add_argument("--burst", type=int)
    g.add_argument("--stride", type=int)
    g.add_argument("--jobs", type=int, help="parallel worker processes")
    g.add_argument("--out")
    g.set_defaults(func=cmd_sweep)

    g = sub.add_parser("report", help="merge report CSVs")
    g.add_argument("inputs", nargs="+")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, MappingFormatError, TraceFormatError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnmappedAccessError as exc:
        print(f"trace integrity error: {exc}", file=sys.stderr)
        return EXIT_TRACE


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
