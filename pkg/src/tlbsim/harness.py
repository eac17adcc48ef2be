"""Simulation driver, cycle accounting, and CSV reporting.

Cycle costs attach to outcome classes: a regular L2 hit costs 7 cycles, a
coalesced-kind hit 8 for the first probe plus 7 per additional lookup, a
page-table walk 50.  The aligned lookup precedes the walk, so schemes that
perform it are also charged their probes on every miss (configurable off to
model a walk overlapped with the remaining probes as a what-if).  L1 hits
are free: the L1 is accessed in parallel with the cache.

Totals are reconstructed exactly as sum(counter x unit cost); the driver's
debug path additionally accumulates per-access costs so tests can
cross-check the two routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .aligned import AlignmentSet
from .baselines import (AnchorMmu, BaseMmu, ClusterMmu, ColtMmu, RmmMmu,
                        ThpMmu, anchor_static_search, model_anchor_distance)
from .errors import ConfigError, UnmappedAccessError
from .kaligned import KAlignedMmu
from .kselect import DEFAULT_PSI, DEFAULT_THETA, determine_k, reevaluate_k
from .memmap import PageTable, build_histogram, scan_contiguity_chunks
from .trace import AccessTrace

SCHEMES = ("base", "thp", "colt", "cluster", "rmm", "anchor", "anchor-static", "kaligned")

CSV_COLUMNS = (
    "workload", "scheme", "params", "k_count", "k_set", "accesses",
    "l1_hits", "l1_misses", "l2_hits", "coalesced_hits", "extra_lookups",
    "misses", "relative_misses", "coverage", "coverage_ratio",
    "predictor_accuracy", "cycles_l2_hit", "cycles_coalesced_hit",
    "cycles_extra_lookup", "cycles_miss_probe", "cycles_walk",
    "cycles_total", "cycles_per_access", "cycles_per_instruction",
)


@dataclass(frozen=True)
class LatencyModel:
    """Per-event cycle costs."""

    l1_hit: int = 0
    l2_hit: int = 7
    coalesced_hit_first: int = 8
    extra_lookup: int = 7
    walk: int = 50

    def __post_init__(self):
        if min(self.l1_hit, self.l2_hit, self.coalesced_hit_first,
               self.extra_lookup, self.walk) < 0:
            raise ValueError("latencies must be non-negative")


@dataclass
class SimConfig:
    """Everything a single simulation run needs beyond mapping and trace."""

    scheme: str = "base"
    k_widths: Optional[tuple[int, ...]] = None  # explicit K; None = determine
    theta: float = DEFAULT_THETA
    psi: int = DEFAULT_PSI
    anchor_distance: Optional[int] = None  # None = model-selected
    rmm_min_range: int = 512
    latency: LatencyModel = field(default_factory=LatencyModel)
    charge_probes_on_miss: bool = True
    accesses_per_instruction: Optional[float] = None  # None = trace's ratio
    coverage_interval: Optional[int] = None  # None = len(trace)//8
    check_oracle: bool = False
    per_access_cycles: bool = False
    unmap_events: Optional[Mapping[int, Sequence[int]]] = None
    reevaluate_interval: Optional[int] = None


@dataclass
class SimReport:
    """Counters, coverage samples, and the cycle breakdown for one run."""

    workload: str
    scheme: str
    params: str
    k_set: tuple[int, ...]
    accesses: int
    l1_hits: int
    l2_hits: int
    co_hits_by_lookups: tuple[int, ...]  # index = lookups used; [0] unused
    walks: int
    shootdowns: int
    coverage_samples: tuple[tuple[int, int], ...]
    first_probe_hits: int
    latency: LatencyModel
    miss_probes: int  # coalesced-structure probes charged per walk
    accesses_per_instruction: float
    oracle_mismatches: Optional[int] = None
    per_access_cycles: Optional[list[int]] = None

    @property
    def l1_misses(self) -> int:
        return self.accesses - self.l1_hits

    @property
    def coalesced_hits(self) -> int:
        return sum(self.co_hits_by_lookups[1:])

    @property
    def extra_lookups(self) -> int:
        return sum((p - 1) * n for p, n in enumerate(self.co_hits_by_lookups[1:], start=1))

    @property
    def misses(self) -> int:
        return self.walks

    @property
    def predictor_accuracy(self) -> Optional[float]:
        hits = self.coalesced_hits
        if self.scheme != "kaligned" or hits == 0:
            return None
        return self.first_probe_hits / hits

    @property
    def coverage_mean(self) -> float:
        if not self.coverage_samples:
            return 0.0
        return sum(c for _, c in self.coverage_samples) / len(self.coverage_samples)

    # -- cycle breakdown ----------------------------------------------------
    @property
    def cycles_l2_hit(self) -> int:
        return self.latency.l2_hit * self.l2_hits

    @property
    def cycles_coalesced_hit(self) -> int:
        return self.latency.coalesced_hit_first * self.coalesced_hits

    @property
    def cycles_extra_lookup(self) -> int:
        return self.latency.extra_lookup * self.extra_lookups

    @property
    def miss_probe_cost(self) -> int:
        """Cycles of aligned probing charged on each walk."""
        if self.miss_probes == 0:
            return 0
        lat = self.latency
        return lat.coalesced_hit_first + (self.miss_probes - 1) * lat.extra_lookup

    @property
    def cycles_miss_probe(self) -> int:
        return self.miss_probe_cost * self.walks

    @property
    def cycles_walk(self) -> int:
        return self.latency.walk * self.walks

    @property
    def cycles_total(self) -> int:
        return (self.cycles_l2_hit + self.cycles_coalesced_hit + self.cycles_extra_lookup
                + self.cycles_miss_probe + self.cycles_walk
                + self.latency.l1_hit * self.l1_hits)

    @property
    def cycles_per_access(self) -> float:
        return self.cycles_total / self.accesses if self.accesses else 0.0

    @property
    def cycles_per_instruction(self) -> float:
        return self.cycles_per_access * self.accesses_per_instruction

    def validate(self) -> None:
        """Internal consistency: hits and misses partition the accesses."""
        if self.l1_hits + self.l1_misses != self.accesses:
            raise AssertionError("l1 accounting broken")
        if self.l2_hits + self.coalesced_hits + self.walks != self.l1_misses:
            raise AssertionError("l2 accounting broken")
        if self.per_access_cycles is not None:
            if sum(self.per_access_cycles) != self.cycles_total:
                raise AssertionError("per-access cycles disagree with counter reconstruction")


def build_mmu(pt: PageTable, config: SimConfig):
    """Construct the scheme's MMU (anchor-static resolves its distance first)."""
    scheme = config.scheme
    if scheme == "base":
        return BaseMmu(pt)
    if scheme == "thp":
        return ThpMmu(pt)
    if scheme == "colt":
        return ColtMmu(pt)
    if scheme == "cluster":
        return ClusterMmu(pt)
    if scheme == "rmm":
        return RmmMmu(pt, min_range=config.rmm_min_range)
    if scheme == "anchor":
        d = config.anchor_distance or model_anchor_distance(pt)
        return AnchorMmu(pt, d)
    if scheme == "kaligned":
        kset = alignment_set_for(pt, config)
        return KAlignedMmu(pt, kset)
    raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def alignment_set_for(pt: PageTable, config: SimConfig) -> AlignmentSet:
    if config.k_widths is not None:
        return AlignmentSet(config.k_widths, theta=config.theta,
                            psi=max(config.psi, len(set(config.k_widths))))
    hist = build_histogram(scan_contiguity_chunks(pt))
    return determine_k(hist, theta=config.theta, psi=config.psi)


def run_simulation(pt: PageTable, trace: AccessTrace, config: SimConfig,
                   workload: str = "") -> SimReport:
    """Drive one scheme over one trace and assemble its report."""
    config = _normalize(config)
    if config.scheme == "anchor-static":
        best_d, _ = anchor_static_search(pt, trace)
        cfg = replace(config, scheme="anchor", anchor_distance=best_d)
        report = run_simulation(pt, trace, cfg, workload)
        report.scheme = "anchor-static"
        return report

    mmu = build_mmu(pt, config)
    n = len(trace)
    arr = trace.page_numbers()
    interval = config.coverage_interval or max(1, n // 8)
    samples: list[tuple[int, int]] = []
    per_access: Optional[list[int]] = [] if config.per_access_cycles else None
    mismatches = 0

    featureful = (config.per_access_cycles or config.unmap_events
                  or config.reevaluate_interval)
    if featureful:
        mismatches = _drive_debug(mmu, pt, arr, interval, samples, per_access, config)
    elif config.check_oracle:
        mismatches = _drive_oracle(mmu, pt, arr, interval, samples)
    else:
        _drive_fast(mmu, arr, interval, samples)

    params = _params_of(mmu, config)
    k_set = tuple(mmu.kset.descending()) if isinstance(mmu, KAlignedMmu) else ()
    report = SimReport(
        workload=workload,
        scheme=config.scheme,
        params=params,
        k_set=k_set,
        accesses=n,
        l1_hits=mmu.n_l1,
        l2_hits=mmu.n_l2,
        co_hits_by_lookups=tuple(mmu.n_co_by),
        walks=mmu.n_walk,
        shootdowns=mmu.n_shootdowns,
        coverage_samples=tuple(samples),
        first_probe_hits=mmu.n_co_by[1] if len(mmu.n_co_by) > 1 else 0,
        latency=config.latency,
        miss_probes=mmu.miss_probe_count() if config.charge_probes_on_miss
        else min(1, mmu.miss_probe_count()),
        accesses_per_instruction=(config.accesses_per_instruction
                                  if config.accesses_per_instruction is not None
                                  else trace.accesses_per_instruction),
        oracle_mismatches=mismatches if config.check_oracle else None,
        per_access_cycles=per_access,
    )
    report.validate()
    return report


def _normalize(config: SimConfig) -> SimConfig:
    if config.scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {config.scheme!r}; expected one of {SCHEMES}")
    return config


def _params_of(mmu, config: SimConfig) -> str:
    if isinstance(mmu, AnchorMmu):
        return f"d={mmu.distance}"
    if isinstance(mmu, KAlignedMmu):
        return f"theta={config.theta};psi={config.psi}"
    if isinstance(mmu, RmmMmu):
        return f"min_range={mmu.min_range}"
    return ""


def _drive_fast(mmu, arr, interval, samples) -> None:
    """Production loop: the L1 fast path is inlined, with counters batched
    per chunk (boundaries are the only observation points)."""
    slow = mmu._translate_slow
    l1 = mmu.l1_4k
    l1_sets = l1._sets
    l1_mask = l1._mask
    n = arr.size
    i = 0
    while i < n:
        j = min(i + interval, n)
        chunk = arr[i:j].tolist()
        slow_calls = 0
        try:
            for vpn in chunk:
                e = l1_sets[vpn & l1_mask].get(vpn << 3)
                if e is not None:
                    l1._tick += 1
                    e.lru_stamp = l1._tick
                else:
                    slow_calls += 1
                    slow(vpn)
        except UnmappedAccessError as exc:
            raise UnmappedAccessError(exc.vpn, index=i + chunk.index(exc.vpn)) from None
        m = len(chunk)
        l1.probes += m
        l1.hits += m - slow_calls
        l1.misses += slow_calls
        mmu.n_l1 += m - slow_calls
        samples.append((j, mmu.l2_coverage()))
        i = j


def _drive_oracle(mmu, pt, arr, interval, samples) -> int:
    """_drive_fast plus a page-table equality check on every returned ppn."""
    slow = mmu._translate_slow
    l1 = mmu.l1_4k
    l1_sets = l1._sets
    l1_mask = l1._mask
    expected = pt.ppn_map
    mismatches = 0
    n = arr.size
    i = 0
    while i < n:
        j = min(i + interval, n)
        chunk = arr[i:j].tolist()
        slow_calls = 0
        try:
            for vpn in chunk:
                e = l1_sets[vpn & l1_mask].get(vpn << 3)
                if e is not None:
                    l1._tick += 1
                    e.lru_stamp = l1._tick
                    if e.ppn != expected[vpn]:
                        mismatches += 1
                else:
                    slow_calls += 1
                    if slow(vpn) != expected[vpn]:
                        mismatches += 1
        except UnmappedAccessError as exc:
            raise UnmappedAccessError(exc.vpn, index=i + chunk.index(exc.vpn)) from None
        m = len(chunk)
        l1.probes += m
        l1.hits += m - slow_calls
        l1.misses += slow_calls
        mmu.n_l1 += m - slow_calls
        samples.append((j, mmu.l2_coverage()))
        i = j
    return mismatches


def _drive_debug(mmu, pt, arr, interval, samples, per_access, config: SimConfig) -> int:
    """Featureful driver: per-access cycles, unmap events, K re-evaluation."""
    lat = config.latency
    expected = pt.ppn_map if config.check_oracle else None
    events = {int(k): list(v) for k, v in (config.unmap_events or {}).items()}
    reeval = config.reevaluate_interval
    mismatches = 0
    walk_probes = (mmu.miss_probe_count() if config.charge_probes_on_miss
                   else min(1, mmu.miss_probe_count()))
    walk_cost = lat.walk + (0 if walk_probes == 0 else
                            lat.coalesced_hit_first + (walk_probes - 1) * lat.extra_lookup)
    next_sample = interval
    for i, vpn in enumerate(arr.tolist()):
        if events and i in events:
            for unmap_vpn in events.pop(i):
                mmu.apply_unmap(unmap_vpn)
        if reeval and i and i % reeval == 0 and isinstance(mmu, KAlignedMmu):
            hist = build_histogram(scan_contiguity_chunks(pt))
            fresh, changed = reevaluate_k(mmu.kset, hist, True)
            if changed:
                mmu.adopt_kset(fresh)
                walk_probes = (mmu.miss_probe_count() if config.charge_probes_on_miss
                               else min(1, mmu.miss_probe_count()))
                walk_cost = lat.walk + (0 if walk_probes == 0 else
                                        lat.coalesced_hit_first
                                        + (walk_probes - 1) * lat.extra_lookup)
        try:
            ppn = mmu.translate(vpn)
        except UnmappedAccessError as exc:
            raise UnmappedAccessError(exc.vpn, index=i) from None
        if expected is not None and ppn != expected[vpn]:
            mismatches += 1
        if per_access is not None:
            out = mmu.last_outcome
            if out == 0:
                cost = lat.l1_hit
            elif out == 1:
                cost = lat.l2_hit
            elif out == 2:
                cost = lat.coalesced_hit_first + (mmu.last_lookups - 1) * lat.extra_lookup
            else:
                cost = walk_cost
            per_access.append(cost)
        if i + 1 == next_sample:
            samples.append((i + 1, mmu.l2_coverage()))
            next_sample += interval
    n = arr.size
    if not samples or samples[-1][0] != n:
        samples.append((n, mmu.l2_coverage()))
    return mismatches


# -- CSV reporting -----------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def report_row(r: SimReport, base: Optional[SimReport]) -> dict[str, str]:
    rel = None
    cov_ratio = None
    if base is not None and base.walks > 0:
        rel = r.walks / base.walks
    if base is not None and base.coverage_mean > 0:
        cov_ratio = r.coverage_mean / base.coverage_mean
    return {
        "workload": r.workload,
        "scheme": r.scheme,
        "params": r.params,
        "k_count": _fmt(len(r.k_set)) if r.scheme == "kaligned" else "",
        "k_set": "|".join(str(k) for k in r.k_set),
        "accesses": _fmt(r.accesses),
        "l1_hits": _fmt(r.l1_hits),
        "l1_misses": _fmt(r.l1_misses),
        "l2_hits": _fmt(r.l2_hits),
        "coalesced_hits": _fmt(r.coalesced_hits),
        "extra_lookups": _fmt(r.extra_lookups),
        "misses": _fmt(r.misses),
        "relative_misses": _fmt(rel),
        "coverage": _fmt(r.coverage_mean),
        "coverage_ratio": _fmt(cov_ratio),
        "predictor_accuracy": _fmt(r.predictor_accuracy),
        "cycles_l2_hit": _fmt(r.cycles_l2_hit),
        "cycles_coalesced_hit": _fmt(r.cycles_coalesced_hit),
        "cycles_extra_lookup": _fmt(r.cycles_extra_lookup),
        "cycles_miss_probe": _fmt(r.cycles_miss_probe),
        "cycles_walk": _fmt(r.cycles_walk),
        "cycles_total": _fmt(r.cycles_total),
        "cycles_per_access": _fmt(r.cycles_per_access),
        "cycles_per_instruction": _fmt(r.cycles_per_instruction),
    }


def emit_report(reports: Sequence[SimReport], path) -> None:
    """Write one CSV row per run; relative columns normalize to the same
    workload's base run.  Output is byte-stable for a fixed set of runs."""
    base_by_workload = {r.workload: r for r in reports if r.scheme == "base"}
    ordered = sorted(reports, key=lambda r: (r.workload, SCHEME_ORDER.get(r.scheme, 99),
                                             len(r.k_set), r.params))
    with open(path, "w", newline="") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for r in ordered:
            row = report_row(r, base_by_workload.get(r.workload))
            f.write(",".join(row[c] for c in CSV_COLUMNS) + "\n")


SCHEME_ORDER = {name: i for i, name in enumerate(
    ("base", "thp", "rmm", "colt", "cluster", "anchor", "anchor-static", "kaligned"))}


def merge_report_files(paths: Sequence, out_path) -> int:
    """Concatenate report CSVs (header written once), stable-sorted rows."""
    rows: list[str] = []
    header = ",".join(CSV_COLUMNS)
    for p in paths:
        with open(p) as f:
            first = f.readline().rstrip("\n")
            if first != header:
                raise ConfigError(f"{p}: unexpected CSV header")
            rows.extend(line.rstrip("\n") for line in f if line.strip())
    rows.sort(key=lambda line: (line.split(",")[0],
                                SCHEME_ORDER.get(line.split(",")[1], 99), line))
    with open(out_path, "w", newline="") as f:
        f.write(header + "\n")
        for line in rows:
            f.write(line + "\n")
    return len(rows)
