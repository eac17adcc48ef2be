"""Relative TLB misses of every scheme on the four synthetic mappings.

Reproduces the shape of the headline comparison: huge pages only pay off on
large contiguity, hardware coalescing caps out at 8 pages, a single anchor
distance compromises on mixed contiguity, and multi-width aligned entries
win across the board.  Desk-scale traces, so the exact percentages differ
from any published table; the ordering is the point.
"""

from tlbsim import SimConfig, generate_synthetic_mapping, generate_trace, run_simulation

SCHEMES = ("base", "thp", "rmm", "colt", "cluster", "anchor-static", "kaligned")

print(f"{'mapping':>8} | " + " | ".join(f"{s:>13}" for s in SCHEMES))
print("-" * (11 + 16 * len(SCHEMES)))
for kind in ("small", "medium", "large", "mixed"):
    pt = generate_synthetic_mapping(kind, 100_000, seed=2)
    trace = generate_trace(pt, "zipf", 150_000, 42, zipf_exponent=1.1, burst=96)
    walks = {}
    for scheme in SCHEMES:
        r = run_simulation(pt, trace, SimConfig(scheme=scheme, psi=2), workload=kind)
        walks[scheme] = r.walks
    row = " | ".join(f"{100 * walks[s] / walks['base']:12.1f}%" for s in SCHEMES)
    print(f"{kind:>8} | {row}")

print()
print("values are L2 walks relative to the conventional baseline (100%);")
print("kaligned here runs with psi=2, i.e. at most two alignment widths")
