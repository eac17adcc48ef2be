"""How the alignment set responds to the contiguity histogram.

Shows the size-range table, the greedy coverage-weighted selection on a few
histograms (including the classic two-size example), and the effect of the
theta and psi knobs.
"""

from tlbsim import (ContiguityHistogram, build_histogram, determine_k,
                    generate_synthetic_mapping, scan_contiguity_chunks,
                    size_to_alignment)
from tlbsim.kselect import SIZE_RANGE_TABLE

print("size-range table (chunk pages -> alignment width):")
for lo, hi, width in SIZE_RANGE_TABLE:
    rng = f"{lo}-{hi}" if hi else f">{lo - 1}"
    print(f"  {rng:>10} -> {width}")
print(f"  size 1 -> {size_to_alignment(1)} (a single page gains nothing)")

print()
two_sizes = ContiguityHistogram(((16, 2000), (128, 400), (5, 300)))
print("histogram dominated by sizes 16 and 128:",
      sorted(determine_k(two_sizes).widths), "(theta=0.9, psi=4)")

print()
pt = generate_synthetic_mapping("mixed", 100_000, seed=0)
hist = build_histogram(scan_contiguity_chunks(pt))
for psi in (1, 2, 3, 4):
    kset = determine_k(hist, theta=0.9, psi=psi)
    print(f"mixed mapping, psi={psi}: K = {sorted(kset.widths, reverse=True)}")
print("larger psi admits more widths; theta=0.9 stops adding once the")
print("selected widths cover 90% of the contiguous pages")

for theta in (0.5, 0.7, 0.99):
    kset = determine_k(hist, theta=theta, psi=8)
    print(f"mixed mapping, theta={theta:4}: K = {sorted(kset.widths, reverse=True)}")
