"""Alignment-set selection from contiguity histograms.

A contiguity histogram is reduced to per-width coverage weights through a
fixed size-range table, and the alignment set is chosen greedily by
descending coverage until either a target fraction theta of all contiguous
pages is covered or the set reaches its cardinality cap psi.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

from .aligned import AlignmentSet

if TYPE_CHECKING:
    from .memmap import ContiguityHistogram

DEFAULT_THETA = 0.9
DEFAULT_PSI = 4

# Chunk-size intervals and the alignment width whose 2^width window holds a
# chunk of that size.  Single pages sit below the table and never coalesce.
SIZE_RANGE_TABLE: tuple[tuple[int, int | None, int], ...] = (
    (2, 16, 4),
    (17, 64, 6),
    (65, 128, 7),
    (129, 256, 8),
    (257, 512, 9),
    (513, 1024, 10),
    (1025, None, 11),
)


def size_to_alignment(size: int) -> int | None:
    """Map a chunk size (pages) to its alignment width, or None for size 1."""
    if size < 1:
        raise ValueError(f"chunk size must be >= 1, got {size}")
    if size == 1:
        return None
    for lo, hi, width in SIZE_RANGE_TABLE:
        if size >= lo and (hi is None or size <= hi):
            return width
    raise AssertionError("size range table does not cover size %d" % size)


def _bins(histogram) -> Iterable[tuple[int, int]]:
    # Accept a ContiguityHistogram or a bare iterable of (size, freq) pairs.
    return histogram.bins if hasattr(histogram, "bins") else histogram


def determine_k(
    histogram: "ContiguityHistogram",
    theta: float = DEFAULT_THETA,
    psi: int = DEFAULT_PSI,
) -> AlignmentSet:
    """Choose the alignment set for a mapping's contiguity histogram.

    Each histogram bin contributes size*freq pages of coverage to the width
    that a chunk of that size fits into.  Widths are taken in descending
    coverage order (ties prefer the larger width, whose windows subsume more)
    until the accumulated coverage strictly exceeds theta of the total or the
    set holds psi widths.  Size-1 bins count toward the total but carry no
    weight.  An empty histogram yields an empty set.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    if psi < 1:
        raise ValueError(f"psi must be >= 1, got {psi}")

    weights: dict[int, int] = {}
    total = 0
    for size, freq in _bins(histogram):
        coverage = size * freq
        total += coverage
        width = size_to_alignment(size)
        if width is not None:
            weights[width] = weights.get(width, 0) + coverage

    chosen: set[int] = set()
    cumulative = 0
    for width, coverage in sorted(weights.items(), key=lambda kv: (-kv[1], -kv[0])):
        chosen.add(width)
        cumulative += coverage
        if cumulative > total * theta:
            break
        if len(chosen) >= psi:
            break
    return AlignmentSet(chosen, theta=theta, psi=psi)


def reevaluate_k(
    current: AlignmentSet,
    histogram: "ContiguityHistogram",
    interval_elapsed: bool,
) -> tuple[AlignmentSet, bool]:
    """Periodic re-selection of the alignment set.

    Returns (alignment set, changed).  Outside a re-evaluation interval this
    is a no-op.  When the interval has elapsed the set is recomputed from the
    histogram; a changed result signals the caller to rebuild annotations and
    flush the TLBs.
    """
    if not interval_elapsed:
        return current, False
    fresh = determine_k(histogram, theta=current.theta, psi=current.psi)
    if fresh.widths == current.widths:
        return current, False
    return fresh, True
