"""Shared fixtures: the worked-example page table and helpers."""

import pytest

from tlbsim import PageTable


def make_table(runs, perm="rw-"):
    """Build a table from (start_vpn, start_ppn, size) runs."""
    pt = PageTable()
    for start_vpn, start_ppn, size in runs:
        for off in range(size):
            pt.map(start_vpn + off, start_ppn + off, perm)
    return pt


@pytest.fixture
def figure_table():
    """The small worked-example table: chunks of sizes 2, 3, and 6.

    VPNs 8..13 map to PPNs 10..15, so the size-6 chunk's 3-bit aligned
    entry carries contiguity 6, and VPN 13 translates to PPN 15 through it.
    """
    return make_table([
        (2, 0x100, 2),   # size-2 chunk
        (4, 0x200, 3),   # size-3 chunk at the 2-bit aligned VPN 4
        (8, 10, 6),      # size-6 chunk at the 3-bit aligned VPN 8
    ])
