"""Walkthrough of aligned page-table entries on a tiny hand-built table.

Builds the small worked example (chunks of sizes 2, 3, and 6), annotates it
with alignment widths {1, 2, 3}, and steps through a fill and an aligned
lookup for a page in the middle of the size-6 chunk.
"""

from tlbsim import AlignmentSet, KAlignedMmu, PageTable, annotate_table

pt = PageTable()
for vpn, ppn in [(2, 0x100), (3, 0x101),            # size-2 chunk
                 (4, 0x200), (5, 0x201), (6, 0x202),  # size-3 chunk
                 (8, 10), (9, 11), (10, 12), (11, 13), (12, 14), (13, 15)]:
    pt.map(vpn, ppn)

kset = AlignmentSet({1, 2, 3})
store = annotate_table(pt, kset)
print(f"alignment widths {sorted(kset.widths)}, "
      f"{len(store)} annotations written (work counter {store.work})")
for a in sorted(store, key=lambda a: a.vpn):
    window = 1 << a.width
    print(f"  vpn {a.vpn:2}: {a.width}-bit aligned, contiguity {a.contiguity} "
          f"of a {window}-page window")

print()
mmu = KAlignedMmu(pt, kset)
ppn, event = mmu.translate_event(13)
print(f"translate(13) -> ppn {ppn}: {event.outcome}, fill: {event.fill_kind}")
print("  (the walk filled the widest covering aligned entry, vpn 8 at width 3)")

mmu.l1_4k.flush()  # force the next access through the L2
ppn, event = mmu.translate_event(13)
print(f"translate(13) -> ppn {ppn}: {event.outcome}, "
      f"lookups used: {event.lookups_used}")
print("  ppn = 10 + (13 - 8): the aligned entry plus the page offset")
