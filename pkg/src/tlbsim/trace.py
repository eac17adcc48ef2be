"""Access traces: file formats and synthetic generators.

A trace is a sequence of virtual byte addresses with a read/write flag.
The text form is one `<hex address> <r|w>` per line; the binary form is a
`TLBTRACE1` magic header followed by little-endian 8-byte address + 1-byte
op records.  Generators are deterministic per seed and draw only addresses
that are mapped, so traces always satisfy the simulator's integrity
precondition when the mapping is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TraceFormatError
from .memmap import PAGE_SHIFT, PageTable, scan_contiguity_chunks

BINARY_MAGIC = b"TLBTRACE1"
_RECORD_DTYPE = np.dtype([("addr", "<u8"), ("op", "u1")])

DEFAULT_ACCESSES_PER_INSTRUCTION = 0.3

PATTERNS = ("sequential", "strided", "random", "zipf")


@dataclass
class AccessTrace:
    """A memory access trace plus the access-to-instruction ratio."""

    addresses: np.ndarray  # uint64 byte addresses
    ops: np.ndarray  # uint8: 0 = read, 1 = write
    accesses_per_instruction: float = DEFAULT_ACCESSES_PER_INSTRUCTION

    def __post_init__(self):
        self.addresses = np.asarray(self.addresses, dtype=np.uint64)
        self.ops = np.asarray(self.ops, dtype=np.uint8)
        if self.addresses.shape != self.ops.shape:
            raise ValueError("addresses and ops must have equal length")

    def __len__(self) -> int:
        return int(self.addresses.size)

    def page_numbers(self) -> np.ndarray:
        return self.addresses >> np.uint64(PAGE_SHIFT)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AccessTrace):
            return NotImplemented
        return (np.array_equal(self.addresses, other.addresses)
                and np.array_equal(self.ops, other.ops))


def save_trace(trace: AccessTrace, path, fmt: str = "text") -> None:
    if fmt == "text":
        with open(path, "w") as f:
            for addr, op in zip(trace.addresses.tolist(), trace.ops.tolist()):
                f.write(f"{addr:x} {'w' if op else 'r'}\n")
    elif fmt == "binary":
        rec = np.empty(len(trace), dtype=_RECORD_DTYPE)
        rec["addr"] = trace.addresses
        rec["op"] = trace.ops
        with open(path, "wb") as f:
            f.write(BINARY_MAGIC)
            rec.tofile(f)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


def load_trace(path, accesses_per_instruction: float = DEFAULT_ACCESSES_PER_INSTRUCTION) -> AccessTrace:
    """Load a trace, sniffing the binary magic; validates every text line."""
    with open(path, "rb") as f:
        head = f.read(len(BINARY_MAGIC))
        if head == BINARY_MAGIC:
            rec = np.fromfile(f, dtype=_RECORD_DTYPE)
            return AccessTrace(rec["addr"].copy(), rec["op"].copy(), accesses_per_instruction)
    addrs: list[int] = []
    ops: list[int] = []
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise TraceFormatError(path, line_no, f"expected '<hex addr> <r|w>', got {body!r}")
            try:
                addr = int(parts[0], 16)
            except ValueError:
                raise TraceFormatError(path, line_no, f"bad hex address {parts[0]!r}") from None
            if parts[1] not in ("r", "w"):
                raise TraceFormatError(path, line_no, f"op must be r or w, got {parts[1]!r}")
            addrs.append(addr)
            ops.append(1 if parts[1] == "w" else 0)
    return AccessTrace(np.array(addrs, dtype=np.uint64),
                       np.array(ops, dtype=np.uint8), accesses_per_instruction)


def validate_trace(trace: AccessTrace, pt: PageTable) -> int | None:
    """Index of the first access outside the mapping, or None if clean."""
    ppns = pt.ppn_map
    for i, vpn in enumerate(trace.page_numbers().tolist()):
        if vpn not in ppns:
            return i
    return None


def generate_trace(pt: PageTable, pattern: str, length: int, seed: int,
                   accesses_per_instruction: float = DEFAULT_ACCESSES_PER_INSTRUCTION,
                   stride: int = 8, zipf_exponent: float = 1.2,
                   burst: int = 64, start_bias: float = 1.0, dwell: int = 1,
                   write_fraction: float = 0.25) -> AccessTrace:
    """Generate a synthetic trace over a mapping's pages.

    sequential   walks every chunk in ascending order, wrapping until
                 `length` accesses are emitted.
    strided      visits every `stride`-th mapped page, wrapping.
    random       uniform over mapped pages.
    zipf         chunk popularity follows a zipf law over a seed-shuffled
                 chunk order; each burst walks a run of pages inside one hot
                 chunk, which is what gives the aligned-lookup predictor
                 something to predict.  `start_bias` > 1 skews burst starts
                 toward chunk prefixes, and `dwell` re-walks each burst that
                 many times (inner-loop behavior); both raise page reuse.
    """
    if length < 1:
        raise ValueError("trace length must be >= 1")
    if len(pt) == 0:
        raise ValueError("cannot generate a trace over an empty mapping")
    rng = np.random.default_rng(seed)
    vpns = np.array(pt.vpns(), dtype=np.uint64)
    n = vpns.size

    if pattern == "sequential":
        reps = -(-length // n)
        pages = np.tile(vpns, reps)[:length]
    elif pattern == "strided":
        idx = (np.arange(length, dtype=np.uint64) * np.uint64(stride)) % np.uint64(n)
        pages = vpns[idx]
    elif pattern == "random":
        pages = vpns[rng.integers(0, n, size=length)]
    elif pattern == "zipf":
        chunks = scan_contiguity_chunks(pt)
        order = rng.permutation(len(chunks))
        ranks = np.empty(len(chunks))
        ranks[order] = np.arange(1, len(chunks) + 1)
        # Page-weighted: a chunk's share scales with its size as well as its
        # zipf rank, so per-page popularity is rank-skewed but a large chunk
        # is not colder per page than a small one.
        sizes = np.array([c.size for c in chunks], dtype=float)
        weights = sizes * ranks ** -zipf_exponent
        weights /= weights.sum()
        n_bursts = -(-length // max(1, burst * dwell))
        picks = rng.choice(len(chunks), size=n_bursts, p=weights)
        starts = rng.random(n_bursts)
        parts = []
        emitted = 0
        for ci, s in zip(picks.tolist(), starts.tolist()):
            c = chunks[ci]
            # Burst-quantized start offsets make revisits of a hot chunk
            # retouch the same pages, i.e. actual temporal locality.
            off = (int(s ** start_bias * c.size) // burst) * burst
            run = min(burst, c.size - off)
            pages_run = np.arange(c.start_vpn + off, c.start_vpn + off + run, dtype=np.uint64)
            if dwell > 1:
                pages_run = np.tile(pages_run, dwell)
            parts.append(pages_run[: length - emitted])
            emitted += parts[-1].size
            if emitted >= length:
                break
        pages = np.concatenate(parts)
        while pages.size < length:  # short chunks can under-fill; top up hot pages
            pages = np.concatenate([pages, pages[: length - pages.size]])
        pages = pages[:length]
    else:
        raise ValueError(f"unknown trace pattern {pattern!r}; expected one of {PATTERNS}")

    ops = (rng.random(length) < write_fraction).astype(np.uint8)
    return AccessTrace(pages << np.uint64(PAGE_SHIFT), ops, accesses_per_instruction)
