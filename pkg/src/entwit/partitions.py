"""Partitions of m parties with a cap k on block size.

A k-partition splits the party set {1..m} into disjoint nonempty blocks,
each of at most k parties; k is the partition's diameter. These index the
factorizable states whose convex hull is the k-separable set.

Canonical form: inside a block parties ascend, and blocks are ordered by
their least element, so structural equality is partition equality.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PartitionSpec:
    """A partition of the parties {1..n_parties} into disjoint blocks."""

    blocks: tuple[tuple[int, ...], ...]
    n_parties: int

    def __post_init__(self):
        seen: set[int] = set()
        for blk in self.blocks:
            if not blk:
                raise ValueError("empty block")
            if seen & set(blk):
                raise ValueError("blocks are not disjoint")
            seen |= set(blk)
        if seen != set(range(1, self.n_parties + 1)):
            raise ValueError(f"blocks must cover 1..{self.n_parties}")

    @classmethod
    def from_blocks(cls, blocks, n_parties: int | None = None) -> "PartitionSpec":
        """Build a canonical partition from any iterable of party groups."""
        blks = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        if n_parties is None:
            n_parties = sum(len(b) for b in blks)
        return cls(blks, n_parties)

    @property
    def diameter(self) -> int:
        return max(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(str(p) for p in blk) for blk in self.blocks)


def diameter(p: PartitionSpec) -> int:
    """Largest block size of the partition."""
    return p.diameter


def refines(p: PartitionSpec, q: PartitionSpec) -> bool:
    """True iff every block of p lies inside some block of q."""
    if p.n_parties != q.n_parties:
        raise ValueError("partitions of different party counts")
    qsets = [set(b) for b in q.blocks]
    return all(any(set(b) <= qs for qs in qsets) for b in p.blocks)


def enumerate_partitions(m: int, k: int) -> list[PartitionSpec]:
    """All partitions of {1..m} with block sizes <= k, canonically ordered.

    Enumerates restricted-growth strings with a block-size cap; the output
    order is the lexicographic order of those strings and is stable.
    """
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    out: list[PartitionSpec] = []
    assign = [0] * m
    counts = [0] * (m + 1)

    def rec(i: int, n_blocks: int) -> None:
        if i == m:
            blocks: list[list[int]] = [[] for _ in range(n_blocks)]
            for party, b in enumerate(assign):
                blocks[b].append(party + 1)
            out.append(PartitionSpec(tuple(tuple(b) for b in blocks), m))
            return
        for b in range(n_blocks + 1):
            if b < n_blocks and counts[b] == k:
                continue
            assign[i] = b
            counts[b] += 1
            rec(i + 1, n_blocks + (1 if b == n_blocks else 0))
            counts[b] -= 1

    rec(0, 0)
    return out


def parse_partition(text: str, n_parties: int) -> PartitionSpec:
    """Parse the textual form "1|2,3" (pipe between blocks, comma inside)."""
    try:
        blocks = [[int(p) for p in blk.split(",")] for blk in text.split("|")]
    except ValueError as exc:
        raise ValueError(f"malformed partition {text!r}") from exc
    return PartitionSpec.from_blocks(blocks, n_parties)
