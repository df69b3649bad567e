"""Bitmask helpers for subsets of ``{0, ..., n-1}``."""

from __future__ import annotations

from typing import Iterable, Iterator

MAX_N = 16


def mask_of(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def full(n: int) -> int:
    return (1 << n) - 1


def format_set(mask: int, one_based: bool = True) -> str:
    off = 1 if one_based else 0
    return "{" + ",".join(str(v + off) for v in members(mask)) + "}"


def check_n(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise ValueError(f"ground set size must be in [0, {MAX_N}], got {n}")


class SizeBoundError(ValueError):
    """Input exceeds an enumeration bound."""


def check_bound(n: int, bound: int, what: str) -> None:
    if n > bound:
        raise SizeBoundError(f"{what} supports n <= {bound}, got n={n}")
