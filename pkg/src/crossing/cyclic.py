"""
Cyclic permutations of [m] and the two-star crossing numbers C_{sigma,tau}.

A cyclic permutation is stored as its successor array succ (succ[a] is the
element after a) and written as the sequence starting at 0. Labels are
0-based internally; cycle_string() prints them 1-based.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MIN_M, MAX_M = 3, 9


def _check_m(m: int) -> None:
    if not MIN_M <= m <= MAX_M:
        raise ValueError(f"m={m} outside the supported range {MIN_M}..{MAX_M}")


def sequence_to_succ(seq: np.ndarray) -> np.ndarray:
    """Successor arrays of the cyclic sequences in the rows of seq."""
    seq = np.atleast_2d(seq)
    succ = np.empty_like(seq)
    np.put_along_axis(succ, seq, np.roll(seq, -1, axis=1), axis=1)
    return succ


def succ_to_sequence(succ: np.ndarray) -> np.ndarray:
    """Canonical sequences (starting at 0) of the successor arrays in the rows of succ."""
    succ = np.atleast_2d(succ)
    N, m = succ.shape
    seq = np.zeros((N, m), dtype=succ.dtype)
    rows = np.arange(N)
    for k in range(1, m):
        seq[:, k] = succ[rows, seq[:, k - 1]]
    return seq


def invert(succ: np.ndarray) -> np.ndarray:
    """Successor arrays of the reversed cycles."""
    succ = np.atleast_2d(succ)
    inv = np.empty_like(succ)
    np.put_along_axis(inv, succ, np.broadcast_to(np.arange(succ.shape[1]), succ.shape), axis=1)
    return inv


def conjugate(pi: np.ndarray, succ: np.ndarray) -> np.ndarray:
    """pi sigma pi^{-1}: relabel every element a as pi[a]. Rows of pi and succ broadcast."""
    pi, succ = np.broadcast_arrays(np.atleast_2d(pi), np.atleast_2d(succ))
    out = np.empty_like(succ)
    np.put_along_axis(out, pi, np.take_along_axis(pi, succ, axis=1), axis=1)
    return out


@dataclass(frozen=True)
class CyclicSpace:
    """Z_m, the (m-1)! cyclic permutations of [m] in lexicographic order of their canonical sequences."""
    m: int

    def __post_init__(self):
        _check_m(self.m)

    @cached_property
    def sequences(self) -> np.ndarray:
        tails = np.array(list(itertools.permutations(range(1, self.m))), dtype=np.int64)
        return np.hstack([np.zeros((tails.shape[0], 1), dtype=np.int64), tails])

    @cached_property
    def succ(self) -> np.ndarray:
        return sequence_to_succ(self.sequences)

    @property
    def size(self) -> int:
        return self.sequences.shape[0]

    @cached_property
    def _powers(self) -> np.ndarray:
        return self.m ** np.arange(self.m, dtype=np.int64)

    @cached_property
    def _keys(self) -> Tuple[np.ndarray, np.ndarray]:
        keys = self.succ @ self._powers
        order = np.argsort(keys)
        return keys[order], order

    def index(self, succ: np.ndarray) -> np.ndarray:
        """Positions in Z_m of the successor arrays in the rows of succ."""
        keys = np.atleast_2d(succ) @ self._powers
        sorted_keys, order = self._keys
        pos = np.searchsorted(sorted_keys, keys)
        if np.any(pos >= sorted_keys.size) or np.any(sorted_keys[np.minimum(pos, sorted_keys.size - 1)] != keys):
            raise ValueError("not a single m-cycle")
        return order[pos]

    @cached_property
    def relabelings(self) -> np.ndarray:
        """Row i is the pi with pi sigma_i pi^{-1} = sigma_0 = (0, 1, .., m-1)."""
        pi = np.empty_like(self.sequences)
        np.put_along_axis(pi, self.sequences, np.broadcast_to(np.arange(self.m), pi.shape), axis=1)
        return pi

    @cached_property
    def inverse_index(self) -> np.ndarray:
        return self.index(invert(self.succ))

    def cycle_string(self, i: int) -> str:
        return "(" + ",".join(str(a + 1) for a in self.sequences[i]) + ")"


def enumerate_cyclic(m: int) -> List[Tuple[int, ...]]:
    """All (m-1)! cyclic permutations of [m] as 1-based sequences starting at 1, lexicographic."""
    return [tuple(int(a) + 1 for a in row) for row in CyclicSpace(m).sequences]


def _swaps(m: int) -> List[Tuple[int, int]]:
    return [(k, k + 1) for k in range(m - 1)] + [(m - 1, 0)]


@lru_cache(maxsize=None)
def swap_distances(m: int) -> np.ndarray:
    """
    Distance from sigma_0 to every element of Z_m in the graph whose edges are
    swaps of cyclically adjacent entries.
    """
    space = CyclicSpace(m)
    dist = np.full(space.size, -1, dtype=np.int64)
    dist[0] = 0
    frontier = space.sequences[:1]
    level = 0
    while frontier.shape[0]:
        level += 1
        moved = []
        for a, b in _swaps(m):
            nxt = frontier.copy()
            nxt[:, [a, b]] = nxt[:, [b, a]]
            moved.append(nxt)
        idx = np.unique(space.index(sequence_to_succ(np.vstack(moved))))
        idx = idx[dist[idx] < 0]
        dist[idx] = level
        frontier = space.sequences[idx]
    logger.debug("cyclic swap graph of Z_%d has diameter %d", m, int(dist.max()))
    return dist


def _as_succ(space: CyclicSpace, cycle: Sequence[int]) -> np.ndarray:
    seq = np.asarray(cycle, dtype=np.int64) - 1
    if seq.shape != (space.m,) or sorted(seq.tolist()) != list(range(space.m)):
        raise ValueError(f"{tuple(cycle)} is not a cyclic ordering of 1..{space.m}")
    return sequence_to_succ(seq)[0]


def star_crossing(sigma: Sequence[int], tau: Sequence[int]) -> int:
    """
    C_{sigma,tau}: fewest crossings of a drawing of K_{m,2} whose two centres
    have rotations sigma and tau, computed as the fewest cyclically adjacent
    swaps taking sigma to the reverse of tau.
    """
    if len(sigma) != len(tau):
        raise ValueError("rotations of different lengths")
    space = CyclicSpace(len(sigma))
    s, t = _as_succ(space, sigma), _as_succ(space, tau)
    pi = space.relabelings[space.index(s)[0]]
    target = conjugate(pi, invert(t))
    return int(swap_distances(space.m)[space.index(target)[0]])


def star_crossing_bruteforce(sigma: Sequence[int], tau: Sequence[int]) -> int:
    """
    The same count by breadth-first search over linear sequences, with every
    rotation of sigma as a source and every rotation of reversed tau as a
    target. Exponential; meant for m <= 6.
    """
    if len(sigma) != len(tau):
        raise ValueError("rotations of different lengths")
    m = len(sigma)
    _check_m(m)
    rotations = lambda s: {tuple(s[k:]) + tuple(s[:k]) for k in range(m)}  # noqa: E731
    sources = rotations(tuple(sigma))
    targets = rotations(tuple(reversed(tuple(tau))))
    seen = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        cur = queue.popleft()
        if cur in targets:
            return seen[cur]
        for a, b in _swaps(m):
            nxt = list(cur)
            nxt[a], nxt[b] = nxt[b], nxt[a]
            nxt = tuple(nxt)
            if nxt not in seen:
                seen[nxt] = seen[cur] + 1
                queue.append(nxt)
    raise ValueError("rotations are not orderings of the same elements")


def diagonal_crossings(m: int) -> int:
    """floor((m-1)^2 / 4), the value of C on the diagonal."""
    return (m - 1) ** 2 // 4
