from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from src.errors import TooLarge


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1}; images[i] is the image of point i."""
    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        images = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: i -> self(other(i))."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def to_matrix(self) -> np.ndarray:
        """P with P[sigma(i), i] = 1, so P e_i = e_sigma(i)."""
        P = np.zeros((self.n, self.n), dtype=np.int64)
        P[list(self.images), list(range(self.n))] = 1
        return P

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))


@dataclass(frozen=True)
class GroupAction:
    """A permutation group on [n] given by generators; elements are never listed unless asked."""
    n: int
    generators: Tuple[Permutation, ...]

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Permutation) else Permutation(tuple(g)) for g in self.generators)
        for g in gens:
            if g.n != self.n:
                raise ValueError(f"generator acts on {g.n} points, expected {self.n}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def trivial(cls, n: int) -> "GroupAction":
        return cls(n, ())

    @classmethod
    def symmetric(cls, n: int) -> "GroupAction":
        if n < 2:
            return cls.trivial(n)
        gens = [Permutation.from_cycles(n, [[0, 1]])]
        if n > 2:
            gens.append(Permutation.from_cycles(n, [list(range(n))]))
        return cls(n, tuple(gens))

    @classmethod
    def from_dict(cls, payload: Dict) -> "GroupAction":
        n = int(payload["n"])
        return cls(n, tuple(Permutation(tuple(g)) for g in payload.get("generators", [])))

    @classmethod
    def from_json(cls, path: str | Path) -> "GroupAction":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> Dict:
        return {"n": self.n, "generators": [list(g.images) for g in self.generators]}

    def generator_array(self) -> np.ndarray:
        """(k, n) int array of generator images; (0, n) for the trivial group."""
        if not self.generators:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array([g.images for g in self.generators], dtype=np.int64)

    def elements(self, limit: int = 10_000) -> List[Permutation]:
        """Enumerate the generated group by BFS; TooLarge once `limit` is exceeded."""
        start = Permutation.identity(self.n)
        seen = {start.images}
        out = [start]
        queue = deque([start])
        while queue:
            g = queue.popleft()
            for s in self.generators:
                h = s.compose(g)
                if h.images not in seen:
                    seen.add(h.images)
                    out.append(h)
                    if len(out) > limit:
                        raise TooLarge(f"group order exceeds {limit}")
                    queue.append(h)
        return out

    def point_orbits(self) -> List[List[int]]:
        """Orbits of the action on points, each sorted, in order of smallest element."""
        label = [-1] * self.n
        orbits: List[List[int]] = []
        for i in range(self.n):
            if label[i] >= 0:
                continue
            label[i] = len(orbits)
            orbit = [i]
            queue = deque([i])
            while queue:
                a = queue.popleft()
                for g in self.generators:
                    b = g(a)
                    if label[b] < 0:
                        label[b] = label[i]
                        orbit.append(b)
                        queue.append(b)
            orbits.append(sorted(orbit))
        return orbits
