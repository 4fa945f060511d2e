"""Shared fixtures: session-cached polytopes, censuses and certificates.

Heavy objects (the 120-cell, the dodecahedral census, the chain
certificates) are built once per session; the library's own caches make
repeats cheap, but the fixtures keep the dependency explicit.
"""
from __future__ import annotations

import random
from typing import List, Optional

import pytest

from racover import gf2
from racover.colouring import Colouring
from racover.pipeline import Certificate, _dodecahedron_census, certify
from racover.polytopes import Polytope, make_120cell, make_dodecahedron, make_polygon
from racover.search import EnumerationResult


@pytest.fixture(scope="session")
def pentagon() -> Polytope:
    return make_polygon(5)


@pytest.fixture(scope="session")
def dodecahedron() -> Polytope:
    return make_dodecahedron()


@pytest.fixture(scope="session")
def z120() -> Polytope:
    return make_120cell()


@pytest.fixture(scope="session")
def census() -> EnumerationResult:
    return _dodecahedron_census()


@pytest.fixture(scope="session")
def cert1() -> Certificate:
    return certify(1)


def random_proper_colouring(P: Polytope, rank: int, rng: random.Random) -> Colouring:
    """A uniformly seeded (not uniformly distributed) proper colouring.

    Randomized first-solution backtracking: facet order and palette order
    are shuffled, then the first proper completion wins.  Deterministic
    for a given rng state; raises if no proper colouring exists at all.
    """
    m = P.facet_count
    order = list(range(m))
    rng.shuffle(order)
    palette = list(range(1, 1 << rank))
    vals: List[Optional[int]] = [None] * m

    def admissible(f: int, v: int) -> bool:
        for vertex in P.facet_vertices[f]:
            chosen = [vals[g] for g in P.vertices[vertex] if vals[g] is not None]
            if not gf2.independent(chosen + [v]):
                return False
        return True

    def rec(k: int) -> bool:
        if k == m:
            return True
        f = order[k]
        options = palette[:]
        rng.shuffle(options)
        for v in options:
            if admissible(f, v):
                vals[f] = v
                if rec(k + 1):
                    return True
                vals[f] = None
        return False

    if not rec(0):
        raise ValueError(f"no proper rank-{rank} colouring on {P!r}")
    return Colouring(P, rank, tuple(vals))  # type: ignore[arg-type]
