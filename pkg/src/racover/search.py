"""Depth-first search engines over facet colourings.

Three searches share the same skeleton: enumerate all small-cover
colourings of a polytope, count chromatic colourings up to symmetry, and
complete a seeded partial colouring of the 120-cell to a fully odd-weight
one.  All are deterministic; budgets cut them off reproducibly by node
count and coarsely by wall clock.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from . import gf2
from .colouring import (
    Colouring,
    ColouringError,
    PartialColouring,
    automorphism_order,
    canonical_form,
    is_orientable,
    is_proper,
)
from .polytopes import Polytope, facet_subpolytope, symmetry_group

__all__ = [
    "SearchBudget",
    "BudgetError",
    "ClassRecord",
    "EnumerationResult",
    "ChromaticResult",
    "SearchOutcome",
    "enumerate_small_covers",
    "enumerate_chromatic_colourings",
    "seed_from_facet",
    "search_orientable_extension",
]


@dataclass(frozen=True)
class SearchBudget:
    """Node and wall-clock limits; parallel width is accepted for interface
    compatibility but the engines run single-threaded (see notes in the
    repository about determinism)."""

    nodes: int = 10 ** 8
    seconds: float = 1800.0
    parallel: int = 1

    def __post_init__(self):
        if self.nodes <= 0 or self.seconds <= 0 or self.parallel <= 0:
            raise ValueError("budget fields must be positive")


class BudgetError(Exception):
    """Internal signal that a budget ran out; callers see a flag instead."""


class _Meter:
    def __init__(self, budget: Optional[SearchBudget]):
        self.nodes = 0
        self._limit = budget.nodes if budget else None
        self._t0 = time.monotonic()
        self._deadline = self._t0 + budget.seconds if budget else None

    def tick(self) -> None:
        self.nodes += 1
        if self._limit is not None and self.nodes > self._limit:
            raise BudgetError
        # time checks are amortized; the node limit provides hard determinism
        if (
            self._deadline is not None
            and self.nodes % 4096 == 0
            and time.monotonic() > self._deadline
        ):
            raise BudgetError

    @property
    def seconds(self) -> float:
        return time.monotonic() - self._t0


@dataclass(frozen=True)
class ClassRecord:
    """One equivalence class: representative, orientability, symmetry order."""

    colouring: Colouring
    orientable: bool
    automorphisms: int


@dataclass(frozen=True)
class EnumerationResult:
    classes: Tuple[ClassRecord, ...]
    complete: bool
    nodes: int
    seconds: float


@dataclass(frozen=True)
class ChromaticResult:
    """`count` is the number of proper k-colourings distinct up to renaming
    the colours; `orbit_count` additionally identifies colourings related
    by a symmetry of the polytope, so it never exceeds `count`."""

    count: int
    orbit_count: int
    complete: bool
    nodes: int
    seconds: float
    representatives: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class SearchOutcome:
    """Completion search result; `status` separates a fruitless exhaustive
    sweep ("exhausted") from one the budget interrupted ("budget-out")."""

    status: str
    colouring: Optional[Colouring]
    nodes: int
    seconds: float


def enumerate_small_covers(
    P: Polytope, budget: Optional[SearchBudget] = None
) -> EnumerationResult:
    """All proper GF(2)^n-colourings of the n-polytope P up to equivalence.

    Depth-first over facets in index order.  The facets of the first vertex
    are pinned to e_1, ..., e_n, which loses no classes (any proper
    colouring can be moved there by a linear map) and removes the GL(n)
    factor from the search; remaining duplicates fall to canonical-form
    deduplication.
    """
    n = P.dimension
    m = P.facet_count
    meter = _Meter(budget)
    colours: List[Optional[int]] = [None] * m
    for k, f in enumerate(P.vertices[0]):
        colours[f] = 1 << k
    rest = [f for f in range(m) if colours[f] is None]

    seen: Set[bytes] = set()
    records: List[ClassRecord] = []

    def feasible(f: int, v: int) -> bool:
        for vi in P.facet_vertices[f]:
            vec = [v]
            for g in P.vertices[vi]:
                if g != f and colours[g] is not None:
                    vec.append(colours[g])  # type: ignore[arg-type]
            if not gf2.independent(vec):
                return False
        return True

    def rec(idx: int) -> None:
        if idx == len(rest):
            lam = Colouring(P, n, tuple(colours))  # type: ignore[arg-type]
            key = canonical_form(P, lam)
            if key not in seen:
                seen.add(key)
                records.append(
                    ClassRecord(
                        lam,
                        is_orientable(P, lam) is not None,
                        automorphism_order(P, lam),
                    )
                )
            return
        f = rest[idx]
        for v in range(1, 1 << n):
            meter.tick()
            if feasible(f, v):
                colours[f] = v
                rec(idx + 1)
                colours[f] = None

    complete = True
    try:
        rec(0)
    except BudgetError:
        complete = False
    return EnumerationResult(tuple(records), complete, meter.nodes, meter.seconds)


def _greedy_order(P: Polytope, start: Sequence[int]) -> List[int]:
    """Static facet order: given ones first, then repeatedly the facet with
    most already-ordered neighbours (ties to lowest index)."""
    m = P.facet_count
    placed = [False] * m
    scores = [0] * m
    order = list(start)
    for f in order:
        placed[f] = True
    for f in order:
        for g in P.neighbours[f]:
            scores[g] += 1
    for _ in range(m - len(order)):
        best = max(
            (f for f in range(m) if not placed[f]), key=lambda f: (scores[f], -f)
        )
        order.append(best)
        placed[best] = True
        for g in P.neighbours[best]:
            scores[g] += 1
    return order


def enumerate_chromatic_colourings(
    P: Polytope, k: int, budget: Optional[SearchBudget] = None
) -> ChromaticResult:
    """Count proper k-colourings of the facets at both quotient stages.

    Colourings that differ by a renaming of the colours are counted once
    (`count`); colourings additionally related by a symmetry of P collapse
    further to `orbit_count`.  The first vertex's facets are pinned to
    colours 1..n, which meets every renaming class: the residual renaming
    freedom only permutes the colours beyond n, and first-occurrence
    normalisation cancels it, so each class is recorded exactly once.  On
    budget exhaustion both counts cover the portion swept so far and
    `complete` is false.
    """
    n = P.dimension
    if k < n:
        raise ValueError(f"{k} colours cannot colour an {n}-polytope (clique bound)")
    m = P.facet_count
    syms = symmetry_group(P)
    meter = _Meter(budget)

    assign = [0] * m
    v0 = P.vertices[0]
    for i, f in enumerate(v0):
        assign[f] = i + 1
    order = _greedy_order(P, v0)[n:]

    classes: Dict[bytes, Tuple[int, ...]] = {}

    def norm(seq: Sequence[int]) -> bytes:
        ren: Dict[int, int] = {}
        out = bytearray()
        for c in seq:
            r = ren.get(c)
            if r is None:
                ren[c] = r = len(ren) + 1
            out.append(r)
        return bytes(out)

    def rec(idx: int) -> None:
        if idx == len(order):
            classes.setdefault(norm(assign), tuple(assign))
            return
        f = order[idx]
        used = 0
        for g in P.neighbours[f]:
            used |= 1 << assign[g]
        for c in range(1, k + 1):
            meter.tick()
            if not used >> c & 1:
                assign[f] = c
                rec(idx + 1)
                assign[f] = 0

    complete = True
    try:
        rec(0)
    except BudgetError:
        complete = False

    # Group orbit: the symmetry images of any one member reach the whole
    # orbit of its class, so one sweep per unvisited class suffices.
    rem = set(classes)
    orbit_count = 0
    for key in sorted(classes):
        if key not in rem:
            continue
        orbit_count += 1
        rep = classes[key]
        for sig in syms:
            rem.discard(norm([rep[sig[j]] for j in range(m)]))
    reps = tuple(classes[key] for key in sorted(classes))
    return ChromaticResult(
        len(classes), orbit_count, complete, meter.nodes, meter.seconds, reps
    )


def seed_from_facet(Z: Polytope, F0: int, mu: Colouring, rank: int = 5) -> PartialColouring:
    """Seed a rank-5 (or rank-4) search from a colouring of one facet.

    The facet itself is coloured by the top basis vector; each neighbour
    takes its trace colour v padded with a top coordinate that forces odd
    weight (1 exactly when v has even weight).  The spare fourth coordinate
    stays zero on all 13 seeded facets.
    """
    sub, inc = facet_subpolytope(Z, F0)
    if not mu.polytope.same_structure(sub):
        raise ColouringError("seed colouring does not live on the chosen facet")
    if mu.rank != 3:
        raise ColouringError("facet colouring must have rank 3")
    if not is_proper(sub, mu):
        raise ColouringError("facet colouring is not proper")
    if rank not in (4, 5):
        raise ColouringError("seed rank must be 4 or 5")
    top = 1 << (rank - 1)
    vals: List[Optional[int]] = [None] * Z.facet_count
    vals[F0] = top
    for j, g in enumerate(inc):
        v = mu.colours[j]
        vals[g] = v | (gf2.parity(v) ^ 1) * top
    return PartialColouring(Z, rank, tuple(vals))


def search_orientable_extension(
    Z: Polytope, seed: PartialColouring, budget: Optional[SearchBudget] = None
) -> SearchOutcome:
    """Complete the seed to a proper colouring with every colour odd-weight.

    Odd weight everywhere makes the coordinate-sum covector orient the
    cover, so any completion is orientable by construction.  The palette is
    the 2^(rank-1) odd-weight vectors; facets are chosen most-constrained
    first (most coloured neighbours, ties to lowest index); properness is
    enforced through per-vertex span bitmasks, so testing a candidate is
    one bit probe per incident vertex.
    """
    rank = seed.rank
    colours: List[Optional[int]] = list(seed.colours)
    for c in colours:
        if c is not None and not gf2.parity(c):
            raise ColouringError("seed contains an even-weight colour")
    for v in Z.vertices:
        vec = [colours[g] for g in v if colours[g] is not None]
        if not gf2.independent(vec):  # type: ignore[arg-type]
            raise ColouringError(f"seed already breaks properness at vertex {v}")

    palette = [v for v in range(1, 1 << rank) if gf2.parity(v)]
    meter = _Meter(budget)
    m = Z.facet_count

    # spans[vi] is the bitmask of the GF(2)-span of the colours already
    # assigned around vertex vi; a candidate v is admissible iff bit v is off
    spans = []
    for v in Z.vertices:
        vec = [colours[g] for g in v if colours[g] is not None]
        mask = 0
        for x in gf2.span(vec):  # type: ignore[arg-type]
            mask |= 1 << x
        spans.append(mask)

    unassigned = [f for f in range(m) if colours[f] is None]
    coloured_nb = [
        sum(1 for g in Z.neighbours[f] if colours[g] is not None) for f in range(m)
    ]

    def assign(f: int, v: int) -> List[Tuple[int, int]]:
        undo = []
        colours[f] = v
        for g in Z.neighbours[f]:
            coloured_nb[g] += 1
        for vi in Z.facet_vertices[f]:
            old = spans[vi]
            grown = old
            probe = old
            while probe:
                low = probe & -probe
                grown |= 1 << ((low.bit_length() - 1) ^ v)
                probe ^= low
            spans[vi] = grown
            undo.append((vi, old))
        return undo

    def unassign(f: int, undo: List[Tuple[int, int]]) -> None:
        colours[f] = None
        for g in Z.neighbours[f]:
            coloured_nb[g] -= 1
        for vi, old in undo:
            spans[vi] = old

    result: List[Colouring] = []

    def rec(depth: int) -> bool:
        if depth == len(unassigned):
            lam = Colouring(Z, rank, tuple(colours))  # type: ignore[arg-type]
            if not is_proper(Z, lam):
                raise AssertionError("incremental properness bookkeeping failed")
            result.append(lam)
            return True
        f = max(
            (g for g in unassigned if colours[g] is None),
            key=lambda g: (coloured_nb[g], -g),
        )
        vertices = Z.facet_vertices[f]
        for v in palette:
            meter.tick()
            if any(spans[vi] >> v & 1 for vi in vertices):
                continue
            undo = assign(f, v)
            if rec(depth + 1):
                return True
            unassign(f, undo)
        return False

    try:
        hit = rec(0)
    except BudgetError:
        return SearchOutcome("budget-out", None, meter.nodes, meter.seconds)
    if hit:
        lam = result[0]
        assert is_orientable(Z, lam) is not None
        return SearchOutcome("found", lam, meter.nodes, meter.seconds)
    return SearchOutcome("exhausted", None, meter.nodes, meter.seconds)
