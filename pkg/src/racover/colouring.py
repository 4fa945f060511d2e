"""Facet colourings by vectors of GF(2)^s and their basic calculus.

A colour is a bit-packed int: coordinate i of the vector is bit i-1, so
coordinate 1 is the least significant bit and the tuple (v1, ..., vs) is
encoded as v1*2^0 + ... + vs*2^(s-1).  Properness asks the colours at each
vertex to be linearly independent; orientability of the associated cover is
equivalent to a covector hitting 1 on every colour.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import gf2
from .polytopes import (
    Polytope,
    facet_subpolytope,
    symmetry_group,
)

__all__ = [
    "ColouringError",
    "Functional",
    "Colouring",
    "PartialColouring",
    "is_proper",
    "image_dimension",
    "is_orientable",
    "non_orientability_witness",
    "from_k_colouring",
    "induced_colouring",
    "extend_colouring_generic",
    "equivalent",
    "canonical_form",
    "automorphism_order",
    "transport",
]


class ColouringError(ValueError):
    pass


@dataclass(frozen=True)
class Functional:
    """Covector on the colour space; evaluation is bit-mask parity."""

    covector: int

    def __call__(self, v: int) -> int:
        return gf2.parity(self.covector & v)


@dataclass(frozen=True)
class Colouring:
    """Total assignment of GF(2)^rank vectors to the facets of a polytope.

    Zero colours are representable (they arise on error paths and in
    degenerate inputs) but can never be part of a proper colouring.
    """

    polytope: Polytope
    rank: int
    colours: Tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ColouringError("rank must be at least 1")
        if len(self.colours) != self.polytope.facet_count:
            raise ColouringError("one colour per facet required")
        for c in self.colours:
            if not 0 <= c < 1 << self.rank:
                raise ColouringError(f"colour {c} outside GF(2)^{self.rank}")


@dataclass(frozen=True)
class PartialColouring:
    """Colouring with gaps; proper at every fully assigned vertex."""

    polytope: Polytope
    rank: int
    colours: Tuple[Optional[int], ...]

    def __post_init__(self):
        if self.rank < 1:
            raise ColouringError("rank must be at least 1")
        if len(self.colours) != self.polytope.facet_count:
            raise ColouringError("one entry per facet required")
        for c in self.colours:
            if c is not None and not 0 <= c < 1 << self.rank:
                raise ColouringError(f"colour {c} outside GF(2)^{self.rank}")
        for v in self.polytope.vertices:
            vals = [self.colours[i] for i in v]
            if None not in vals and not gf2.independent(vals):  # type: ignore[arg-type]
                raise ColouringError(f"dependent colours at vertex {v}")

    @property
    def assigned(self) -> int:
        return sum(1 for c in self.colours if c is not None)

    def to_colouring(self) -> Colouring:
        if any(c is None for c in self.colours):
            raise ColouringError("colouring is not total")
        return Colouring(self.polytope, self.rank, tuple(self.colours))  # type: ignore[arg-type]


def is_proper(P: Polytope, lam: Colouring) -> bool:
    """True when the colours at every vertex are linearly independent."""
    cols = lam.colours
    return all(gf2.independent([cols[i] for i in v]) for v in P.vertices)


def image_dimension(lam: Colouring) -> int:
    """Dimension of the span of all colours; the cover degree is 2^this."""
    return gf2.rank(lam.colours)


def _require_proper(P: Polytope, lam: Colouring) -> None:
    if not is_proper(P, lam):
        raise ColouringError("colouring is not proper")


def is_orientable(P: Polytope, lam: Colouring) -> Optional[Functional]:
    """A covector evaluating to 1 on every colour, or None if none exists.

    When the colours span their space, existence is equivalent to
    orientability of the associated manifold cover.
    """
    _require_proper(P, lam)
    x = gf2.solve_all_ones(lam.colours)
    return None if x is None else Functional(x)


def non_orientability_witness(
    P: Polytope, lam: Colouring
) -> Optional[Tuple[int, int, int]]:
    """Three facets with zero colour sum, if any.

    Such a triple rules out an orienting covector; its absence decides
    nothing.
    """
    where: Dict[int, int] = {}
    for i, c in enumerate(lam.colours):
        where.setdefault(c, i)
    m = len(lam.colours)
    for i in range(m):
        for j in range(i + 1, m):
            k = where.get(lam.colours[i] ^ lam.colours[j])
            if k is not None and k > j:
                return (i, j, k)
    return None


def from_k_colouring(P: Polytope, assignment: Sequence[int]) -> Colouring:
    """Lift a chromatic k-colouring to GF(2)^k by sending colour i to e_i."""
    k = max(assignment, default=0)
    for i, a in enumerate(assignment):
        if a < 1:
            raise ColouringError(f"chromatic colour {a} at facet {i} is not positive")
    for i, j in P.adjacency:
        if assignment[i] == assignment[j]:
            raise ColouringError(f"adjacent facets {i},{j} share chromatic colour")
    return Colouring(P, k, tuple(1 << (a - 1) for a in assignment))


def induced_colouring(P: Polytope, F: int, lam: Colouring) -> Colouring:
    """The colouring a proper lam induces on the facet F.

    Values live in the quotient by the colour of F, written in the echelon
    complement: the pivot coordinate of lam_F (its lowest set bit) is
    eliminated and the remaining coordinates close up in increasing order.
    Properness is inherited, so the result is again proper, of rank s - 1.
    """
    _require_proper(P, lam)
    sub, inc = facet_subpolytope(P, F)
    lf = lam.colours[F]
    p = (lf & -lf).bit_length() - 1
    low = (1 << p) - 1
    vals = []
    for g in inc:
        v = lam.colours[g]
        if v >> p & 1:
            v ^= lf
        vals.append((v & low) | (v >> (p + 1)) << p)
    out = Colouring(sub, lam.rank - 1, tuple(vals))
    if not is_proper(sub, out):
        raise ColouringError("induced colouring failed to be proper")
    return out


def extend_colouring_generic(P: Polytope, F: int, lam_sub: Colouring) -> Colouring:
    """Extend a proper colouring of the facet F to an orientable one of P.

    The target space is GF(2) + GF(2)^s + GF(2)^f where s is the input rank
    and f counts the facets of P not touching F.  Facet F gets (1, 0, 0);
    a neighbour G gets (w+1, v, 0) with v the colour of its trace and w the
    parity of v; the i-th remaining facet gets (0, 0, e_i).  Every colour
    has odd weight, so the result is orientable, and it induces the input
    back on F up to equivalence.
    """
    sub, inc = facet_subpolytope(P, F)
    if not lam_sub.polytope.same_structure(sub):
        raise ColouringError("colouring does not live on the facet subpolytope")
    if not is_proper(sub, lam_sub):
        raise ColouringError("colouring of the facet is not proper")
    s = lam_sub.rank
    others = [
        g
        for g in range(P.facet_count)
        if g != F and not P.adjacency_masks[F] >> g & 1
    ]
    rank = 1 + s + len(others)
    vals = [0] * P.facet_count
    vals[F] = 1
    for j, g in enumerate(inc):
        v = lam_sub.colours[j]
        vals[g] = (gf2.parity(v) ^ 1) | v << 1
    for i, g in enumerate(others):
        vals[g] = 1 << (1 + s + i)
    out = Colouring(P, rank, tuple(vals))
    if not is_proper(P, out):
        raise ColouringError("generic extension failed to be proper")
    return out


def _normal_sequence(seq: Sequence[int]) -> Tuple[int, ...]:
    """Greedy re-echelonization: the j-th new independent colour becomes
    e_j and every colour is rewritten in the resulting basis.  The output
    is a complete invariant for the action of invertible linear maps."""
    pivots: List[Tuple[int, int]] = []
    nxt = 0
    out = []
    for v in seq:
        im = 0
        for p, pim in pivots:
            if v & (p & -p):
                v ^= p
                im ^= pim
        if v:
            e = 1 << nxt
            nxt += 1
            pivots.append((v, e ^ im))
            im = e
        out.append(im)
    return tuple(out)


def canonical_form(P: Polytope, lam: Colouring) -> bytes:
    """Class invariant: minimal normal sequence over all symmetries of P.

    Equal byte strings exactly characterize equivalence (an invertible map
    of the images combined with a symmetry of the polytope).
    """
    _require_proper(P, lam)
    cols = lam.colours
    m = len(cols)
    best: Optional[Tuple[int, ...]] = None
    for sigma in symmetry_group(P):
        cand = _normal_sequence([cols[sigma[j]] for j in range(m)])
        if best is None or cand < best:
            best = cand
    assert best is not None
    return " ".join(map(str, best)).encode()


def equivalent(P: Polytope, lam1: Colouring, lam2: Colouring) -> bool:
    """Same class under symmetries of P and invertible maps of the image."""
    return canonical_form(P, lam1) == canonical_form(P, lam2)


def automorphism_order(P: Polytope, lam: Colouring) -> int:
    """Order of the group of symmetries fixing the colouring up to a linear map.

    A symmetry sigma qualifies when lam_F -> lam_{sigma F} extends to a
    well-defined (hence invertible) linear map of the image.
    """
    _require_proper(P, lam)
    cols = lam.colours
    count = 0
    for sigma in symmetry_group(P):
        pairs: List[Tuple[int, int]] = []
        ok = True
        for f in range(len(cols)):
            v, w = cols[f], cols[sigma[f]]
            for a, b in pairs:
                if v & (a & -a):
                    v ^= a
                    w ^= b
            if v:
                pairs.append((v, w))
            elif w:
                ok = False
                break
        if ok:
            count += 1
    return count


def transport(lam: Colouring, perm: Sequence[int], Q: Polytope) -> Colouring:
    """Move a colouring along a facet bijection onto Q."""
    if len(perm) != len(lam.colours) or Q.facet_count != len(perm):
        raise ColouringError("facet map does not fit the polytopes")
    vals = [0] * Q.facet_count
    for f, c in enumerate(lam.colours):
        vals[perm[f]] = c
    return Colouring(Q, lam.rank, tuple(vals))
