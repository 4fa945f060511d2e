"""Explicit manifold covers of coloured polytopes.

The cover attached to a proper colouring is a gluing complex: one copy of
the polytope per element of the colour span, with copy g glued to copy
g + colour(F) across each facet F.  This module builds that complex,
computes its invariants two independent ways, decomposes facet preimages
into hypersurface components, and cuts the cover open along one component.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import gf2
from .colouring import Colouring, induced_colouring, is_orientable, is_proper
from .polytopes import (
    Polytope,
    facet_subpolytope,
    orbifold_euler_characteristic,
)

__all__ = [
    "CoverError",
    "CoverComplex",
    "HypersurfaceComponent",
    "CutReport",
    "Volume",
    "build_cover",
    "cover_connected",
    "cover_euler_characteristic",
    "cover_orientable",
    "facet_preimage",
    "cut_along",
    "volume_of_cells",
    "volume",
    "V_DODECAHEDRON",
    "V_120CELL_PI2",
]

# Exact hyperbolic volume of the right-angled 120-cell as a multiple of
# pi^2 (Gauss-Bonnet); the dodecahedron has no closed form and is carried
# at the four-decimal precision used throughout the literature we target.
V_120CELL_PI2 = Fraction(34, 3)
V_DODECAHEDRON = 4.3062


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class CoverComplex:
    """Cover of `polytope` determined by `colouring`.

    `group` is the span of the colours, sorted ascending; there is one copy
    of the polytope per group element, and the gluing partner of (copy g,
    facet F) is copy g + colour(F).  `cells_per_copy` records how many
    atomic cells (dodecahedra, 120-cells) one copy of the base carries;
    it stays 1 unless the base is itself a connected-sum assembly.
    """

    polytope: Polytope
    colouring: Colouring
    group: Tuple[int, ...]
    cells_per_copy: int = 1

    @property
    def copies(self) -> int:
        return len(self.group)

    @property
    def cells(self) -> int:
        return self.copies * self.cells_per_copy

    def partner(self, g: int, F: int) -> int:
        return g ^ self.colouring.colours[F]


@dataclass(frozen=True)
class HypersurfaceComponent:
    """One connected component of a facet preimage.

    A piece is an unordered pair {g, g + colour(F)} of copies sharing the
    facet; it is named by the smaller element.  `subcover` is the cover of
    the facet subpolytope under the induced colouring that this component
    has been verified isomorphic to.
    """

    facet: int
    pieces: Tuple[int, ...]
    subcover: CoverComplex


@dataclass(frozen=True)
class Volume:
    """Hyperbolic volume of a cell count, exact where a closed form exists."""

    cells: int
    cell_type: str
    exact: str
    pi2_multiple: Optional[Fraction]
    numeric: float


@dataclass(frozen=True)
class CutReport:
    """What cutting a cover along one hypersurface component produced."""

    facet: int
    ambient_copies: int
    ambient_cells: int
    ambient_orientable: bool
    boundary_components: int
    boundary_cell_counts: Tuple[int, ...]
    boundary_orientable: Tuple[bool, ...]
    one_sided: bool
    ambient_volume: Volume
    boundary_volume: Volume
    ratio_exact: str
    ratio_numeric: float


def build_cover(P: Polytope, lam: Colouring, cells_per_copy: int = 1) -> CoverComplex:
    """The manifold cover of P under a proper colouring."""
    if not is_proper(P, lam):
        raise CoverError("cover requires a proper colouring")
    group = tuple(gf2.span(lam.colours))
    # a zero colour would make the facet gluing fix (g, F); properness
    # already excludes it, but the invariant is cheap to state
    assert all(c != 0 for c in lam.colours)
    return CoverComplex(P, lam, group, cells_per_copy)


def cover_connected(C: CoverComplex) -> bool:
    """Connectivity of the copy graph (copies joined by facet gluings)."""
    idx = {g: i for i, g in enumerate(C.group)}
    seen = {C.group[0]}
    frontier = [C.group[0]]
    while frontier:
        nxt = []
        for g in frontier:
            for c in C.colouring.colours:
                h = g ^ c
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen) == len(idx)


def _direct_euler_characteristic(C: CoverComplex) -> Fraction:
    """Euler characteristic from the glued complex's own face counts.

    A face of P given by the facet subset S has |G| / |span of S's colours|
    distinct copies in the cover, because copies g and g + colour(F) agree
    along every face inside F.  No properness assumption enters here, so
    this genuinely cross-checks the orbifold formula.
    """
    P = C.polytope
    n = P.dimension
    cols = C.colouring.colours
    subsets: List[set] = [set() for _ in range(n + 1)]
    for v in P.vertices:
        for k in range(1, n + 1):
            subsets[k].update(itertools.combinations(v, k))
    total = Fraction((-1) ** n * len(C.group))
    for k in range(1, n + 1):
        for S in subsets[k]:
            orbit = len(gf2.span([cols[f] for f in S]))
            total += Fraction((-1) ** (n - k) * len(C.group), orbit)
    return total


def cover_euler_characteristic(C: CoverComplex) -> int:
    """Euler characteristic of the cover, computed two ways.

    The product |G| * chi_orb(P) must be an integer and must agree with
    the direct face count of the glued complex; disagreement signals a
    non-manifold gluing and raises.
    """
    chi = len(C.group) * orbifold_euler_characteristic(C.polytope)
    if chi.denominator != 1:
        raise CoverError(f"non-integral Euler characteristic {chi}")
    direct = _direct_euler_characteristic(C)
    if direct != chi:
        raise CoverError(
            f"face count disagrees with orbifold formula: {direct} vs {chi}"
        )
    return int(chi)


def cover_orientable(C: CoverComplex) -> bool:
    """Orientability via the all-ones covector criterion on the colours."""
    return gf2.solve_all_ones(C.colouring.colours) is not None


def _quotient_projector(lf: int):
    """Coordinate projection V -> V/<lf> matching induced_colouring."""
    p = (lf & -lf).bit_length() - 1
    low = (1 << p) - 1

    def q(v: int) -> int:
        if v >> p & 1:
            v ^= lf
        return (v & low) | (v >> (p + 1)) << p

    return q


def facet_preimage(C: CoverComplex, F: int) -> List[HypersurfaceComponent]:
    """Decompose the preimage of facet F into hypersurface components.

    Pieces {g, g+colour(F)} are joined when they share a ridge of F, i.e.
    one copy of the first pair is a colour(G)-translate of the second pair
    for some facet G adjacent to F.  Every component is then certified
    isomorphic to the cover of the facet subpolytope under the induced
    colouring, via the explicit copy map g -> projection(g - basepoint).
    """
    P = C.polytope
    if P.dimension < 3:
        raise CoverError("facet preimages need a base of dimension at least 3")
    lam = C.colouring
    lf = lam.colours[F]

    def rep(g: int) -> int:
        return min(g, g ^ lf)

    pieces = sorted({rep(g) for g in C.group})
    nb_cols = [lam.colours[G] for G in P.neighbours[F]]

    remaining = set(pieces)
    components: List[List[int]] = []
    while remaining:
        start = min(remaining)
        comp = [start]
        remaining.remove(start)
        frontier = [start]
        while frontier:
            nxt = []
            for g in frontier:
                for c in nb_cols:
                    for h in (rep(g ^ c), rep(g ^ lf ^ c)):
                        if h in remaining:
                            remaining.remove(h)
                            comp.append(h)
                            nxt.append(h)
            frontier = nxt
        components.append(sorted(comp))

    sub, inc = facet_subpolytope(P, F)
    mu = induced_colouring(P, F, lam)
    q = _quotient_projector(lf)

    out = []
    for comp in components:
        subcover = build_cover(sub, mu, C.cells_per_copy)
        base = comp[0]
        phi: Dict[int, int] = {}
        for g in comp:
            phi[g] = q(g ^ base)
        if sorted(phi.values()) != list(subcover.group):
            raise CoverError("facet preimage component does not match induced cover")
        for g in comp:
            for j, G in enumerate(P.neighbours[F]):
                partner = rep(g ^ lam.colours[G])
                if phi[partner] != phi[g] ^ mu.colours[j]:
                    raise CoverError(
                        "facet preimage gluing disagrees with induced cover"
                    )
        out.append(HypersurfaceComponent(F, tuple(comp), subcover))
    return out


def cut_along(C: CoverComplex, S: HypersurfaceComponent) -> CutReport:
    """Cut the cover open along one facet-preimage component.

    Each piece of S is doubled into two boundary cells, one per side; the
    boundary cells (g, F) are then glued by g -> g + colour(G) across the
    ridges of F.  Sidedness is read off from the resulting component
    count and cross-checked against the induced colouring's orientability
    (one-sided exactly when the induced colouring is non-orientable inside
    an orientable ambient cover).
    """
    P = C.polytope
    lam = C.colouring
    F = S.facet
    if not cover_orientable(C):
        raise CoverError("cut requires an orientable ambient cover")
    expected = facet_preimage(C, F)
    if not any(comp.pieces == S.pieces for comp in expected):
        raise CoverError("hypersurface is not a component of the facet preimage")

    lf = lam.colours[F]
    cells = sorted({g for p in S.pieces for g in (p, p ^ lf)})
    if len(cells) != 2 * len(S.pieces):
        raise CoverError("piece list is not reduced")
    nb_cols = [lam.colours[G] for G in P.neighbours[F]]

    cell_set = set(cells)
    remaining = set(cells)
    comp_sizes = []
    while remaining:
        start = min(remaining)
        remaining.remove(start)
        size = 1
        frontier = [start]
        while frontier:
            nxt = []
            for g in frontier:
                for c in nb_cols:
                    h = g ^ c
                    if h in remaining:
                        remaining.remove(h)
                        size += 1
                        nxt.append(h)
                    elif h not in cell_set:
                        raise CoverError("boundary gluing left the cut locus")
            frontier = nxt
        comp_sizes.append(size)

    one_sided = len(comp_sizes) == 1
    sub, inc = facet_subpolytope(P, F)
    mu = induced_colouring(P, F, lam)
    if one_sided != (is_orientable(sub, mu) is None):
        raise CoverError("sidedness disagrees with induced-colouring orientability")

    # the boundary is the cover of the facet subpolytope under the
    # restriction colouring (full ambient colours of the neighbours)
    restriction = Colouring(sub, lam.rank, tuple(lam.colours[g] for g in inc))
    boundary_orientable = cover_orientable(build_cover(sub, restriction))

    sizes = tuple(s * C.cells_per_copy for s in comp_sizes)
    ambient_vol = volume_of_cells(C.cells, P.dimension)
    boundary_vol = volume_of_cells(
        sum(sizes), P.dimension - 1, polygon_edges=sub.facet_count
    )
    ratio_exact = _ratio_string(C.cells, sum(sizes), P.dimension)
    ratio_numeric = ambient_vol.numeric / boundary_vol.numeric
    return CutReport(
        facet=F,
        ambient_copies=C.copies,
        ambient_cells=C.cells,
        ambient_orientable=True,
        boundary_components=len(comp_sizes),
        boundary_cell_counts=sizes,
        boundary_orientable=tuple(boundary_orientable for _ in comp_sizes),
        one_sided=one_sided,
        ambient_volume=ambient_vol,
        boundary_volume=boundary_vol,
        ratio_exact=ratio_exact,
        ratio_numeric=ratio_numeric,
    )


def volume_of_cells(
    cells: int, dimension: int, polygon_edges: Optional[int] = None
) -> Volume:
    """Total volume of `cells` atomic right-angled cells of the dimension.

    Dimension 2 needs the polygon's edge count k (at least 5; smaller
    right-angled polygons do not exist), where the area is (k-4)*pi/2 by
    Gauss-Bonnet.
    """
    if dimension == 4:
        multiple = V_120CELL_PI2 * cells
        return Volume(
            cells,
            "120-cell",
            f"{cells}*V_Z",
            multiple,
            float(multiple) * math.pi ** 2,
        )
    if dimension == 3:
        return Volume(
            cells,
            "dodecahedron",
            f"{cells}*V_D",
            None,
            cells * V_DODECAHEDRON,
        )
    if dimension == 2 and polygon_edges is not None and polygon_edges >= 5:
        half = Fraction(polygon_edges - 4, 2) * cells
        return Volume(
            cells,
            f"{polygon_edges}-gon",
            f"({half})*pi",
            None,
            float(half) * math.pi,
        )
    raise CoverError(f"unknown base cell type in dimension {dimension}")


def _ratio_string(ambient_cells: int, boundary_cells: int, dimension: int) -> str:
    if dimension != 4:
        return f"{ambient_cells}:{boundary_cells}"
    r = Fraction(ambient_cells, boundary_cells)
    num = f"{r.numerator}*V_Z" if r.numerator != 1 else "V_Z"
    den = f"{r.denominator}*V_D" if r.denominator != 1 else "V_D"
    return f"{num}/{den}"


def volume(obj) -> Volume | Tuple[Volume, Volume]:
    """Volume of a cover, or the (ambient, boundary) pair of a cut."""
    if isinstance(obj, CoverComplex):
        edges = obj.polytope.facet_count if obj.polytope.dimension == 2 else None
        return volume_of_cells(obj.cells, obj.polytope.dimension, edges)
    if isinstance(obj, CutReport):
        return obj.ambient_volume, obj.boundary_volume
    raise CoverError(f"no volume defined for {type(obj).__name__}")
