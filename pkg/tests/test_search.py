"""Enumeration and completion searches against independent oracles."""
from __future__ import annotations

import itertools

import pytest

from racover.colouring import (
    Colouring,
    ColouringError,
    PartialColouring,
    canonical_form,
    is_orientable,
    is_proper,
)
from racover.polytopes import facet_subpolytope, find_isomorphism
from racover.search import (
    SearchBudget,
    enumerate_chromatic_colourings,
    enumerate_small_covers,
    search_orientable_extension,
    seed_from_facet,
)


def _pentagon_forms_by_brute_force(pentagon):
    """Every proper rank-2 colouring of the pentagon, 3^5 assignments."""
    forms = set()
    for cols in itertools.product((1, 2, 3), repeat=5):
        lam = Colouring(pentagon, 2, cols)
        if is_proper(pentagon, lam):
            forms.add(canonical_form(pentagon, lam))
    return forms


def test_pentagon_enumeration_matches_brute_force(pentagon):
    result = enumerate_small_covers(pentagon)
    assert result.complete
    got = {canonical_form(pentagon, r.colouring) for r in result.classes}
    assert got == _pentagon_forms_by_brute_force(pentagon)
    # the pentagon has a single class, and it is non-orientable
    assert len(result.classes) == 1
    assert not result.classes[0].orientable
    assert result.classes[0].automorphisms == 2


def test_enumeration_orientability_flags_are_recomputable(pentagon, census):
    for result in (enumerate_small_covers(pentagon), census):
        for rec in result.classes:
            P = rec.colouring.polytope
            assert is_proper(P, rec.colouring)
            assert rec.orientable == (is_orientable(P, rec.colouring) is not None)


def test_dodecahedron_census_shape(census):
    assert census.complete
    assert len(census.classes) == 25
    orientable = [i for i, r in enumerate(census.classes) if r.orientable]
    assert orientable == [5]
    orders = sorted(r.automorphisms for r in census.classes)
    assert orders == [1] * 14 + [2] * 7 + [4, 6, 12, 24]


def test_enumeration_budget_cuts_off(dodecahedron):
    result = enumerate_small_covers(dodecahedron, SearchBudget(nodes=100, seconds=60))
    assert not result.complete
    assert result.nodes <= 101
    assert len(result.classes) <= 25


def _labelled_count(P, k):
    """Backtracking count of proper chromatic k-colourings, the classical
    chromatic-polynomial value; independent of the class enumerator."""
    m = P.facet_count
    assign = [0] * m

    def rec(f: int) -> int:
        if f == m:
            return 1
        total = 0
        for c in range(1, k + 1):
            # facets are filled in index order, so only g < f are assigned
            if all(assign[g] != c for g in P.neighbours[f]):
                assign[f] = c
                total += rec(f + 1)
                assign[f] = 0
        return total

    return rec(0)


def test_pentagon_chromatic_counts(pentagon):
    result = enumerate_chromatic_colourings(pentagon, 3)
    assert result.complete
    assert result.count == 5
    assert result.orbit_count == 1
    assert len(result.representatives) == 5
    # every labelled colouring is a colour-renaming of exactly one class
    assert _labelled_count(pentagon, 3) == 30
    assert result.count * 6 == 30


def test_dodecahedron_chromatic_counts(dodecahedron):
    result = enumerate_chromatic_colourings(dodecahedron, 4)
    assert result.complete
    assert result.count == 10
    assert result.orbit_count == 1
    assert _labelled_count(dodecahedron, 4) == 240
    assert result.count * 24 == 240
    for rep in result.representatives:
        for i, j in dodecahedron.adjacency:
            assert rep[i] != rep[j]


def test_chromatic_budget_cuts_off(dodecahedron):
    result = enumerate_chromatic_colourings(
        dodecahedron, 4, SearchBudget(nodes=50, seconds=60)
    )
    assert not result.complete
    assert result.count <= 10


def test_seed_from_facet_structure(z120, census):
    lam = census.classes[0].colouring
    sub, inc = facet_subpolytope(z120, 0)
    psi = find_isomorphism(sub, lam.polytope)
    mu = Colouring(sub, 3, tuple(lam.colours[psi[j]] for j in range(12)))
    seed = seed_from_facet(z120, 0, mu)
    assert seed.rank == 5
    assert seed.assigned == 13
    assert seed.colours[0] == 16
    for g, c in enumerate(seed.colours):
        if c is None:
            continue
        assert c.bit_count() % 2 == 1
        assert g == 0 or g in inc


def test_seed_from_facet_rejects_bad_input(z120, pentagon, census):
    lam = census.classes[0].colouring
    sub, _ = facet_subpolytope(z120, 0)
    psi = find_isomorphism(sub, lam.polytope)
    mu = Colouring(sub, 3, tuple(lam.colours[psi[j]] for j in range(12)))
    with pytest.raises(ColouringError):
        seed_from_facet(z120, 0, mu, rank=3)
    with pytest.raises(ColouringError):
        seed_from_facet(z120, 0, Colouring(pentagon, 2, (1, 2, 1, 2, 3)))


def test_extension_search_finds_an_orientable_colouring(z120, census):
    lam = census.classes[0].colouring
    sub, _ = facet_subpolytope(z120, 0)
    psi = find_isomorphism(sub, lam.polytope)
    mu = Colouring(sub, 3, tuple(lam.colours[psi[j]] for j in range(12)))
    outcome = search_orientable_extension(z120, seed_from_facet(z120, 0, mu))
    assert outcome.status == "found"
    assert outcome.colouring is not None
    assert is_proper(z120, outcome.colouring)
    assert is_orientable(z120, outcome.colouring) is not None
    assert outcome.colouring.colours[0] == 16


def test_extension_search_budget_out(z120, census):
    lam = census.classes[0].colouring
    sub, _ = facet_subpolytope(z120, 0)
    psi = find_isomorphism(sub, lam.polytope)
    mu = Colouring(sub, 3, tuple(lam.colours[psi[j]] for j in range(12)))
    outcome = search_orientable_extension(
        z120, seed_from_facet(z120, 0, mu), SearchBudget(nodes=50, seconds=60)
    )
    assert outcome.status == "budget-out"
    assert outcome.colouring is None


def test_extension_search_exhausts_an_impossible_space(dodecahedron):
    # only two odd-weight colours exist at rank 2; no vertex of a
    # 3-polytope can carry three independent ones
    seed = PartialColouring(dodecahedron, 2, (None,) * 12)
    outcome = search_orientable_extension(dodecahedron, seed)
    assert outcome.status == "exhausted"
    assert outcome.colouring is None


def test_extension_search_rejects_even_weight_seed(dodecahedron):
    seed = PartialColouring(dodecahedron, 2, (3,) + (None,) * 11)
    with pytest.raises(ColouringError):
        search_orientable_extension(dodecahedron, seed)
