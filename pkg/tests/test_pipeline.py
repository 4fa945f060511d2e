"""Chain assembly, class selection and the self-checking certificate."""
from __future__ import annotations

import dataclasses

import pytest

from racover import gf2
from racover.colouring import equivalent, induced_colouring, is_orientable, is_proper, transport
from racover.pipeline import (
    Finding,
    assemble_chain,
    certify,
    extend_class,
    select_class,
    validate_certificate,
)
from racover.polytopes import f_vector, facet_subpolytope
from racover.search import BudgetError, EnumerationResult, SearchBudget

CHECK_NAMES = [
    "ambient-colouring-proper",
    "ambient-colouring-orientable",
    "chain-colouring-proper",
    "chain-colouring-non-orientable",
    "cover-size",
    "cover-connected",
    "cover-orientable",
    "euler-characteristic",
    "cut-locus-pieces",
    "cut-locus-one-sided",
    "boundary-connected",
    "boundary-cells",
    "boundary-orientable",
    "ambient-volume",
    "boundary-volume",
    "volume-ratio",
    "long-facet-subpolytope",
    "induced-colouring",
]


def test_max_symmetry_selection(census):
    chosen = select_class(census)
    assert chosen.index == 24
    assert chosen.automorphisms == 24
    assert chosen.witness == (0, 1, 3)
    assert chosen.glue_facet == 10
    c = chosen.colouring.colours
    assert c[0] ^ c[1] ^ c[3] == 0
    P = chosen.colouring.polytope
    assert all(not P.adjacent(chosen.glue_facet, t) for t in chosen.witness)


def test_index_selection_policies(census):
    chosen = select_class(census, "index:0")
    assert chosen.index == 0
    with pytest.raises(ValueError):
        select_class(census, "index:5")  # the orientable class
    with pytest.raises(ValueError):
        select_class(census, "index:99")
    with pytest.raises(ValueError):
        select_class(census, "index:zero")
    with pytest.raises(ValueError):
        select_class(census, "loudest")


def test_selection_needs_a_complete_enumeration(census):
    partial = EnumerationResult(census.classes, False, census.nodes, census.seconds)
    with pytest.raises(ValueError):
        select_class(partial)


def test_every_non_orientable_class_selects(census):
    for i, rec in enumerate(census.classes):
        if rec.orientable:
            continue
        chosen = select_class(census, f"index:{i}")
        c = chosen.colouring.colours
        i0, j0, k0 = chosen.witness
        assert c[i0] ^ c[j0] ^ c[k0] == 0
        P = chosen.colouring.polytope
        assert all(not P.adjacent(chosen.glue_facet, t) for t in chosen.witness)


def test_extend_class_budget_out(census):
    chosen = select_class(census)
    with pytest.raises(BudgetError):
        extend_class(chosen, budget=SearchBudget(nodes=50, seconds=60))


def test_assemble_chain_length_one(census):
    chosen = select_class(census)
    a = assemble_chain(chosen, 1)
    assert a.n == 1
    assert a.glue_steps == ()
    assert a.P.facet_count == 12
    assert a.mu_P.colours == chosen.colouring.colours
    assert a.Q.facet_count == 120
    assert a.d_facet == 0
    assert a.witness_facets == chosen.witness
    assert sorted(a.natural_map) == list(range(12))


def test_assemble_chain_length_three(census):
    chosen = select_class(census)
    a = assemble_chain(chosen, 3)
    assert f_vector(a.P) == (40, 60, 22)
    assert f_vector(a.Q)[-1] == 332
    # gluing alternates across each summand: facet 10, then its antipode 2
    assert [(s.step, s.dodeca_facet) for s in a.glue_steps] == [(2, 10), (3, 2)]
    assert [s.z_facet for s in a.glue_steps] == [36, 41]
    # chain colourings stay proper, ambient orientable, chain not
    assert is_proper(a.P, a.mu_P)
    assert is_proper(a.Q, a.lam_Q)
    assert is_orientable(a.Q, a.lam_Q) is not None
    assert is_orientable(a.P, a.mu_P) is None
    assert all(gf2.parity(c) for c in a.lam_Q.colours)
    # the witness facets of the first summand survive every gluing
    for w in a.witness_facets:
        assert "|" not in a.P.facet_labels[w]
    w1, w2, w3 = a.witness_facets
    assert a.mu_P.colours[w1] ^ a.mu_P.colours[w2] ^ a.mu_P.colours[w3] == 0


def test_natural_map_carries_the_induced_colouring(census):
    chosen = select_class(census)
    a = assemble_chain(chosen, 2)
    sub, _ = facet_subpolytope(a.Q, a.d_facet)
    assert sub.facet_count == a.P.facet_count == 17
    mu = induced_colouring(a.Q, a.d_facet, a.lam_Q)
    assert equivalent(a.P, transport(mu, a.natural_map, a.P), a.mu_P)


def test_chain_length_must_be_positive(census):
    chosen = select_class(census)
    with pytest.raises(ValueError):
        assemble_chain(chosen, 0)


def test_certificate_passes_all_checks(cert1):
    assert [c.name for c in cert1.checks] == CHECK_NAMES
    assert cert1.passed
    assert cert1.n == 1
    assert cert1.class_index == 24
    assert cert1.witness == (0, 1, 3)
    assert cert1.glue_facet == 10
    assert cert1.cover.cells == 32
    assert cert1.cut.boundary_cell_counts == (16,)
    assert len(cert1.notes) == 3
    assert any("four copies" in note for note in cert1.notes)


def test_certificate_revalidates(cert1):
    checks = validate_certificate(cert1)
    assert all(c.passed for c in checks)


def test_validation_detects_tampering(cert1):
    flipped = tuple(
        dataclasses.replace(c, passed=not c.passed) if c.name == "cover-size" else c
        for c in cert1.checks
    )
    with pytest.raises(Finding):
        validate_certificate(dataclasses.replace(cert1, checks=flipped))


def test_certify_with_an_index_policy(census):
    cert = certify(1, policy="index:0")
    assert cert.passed
    assert cert.class_index == 0
    assert cert.policy == "index:0"
