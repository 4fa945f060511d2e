"""End-to-end command-line behaviour, including exit-code contracts."""
from __future__ import annotations

import json

import pytest

from racover import __version__
from racover.cli import EXIT_FINDING, EXIT_OK, EXIT_USAGE, main
from racover.colouring import Colouring
from racover.fileio import load_colouring, write_colouring, write_polytope


def _manifest(outdir):
    return json.loads((outdir / "run-manifest.json").read_text(encoding="utf-8"))


def test_generate_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["generate", "dodecahedron", "--out", str(a)]) == EXIT_OK
    assert main(["generate", "dodecahedron", "--out", str(b)]) == EXIT_OK
    assert (a / "dodecahedron.json").read_bytes() == (b / "dodecahedron.json").read_bytes()
    m = _manifest(a)
    assert m["command"] == "generate"
    assert m["tool_version"] == __version__
    assert m["result_digest"] == _manifest(b)["result_digest"]


def test_generate_respects_racover_out(tmp_path, monkeypatch):
    target = tmp_path / "env-out"
    monkeypatch.setenv("RACOVER_OUT", str(target))
    assert main(["generate", "dodecahedron"]) == EXIT_OK
    assert (target / "dodecahedron.json").exists()


def test_unknown_kind_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit):
        main(["generate", "icosahedron", "--out", str(tmp_path)])


def test_check_reports_a_proper_orientable_colouring(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    lam = Colouring(pentagon, 3, (1, 2, 1, 2, 4))
    write_colouring(lam, tmp_path / "c.txt")
    code = main(["check", str(tmp_path / "p.json"), str(tmp_path / "c.txt")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "proper: yes" in out
    assert "orientable: yes" in out
    assert "witness triple: none" in out


def test_check_flags_an_improper_colouring(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    (tmp_path / "c.txt").write_text("rank 2\n1\n1\n2\n1\n2\n", encoding="utf-8")
    code = main(["check", str(tmp_path / "p.json"), str(tmp_path / "c.txt")])
    out = capsys.readouterr().out
    assert code == EXIT_FINDING
    assert "dependent colours" in out


def test_check_accepts_a_partial_colouring(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    (tmp_path / "c.txt").write_text("rank 2\n1\n-\n1\n2\n-\n", encoding="utf-8")
    code = main(["check", str(tmp_path / "p.json"), str(tmp_path / "c.txt")])
    assert code == EXIT_OK
    assert "partial colouring: 3/5" in capsys.readouterr().out


def test_malformed_colouring_is_a_usage_error(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    (tmp_path / "c.txt").write_text("rank x\n", encoding="utf-8")
    code = main(["check", str(tmp_path / "p.json"), str(tmp_path / "c.txt")])
    assert code == EXIT_USAGE
    assert "bad rank" in capsys.readouterr().err


def test_missing_file_is_a_usage_error(tmp_path, capsys):
    code = main(["check", str(tmp_path / "nope.json"), str(tmp_path / "c.txt")])
    assert code == EXIT_USAGE


def test_enumerate_writes_class_files(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    code = main(["enumerate", str(tmp_path / "p.json"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert "1 class(es): 0 orientable, 1 non-orientable; complete" in capsys.readouterr().out
    summary = json.loads((tmp_path / "enumeration-summary.json").read_text("utf-8"))
    assert summary["classes"] == 1
    assert summary["automorphism_orders"] == [2]
    lam = load_colouring(pentagon, tmp_path / "class-000.txt")
    assert isinstance(lam, Colouring)


def test_enumerate_chromatic_summary(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    code = main([
        "enumerate", str(tmp_path / "p.json"), "--chromatic", "3",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    assert "5 colouring(s) up to renaming, 1 up to symmetry" in capsys.readouterr().out
    summary = json.loads((tmp_path / "chromatic-summary.json").read_text("utf-8"))
    assert summary["count"] == 5
    assert summary["orbit_count"] == 1
    assert summary["complete"] is True
    assert len(summary["representatives"]) == 5
    for name in summary["representatives"]:
        assert (tmp_path / name).exists()


def test_extend_finds_an_extension(tmp_path, z120, census, capsys):
    write_colouring(census.classes[0].colouring, tmp_path / "class.txt")
    code = main(["extend", str(tmp_path / "class.txt"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert "found: extension.txt" in capsys.readouterr().out
    summary = json.loads((tmp_path / "extension-summary.json").read_text("utf-8"))
    assert summary["status"] == "found"
    assert summary["rank"] == 5
    lam = load_colouring(z120, tmp_path / "extension.txt")
    assert lam.rank == 5


def test_extend_budget_out_keeps_exit_zero(tmp_path, census, capsys):
    write_colouring(census.classes[0].colouring, tmp_path / "class.txt")
    code = main([
        "extend", str(tmp_path / "class.txt"), "--budget-nodes", "50",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    assert "budget-out after" in capsys.readouterr().out
    summary = json.loads((tmp_path / "extension-summary.json").read_text("utf-8"))
    assert summary["status"] == "budget-out"
    assert not (tmp_path / "extension.txt").exists()


def test_cover_summary_output(tmp_path, dodecahedron, census, capsys):
    write_polytope(dodecahedron, tmp_path / "d.json")
    write_colouring(census.classes[24].colouring, tmp_path / "c.txt")
    code = main([
        "cover", str(tmp_path / "d.json"), str(tmp_path / "c.txt"),
        "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    assert "8 copies, chi 0" in capsys.readouterr().out
    summary = json.loads((tmp_path / "cover-summary.json").read_text("utf-8"))
    assert summary["copies"] == 8
    assert summary["orientable"] is False
    assert set(summary["facet_preimage_pieces"]) == set(dodecahedron.facet_labels)


def test_cover_rejects_partial_colourings(tmp_path, pentagon, capsys):
    write_polytope(pentagon, tmp_path / "p.json")
    (tmp_path / "c.txt").write_text("rank 2\n1\n-\n1\n2\n-\n", encoding="utf-8")
    code = main([
        "cover", str(tmp_path / "p.json"), str(tmp_path / "c.txt"),
        "--out", str(tmp_path),
    ])
    assert code == EXIT_USAGE


def test_certify_writes_a_passing_certificate(tmp_path, capsys):
    code = main(["certify", "--n", "1", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "PASS (18/18 checks)" in out
    assert (tmp_path / "certificate.json").exists()
    m = _manifest(tmp_path)
    assert m["command"] == "certify"
    assert m["result_digest"]


def test_certify_rejects_a_malformed_policy(tmp_path, capsys):
    code = main(["certify", "--n", "1", "--policy", "loudest", "--out", str(tmp_path)])
    assert code == EXIT_USAGE


def test_bad_budget_is_a_usage_error(tmp_path, census, capsys):
    write_colouring(census.classes[0].colouring, tmp_path / "class.txt")
    code = main([
        "extend", str(tmp_path / "class.txt"), "--budget-nodes", "0",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_USAGE
