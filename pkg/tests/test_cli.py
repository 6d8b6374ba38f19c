import json
import random

import pytest

from helpers import FIG23
from pairenc.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from pairenc.reduction import format_edge_list, k4


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.fixture
def fig1(tmp_path):
    p = tmp_path / "fig1.txt"
    p.write_bytes(b"aabaaaba")
    return p


def test_train_encode_decode_fig1(tmp_path, fig1, capsys):
    model = tmp_path / "m.json"
    code, out, _ = run(capsys, "train", fig1, "-k", 3, "-o", model)
    assert code == EXIT_OK and out["utility"] == 4 and out["merges"] == 3
    assert len(json.loads(model.read_text())["merges"]) == 3
    toks, back = tmp_path / "t.txt", tmp_path / "back.txt"
    code, out, _ = run(capsys, "encode", fig1, "-m", model, "-o", toks)
    assert code == EXIT_OK and out["tokens"] == 4
    # Zaba: the third merge gets id 258 = 256 + 2
    assert toks.read_text() == "258 97 98 97"
    code, _, _ = run(capsys, "decode", toks, "-m", model, "-o", back)
    assert code == EXIT_OK and back.read_bytes() == b"aabaaaba"


def test_train_k_zero(tmp_path, fig1, capsys):
    code, out, _ = run(capsys, "train", fig1, "-k", 0, "-o", tmp_path / "m.json")
    assert code == EXIT_OK and out["utility"] == 0 and out["merges"] == 0


def test_train_evenodd(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text(FIG23)
    code, out, _ = run(capsys, "train", p, "-k", 4, "--algorithm", "evenodd", "-o", tmp_path / "m.json")
    assert code == EXIT_OK and out["utility"] == 12


def test_round_trip_random_bytes(tmp_path, capsys):
    rng = random.Random(0)
    for i in range(5):
        data = bytes(rng.randrange(256) if rng.random() < 0.3 else rng.choice(b"ab\n")
                     for _ in range(rng.randint(0, 400)))
        src = tmp_path / f"in{i}"
        src.write_bytes(data)
        m, t, b = (tmp_path / f"{x}{i}" for x in "mtb")
        for argv in (("train", src, "-k", 20, "-o", m), ("encode", src, "-m", m, "-o", t),
                     ("decode", t, "-m", m, "-o", b)):
            assert run(capsys, *argv)[0] == EXIT_OK
        assert b.read_bytes() == data


def test_codepoint_round_trip(tmp_path, capsys):
    src = tmp_path / "u.txt"
    src.write_text("héllo héllo wörld", encoding="utf-8")
    m, t, b = tmp_path / "m", tmp_path / "t", tmp_path / "b"
    assert run(capsys, "train", "--codepoints", src, "-k", 5, "-o", m)[0] == EXIT_OK
    assert run(capsys, "encode", src, "-m", m, "-o", t)[0] == EXIT_OK
    assert run(capsys, "decode", t, "-m", m, "-o", b)[0] == EXIT_OK
    assert b.read_bytes() == src.read_bytes()
    other = tmp_path / "o.txt"
    other.write_text("zzz", encoding="utf-8")
    assert run(capsys, "encode", other, "-m", m, "-o", t)[0] == EXIT_MISMATCH


def test_error_exit_codes(tmp_path, fig1, capsys):
    assert run(capsys, "train", tmp_path / "missing", "-k", 3, "-o", tmp_path / "m")[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "encode", fig1, "-m", bad, "-o", tmp_path / "t")[0] == EXIT_MISMATCH
    with pytest.raises(SystemExit) as e:
        main(["train", str(fig1), "-k", "-1", "-o", str(tmp_path / "m")])
    assert e.value.code == EXIT_USAGE
    code, _, err = run(capsys, "gen", "length", "--t", 2)
    assert code == EXIT_USAGE and "t must be greater than 2" in err
    toks = tmp_path / "t"
    toks.write_text("1 2 x")
    model = tmp_path / "m.json"
    run(capsys, "train", fig1, "-k", 1, "-o", model)
    assert run(capsys, "decode", toks, "-m", model, "-o", tmp_path / "o")[0] == EXIT_MISMATCH
    toks.write_text("9999")
    assert run(capsys, "decode", toks, "-m", model, "-o", tmp_path / "o")[0] == EXIT_MISMATCH


def test_compare_fig3(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text(FIG23)
    code, rep, _ = run(capsys, "compare", p, "-k", 4, "--separator", "|")
    assert code == EXIT_OK
    algos = rep["algorithms"]
    assert algos["bpe"]["utility"] == 10 and algos["evenodd"]["utility"] == 12
    assert rep["bounds"]["fk"] == 16 and rep["bounds"]["pk"] == 16
    assert all(rep["checks"].values())
    for rec in algos.values():
        assert rec["utility"] + rec["length"] == rep["instance"]["length"]
    assert rep["ratios"]["bpe/pk"] == pytest.approx(10 / 16)


def test_compare_fig2_exact_with_witnesses(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text(FIG23)
    wd = tmp_path / "w"
    wd.mkdir()
    code, rep, _ = run(capsys, "compare", p, "-k", 4, "--separator", "|", "--exact",
                       "--witness-dir", wd)
    assert code == EXIT_OK
    assert rep["algorithms"]["oms"]["utility"] == 11
    assert rep["algorithms"]["ope"]["utility"] == 12
    assert rep["checks"]["bpe_le_oms"] and rep["checks"]["oms_le_ope"]
    assert json.loads((wd / "ope.json").read_text())["merges"]


def test_compare_budget_warning(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text("ab" * 40)
    code, rep, err = run(capsys, "compare", p, "-k", 3, "--exact")
    assert code == EXIT_OK
    assert "oms" not in rep["algorithms"] and rep["warnings"]
    assert "warning" in err and rep["bounds"]["pk"] > 0


def test_compare_empty_input(tmp_path, capsys):
    p = tmp_path / "e.txt"
    p.write_bytes(b"")
    code, rep, _ = run(capsys, "compare", p, "-k", 3, "--exact")
    assert code == EXIT_OK
    assert all(r["utility"] == 0 for r in rep["algorithms"].values())
    assert rep["bounds"]["pk"] == rep["bounds"]["fk"] == 0


def test_bound_and_exact(tmp_path, fig1, capsys):
    code, out, _ = run(capsys, "bound", fig1, "-k", 3)
    assert code == EXIT_OK and out["pk"] >= 6 and out["fk"] >= out["pk"]
    code, out, _ = run(capsys, "exact", fig1, "-k", 3)
    assert code == EXIT_OK and out["oms"]["value"] == 6 and out["ope"]["value"] == 6
    big = tmp_path / "big"
    big.write_text("ab" * 40)
    assert run(capsys, "exact", big, "-k", 3)[0] == EXIT_USAGE


def test_exact_env_budget(tmp_path, capsys, monkeypatch):
    p = tmp_path / "s"
    p.write_text("abcabcaabbccabca")
    monkeypatch.setenv("PAIRENC_BUDGET_NODES", "2")
    code, out, err = run(capsys, "exact", p, "-k", 3, "--problem", "oms")
    assert code == EXIT_OK and not out["oms"]["exact"] and "budget" in err


def test_gen_families(tmp_path, capsys):
    code, meta, _ = run(capsys, "gen", "ratio", "--t", 10)
    assert code == EXIT_OK and meta["expected_bpe"] == 51 and meta["expected_reference"] == 80
    code, meta, _ = run(capsys, "gen", "inputonly", "--n", 8)
    assert meta["expected_bpe"] == 15 and meta["input_only_ceiling"] == 11
    code, meta, _ = run(capsys, "gen", "length", "--t", 3, "-o", tmp_path / "len")
    assert code == EXIT_OK and meta["metric"] == "length"
    assert len((tmp_path / "len.txt").read_text().split()) == 30
    assert json.loads((tmp_path / "len.json").read_text())["k"] == 23
    assert run(capsys, "gen", "inputonly", "--n", 6)[0] == EXIT_USAGE
    assert run(capsys, "gen", "ratio")[0] == EXIT_USAGE


def test_gen_ratio_feeds_compare(tmp_path, capsys):
    run(capsys, "gen", "ratio", "--t", 10, "-o", tmp_path / "r")
    code, rep, _ = run(capsys, "compare", "--labels", "--separator", "|", "--separator", "#",
                       tmp_path / "r.txt", "-k", 4)
    assert code == EXIT_OK and rep["algorithms"]["bpe"]["utility"] == 51


def test_gen_reduction(tmp_path, capsys):
    edges = tmp_path / "k4.edges"
    edges.write_text(format_edge_list(k4()))
    code, meta, _ = run(capsys, "gen", "reduction", "--graph", edges, "-o", tmp_path / "red")
    assert code == EXIT_OK
    assert meta["length"] == 484 and meta["k"] == 5 and meta["expected_oms"] == 140
    assert len((tmp_path / "red.txt").read_text().split()) == 484
    code, meta, _ = run(capsys, "gen", "reduction", "--named", "petersen")
    assert meta["max_cut"] == 12
    code, meta, _ = run(capsys, "gen", "reduction", "--random", 8, "--seed", 3)
    assert code == EXIT_OK and meta["length"] == 968
    assert run(capsys, "gen", "reduction")[0] == EXIT_USAGE
    edges.write_text("3 1\n1 2\n")
    assert run(capsys, "gen", "reduction", "--graph", edges)[0] == EXIT_USAGE
