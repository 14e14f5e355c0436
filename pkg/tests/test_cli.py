import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rrdh.cli import main, read_secret
from rrdh.corpus import GrayImage, gen_secret, load_pgm, save_pgm, synth_image


@pytest.fixture
def cover(tmp_path):
    path = tmp_path / "a.pgm"
    save_pgm(synth_image("texture", 128, 1), path)
    return path


def run(*args):
    return main([str(a) for a in args])


def test_embed_extract_roundtrip(tmp_path, cover):
    out = tmp_path / "m.pgm"
    assert run("embed", "--in", cover, "--bits", 1000, "--seed", 7, "--n", 3, "--N", "auto", "--out", out) == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["secret_len"] == 1000 and meta["n"] == 3
    sec, rest = tmp_path / "s.txt", tmp_path / "r.pgm"
    assert run("extract", "--in", out, "--secret-out", sec, "--restored", rest) == 0
    assert np.array_equal(read_secret(sec), gen_secret(7, 1000))
    assert load_pgm(rest) == load_pgm(cover)


def test_secret_file_and_explicit_meta(tmp_path, cover):
    secret = tmp_path / "secret.txt"
    secret.write_text("1011001\n")
    out = tmp_path / "x.pgm"
    assert run("embed", "--in", cover, "--secret", secret, "--out", out, "--ordering", "raster", "--r", 3) == 0
    moved = tmp_path / "meta.json"
    out.with_suffix(".json").rename(moved)
    sec = tmp_path / "s.txt"
    assert run("extract", "--in", out, "--meta", moved, "--secret-out", sec, "--restored", tmp_path / "r.pgm") == 0
    assert sec.read_text().strip() == "1011001"


def test_capacity_exit(tmp_path, cover, capsys):
    assert run("embed", "--in", cover, "--bits", 10**6, "--out", tmp_path / "m.pgm") == 2
    assert "capacity" in capsys.readouterr().err


def test_attacked_extract_writes_partials(tmp_path, cover):
    out = tmp_path / "m.pgm"
    run("embed", "--in", cover, "--bits", 500, "--out", out)
    att = tmp_path / "att.pgm"
    assert run("attack", "--in", out, "--qf", 90, "--out", att) == 0
    sec = tmp_path / "s.txt"
    code = run("extract", "--in", att, "--meta", out.with_suffix(".json"), "--secret-out", sec, "--restored", tmp_path / "r.pgm")
    assert code == 3 and sec.exists()


def test_io_and_usage_errors(tmp_path, cover):
    assert run("extract", "--in", tmp_path / "missing.pgm", "--secret-out", tmp_path / "s", "--restored", tmp_path / "r") == 1
    assert run("attack", "--in", cover, "--qf", 0, "--out", tmp_path / "x.pgm") == 2
    assert run("embed", "--in", cover, "--out", tmp_path / "m.pgm") == 2
    assert run("embed", "--in", cover, "--bits", 10, "--r", 2, "--out", tmp_path / "m.pgm") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("01x")
    assert run("embed", "--in", cover, "--secret", bad, "--out", tmp_path / "m.pgm") == 2
    (tmp_path / "empty").mkdir()
    assert run("nbcr", "--corpus", tmp_path / "empty") == 2
    with pytest.raises(SystemExit) as info:
        run("embed", "--in", cover, "--out", tmp_path / "m.pgm", "--bogus")
    assert info.value.code == 2


def test_attack_deterministic_and_flat(tmp_path):
    flat = tmp_path / "flat.pgm"
    save_pgm(GrayImage(np.full((16, 16), 128)), flat)
    assert run("attack", "--in", flat, "--qf", 30, "--out", tmp_path / "o.pgm") == 0
    assert (tmp_path / "o.pgm").read_bytes() == flat.read_bytes()
    img = tmp_path / "t.pgm"
    save_pgm(synth_image("texture", 40, 2), img)
    run("attack", "--in", img, "--qf", 75, "--out", tmp_path / "1.pgm")
    run("attack", "--in", img, "--qf", 75, "--out", tmp_path / "2.pgm")
    assert (tmp_path / "1.pgm").read_bytes() == (tmp_path / "2.pgm").read_bytes()


def test_nbcr_rows(capsys):
    assert run("nbcr", "--corpus", "synth", "--qf", "95,100") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "image,qf,plane,nbcr_pct" and len(lines) == 1 + 8 * 8 * 2


def test_nbcr_env_corpus(tmp_path, monkeypatch, capsys):
    save_pgm(synth_image("texture", 16, 1), tmp_path / "one.pgm")
    monkeypatch.setenv("RRDH_CORPUS_DIR", str(tmp_path))
    assert run("nbcr", "--qf", "90", "--format", "json") == 0
    assert len(json.loads(capsys.readouterr().out)) == 8


def test_drift_csv(tmp_path, cover):
    out = tmp_path / "d.csv"
    assert run("drift", "--in", cover, "--block", "64,64", "--n", 3, "--qf", "85,90,100", "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "label,mu_orig,mu_qf,qf,rank_orig,rank_qf" and len(lines) == 1 + 18 * 3
    assert run("drift", "--in", cover, "--block", "125,0") == 2


def test_bench_rows_and_determinism(tmp_path):
    args = ["bench", "--grid", "baseline,raster,shift4,rep5", "--qf", "none,95", "--corpus", "synth", "--bits", 64]
    assert run(*args, "--out", tmp_path / "a.csv") == 0
    assert run(*args, "--out", tmp_path / "b.csv") == 0
    a = (tmp_path / "a.csv").read_text()
    assert a == (tmp_path / "b.csv").read_text()
    assert len(a.strip().splitlines()) == 1 + 8 * 4 * 2
    assert run("bench", "--grid", "bogus") == 2


@pytest.mark.parametrize("sub", ["embed", "extract", "attack", "nbcr", "drift", "bench"])
def test_help_lists_flags(sub, capsys):
    with pytest.raises(SystemExit) as info:
        run(sub, "--help")
    assert info.value.code == 0
    text = capsys.readouterr().out
    parser_flags = {
        "embed": ["--in", "--out", "--secret", "--bits", "--seed", "--n", "--N", "--ordering", "--T", "--r"],
        "extract": ["--in", "--meta", "--secret-out", "--restored"],
        "attack": ["--in", "--out", "--qf"],
        "nbcr": ["--corpus", "--qf", "--format", "--out"],
        "drift": ["--in", "--block", "--n", "--qf"],
        "bench": ["--corpus", "--grid", "--n", "--qf", "--bits", "--seed"],
    }[sub]
    for flag in parser_flags:
        assert flag in text


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rrdh.cli", "attack", "--in", "x", "--out", "y", "--qf", "500"],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 2
