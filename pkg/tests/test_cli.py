import io
import os
import subprocess
import sys

from sftlab import cli, gridengine, zengine
from sftlab.sft import parse_spec, render_spec

from conftest import GROUPS, SPECS

ALT = str(SPECS / "alternating.sft")


def run(*argv):
    out = io.StringIO()
    code = cli.dispatch(list(argv) + ["--no-timing"], stdout=out)
    return code, out.getvalue()


def fields(report):
    out = {}
    for ln in report.splitlines():
        key, _, val = ln.partition(": ")
        out.setdefault(key, val)
    return out


def test_z_free_example():
    code, text = run("z-free", "--spec", ALT)
    assert code == 0
    assert "free: odd-multiples:1" in text.splitlines()


def test_report_header_and_digest():
    code, text = run("z-empty", "--spec", ALT)
    lines = text.splitlines()
    assert lines[0] == f"command: sftlab z-empty --spec {ALT} --no-timing"
    assert lines[1].startswith(f"input {ALT}: sha256=")
    assert fields(text)["verdict"] == "Nonempty"
    assert fields(text)["witness"] == "p=2 word=ab"


def test_timing_line_only_when_asked():
    out = io.StringIO()
    cli.dispatch(["z-empty", "--spec", ALT], stdout=out)
    assert out.getvalue().splitlines()[-1].startswith("timing: ")
    assert "timing:" not in run("z-empty", "--spec", ALT)[1]


def test_lift_free_identity_is_not_free():
    code, text = run("lift-free", "--group", "Q2", "--freepart", "all-nonzero",
                     "--element", "0,0")
    assert code == 0 and fields(text)["verdict"] == "NotFree"


def test_lift_free_example():
    code, text = run("lift-free", "--group", "Q2", "--subgroup", "Z2", "--freepart",
                     "all-nonzero", "--element", "1/2,1/3")
    f = fields(text)
    assert code == 0
    assert (f["verdict"], f["exponent"], f["hit"]) == ("Free", "6", "3,2")


def test_grid_search_negative_report():
    code, text = run("grid-search", "--tiles", str(SPECS / "checker.wang"), "--bound", "1")
    assert code == 0
    assert "torus 1x1: refuted" in text
    assert "verdict: no periodic point with periods <= 1" in text


def test_exit_codes():
    assert run("z-free", "--spec", "/nonexistent.sft")[0] == 2
    assert run("z-period", "--spec", ALT, "0")[0] == 2
    assert run("lift-free", "--group", "Q2", "--element", "1/2")[0] == 2
    code, text = run("z-free", "--spec", str(SPECS / "checker.wang"))
    assert code == 2 and text.splitlines()[-1].startswith("error:")


def test_unknown_flags_give_usage(capsys):
    assert cli.dispatch(["z-free", "--spec", ALT, "--frobnicate"]) == 2
    assert "usage:" in capsys.readouterr().err
    assert cli.dispatch(["no-such-command"]) == 2


def test_budget_exhaustion_exits_3():
    code, text = run("oracle-enumerate", "--group", str(GROUPS / "z6.grp"),
                     "--spec", str(SPECS / "z4_alternating_pairs.sft"), "--budget", "10")
    assert code == 3
    assert fields(text)["verdict"] == "Unknown"


def test_explicit_lists_on_z_ignore_the_scan_bound():
    # the listed element is decided structurally, far beyond the scan bound
    code, text = run("lift-free", "--group", "Z", "--freepart", "list:1000", "--element", "1",
                     "--bound", "10")
    assert code == 0 and fields(text)["verdict"] == "Free"
    assert fields(text)["exponent"] == "1000"


def test_spectrum_freepart_round_trip(tmp_path):
    path = tmp_path / "alt.spectrum"
    code, text = run("z-spectrum", "--spec", ALT, "--write", str(path), "--sweep", "50")
    assert code == 0 and fields(text)["sweep"] == "k<=50 agree"
    assert zengine.parse_spectrum(path.read_text()) == zengine.period_spectrum(parse_spec(
        open(ALT).read()))
    for k, expected in ((4, "NotFree"), (3, "Free"), (6, "Free"), (8, "NotFree")):
        code, text = run("lift-free", "--group", "Z", "--subgroup", "2Z",
                         "--freepart", f"spectrum:{path}", "--element", str(k))
        assert code == 0 and fields(text)["verdict"] == expected, (k, text)


def test_lift_construct_and_certify():
    code, text = run("lift-construct", "--spec", ALT, "--g", "4", "--m", "2", "--window", "8")
    assert code == 0
    x = fields(text)["x"]
    assert len(x) == 17 and all(x[i] == x[i + 4] for i in range(13))
    code, text = run("lift-construct", "--spec", ALT, "--g", "3", "--m", "2")
    assert code == 2 and "is free" in text
    code, text = run("lift-certify", "--group", "Z", "--subgroup", "2Z",
                     "--freepart", "odd-multiples:2")
    assert code == 0 and fields(text)["verdict"] == "not-SA"
    code, text = run("lift-certify", "--group", str(GROUPS / "z4.grp"), "--subgroup", "0 2",
                     "--freepart", "list:2")
    assert fields(text)["verdict"] == "SA-certified" and fields(text)["free"] == "1 2 3"


def test_oracle_commands():
    z4 = str(GROUPS / "z4.grp")
    pairs = str(SPECS / "z4_alternating_pairs.sft")
    code, text = run("oracle-enumerate", "--group", z4, "--spec", pairs)
    assert code == 0 and fields(text)["configurations"] == "4"
    code, text = run("oracle-prop2", "--group", z4, "--subgroup", "0 2", "--spec", pairs)
    f = fields(text)
    assert code == 0 and f["verdict"] == "Agree" and f["free"] == f["roots"] == "1 2 3"


def test_render_outputs(tmp_path):
    out = tmp_path / "checker.ppm"
    code, _ = run("grid-render", "--tiles", str(SPECS / "checker.wang"), "--format", "ppm",
                  "--out", str(out))
    assert code == 0
    assert out.read_bytes().startswith(b"P3\n16 16\n255\n")
    code, text = run("grid-render", "--tiles", str(SPECS / "checker.wang"))
    assert text == "A B\nB A\n"
    cells = tmp_path / "cells.txt"
    cells.write_text("a b\nb a\n")
    assert run("render", "--cells", str(cells)) == (0, "a b\nb a\n")


def test_out_flag_writes_report(tmp_path):
    out = tmp_path / "report.txt"
    code, text = run("z-free", "--spec", ALT, "--out", str(out))
    assert code == 0 and text == ""
    assert "free: odd-multiples:1" in out.read_text()


def test_corpus_prefix():
    code, text = run("z-free", "--spec", "corpus:alternating")
    assert code == 0 and fields(text)["free"] == "odd-multiples:1"


def test_round_trips_for_shipped_formats():
    for path in SPECS.glob("*.sft"):
        spec = parse_spec(path.read_text())
        assert parse_spec(render_spec(spec)) == spec
    for path in SPECS.glob("*.wang"):
        tiles = gridengine.parse_wang(path.read_text())
        assert gridengine.parse_wang(gridengine.render_wang(tiles)) == tiles


def test_subprocess_runs_are_byte_identical():
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, SFTLAB_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "sftlab", "grid-search", "--tiles",
             str(SPECS / "checker.wang"), "--bound", "4", "--seed", "0", "--no-timing"],
            capture_output=True, env=env, check=False)
        assert proc.returncode == 0
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
