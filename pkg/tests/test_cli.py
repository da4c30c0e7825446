import csv
import io
import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayley_billiards.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheckCayley:
    def test_planar_periodic(self, capsys):
        code, out, _ = run(capsys, "check-cayley", "--axes", "1,2", "--caustics", "2/3", "--m", "2")
        assert code == 0 and "verdict: periodic" in out and "matrix form (exact)" in out
        assert "certificate identity: holds" in out

    def test_spatial_periodic(self, capsys):
        code, out, _ = run(capsys, "check-cayley", "--axes", "1/5,1/2,1", "--caustics", "1/6,1/4", "--m", "3")
        assert code == 0 and "caustic type EH1" in out

    def test_wrong_period(self, capsys):
        code, out, _ = run(capsys, "check-cayley", "--axes", "1/5,1/2,1", "--caustics", "1/6,1/4", "--m", "4")
        assert code == 1 and "not periodic" in out

    def test_rejected_caustic(self, capsys):
        code, out, _ = run(capsys, "check-cayley", "--axes", "1,2", "--caustics", "1", "--m", "2")
        assert code == 1 and "singular caustic" in out

    @pytest.mark.parametrize("argv", [
        ["check-cayley", "--axes", "1,2"],
        ["check-cayley", "--axes", "1,2.5", "--caustics", "2/3", "--m", "2"],
        ["check-cayley", "--axes", "1,1", "--caustics", "1/2", "--m", "2"],
        ["check-cayley", "--axes", "1,2", "--caustics", "2/3", "--m", "1"],
        ["check-cayley", "--axes", "1,x", "--caustics", "2/3", "--m", "2"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and "usage error" in err


class TestSolve:
    def test_minimal_spatial(self, capsys):
        code, out, _ = run(capsys, "solve-caustics", "--axes", "4,1,1/4", "--n", "3", "--type", "H1H1", "--m", "3")
        assert code == 0
        lams = [float(v) for v in out.split("caustics: ")[1].splitlines()[0].split(",")]
        assert lams == pytest.approx([0.2560249817628667, 0.7439750182371333], rel=1e-15)

    def test_period_four(self, capsys):
        code, out, _ = run(capsys, "solve-caustics", "--axes", "4,1,0.2", "--n", "3", "--type", "H1H1",
                           "--m", "4", "--tau", "0,0,1")
        assert code == 0 and "d: 8.72233928758" in out and "S = x - " in out

    def test_rejection(self, capsys):
        code, out, _ = run(capsys, "solve-caustics", "--axes", "2,1", "--n", "2", "--type", "H", "--m", "2")
        assert code == 1 and "requires 2b<a" in out

    def test_signature_solver_route(self, capsys):
        code, out, _ = run(capsys, "solve-caustics", "--axes", "1/5,1,4", "--type", "H1H1", "--m", "5",
                           "--tau", "1,1,0")
        assert code in (0, 1)
        if code == 0:
            assert "route: signature solver" in out

    def test_missing_signature(self, capsys):
        code, _, err = run(capsys, "solve-caustics", "--axes", "1/5,1,4", "--type", "H1H1", "--m", "5")
        assert code == 2 and "--tau" in err


REGISTRY = [
    ("2,1", "E", 2, None), ("5,1", "H", 2, None),
    ("2,1", "E", 3, "1,0"), ("5,1", "H", 3, "1,0"),
    ("2,1", "E", 3, "0,1"), ("2,1", "H", 3, "0,1"),
    ("5,2,1/2", "EH1", 3, None), ("4,1,1/4", "H1H1", 3, None),
    ("4,1,0.3", "EH2", 3, None), ("10,2,0.5", "H1H2", 3, None),
    ("4,1,0.2", "H1H1", 4, "0,0,1"),
]


@pytest.mark.parametrize("axes,typ,m,tau", REGISTRY)
def test_solve_then_simulate(capsys, axes, typ, m, tau):
    argv = ["simulate", "--axes", axes, "--type", typ, "--m", str(m)]
    if tau:
        argv += ["--tau", tau]
    code, out, _ = run(capsys, *argv)
    assert code == 0, out
    assert f", m = {m}," in out


class TestSimulate:
    def test_rhombus_files(self, capsys, tmp_path):
        svg, csvp = tmp_path / "r.svg", tmp_path / "r.csv"
        code, out, _ = run(capsys, "simulate", "--axes", "1,2", "--caustics", "2/3",
                           "--svg", str(svg), "--csv", str(csvp))
        assert code == 0 and "m0 = 4" in out and "winding numbers: (4, 2)" in out
        assert svg.read_text().count("<polyline") == 1
        with open(csvp, newline="") as fh:
            assert len(list(csv.reader(fh))) == 6

    def test_spatial(self, capsys):
        code, out, _ = run(capsys, "simulate", "--axes", "1/5,1/2,1", "--caustics", "1/6,1/4")
        assert code == 0 and "m0 = 6" in out and "(6, 4, 2)" in out

    def test_open(self, capsys):
        code, out, _ = run(capsys, "simulate", "--axes", "1,2", "--caustics", "0.4321", "--max-bounces", "200")
        assert code == 1 and out.startswith("open")

    def test_launch_failure(self, capsys):
        code, out, _ = run(capsys, "simulate", "--axes", "1,2", "--caustics", "1.00000000001")
        assert code == 1 and "launch failure" in out


def test_rotation_number(capsys):
    code, out, _ = run(capsys, "rotation-number", "--axes", "2,1", "--caustics", "2/3")
    assert code == 0 and "close to 1/4" in out
    assert float(out.split("rho = ")[1].split()[0]) == pytest.approx(0.25, abs=1e-10)


class TestSweep:
    def _rows(self, out):
        return list(csv.DictReader(io.StringIO(out)))

    def test_spatial_threshold_flip(self, capsys):
        # EH1 threshold at (a, b) = (4, 1) is c = 4/7
        code, out, _ = run(capsys, "sweep", "--a", "4", "--b-grid", "1:1:1", "--c-grid", "5/9:3/5:2")
        rows = self._rows(out)
        assert code == 0 and [r["EH1_m3"] for r in rows] == ["yes", "no"]

    def test_planar_flip(self, capsys):
        code, out, _ = run(capsys, "sweep", "--planar", "--a-grid", "3.9:4.1:2", "--b-grid", "1:1:1")
        rows = self._rows(out)
        assert [r["H3-10"] for r in rows] == ["no", "yes"]

    def test_degenerate_point_skipped(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "sweep", "--a", "4", "--b-grid", "1:2:2", "--c-grid", "1:1:1",
                           "--out", str(path))
        rows = list(csv.DictReader(open(path, newline="")))
        assert code == 0 and "1 skipped" in out
        assert rows[0]["note"].startswith("skipped") and rows[1]["note"] == ""

    def test_parallel_matches_serial(self, capsys):
        argv = ["sweep", "--a", "4", "--b-grid", "1/2:3:6", "--c-grid", "1/10:2:6"]
        _, serial, _ = run(capsys, *argv)
        _, par, _ = run(capsys, *argv, "--jobs", "2")
        assert serial == par


class TestConfig:
    def test_json_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"command": "check-cayley", "axes": ["1", "2"], "caustics": "2/3", "m": 2}))
        code, out, _ = run(capsys, "check-cayley", "--config", str(cfg))
        assert code == 0
        code, _, _ = run(capsys, "check-cayley", "--config", str(cfg), "--m", "3")
        assert code == 1

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"command": "check-cayley", "bogus": 1}))
        code, _, err = run(capsys, "check-cayley", "--config", str(cfg))
        assert code == 2 and "bogus" in err

    @given(st.sampled_from(["check-cayley", "simulate", "sweep"]),
           st.lists(st.fractions(min_value=0, max_value=9, max_denominator=9).map(str), min_size=2, max_size=4),
           st.one_of(st.none(), st.integers(2, 9)), st.floats(1e-15, 1e-3), st.booleans())
    def test_round_trip(self, command, axes, m, tol, planar):
        cfg = RunConfig(command, axes=",".join(axes), m=m, tol=tol, planar=planar)
        back = RunConfig.from_json(cfg.to_json())
        assert back == cfg and back.mode == "exact"

    def test_mode_inference(self):
        assert RunConfig("x", axes="1,2", caustics="2/3").mode == "exact"
        assert RunConfig("x", axes="1,2.0").mode == "float"


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "cayley_billiards.cli", "check-cayley", "--axes", "1,2",
                        "--caustics", "2/3", "--m", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and "periodic" in r.stdout
