"""File formats and the command-line surface."""

import json
import math

import numpy as np
import pytest

from curvball.cli import main
from curvball.diskpoly import lens_area
from curvball.files import PointSetFile, load_point_set, save_point_set
from curvball.geometry import ModelError, Space


def write_points(path, space, dim, points, coordinates=None):
    doc = {"space": space, "dim": dim, "points": points}
    if coordinates is not None:
        doc["coordinates"] = coordinates
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


class TestPointSetFiles:
    def test_flat_intrinsic_load(self, tmp_path):
        p = write_points(tmp_path / "a.json", "euclidean", 2, [[0.0, 0.0], [1.0, 0.0]])
        psf = load_point_set(p)
        assert psf.space == Space.euclidean(2)
        assert psf.points.shape == (2, 2)

    def test_curved_renormalization(self, tmp_path):
        off = [0.0, 0.0, 1.0 + 5e-7]
        p = write_points(tmp_path / "b.json", "spherical", 2, [off])
        psf = load_point_set(p)
        assert np.linalg.norm(psf.points[0]) == pytest.approx(1.0, abs=1e-15)

    def test_curved_hard_failure(self, tmp_path):
        p = write_points(tmp_path / "c.json", "spherical", 2, [[0.0, 0.0, 1.001]])
        with pytest.raises(ModelError):
            load_point_set(p)

    def test_intrinsic_rejected_off_flat(self, tmp_path):
        p = write_points(
            tmp_path / "d.json", "hyperbolic", 2, [[0.0, 0.0]], "intrinsic"
        )
        with pytest.raises(ModelError):
            load_point_set(p)

    def test_wrong_width(self, tmp_path):
        p = write_points(tmp_path / "e.json", "euclidean", 2, [[0.0, 0.0, 0.0]])
        with pytest.raises(ModelError):
            load_point_set(p)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"space": "euclidean", "points": [[0, 0]]}))
        with pytest.raises(ModelError):
            load_point_set(str(path))

    def test_round_trip_idempotent(self, tmp_path):
        src = write_points(
            tmp_path / "g.json", "hyperbolic", 2,
            [[0.0, 0.0, 1.0], [0.3, -0.1, math.sqrt(1.0 + 0.09 + 0.01)]],
        )
        psf = load_point_set(src)
        save_point_set(str(tmp_path / "h.json"), psf)
        again = load_point_set(str(tmp_path / "h.json"))
        save_point_set(str(tmp_path / "i.json"), again)
        assert (tmp_path / "h.json").read_bytes() == (tmp_path / "i.json").read_bytes()
        assert np.array_equal(psf.points, again.points)


class TestBallVolumeCommand:
    def test_flat_d3(self, capsys):
        code, rep = run(capsys, "ball-volume", "--space", "euclidean", "-d", "3", "-r", "1")
        assert code == 0
        assert rep["payload"]["volume"] == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)
        assert rep["payload"]["closed_form_volume"] == pytest.approx(
            rep["payload"]["volume"], rel=1e-9
        )

    def test_spherical_cap(self, capsys):
        code, rep = run(capsys, "ball-volume", "--space", "spherical", "-d", "2", "-r", "1")
        assert code == 0
        assert rep["payload"]["volume"] == pytest.approx(
            2.0 * math.pi * (1.0 - math.cos(1.0)), rel=1e-9
        )

    def test_hyperbolic_inverse(self, capsys):
        v = 2.0 * math.pi * (math.cosh(1.0) - 1.0)
        code, rep = run(
            capsys, "ball-volume", "--space", "hyperbolic", "-d", "2",
            "--inverse", repr(v),
        )
        assert code == 0
        assert rep["payload"]["radius"] == pytest.approx(1.0, abs=1e-9)
        assert rep["payload"]["round_trip_volume"] == pytest.approx(v, rel=1e-9)

    def test_missing_radius(self, capsys):
        code = main(["ball-volume", "--space", "euclidean", "-d", "2"])
        assert code == 2


class TestDualVolumeCommand:
    def test_lens_with_exact_cross_check(self, capsys, tmp_path):
        p = write_points(tmp_path / "p.json", "euclidean", 2, [[0.0, 0.0], [1.0, 0.0]])
        code, rep = run(
            capsys, "dual-volume", "--points", p, "-r", "1",
            "--n-mc", "100000", "--seed", "3",
        )
        assert code == 0
        exact = lens_area(1.0, 1.0)
        assert rep["payload"]["exact_area"] == pytest.approx(exact, rel=1e-12)
        est = rep["payload"]["estimate"]
        assert abs(est["value"] - exact) <= 4.0 * est["std_err"]

    def test_single_point_is_ball(self, capsys, tmp_path):
        p = write_points(tmp_path / "q.json", "euclidean", 2, [[0.2, 0.1]])
        code, rep = run(capsys, "dual-volume", "--points", p, "-r", "0.5", "--seed", "4")
        assert code == 0
        assert rep["payload"]["exact_area"] == pytest.approx(math.pi * 0.25, rel=1e-12)

    def test_small_radius_is_certified_empty(self, capsys, tmp_path):
        p = write_points(tmp_path / "r.json", "euclidean", 2, [[0.0, 0.0], [1.0, 0.0]])
        code, rep = run(capsys, "dual-volume", "--points", p, "-r", "0.4")
        assert code == 0
        assert rep["payload"]["emptiness"] == "empty"
        assert rep["payload"]["estimate"]["value"] == 0.0
        assert rep["payload"]["degenerate"] == "empty"

    def test_missing_file(self, capsys):
        assert main(["dual-volume", "--points", "/nonexistent.json", "-r", "1"]) == 2


class TestVerifyCommand:
    def test_kp_flat_desk_instance(self, capsys):
        code, rep = run(
            capsys, "verify", "kp", "--space", "euclidean", "-d", "2", "-N", "6",
            "--lambda", "1", "--delta", "1", "--n-mc", "50000", "--seed", "7",
        )
        assert code == 0
        assert rep["payload"]["verdict"] == "verified"
        assert rep["payload"]["sandwich_ok"] is True

    def test_kp_invalid_hypotheses(self, capsys):
        code = main([
            "verify", "kp", "--space", "euclidean", "-d", "2", "-N", "6",
            "--lambda", "2", "--delta", "1",
        ])
        assert code == 2

    def test_props_spherical(self, capsys):
        code, rep = run(
            capsys, "verify", "props", "--space", "spherical", "-d", "2",
            "-N", "89", "--lambda", "0.1",
        )
        assert code == 0
        assert rep["payload"]["holds"] is True
        assert rep["payload"]["mu"] == pytest.approx(0.47613477013194666, rel=1e-9)

    def test_props_flat_rejected(self, capsys):
        code = main(["verify", "props", "--space", "euclidean", "-N", "6", "--lambda", "1"])
        assert code == 2

    def test_props_precondition_exit(self, capsys):
        code = main([
            "verify", "props", "--space", "spherical", "-d", "2",
            "-N", "2000", "--lambda", "1",
        ])
        assert code == 2

    def test_props_violation_exit(self, capsys, monkeypatch):
        import curvball.cli as cli_mod

        monkeypatch.setattr(cli_mod, "check_merged_radius_spherical", lambda *a: False)
        code, rep = run(
            capsys, "verify", "props", "--space", "spherical", "-d", "2",
            "-N", "89", "--lambda", "0.1",
        )
        assert code == 3
        assert rep["payload"]["verdict"] == "violated"

    def test_main_smoke(self, capsys):
        code, rep = run(
            capsys, "verify", "main", "--space", "euclidean", "-d", "2", "-r", "1",
            "--trials", "2", "--n-mc", "20000", "--seed", "11",
        )
        assert code == 0
        assert rep["payload"]["violations"] == 0
        assert len(rep["payload"]["records"]) == 2

    def test_core_lemma_smoke(self, capsys):
        code, rep = run(
            capsys, "verify", "core-lemma", "--space", "hyperbolic", "-d", "2",
            "-r", "0.8", "--trials", "1", "--seed", "12",
        )
        assert code == 0
        assert rep["payload"]["refutations"] == 0


class TestRenderCommand:
    def check_svg(self, path):
        head = path.read_text()[:400]
        assert head.startswith("<?xml")
        assert "<svg" in head

    def test_points_file(self, capsys, tmp_path):
        p = write_points(tmp_path / "p.json", "euclidean", 2, [[0.0, 0.0], [1.0, 0.0]])
        out = tmp_path / "lens.svg"
        code, rep = run(
            capsys, "render", "--points", p, "-r", "1", "--out", str(out)
        )
        assert code == 0
        self.check_svg(out)

    def test_symmetrization_demo(self, capsys, tmp_path):
        out = tmp_path / "sym.svg"
        code, _ = run(
            capsys, "render", "--demo", "symmetrization", "--space", "spherical",
            "--out", str(out), "--seed", "9",
        )
        assert code == 0
        self.check_svg(out)

    def test_kp_demo(self, capsys, tmp_path):
        out = tmp_path / "kp.svg"
        code, _ = run(
            capsys, "render", "--demo", "kp", "--space", "euclidean", "-N", "6",
            "--lambda", "1", "--delta", "1", "--out", str(out),
        )
        assert code == 0
        self.check_svg(out)

    def test_union_dual_demo_default_radius(self, capsys, tmp_path):
        out = tmp_path / "ud.svg"
        code, _ = run(
            capsys, "render", "--demo", "union-dual", "--space", "hyperbolic",
            "--out", str(out), "--seed", "5",
        )
        assert code == 0
        self.check_svg(out)

    def test_needs_out(self, capsys):
        assert main(["render", "--demo", "kp", "--space", "euclidean"]) == 2


class TestReportReproducibility:
    def payload_of(self, path):
        doc = json.loads(path.read_text())
        doc.pop("meta", None)
        return json.dumps(doc, sort_keys=True)

    def test_rerun_is_byte_identical_outside_meta(self, capsys, tmp_path):
        p = write_points(tmp_path / "p.json", "euclidean", 2, [[0.0, 0.0], [0.7, 0.2]])
        outs = []
        for name in ("r1.json", "r2.json"):
            out = tmp_path / name
            code = main([
                "dual-volume", "--points", p, "-r", "1", "--n-mc", "60000",
                "--seed", "21", "--out", str(out),
            ])
            assert code == 0
            outs.append(self.payload_of(out))
        assert outs[0] == outs[1]

    def test_thread_count_does_not_change_payload(self, capsys, tmp_path, monkeypatch):
        p = write_points(tmp_path / "p.json", "euclidean", 2, [[0.0, 0.0], [0.7, 0.2]])
        payloads = []
        n = str(3 * 32768 + 577)
        for threads in ("1", "4"):
            monkeypatch.setenv("CURVBALL_THREADS", threads)
            out = tmp_path / f"t{threads}.json"
            code = main([
                "dual-volume", "--points", p, "-r", "1", "--n-mc", n,
                "--seed", "22", "--out", str(out),
            ])
            assert code == 0
            payloads.append(self.payload_of(out))
        assert payloads[0] == payloads[1]
