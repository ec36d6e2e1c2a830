import json
import subprocess
import sys
import time

import pytest

from securehull import geometry as g
from securehull.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out.strip().splitlines()
    return code, [json.loads(line) for line in out]


@pytest.fixture
def shapes_dir(tmp_path, capsys):
    specs = {
        "cube": ["--kind", "cuboid"],
        "cube2": ["--kind", "cuboid"],
        "far": ["--kind", "cuboid", "--center", "5,0,0"],
        "touch": ["--kind", "cuboid", "--center", "1,0,0"],
    }
    for name, extra in specs.items():
        assert run(capsys, "gen-shape", *extra, "--out", tmp_path / f"{name}.json")[0] == 0
    return tmp_path


def test_keygen_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        code, (info,) = run(capsys, "keygen", "--bits", 1024, "--seed", 7, "--out", tmp_path / name)
        assert code == 0 and info["key_bits"] == 1024
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_keygen_bad_size(tmp_path, capsys):
    assert main(["keygen", "--bits", "999", "--out", str(tmp_path / "k")]) == 2
    assert "999" in capsys.readouterr().err
    assert not (tmp_path / "k").exists()


def test_gen_shape_kinds(capsys):
    _, (cube,) = run(capsys, "gen-shape", "--kind", "cuboid", "--scale", 1)
    assert len(cube["vertices"]) == 8
    _, (pyr,) = run(capsys, "gen-shape", "--kind", "pyramid")
    hull = g.ConvexHull.from_json(pyr)
    assert len(hull) == 5 and sum(1 for v in hull.vertices if v[2] == 0) == 4
    _, (rnd,) = run(capsys, "gen-shape", "--kind", "random", "--vertices", 32, "--seed", 3)
    assert len(g.validate_hull(g.ConvexHull.from_json(rnd).vertices)) == 32
    assert main(["gen-shape", "--kind", "random", "--vertices", "3"]) == 2


def test_verify(shapes_dir, capsys):
    code, (rep,) = run(capsys, "verify", "--shape-a", shapes_dir / "cube.json", "--shape-b", shapes_dir / "touch.json")
    assert code == 0 and rep["oracle"] == rep["plaintext"] == "INTERSECT" and rep["agree"]
    code, _ = run(capsys, "verify", "--shape-a", shapes_dir / "cube.json", "--shape-b", shapes_dir / "far.json")
    assert code == 1


def test_run_local(shapes_dir, capsys, tmp_path):
    common = ["--seed", 1, "--key-bits", 1024]
    code, (rep,) = run(capsys, "run-local", "--shape-a", shapes_dir / "cube.json", "--shape-b", shapes_dir / "cube2.json", *common)
    assert code == 0 and rep["verdict"] == "INTERSECT" and rep["audit_violations"] == 0
    code, (rep,) = run(
        capsys, "run-local", "--shape-a", shapes_dir / "cube.json", "--shape-b", shapes_dir / "far.json",
        "--transport", "memory", "--transcript", tmp_path / "t", *common,
    )
    assert code == 1 and rep["iterations"] >= 1 and rep["bytes_sent"] > 0
    lines = (tmp_path / "t.A.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["type"] == "HELLO"


def test_run_local_bad_config(shapes_dir, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"frac_bits": 32, "bogus": 1}))
    assert main(["run-local", "--shape-a", str(shapes_dir / "cube.json"), "--shape-b", str(shapes_dir / "far.json"), "--config", str(cfg)]) == 2


def test_bench(capsys):
    code, rows = run(capsys, "bench", "--pairs", 2, "--vertices", 8, "--seed", 1)
    assert code == 0 and len(rows) == 3
    assert all(r["match"] and r["iterations"] <= r["max_iter"] for r in rows[:2])
    assert rows[-1]["summary"]["mismatches"] == 0


def _spawn(*argv):
    return subprocess.Popen(
        [sys.executable, "-m", "securehull.cli", *map(str, argv)],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )


def _free_port():
    import socket

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_connect_processes(shapes_dir, tmp_path):
    port = _free_port()
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"key_bits": 1024, "seed": 4, "timeout_ms": 20000}))
    srv = _spawn("serve", "--listen", f"127.0.0.1:{port}", "--shape", shapes_dir / "cube.json", "--config", cfg,
                 "--transcript", tmp_path / "a.jsonl")
    time.sleep(0.3)
    cli = _spawn("connect", "--addr", f"127.0.0.1:{port}", "--shape", shapes_dir / "far.json", "--config", cfg)
    out_b, _ = cli.communicate(timeout=120)
    out_a, _ = srv.communicate(timeout=120)
    assert srv.returncode == cli.returncode == 1
    assert json.loads(out_a)["verdict"] == json.loads(out_b)["verdict"] == "DISJOINT"

    # same seed in-memory gives the same transcript for A
    main(["run-local", "--shape-a", str(shapes_dir / "cube.json"), "--shape-b", str(shapes_dir / "far.json"),
          "--config", str(cfg), "--transport", "memory", "--transcript", str(tmp_path / "m")])
    assert (tmp_path / "m.A.jsonl").read_text() == (tmp_path / "a.jsonl").read_text()


def test_connect_parameter_mismatch(shapes_dir, tmp_path):
    port = _free_port()
    ca, cb = tmp_path / "a.json", tmp_path / "b.json"
    ca.write_text(json.dumps({"key_bits": 1024, "frac_bits": 32, "timeout_ms": 20000}))
    cb.write_text(json.dumps({"key_bits": 1024, "frac_bits": 16, "timeout_ms": 20000}))
    srv = _spawn("serve", "--listen", f"127.0.0.1:{port}", "--shape", shapes_dir / "cube.json", "--config", ca)
    time.sleep(0.3)
    cli = _spawn("connect", "--addr", f"127.0.0.1:{port}", "--shape", shapes_dir / "far.json", "--config", cb)
    out_b, err_b = cli.communicate(timeout=120)
    out_a, _ = srv.communicate(timeout=120)
    assert cli.returncode == srv.returncode == 3
    assert "ParameterMismatch" in out_b and "ParameterMismatch" in out_a
