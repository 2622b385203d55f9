import threading

import numpy as np
import pytest

from gct.cli import main
from gct.diagram import Diagram, compose
from gct.groups import Angle, Param
from gct.textio import print_diagram
from gct.theories import fixture, pair_signature


@pytest.fixture()
def experiment_file(tmp_path):
    sig = fixture("qucirc").signature
    d = compose(compose(Diagram.generator(sig, "ket0"),
                        Diagram.generator(sig, "X", phase=Param(np.pi / 2))),
                Diagram.generator(sig, "bra1"))
    path = tmp_path / "experiment.gct"
    path.write_text(print_diagram(d))
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_prints_amplitude(experiment_file, capsys):
    code, out, _ = run_cli(["eval", experiment_file, "--theory", "qucirc",
                            "--model", "qubit"], capsys)
    assert code == 0
    assert out.strip() == "scalar (0, -0.707106781187)"


def test_eval_missing_file_is_usage_error(capsys):
    code, _, err = run_cli(["eval", "/no/such/file.gct"], capsys)
    assert code == 2
    assert "no such diagram file" in err


def test_eval_parse_error_reports_position(tmp_path, capsys):
    p = tmp_path / "bad.gct"
    p.write_text("gct 1\nsignature qucirc\nnode n0 nosuch\n")
    code, _, err = run_cli(["eval", str(p)], capsys)
    assert code == 2
    assert "line 3" in err


def test_check_pass_exit_zero(capsys):
    code, out, _ = run_cli(["check", "--pair", "zx",
                            "--law", "strong-complementarity"], capsys)
    assert code == 0
    assert "bialgebra-law: PASS" in out


def test_check_failure_exit_one(capsys):
    code, out, _ = run_cli(["check", "--pair", "zz",
                            "--law", "complementarity"], capsys)
    assert code == 1
    assert "FAIL" in out


def test_check_output_is_deterministic(capsys):
    _, out1, _ = run_cli(["check", "--pair", "zx", "--law", "all"], capsys)
    _, out2, _ = run_cli(["check", "--pair", "zx", "--law", "all"], capsys)
    assert out1 == out2


def test_ghz_output(capsys):
    code, out, _ = run_cli(["ghz", "--parties", "3", "--angles", "0,90,90",
                            "--pair", "z2"], capsys)
    assert code == 0
    assert "111: 0.25" in out
    assert "infeasible: 0 of 64" in out


def test_ghz_bad_angles(capsys):
    code, _, err = run_cli(["ghz", "--angles", "0,x,90"], capsys)
    assert code == 2
    assert "bad angle list" in err


def test_soundness_output(capsys):
    code, out, _ = run_cli(["soundness", "--theory", "boolcirc",
                            "--model", "P"], capsys)
    assert code == 0
    assert "de-morgan: UNSOUND" in out
    assert "witness" in out


def test_rewrite_fuse(tmp_path, capsys):
    sig = pair_signature()
    d = compose(Diagram.spider(sig, "white", 1, 1, Angle(0.25)),
                Diagram.spider(sig, "white", 1, 1, Angle(0.5)))
    p = tmp_path / "chain.gct"
    p.write_text(print_diagram(d))
    code, out, _ = run_cli(["rewrite", str(p), "--strategy", "fuse"], capsys)
    assert code == 0
    assert "phase=a0.75" in out


def test_rewrite_steps_with_rule_file(tmp_path, capsys, boolcirc):
    from gct.textio import print_rules

    circ = boolcirc.extras["example_circuit"]
    dpath = tmp_path / "circ.gct"
    dpath.write_text(print_diagram(circ))
    rpath = tmp_path / "rules.gctr"
    rpath.write_text(print_rules(boolcirc.rules, boolcirc.signature))
    code, out, _ = run_cli(["rewrite", str(dpath), "--strategy", "steps=50",
                            "--rule", str(rpath)], capsys)
    assert code == 0
    assert "steps=" in out


def test_tolerance_env_override(experiment_file, capsys, monkeypatch):
    monkeypatch.setenv("GCT_TOLERANCE", "1e-6")
    code, _, _ = run_cli(["check", "--pair", "zx", "--law", "coherence"],
                         capsys)
    assert code == 0
    monkeypatch.setenv("GCT_TOLERANCE", "banana")
    code, _, err = run_cli(["check", "--pair", "zx", "--law", "coherence"],
                           capsys)
    assert code == 2
    assert "GCT_TOLERANCE" in err


def test_usage_error_from_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2


def test_server_mode_round_trip(experiment_file, capsys):
    import uvicorn

    from gct.service import create_app

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=8765,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    import time

    for _ in range(100):
        if server.started:
            break
        time.sleep(0.05)
    try:
        code, out, _ = run_cli(["--server", "http://127.0.0.1:8765",
                                "eval", experiment_file], capsys)
        assert code == 0
        assert "scalar (0, -0.707106781187)" == out.strip()
        code, out, _ = run_cli(["--server", "http://127.0.0.1:8765",
                                "check", "--pair", "zz",
                                "--law", "complementarity"], capsys)
        assert code == 1
    finally:
        server.should_exit = True
        thread.join(timeout=5)


def test_ghz_golden_output(capsys):
    code, out, _ = run_cli(["ghz", "--parties", "3", "--angles", "0,0,0",
                            "--pair", "z2"], capsys)
    assert code == 0
    want = [
        "GHZ-3 with angles 0, 0, 0 deg on pair qubit (Z, X)",
        "joint outcome distribution:",
        "  000: 0.25",
        "  011: 0.25",
        "  101: 0.25",
        "  110: 0.25",
        "parity distribution: {'(0)@Z2': 1.0, '(1)@Z2': 0.0}",
        "summed phase lands on: gray-classical[0]",
    ]
    assert out.splitlines()[:len(want)] == want


def test_rewrite_nf_on_foreign_diagram_is_clean_error(experiment_file, capsys):
    code, _, err = run_cli(["rewrite", experiment_file, "--strategy", "nf"],
                           capsys)
    assert code == 2
    assert "fragment" in err
