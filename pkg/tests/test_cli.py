import json

import pytest

from braidkit.cli import main

HOPF_ARGS = ["--cabm", "1.4", "--cban", "1.6"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_braid_text(capsys):
    code, out, _ = run(capsys, "braid", *HOPF_ARGS)
    assert code == 0
    assert "xi = -2" in out and "knot = Hopf link" in out
    assert "agreement = true" in out


def test_braid_json_decoupled(capsys):
    code, out, _ = run(capsys, "braid", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["xi_integral"] == 0 and data["knot_name"] == "unlink"


def test_braid_from_model_file(capsys, tmp_path):
    path = tmp_path / "h3.json"
    path.write_text(json.dumps({"variant": "H3", "ab_left": [0, 0, 4.5], "ab_right": [1, 0, 3],
                                "ba_left": [0, 0, 3], "ba_right": [1, 1.5], "c_i": 1.0}))
    code, out, _ = run(capsys, "braid", "--model", str(path))
    assert code == 0 and "xi = -6" in out


def test_boundary_is_domain_error(capsys):
    code, _, err = run(capsys, "braid", "--cabm", "1.0", "--cban", "0.5")
    assert code == 2 and "on phase boundary" in err


def test_usage_errors(capsys):
    assert run(capsys, "phase-diagram", "--axis1", "c_ab_neg_m:-3:3:0", "--axis2", "c_ba_n:-3:3:5")[0] == 1
    assert run(capsys, "braid", "--bogus")[0] == 1
    assert run(capsys, "spectrum", "obc", "--nodes", "41")[0] == 1
    assert run(capsys, "spectrum", "fl-sweep")[0] == 1


def test_missing_file_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "braid", "--model", str(tmp_path / "absent.json"))
    assert code == 3 and "absent.json" in err


def test_phase_diagram_csv(capsys):
    code, out, _ = run(capsys, "phase-diagram", "--axis1", "c_ab_neg_m:0:2:2", "--axis2", "c_ba_n:0.5:2:2")
    assert code == 0
    assert out.splitlines() == ["axis1,axis2,xi,boundary_flag", "0.0,0.5,0,0", "0.0,2.0,1,0",
                                "2.0,0.5,-3,0", "2.0,2.0,-2,0"]


def test_phase_diagram_thread_count_is_invisible(capsys, monkeypatch, tmp_path):
    argv = ["phase-diagram", "--axis1", "c_ab_neg_m:-3:3:21", "--axis2", "c_ba_n:-3:3:21"]
    serial, threaded = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--output", str(serial)]) == 0
    monkeypatch.setenv("BRAIDKIT_THREADS", "4")
    assert main(argv + ["--output", str(threaded)]) == 0
    assert serial.read_bytes() == threaded.read_bytes()


def test_spectrum_modes(capsys):
    code, out, _ = run(capsys, "spectrum", "obc", *HOPF_ARGS, "--nodes", "40")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 41
    assert lines[0] == "index,re_E,im_E,center_of_mass,ipr,side"
    code, out, _ = run(capsys, "spectrum", "pbc", *HOPF_ARGS, "--K", "256")
    assert code == 0 and len(out.splitlines()) == 513
    code, out, _ = run(capsys, "spectrum", "fl-sweep", *HOPF_ARGS, "--axis1", "c_ab_neg_m:1.4:2.5:2",
                       "--axis2", "c_ba_n:0.5:1.6:2")
    assert code == 0 and out.splitlines()[0] == "axis1,axis2,f_L" and len(out.splitlines()) == 5


def test_spectrum_ep_on_grid(capsys):
    code, _, err = run(capsys, "spectrum", "pbc", "--m", "2", "--cabm", "1.0", "--cban", "0.5", "--K", "64")
    assert code == 2


def test_ep_scan(capsys):
    code, out, _ = run(capsys, "ep-scan", "--orders", "2", "3", "4", "5", "6")
    assert code == 0 and len(out.splitlines()) == 21
    code, out, _ = run(capsys, "ep-scan", "--cabm", "0.5", "--cban", "0.5")
    assert code == 0 and json.loads(out) == {"k_values": [], "count": 0}
    code, out, _ = run(capsys, "ep-scan", "--m", "2", "--cabm", "0.5", "--cban", "1.0", "--param", "c_ba_n")
    data = json.loads(out)
    assert data["type"] == "Type1" and data["count"] == 1 and data["consistent"]


def test_circuit_synth_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "circuit", "synth", *HOPF_ARGS, "--c0", "4.7n")
    assert code == 0
    params = tmp_path / "params.json"
    params.write_text(out)
    assert json.loads(out)["C_AB0"] == pytest.approx(4.7e-9)
    code, out, _ = run(capsys, "circuit", "verify", "--params", str(params))
    data = json.loads(out)
    assert code == 0 and data["correspondence_residual"] < 1e-10 and data["greens_error"] < 1e-8


def test_circuit_export(capsys, tmp_path):
    path = tmp_path / "chain.cir"
    code, _, _ = run(capsys, "circuit", "export", "--phase", "1", "--cells", "10", "--output", str(path))
    text = path.read_text()
    assert code == 0 and text.rstrip().endswith(".end")
    assert sum(1 for line in text.splitlines() if line.startswith("L")) == 20


def test_circuit_stability(capsys):
    code, out, _ = run(capsys, "circuit", "stability", "--phase", "2", "--r0", "20")
    assert code == 0 and json.loads(out)["stable"]
    code, out, _ = run(capsys, "circuit", "stability", "--phase", "2", "--r0", "inf")
    assert code == 0 and not json.loads(out)["stable"]


def test_circuit_disorder(capsys):
    code, out, _ = run(capsys, "circuit", "disorder", *HOPF_ARGS, "--draws", "20", "--seed", "1")
    data = json.loads(out)
    assert code == 0 and data["xi"] == -2 and data["draws"] == 20 and data["stable"]


def test_circuit_not_representable(capsys):
    code, _, err = run(capsys, "circuit", "synth", "--cabm", "1.0", "--ci", "0.3")
    assert code == 2
