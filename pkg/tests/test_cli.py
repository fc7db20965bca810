import csv
import io
import json

import numpy as np
import pytest

from fibertrap.cli import SWEEP_COLUMNS, main, parse_values, read_config
from fibertrap.errors import InvalidInputError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) if v else np.nan for v in r] for r in rows[1:]])


def test_mode_json(capsys):
    code, out, _ = run(capsys, "mode", "--config", "fig4")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"radius_um", "modes"}
    red, blue = data["modes"]
    assert {"V", "qa", "s", "w", "f", "xi", "beta_per_um", "decay_length_um"} <= set(red)
    assert red["qa"] == pytest.approx(0.2438, abs=2e-4)
    assert blue["qa"] == pytest.approx(0.9686, abs=5e-4)


def test_mode_csv(capsys):
    code, out, _ = run(capsys, "mode", "--config", "fig4", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("label,wavelength_um")
    assert len(lines) == 3


@pytest.mark.parametrize("argv", [
    ["mode", "--radius-um", "0.2", "--lambda1-um", "1.06"],
    ["mode", "--config", "fig4", "--pol", "elliptic"],
    ["report", "--config", "fig4", "--p1-mw", "-3"],
    ["report", "--config", "no-such-config"],
    ["sweep", "--config", "fig6", "--values", ""],
    ["sweep", "--config", "fig6", "--values", "1,x"],
    ["frobnicate"],
])
def test_bad_input_exits_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_multimode_exits_3(capsys):
    assert run(capsys, "mode", "--config", "fig4", "--radius-um", "0.4")[0] == 3


def test_potential_circular(capsys, tmp_path):
    code, _, _ = run(capsys, "potential", "--config", "fig4", "--out", str(tmp_path))
    assert code == 0
    head, rad = table((tmp_path / "radial.csv").read_text())
    assert head == ["r_um", "D_um", "U1_mK", "U2_mK", "U_net_mK", "V_vdw_mK", "U_tot_mK"]
    i = np.nanargmin(np.where(rad[:, 0] > 0.3, rad[:, 4], np.inf))
    assert rad[i, 4] == pytest.approx(-2.9, rel=0.1)
    assert rad[i, 0] == pytest.approx(0.37, abs=0.01)
    head, az = table((tmp_path / "azimuthal.csv").read_text())
    assert head == ["phi_rad", "U_tot_mK"]
    assert np.ptp(az[:, 1]) <= 1e-12 * abs(az[0, 1])


def test_potential_linear_cut(capsys, tmp_path):
    code, _, _ = run(capsys, "potential", "--config", "fig11", "--out", str(tmp_path))
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"radial_x.csv", "radial_y.csv", "azimuthal.csv"}
    _, az = table((tmp_path / "azimuthal.csv").read_text())
    assert np.ptp(az[:, 1]) == pytest.approx(1.2, rel=0.15)


def test_potential_xy_grid(capsys, tmp_path):
    code, _, _ = run(capsys, "potential", "--config", "fig5", "--xy-points", "21", "--out", str(tmp_path))
    assert code == 0
    head, xy = table((tmp_path / "xy.csv").read_text())
    assert head == ["x_um", "y_um", "U_tot_mK"]
    assert xy.shape == (441, 3)
    assert np.isnan(xy[220, 2])  # the fiber axis is inside the core


def test_potential_no_trap(capsys, tmp_path):
    code, _, err = run(capsys, "potential", "--config", "fig4", "--p2-mw", "0", "--out", str(tmp_path))
    assert code == 3
    assert "no-minimum" in err
    assert (tmp_path / "radial.csv").exists()


def test_vdw_only_profile(capsys):
    code, out, _ = run(capsys, "potential", "--config", "fig3", "--points", "40")
    assert code == 0
    head, data = table(out)
    assert head[-1] == "V_over_V_flat"
    assert np.all((data[:, -1] > 0) & (data[:, -1] <= 1))
    assert np.all(data[:, 2] < 0)


def test_report(capsys):
    code, out, _ = run(capsys, "report", "--config", "fig4")
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["depth_mK"] == pytest.approx(2.9, rel=0.1)
    assert rep["tau_coh_ms"] == pytest.approx(32, rel=0.1)
    assert rep["tau_trap"] == pytest.approx(541, rel=0.1)


def test_report_linear(capsys):
    code, out, _ = run(capsys, "report", "--config", "fig9")
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["tau_coh_ms"] == pytest.approx(27.5, rel=0.1)
    assert rep["tau_trap"] == pytest.approx(500, rel=0.1)


def test_report_no_trap(capsys):
    code, out, _ = run(capsys, "report", "--config", "fig4", "--p2-mw", "0")
    assert code == 3
    assert json.loads(out)["trap"] is False


def test_bound(capsys, tmp_path):
    wf = tmp_path / "psi.csv"
    code, out, _ = run(capsys, "bound", "--config", "fig8", "--wavefunctions", str(wf))
    assert code == 0
    bs = json.loads(out)["bound_states"]
    assert bs["energies_mK"][0] == pytest.approx(-2.872, rel=0.01)
    assert len(bs["spacings_uK"]) == 5
    head, psi = table(wf.read_text())
    assert head == ["r_m_"] + [f"psi_{n}" for n in range(6)]
    dr = psi[1, 0] - psi[0, 0]
    np.testing.assert_allclose((psi[:, 1:] ** 2).sum(axis=0) * dr, 1.0, rtol=1e-6)


def test_bound_single_level(capsys):
    code, out, _ = run(capsys, "bound", "--config", "fig8", "--levels", "1")
    assert code == 0
    bs = json.loads(out)["bound_states"]
    assert len(bs["energies_mK"]) == 1 and "spacings_uK" not in bs


def _sweep(capsys, *argv):
    code, out, _ = run(capsys, "sweep", *argv)
    assert code == 0
    head, data = table(out)
    assert head == SWEEP_COLUMNS
    return {h: data[:, i] for i, h in enumerate(head)}


def test_sweep_red_power(capsys):
    s = _sweep(capsys, "--config", "fig6")
    assert np.all(np.diff(s["depth_mK"]) > 0)
    assert np.all(np.diff(s["r_m_um"]) < 0)


def test_sweep_blue_power(capsys):
    s = _sweep(capsys, "--config", "fig7", "--jobs", "3")
    assert np.all(np.diff(s["depth_mK"]) < 0)
    assert np.all(np.diff(s["r_m_um"]) > 0)


def test_sweep_parallel_is_deterministic(capsys):
    one = run(capsys, "sweep", "--config", "fig7")[1]
    many = run(capsys, "sweep", "--config", "fig7", "--jobs", "3")[1]
    assert one == many


def test_sweep_flags_no_trap_rows(capsys):
    s = _sweep(capsys, "--config", "fig7", "--values", "0,29")
    np.testing.assert_array_equal(s["trap"], [0, 1])
    assert np.isnan(s["depth_mK"][0])


def test_single_point_sweep_matches_report(capsys):
    s = _sweep(capsys, "--config", "fig4", "--axis", "P1", "--values", "30")
    rep = json.loads(run(capsys, "report", "--config", "fig4")[1])["report"]
    assert s["depth_mK"][0] == rep["depth_mK"]
    assert s["r_m_um"][0] == rep["r_m_um"]
    assert s["tau_trap_s"][0] == rep["tau_trap"]


def test_optimize_blue_sweep(capsys):
    s = _sweep(capsys, "--config", "fig6", "--optimize-blue", "--values", "20,30")
    assert s["p2_mw"][1] == pytest.approx(1.5 * s["p2_mw"][0], rel=1e-6)


def test_atom_file_and_config_file(capsys, tmp_path):
    from importlib import resources
    atom_path = tmp_path / "cs.dat"
    atom_path.write_text((resources.files("fibertrap") / "data" / "cesium.dat").read_text())
    cfg = tmp_path / "run.cfg"
    cfg.write_text("radius_um = 0.2\nlambda1_um = 1.06\nlambda2_nm = 700\np1_mw = 30\np2_mw = 10\n")
    bundled = run(capsys, "report", "--config", "fig4")[1]
    custom = run(capsys, "report", "--config", str(cfg), "--p2-mw", "29", "--atom", str(atom_path))[1]
    assert json.loads(custom)["report"] == json.loads(bundled)["report"]


def test_config_parsing(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("radius_um = 0.3  # comment\nvdw = no\n")
    assert read_config(str(p)) == {"radius_um": 0.3, "vdw": False}
    p.write_text("colour = red\n")
    with pytest.raises(InvalidInputError):
        read_config(str(p))


def test_parse_values():
    assert parse_values("1:3:3") == [1.0, 2.0, 3.0]
    assert parse_values("4, 5") == [4.0, 5.0]
    with pytest.raises(InvalidInputError):
        parse_values("")
