import json
import math

import pytest

from conftest import CONFIGS, GOLDEN
from franson_gup.cli import main
from franson_gup.config import ConfigError, RunConfig, load_config, loads_config
from franson_gup.output import csv_payload

MINIMAL = """
[system]
kind = "oscillator"
omega = 1.0
levels = [2, 1, 0]

[cascade]
tau1 = 100.0
tau2 = 0.1
tau3 = 1000.0

[interferometer]
delta_t = 10.0
window = 1.0
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def run_cli(tmp_path, *args, fmt=None, name="out"):
    out = tmp_path / name
    argv = list(args) + ["--out", str(out)]
    if fmt:
        argv += ["--format", fmt]
    code = main(argv)
    return code, out.read_text() if out.exists() else None


# --- config parsing -----------------------------------------------------------

def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write(tmp_path, MINIMAL))
    assert cfg.gup.beta == 0.0
    assert cfg.mc.seed == 0
    assert cfg.deltas() == (2.0, 9.0)
    assert cfg.validate().ok


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key interferometer.phi3"):
        loads_config(MINIMAL + "phi3 = 1.0\n")
    with pytest.raises(ConfigError, match=r"unknown section \[detector\]"):
        loads_config(MINIMAL + "[detector]\nx = 1\n")


def test_missing_keys_listed_together():
    with pytest.raises(ConfigError) as err:
        loads_config('[system]\nkind = "well"\n')
    msg = str(err.value)
    for key in ("system.levels", "cascade.tau1", "cascade.tau2", "cascade.tau3",
                "interferometer.delta_t", "interferometer.window"):
        assert key in msg
    assert msg.count("missing required keys") == 1


@pytest.mark.parametrize("patch, needle", [
    (("omega = 1.0", 'omega = "fast"'), "expected a number"),
    (("levels = [2, 1, 0]", "levels = [2, 2, 0]"), "n1 > n2 > n3"),
    (('kind = "oscillator"', 'kind = "atom"'), "system.kind"),
    (("omega = 1.0", "width = 1.0"), "omega is required"),
])
def test_semantic_errors(patch, needle):
    with pytest.raises(ConfigError, match=needle):
        loads_config(MINIMAL.replace(*patch))


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")))
def test_round_trip(path, tmp_path):
    cfg = load_config(path)
    echo = write(tmp_path, cfg.to_toml(), "echo.toml")
    again = load_config(echo)
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()
    assert again.to_toml() == cfg.to_toml()


def test_envelope_config_echo_round_trips(tmp_path):
    code, text = run_cli(tmp_path, "rate", "--config", str(CONFIGS / "oscillator.toml"))
    env = json.loads(text)
    import tomli_w
    reloaded = RunConfig.from_dict(json.loads(json.dumps(env["config"])))
    assert reloaded == load_config(CONFIGS / "oscillator.toml")
    assert tomli_w.dumps(env["config"]) == reloaded.to_toml()


# --- subcommands ----------------------------------------------------------------

def test_levels_oscillator(tmp_path):
    code, text = run_cli(tmp_path, "levels", "--config", str(CONFIGS / "oscillator.toml"))
    env = json.loads(text)
    assert code == 0
    assert set(env) == {"config", "meta", "payload", "validation"}
    assert env["payload"]["delta_e"] == 2.0
    assert env["payload"]["delta_e_p"] == 9.0
    assert "beta" not in env["payload"]
    assert [lv["e_p"] for lv in env["payload"]["levels"]] == [9.75, 3.75, 0.75]


def test_levels_well(tmp_path):
    code, text = run_cli(tmp_path, "levels", "--config", str(CONFIGS / "well.toml"))
    payload = json.loads(text)["payload"]
    assert payload["delta_e"] == pytest.approx(4.0, rel=1e-14)
    assert payload["delta_e_p"] == pytest.approx(80.0, rel=1e-14)


def test_rate_beta_zero_matches_baseline(tmp_path):
    cfg = write(tmp_path, MINIMAL.replace("window = 1.0", "window = 1.0\nphi1 = 0.4\nphi2 = 1.1"))
    code, text = run_cli(tmp_path, "rate", "--config", str(cfg))
    p = json.loads(text)["payload"]
    assert code == 0
    assert p["rate"] == p["rate_baseline"]
    assert p["rate"] == pytest.approx(0.25 * math.cos((20.0 + 1.5) / 2) ** 2, rel=1e-13)


def test_rate_sample_config_golden(tmp_path):
    code, text = run_cli(tmp_path, "rate", "--config", str(CONFIGS / "oscillator.toml"))
    p = json.loads(text)["payload"]
    # R0 = 1, R' = 0.5, beta = 1e-3, Phi = 2*10 + 1e-3*9*10
    r0 = 1 + 2e-3 * 1.0
    assert p["r0_gup"] == pytest.approx(r0, rel=1e-15)
    assert p["fringe_shift"] == pytest.approx(0.09, rel=1e-14)
    assert p["rate"] == pytest.approx(r0 / 4 * math.cos(20.09 / 2) ** 2, rel=1e-13)
    assert p["phase"]["total"] == pytest.approx(20.09, rel=1e-15)


def test_invalid_lifetimes_exit_2(tmp_path):
    cfg = write(tmp_path, MINIMAL.replace("tau3 = 1000.0", "tau3 = 50.0"))
    code, text = run_cli(tmp_path, "rate", "--config", str(cfg))
    env = json.loads(text)
    assert code == 2
    assert env["validation"]["ok"] is False
    assert "tau_order_13" in [v["code"] for v in env["validation"]["violations"]]
    assert env["payload"] == {}


def test_override_validation_flag(tmp_path):
    cfg = write(tmp_path, MINIMAL.replace("tau3 = 1000.0", "tau3 = 50.0"))
    code, text = run_cli(tmp_path, "rate", "--config", str(cfg), "--override-validation")
    env = json.loads(text)
    assert code == 0
    assert env["meta"]["override_validation"] is True
    assert env["config"]["validation"]["override"] is True
    assert env["validation"]["ok"] is False


def test_exit_code_io(tmp_path):
    assert main(["rate", "--config", str(tmp_path / "missing.toml")]) == 3
    assert main(["rate", "--config", str(CONFIGS / "oscillator.toml"),
                 "--out", str(tmp_path / "no" / "such" / "dir.json")]) == 3


def test_exit_code_malformed(tmp_path):
    assert main(["rate", "--config", str(write(tmp_path, "[system\nkind="))]) == 4
    assert main(["rate", "--config", str(write(tmp_path, MINIMAL + "bogus = 1\n"))]) == 4


def test_sweep_csv_rows(tmp_path):
    cfg = write(tmp_path, MINIMAL.replace("omega = 1.0", "omega = 1.0\nmass = 1.0") + """
[sweep]
axis = "phi2"
samples = 4
""")
    # choose delta_t so that dE * dT is a multiple of 2 pi: dE = 2
    text = cfg.read_text().replace("delta_t = 10.0", f"delta_t = {math.pi!r}").replace(
        "window = 1.0", "window = 0.5")
    cfg.write_text(text)
    code, out = run_cli(tmp_path, "sweep", "--config", str(cfg), "--override-validation")
    assert code == 0
    lines = csv_payload(out).splitlines()
    assert lines[0] == "axis_name,axis_value,rate"
    rates = [float(line.split(",")[2]) for line in lines[1:]]
    assert rates == pytest.approx([0.25, 0.125, 0.0, 0.125], abs=1e-15)


@pytest.mark.parametrize("name", ["oscillator", "well"])
def test_sweep_golden_files(tmp_path, name):
    code, out = run_cli(tmp_path, "sweep", "--config", str(CONFIGS / f"{name}.toml"))
    golden = (GOLDEN / f"{name}_sweep.csv").read_text()
    assert code == 0
    assert out == golden


@pytest.mark.parametrize("name", ["oscillator", "well"])
def test_golden_values_follow_cos2_law(name):
    # independent re-derivation of every golden row from the closed form
    cfg = load_config(CONFIGS / f"{name}.toml")
    c = [complex(*z) for z in cfg.modes.c]
    cp = [complex(*z) for z in cfg.modes.c_prime]
    norm = sum(abs(z) ** 2 for z in c)
    cross = sum((x.conjugate() * y).real for x, y in zip(c, cp))
    de, de_p = cfg.deltas()
    i = cfg.interferometer
    lines = csv_payload((GOLDEN / f"{name}_sweep.csv").read_text()).splitlines()
    header = lines[0].split(",")
    betas = list(cfg.sweep.betas or (cfg.gup.beta,))
    assert header[:2] == ["axis_name", "axis_value"]
    for line in lines[1:]:
        cells = line.split(",")
        phi2 = float(cells[1])
        for k, beta in enumerate(betas):
            r0 = norm**2 + 4 * beta * norm * cross
            phase = (de + beta * de_p) * i.delta_t + i.phi1 + phi2
            assert float(cells[2 + k]) == pytest.approx(r0 / 4 * math.cos(phase / 2) ** 2,
                                                        rel=1e-12, abs=1e-16)


def test_beta_pair_sweep_has_two_columns(tmp_path):
    code, out = run_cli(tmp_path, "sweep", "--config", str(CONFIGS / "oscillator.toml"))
    assert "# betas: 0, 0.001" in out
    assert csv_payload(out).splitlines()[0] == "axis_name,axis_value,rate_0,rate_1"


def test_mc_sweep_has_std_error(tmp_path):
    cfg = write(tmp_path, MINIMAL + """
[mc]
n_pairs = 20000
seed = 3

[sweep]
mode = "mc"
samples = 5
""")
    code, out = run_cli(tmp_path, "sweep", "--config", str(cfg))
    assert code == 0
    lines = csv_payload(out).splitlines()
    assert lines[0] == "axis_name,axis_value,rate,std_error"
    assert len(lines) == 6


def test_mc_command_json(tmp_path):
    code, text = run_cli(tmp_path, "mc", "--config", str(CONFIGS / "oscillator.toml"), "--seed", "11")
    env = json.loads(text)
    rec = env["payload"]["record"]
    assert code == 0
    assert rec["seed"] == 11 == env["meta"]["seed"] == env["config"]["mc"]["seed"]
    assert abs(rec["rate_estimate"] - env["payload"]["analytic_rate"]) <= 4 * rec["std_error"]


def test_chsh_command(tmp_path):
    code, text = run_cli(tmp_path, "chsh", "--config", str(CONFIGS / "oscillator.toml"))
    p = json.loads(text)["payload"]
    assert code == 0
    assert p["max"]["s_value"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    fixed = p["fixed_settings"]
    assert [f["beta"] for f in fixed] == [0.0, 0.001, 0.01]
    s = [f["s_value"] for f in fixed]
    assert len(set(s)) == 3
    theta0 = 20.0
    for f in fixed:
        assert f["s_value"] == pytest.approx(2 * math.sqrt(2) * math.cos(theta0 + f["fringe_shift"]), abs=1e-12)


def test_chsh_payload_json_round_trip(tmp_path):
    _, text = run_cli(tmp_path, "chsh", "--config", str(CONFIGS / "oscillator.toml"))
    env = json.loads(text)
    assert json.loads(json.dumps(env)) == env


def test_csv_record_format(tmp_path):
    code, out = run_cli(tmp_path, "levels", "--config", str(CONFIGS / "well.toml"), fmt="csv")
    body = csv_payload(out).splitlines()
    assert body[0] == "key,value"
    assert "delta_e_p,80" in body or any(line.startswith("delta_e_p,") for line in body)


def test_mc_csv_deterministic(tmp_path):
    args = ["mc", "--config", str(CONFIGS / "oscillator.toml")]
    _, a = run_cli(tmp_path, *args, fmt="csv", name="a.csv")
    _, b = run_cli(tmp_path, *args, fmt="csv", name="b.csv")
    assert a == b


def test_output_path_from_config(tmp_path):
    target = tmp_path / "from_config.json"
    cfg = write(tmp_path, MINIMAL + f'\n[output]\npath = "{target}"\nformat = "json"\n')
    assert main(["levels", "--config", str(cfg)]) == 0
    assert json.loads(target.read_text())["payload"]["delta_e"] == 2.0


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "franson_gup", "levels", "--config",
                          str(CONFIGS / "oscillator.toml")], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["payload"]["delta_e"] == 2.0
