"""End-to-end command-line surface, run in process."""
import json

import numpy as np
import pytest

from triphoton.cli import main
from triphoton.config import default_config, parse_config_text
from triphoton import io_formats

SMALL = """\
# reduced numerics for fast end-to-end runs
quad_nodes = 201
spectral_n2 = 128
spectral_n3 = 128
tau_max = 5 ns
tau_points = 16
map_n2 = 16
map_n3 = 16
"""


@pytest.fixture(scope="module")
def small_cfg(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "small.cfg"
    path.write_text(SMALL)
    return str(path)


def test_print_defaults_round_trips(capsys):
    assert main(["print-defaults"]) == 0
    text = capsys.readouterr().out
    assert parse_config_text(text).values == default_config().values


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out
    assert "[FAIL]" not in out


def test_chi5_map_command(small_cfg, tmp_path):
    out = tmp_path / "chi5.csv"
    assert main(["chi5-map", "--config", small_cfg, "--out", str(out)]) == 0
    grid = io_formats.read_complex_grid(out)
    assert grid.values.shape == (16, 16)
    assert np.all(np.isfinite(grid.values))


def test_linear_response_command(small_cfg, tmp_path):
    out = tmp_path / "lin"
    assert main(["linear-response", "--config", small_cfg,
                 "--out", str(out)]) == 0
    for name in ("dispersion_s2.csv", "dispersion_s3.csv"):
        rows = [l for l in (out / name).read_text().splitlines()
                if not l.startswith("#")]
        assert len(rows) == 128
        assert len(rows[0].split(",")) == 5


def test_correlation_map_command(small_cfg, tmp_path):
    out = tmp_path / "map.csv"
    assert main(["correlation-map", "--config", small_cfg,
                 "--out", str(out)]) == 0
    a1, a2, vals = io_formats.read_real_grid(out)
    assert vals.shape == (16, 16)
    assert a1[0] == 0.0 and a1[-1] == pytest.approx(5e-9)
    assert float(vals.max()) == pytest.approx(1.0)


def test_trace_commands(small_cfg, tmp_path):
    for kind in ("trace-out-S3", "trace-out-S2", "trace-out-S1"):
        out = tmp_path / f"{kind}.csv"
        assert main(["trace", "--config", small_cfg, "--kind", kind,
                     "--out", str(out)]) == 0
        axis, vals = io_formats.read_trace(out)
        assert np.all(vals >= 0)
        expected = 31 if kind == "trace-out-S1" else 16
        assert axis.size == expected
    out = tmp_path / "diag.csv"
    assert main(["trace", "--config", small_cfg, "--kind", "diag",
                 "--line", "5e-9", "--out", str(out)]) == 0
    axis, vals = io_formats.read_trace(out)
    assert axis.size == 16


def test_trace_diag_requires_line(small_cfg, tmp_path):
    code = main(["trace", "--config", small_cfg, "--kind", "diag",
                 "--out", str(tmp_path / "d.csv")])
    assert code == 2


def test_simulate_analyze_round_trip(small_cfg, tmp_path):
    events = tmp_path / "run.tpe1"
    argv = ["simulate", "--config", small_cfg, "--out", str(events),
            "--duration", "5", "--seed", "7"]
    assert main(argv) == 0
    first = events.read_bytes()
    assert main(argv) == 0
    assert events.read_bytes() == first  # byte-identical for the same seed

    stream, header = io_formats.read_events(events)
    assert header["seed"] == 7
    assert header["duration_ps"] == 5 * 10 ** 12
    assert stream.size > 0

    outdir = tmp_path / "analysis"
    assert main(["analyze", "--config", small_cfg, str(events),
                 "--out", str(outdir)]) == 0
    assert (outdir / "histogram2d.csv").exists()
    report = json.loads((outdir / "report.json").read_text())
    for key in ("triplet_rate_per_min", "accidental_rate_per_min",
                "g3_peak", "cauchy_schwarz", "zero_floor", "method"):
        assert key in report
    assert report["method"].startswith("direct")

    delayed = tmp_path / "analysis_delayed"
    assert main(["analyze", "--config", small_cfg, str(events),
                 "--out", str(delayed), "--method", "delayed"]) == 0
    rep2 = json.loads((delayed / "report.json").read_text())
    assert rep2["method"].startswith("delayed")
    # the two matchers reconstruct the same histogram
    assert (delayed / "histogram2d.csv").read_text().splitlines()[3:] == \
        (outdir / "histogram2d.csv").read_text().splitlines()[3:]


def test_sweep_command(small_cfg, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", small_cfg, "--param", "power2",
                 "--from", "5mW", "--to", "40mW", "--steps", "3",
                 "--out", str(out)]) == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 3
    powers = [float(r.split(",")[0]) for r in rows]
    assert powers == pytest.approx([5e-3, 22.5e-3, 40e-3])


def test_sweep_rejects_bad_arguments(small_cfg, tmp_path):
    out = str(tmp_path / "s.csv")
    assert main(["sweep", "--config", small_cfg, "--param", "power3",
                 "--from", "5mW", "--to", "40mW", "--out", out]) == 2
    assert main(["sweep", "--config", small_cfg, "--param", "power2",
                 "--from", "40mW", "--to", "5mW", "--out", out]) == 2
    assert main(["sweep", "--config", small_cfg, "--param", "power2",
                 "--from", "5mW", "--to", "40mW", "--steps", "1",
                 "--out", out]) == 2


def test_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("detuning2 = -150 MHz\n")
    out = str(tmp_path / "x.csv")
    assert main(["chi5-map", "--config", str(bad), "--out", out]) == 2


def test_undersampled_delay_grid_exit_code(tmp_path):
    cfg = tmp_path / "coarse.cfg"
    cfg.write_text("quad_nodes = 201\nspectral_n2 = 64\nspectral_n3 = 64\n"
                   "tau_max = 100 ns\ntau_points = 16\n")
    code = main(["correlation-map", "--config", str(cfg),
                 "--out", str(tmp_path / "m.csv")])
    assert code == 3
