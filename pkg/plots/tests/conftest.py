"""Produce real CSV inputs once per session by driving the splinefx CLI.

The plot scripts are read-only CSV consumers; these fixtures exercise the
producing side strictly through its command-line interface.
"""

import subprocess
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).parents[2]
CONFIGS = REPO / "configs"


def run_cli(*args: str) -> None:
    proc = subprocess.run([sys.executable, "-m", "splinefx.cli", *args],
                          capture_output=True, text=True, cwd=REPO)
    if proc.returncode != 0:
        raise RuntimeError(f"splinefx {' '.join(args)} failed:\n{proc.stderr}")


@pytest.fixture(scope="session")
def outputs(tmp_path_factory) -> dict:
    root = tmp_path_factory.mktemp("runs")
    out = {"root": root}

    for name in ("table1_regression_kan", "table1_regression_mlp_p", "table1_regression_mlp_l"):
        run_cli("run", str(CONFIGS / f"{name}.yaml"), "--set", f"output_dir={root}")
        out[name] = root / name / "steps.csv"

    grid = root / "boundary_grid.csv"
    run_cli("run", str(CONFIGS / "table1_qubit_kan.yaml"), "--set", f"output_dir={root}",
            "--dump-grid", str(grid), "--grid-res", "80")
    out["grid"] = grid

    run_cli("sweep", str(CONFIGS / "bitwidth_sweep.yaml"), "--set", f"output_dir={root}")
    out["bitwidth_summary"] = root / "bitwidth_sweep_kan" / "summary.csv"

    run_cli("sweep", str(CONFIGS / "capacity_sweep.yaml"), "--set", f"output_dir={root}")
    out["capacity_summary"] = root / "capacity_sweep_kan" / "summary.csv"

    try:
        import sklearn  # noqa: F401  (bundled digits corpus)
        for name in ("digits_drift_bundled", "digits_drift_frozen"):
            run_cli("run", str(CONFIGS / f"{name}.yaml"), "--set", f"output_dir={root}")
        out["digits_online"] = root / "digits_drift_bundled" / "steps.csv"
        out["digits_frozen"] = root / "digits_drift_frozen_bundled" / "steps.csv"
    except ImportError:
        pass
    return out
