import json
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("name,args", [
    ("geophysics_experiment.py", ["--seeds", "1"]),
    ("boundary_effects_1d.py", ["--seeds", "1", "--r", "60", "--grid", "100"]),
    ("matvec_scaling.py", ["--max-log2", "6", "--dense-max-log2", "5", "--repeats", "2"]),
])
def test_script_runs(name, args):
    res = subprocess.run([sys.executable, str(SCRIPTS / name), *args],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip()


def test_experiment_script_output_is_json():
    res = subprocess.run([sys.executable, str(SCRIPTS / "geophysics_experiment.py"), "--seeds", "1"],
                         capture_output=True, text=True, timeout=120)
    row = json.loads(res.stdout.splitlines()[0])
    assert row["error_cosine"] < row["error_periodic"]
