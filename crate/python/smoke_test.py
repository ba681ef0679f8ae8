"""Smoke test for the ancf14 Python module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`, then run
`python python/smoke_test.py` or `pytest python/smoke_test.py`.
"""

import json
import math
import pathlib
import tempfile

import ancf14
import jsonschema

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCHEMA = ROOT / "crates" / "bench" / "schema"


def load(path):
    return json.loads(path.read_text())


def test_presets():
    assert ancf14.presets() == ["spring", "princeton", "shaft", "buckling"]
    assert ancf14.__version__


def test_mass_matrix_is_symmetric_and_conserves_mass():
    e, nu, rho, w, h, length = 2e11, 0.3, 7800.0, 0.02, 0.01, 0.5
    m = ancf14.mass_matrix(e, nu, rho, w, h, length)
    assert len(m) == 14 and all(len(r) == 14 for r in m)
    for i in range(14):
        for j in range(14):
            assert math.isclose(m[i][j], m[j][i], rel_tol=0, abs_tol=1e-12)
    # A rigid translation along x has kinetic energy of the whole element mass.
    ux = [1.0 if i in (0, 7) else 0.0 for i in range(14)]
    total = sum(ux[i] * m[i][j] * ux[j] for i in range(14) for j in range(14))
    assert math.isclose(total, rho * w * h * length, rel_tol=1e-12)


def test_bishop_frames_are_orthonormal():
    tangents = [[math.cos(0.1 * i), math.sin(0.1 * i), 0.3] for i in range(30)]
    frames = ancf14.bishop_frames(tangents, [0.0, 0.0, 1.0])
    assert len(frames) == 30
    for f, t in zip(frames, tangents):
        n = math.sqrt(sum(c * c for c in t))
        for r in range(3):
            assert math.isclose(f[r][0], t[r] / n, abs_tol=1e-12)
        for a in range(3):
            for b in range(3):
                dot = sum(f[r][a] * f[r][b] for r in range(3))
                assert math.isclose(dot, 1.0 if a == b else 0.0, abs_tol=1e-12)


def test_run_writes_a_valid_summary():
    config = (ROOT / "configs" / "cantilever.json").read_text()
    jsonschema.validate(json.loads(config), load(SCHEMA / "config.schema.json"))
    with tempfile.TemporaryDirectory() as out:
        summary = json.loads(ancf14.run(config, out))
        on_disk = load(pathlib.Path(out) / "summary.json")
        jsonschema.validate(on_disk, load(SCHEMA / "summary.schema.json"))
        assert summary == on_disk
        assert summary["passed"]
        rows = (pathlib.Path(out) / "custom_static.csv").read_text().splitlines()
        assert rows[0].startswith("load_factor,node1_x_m")
        tip = -float(rows[-1].split(",")[7])
        exact = 10.0 / (3.0 * 2e11 * 0.02**4 / 12.0)
        assert abs(tip - exact) < 1e-3 * exact


def test_bad_config_raises_value_error():
    try:
        ancf14.run('{"name": "tower"}')
    except ValueError as e:
        assert "tower" in str(e)
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print("ok", name)
