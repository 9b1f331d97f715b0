import json

from odegeom.cli import run

JSON_KEYS = {"name", "status", "max_residual", "tolerance", "samples", "seed", "notes"}


def test_pentad_gn5_named_check():
    code, text = run(["pentad", "--ode", "gn5"])
    assert code == 0
    assert "P_equals_r_1_3" in text


def test_pentad_json_schema():
    code, text = run(["pentad", "--ode", "gn5", "--json"])
    assert code == 0
    rows = json.loads(text)
    assert isinstance(rows, list) and rows
    for row in rows:
        assert set(row) == JSON_KEYS
        assert row["status"] in ("pass", "fail", "error")
    names = [r["name"] for r in rows]
    assert names == sorted(names)


def test_json_byte_identical():
    _, t1 = run(["pentad", "--ode", "gn5", "--json"])
    _, t2 = run(["pentad", "--ode", "gn5", "--json"])
    assert t1 == t2


def test_unknown_ode_exit_2():
    code, text = run(["geom", "--ode", "unknown"])
    assert code == 2
    assert "unknown" in text


def test_geom_rejects_order4():
    code, text = run(["geom", "--ode", "conics4"])
    assert code == 2


def test_so3_rejects_gn5():
    code, text = run(["so3", "--ode", "gn5"])
    assert code == 2


def test_radon_rejects_gn5():
    code, text = run(["radon", "--ode", "gn5"])
    assert code == 2


def test_malformed_f_exit_2():
    code, text = run(["radon", "--ode", "conics5", "--f", "q +"])
    assert code == 2


def test_radon_point_requires_all_coords():
    code, text = run(["radon", "--ode", "conics5", "--point", "y=1,p=0.3"])
    assert code == 2


def test_bad_seed_overrides_are_recorded():
    code, text = run(["pentad", "--ode", "gn5", "--seed", "7", "--json"])
    assert code == 0
    rows = json.loads(text)
    assert all(r["seed"] == 7 for r in rows)


def test_samples_and_tol_overrides():
    code, text = run(["pentad", "--ode", "gn5", "--samples", "10", "--tol", "1e-7", "--json"])
    assert code == 0
    rows = json.loads(text)
    sampled = [r for r in rows if r["name"].startswith("residual_identity")]
    assert sampled and all(r["samples"] == 10 and r["tolerance"] == 1e-7 for r in sampled)


def test_ode_file(tmp_path):
    path = tmp_path / "mine.ode"
    path.write_text("name = mine\norder = 5\nrhs = -(40/9)*r^3/q^2 + 5*r*s/q\n")
    code, text = run(["pentad", "--ode", str(path)])
    assert code == 0
    # no catalogued forms for a file-defined equation, but identities run
    assert "residual_identity_1" in text


def test_failing_check_exit_1(tmp_path):
    # an equation without the structure: identities fail, exit code 1
    path = tmp_path / "bad.ode"
    path.write_text("name = bad\norder = 5\nrhs = -(41/9)*r^3/q^2 + 5*r*s/q\n")
    code, text = run(["pentad", "--ode", str(path)])
    assert code == 1
    assert "fail" in text
