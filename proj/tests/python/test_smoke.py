import os
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import blinfty

ROOT = os.environ.get("BLINFTY_SOURCE_DIR", os.path.join(os.path.dirname(__file__), "..", ".."))


def model(name):
    with open(os.path.join(ROOT, "models", name), encoding="utf-8") as f:
        return f.read()


def test_parse_and_print_round_trip():
    info = blinfty.parse_model(model("torsion1.model"))
    assert info["ok"]
    assert info["generators"] == ["a", "b"]
    assert info["operators"] == 1
    printed = blinfty.print_model(model("torsion1.model"))
    assert blinfty.print_model(printed) == printed


def test_diagnostics():
    info = blinfty.parse_model("")
    assert not info["ok"]
    assert "missing [generators] section" in info["diagnostics"][0]
    with pytest.raises(ValueError):
        blinfty.print_model("[generators]\na z2=0\n[operators]\nz -> 1\n")


def test_torsion():
    r = blinfty.torsion(model("torsion1.model"), kmax=4)
    assert r["value"] == 1
    assert r["witness"] == "a⊙b"
    assert r["report"] == "T = 1 (exact, action-closed); witness: a⊙b"
    assert blinfty.torsion(model("trivial.model"), kmax=6)["value"] is None


def test_run_command():
    status, out, err = blinfty.run("check", os.path.join(ROOT, "models", "trivial.model"))
    assert status == 0
    assert "BL_∞ axiom verified up to truncation" in out
    status, _, err = blinfty.run("check", os.path.join(ROOT, "models", "missing.model"))
    assert status == 2


def test_vdim():
    assert blinfty.vdim(3, [5]) == (Fraction(4), False)
    assert blinfty.vdim(3, [5], [5]) == (Fraction(-1), True)
    assert blinfty.vdim(4, [5], genus=1)[0] == 3
    with pytest.raises(ValueError):
        blinfty.vdim(3, [])


@given(st.integers(min_value=2, max_value=6), st.integers(min_value=1, max_value=5))
def test_handle_law(n, k0):
    got = sorted(blinfty.handle_cz(n, k0))
    assert got == [Fraction(c) for c in range(n + 1, 2 * k0 * n + n, 2)]
