import numpy as np
import pytest

from cgfield import catalog
from cgfield import sampled
from cgfield import spacetime_fields as sf


def small_grid():
    return sf.Grid4((2, 3, 3, 3), (0.5, 0.1, 0.1, 0.2), (0.0, -0.1, 0.3, 1.0))


def test_real_roundtrip_is_exact(tmp_path):
    g = small_grid()
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, *g.dims)) * 1e3
    sampled.write_cgf1(tmp_path / "a.cgf", g, a)
    fld = sampled.load_sampled_field(tmp_path / "a.cgf")
    assert isinstance(fld, sf.VecPotential)
    assert fld.grid == g
    assert np.array_equal(fld.a, a)


def test_complex_roundtrip_loads_spinor(tmp_path):
    g = small_grid()
    psi = sf.SpinorField.from_closed_form(g, catalog.spinor_gaussian())
    sampled.save_field(tmp_path / "s.cgf", psi)
    back = sampled.load_sampled_field(tmp_path / "s.cgf")
    assert isinstance(back, sf.SpinorField)
    assert np.array_equal(back.psi, psi.psi)


def test_layout_is_t_major(tmp_path):
    g = sf.Grid4((2, 1, 1, 2), (1, 1, 1, 1))
    a = np.arange(16, dtype=float).reshape(4, 2, 1, 1, 2)
    sampled.write_cgf1(tmp_path / "o.cgf", g, a)
    lines = (tmp_path / "o.cgf").read_text().splitlines()
    assert lines[0] == "CGF1 2 1 1 2 1.0 1.0 1.0 1.0 4"
    # first row is (t=0, z=0), second (t=0, z=1), component values across columns
    assert [float(x) for x in lines[2].split()] == list(a[:, 0, 0, 0, 0])
    assert [float(x) for x in lines[3].split()] == list(a[:, 0, 0, 0, 1])


def test_file_without_origin_line(tmp_path):
    body = "\n".join(["0 0 0 0"] * 8)
    (tmp_path / "z.cgf").write_text("CGF1 1 2 2 2 1 0.5 0.5 0.5 4\n" + body + "\n")
    g, data, is_complex = sampled.read_cgf1(tmp_path / "z.cgf")
    assert g.origin == (0.0, 0.0, 0.0, 0.0) and g.dims == (1, 2, 2, 2)
    assert data.shape == (4, 1, 2, 2, 2) and not is_complex


def test_zero_field_five_cubed(tmp_path):
    g = sf.Grid4((5, 5, 5, 5), (0.1,) * 4)
    sampled.write_cgf1(tmp_path / "z.cgf", g, np.zeros((4, *g.dims)))
    A = sampled.load_sampled_field(tmp_path / "z.cgf")
    lag = sf.lagrangian_check(A, g.centre_index)
    assert lag.residual == 0.0 and lag.quarter_ff == 0.0


def test_nan_reports_location(tmp_path):
    text = "CGF1 1 1 1 2 1 1 1 1 4\n0 0 0 0\n0 0 nan 0\n"
    (tmp_path / "n.cgf").write_text(text)
    with pytest.raises(sampled.FormatError, match="row 2, column 3"):
        sampled.read_cgf1(tmp_path / "n.cgf")


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "empty"),
        ("CGF2 1 1 1 1 1 1 1 1 4\n0 0 0 0\n", "header"),
        ("CGF1 1 1 1 x 1 1 1 1 4\n0 0 0 0\n", "malformed"),
        ("CGF1 1 1 1 2 1 1 1 1 4\n0 0 0 0\n", "body has 1 rows"),
        ("CGF1 1 1 1 1 1 1 1 1 4\n0 0 0\n", "expected 4 values"),
        ("CGF1 1 1 1 1 1 1 1 1 4\n0 0 abc 0\n", "cannot parse"),
    ],
)
def test_malformed_files(tmp_path, text, match):
    (tmp_path / "bad.cgf").write_text(text)
    with pytest.raises(sampled.FormatError, match=match):
        sampled.read_cgf1(tmp_path / "bad.cgf")


def test_component_count_enforced(tmp_path):
    g = sf.Grid4((1, 1, 1, 1), (1, 1, 1, 1))
    sampled.write_cgf1(tmp_path / "c.cgf", g, np.zeros((3, 1, 1, 1, 1)))
    with pytest.raises(sampled.FormatError, match="4 components"):
        sampled.load_sampled_field(tmp_path / "c.cgf")


def test_write_shape_mismatch(tmp_path):
    with pytest.raises(ValueError):
        sampled.write_cgf1(tmp_path / "x.cgf", small_grid(), np.zeros((4, 1, 1, 1, 1)))
    assert not list(tmp_path.iterdir())


def test_atomic_write_leaves_no_temp(tmp_path):
    sampled.atomic_write_text(tmp_path / "f.txt", "hello\n")
    assert [p.name for p in tmp_path.iterdir()] == ["f.txt"]
    assert (tmp_path / "f.txt").read_text() == "hello\n"
