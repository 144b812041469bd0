"""Schema validation of the CSV readers."""

import numpy as np
import pytest

from figkit import SchemaError, read_diag, read_series, read_snapshot
from figkit.io import read_table


def write(path, text):
    path.write_text(text)
    return path


def test_read_snapshot_roundtrip(tmp_path):
    csv = write(tmp_path / "s.csv",
                "x,v,value\n0,-1,1\n0,0,2\n0,1,3\n1,-1,4\n1,0,5\n1,1,6\n")
    x, v, vals, name = read_snapshot(csv)
    assert name == "v"
    assert np.allclose(x, [0, 1])
    assert np.allclose(v, [-1, 0, 1])
    assert np.allclose(vals, [[1, 2, 3], [4, 5, 6]])


def test_read_snapshot_xi_coordinate(tmp_path):
    csv = write(tmp_path / "s.csv", "x,xi,value\n0,-1,0\n0,1,0\n")
    _, _, _, name = read_snapshot(csv)
    assert name == "xi"


@pytest.mark.parametrize("text", [
    "x,y,value\n0,0,1\n",                 # wrong coordinate name
    "x,v\n0,0\n",                         # missing column
    "x,v,value\n0,0,banana\n",            # non-numeric
    "x,v,value\n0,-1,1\n0,1,2\n1,-1,3\n",  # incomplete grid
    "",                                    # empty file
])
def test_read_snapshot_rejects_bad_schemas(tmp_path, text):
    with pytest.raises(SchemaError):
        read_snapshot(write(tmp_path / "bad.csv", text))


def test_read_snapshot_missing_file(tmp_path):
    with pytest.raises(SchemaError):
        read_snapshot(tmp_path / "nope.csv")


def test_read_series_requires_columns(tmp_path):
    csv = write(tmp_path / "d.csv", "t,a\n0,1\n1,2\n")
    data = read_series(csv, required=("t", "a"))
    assert np.allclose(data["a"], [1, 2])
    with pytest.raises(SchemaError):
        read_series(csv, required=("t", "b"))


def test_read_diag_header_is_strict(tmp_path):
    good = "t,mass,max_f,max_g,momentum_residual,S,V\n0,1,1,1,0,1,1\n"
    data = read_diag(write(tmp_path / "diag.csv", good))
    assert data["mass"][0] == 1.0
    with pytest.raises(SchemaError):
        read_diag(write(tmp_path / "bad.csv",
                        "t,mass,max_f\n0,1,1\n"))


def test_read_table_header_is_strict(tmp_path):
    good = "Nxi,maxM_upwind,maxM_mcu1,maxM_mcu0\n101,4e-3,1e-16,1e-16\n"
    data = read_table(write(tmp_path / "t.csv", good))
    assert data["Nxi"][0] == 101
    with pytest.raises(SchemaError):
        read_table(write(tmp_path / "bad.csv", "a,b\n1,2\n"))
