import numpy as np
import pytest

from otr import Dataset, ValidationError, load_csv, validate_for_estimation


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_four_row_file(tmp_path):
    p = write(tmp_path, "y,a,x1\n1.0,1,0.5\n2.0,0,-0.3\n0.5,1,1.2\n1.5,0,0.1\n")
    d = load_csv(p, "y", "a", ["x1"])
    assert (d.n, d.p) == (4, 2)
    assert d.anchor_name == "x1" and d.anchor_index == 1
    np.testing.assert_array_equal(d.covariates[:, 0], 1.0)
    np.testing.assert_array_equal(d.treatment, [1, 0, 1, 0])


def test_bad_treatment_names_row(tmp_path):
    p = write(tmp_path, "y,a,x1\n1,1,0\n1,0,1\n1,2,2\n1,0,3\n")
    with pytest.raises(ValidationError, match="row 3"):
        load_csv(p, "y", "a", ["x1"])


def test_unparseable_cell_names_row_and_column(tmp_path):
    p = write(tmp_path, "y,a,x1\n1,1,0\n1,0,oops\n")
    with pytest.raises(ValidationError, match=r"row 2, column 'x1'"):
        load_csv(p, "y", "a", ["x1"])


def test_missing_column_and_file(tmp_path):
    p = write(tmp_path, "y,a,x1\n1,1,0\n1,0,1\n")
    with pytest.raises(ValidationError, match="x2"):
        load_csv(p, "y", "a", ["x2"])
    with pytest.raises(ValidationError, match="cannot open"):
        load_csv(tmp_path / "nope.csv", "y", "a", ["x1"])


def test_single_arm_loads_then_rejected(tmp_path):
    p = write(tmp_path, "y,a,x1\n1,1,0\n2,1,1\n3,1,2\n")
    d = load_csv(p, "y", "a", ["x1"])
    with pytest.raises(ValidationError, match="single treatment arm"):
        validate_for_estimation(d)


def test_validation_outcomes():
    X = np.column_stack([np.ones(4), [0.1, 0.2, -0.3, 0.4]])
    validate_for_estimation(Dataset(X, [0, 1, 0, 1], [1, 2, 3, 4]))
    with pytest.raises(ValidationError, match="single treatment arm"):
        validate_for_estimation(Dataset(X, [0, 0, 0, 0], [1, 2, 3, 4]))
    Xc = np.column_stack([np.ones(4), np.ones(4), [0.1, 0.2, -0.3, 0.4]])
    with pytest.raises(ValidationError, match="degenerate anchor"):
        validate_for_estimation(Dataset(Xc, [0, 1, 0, 1], [1, 2, 3, 4]))


def test_constructor_checks():
    X = np.column_stack([np.ones(3), [1.0, 2.0, 3.0]])
    with pytest.raises(ValidationError):
        Dataset(X, [0, 1], [1, 2, 3])
    with pytest.raises(ValidationError):
        Dataset(X, [0, 1, 0.5], [1, 2, 3])
    with pytest.raises(ValidationError):
        Dataset(X, [0, 1, 1], [1, np.nan, 3])
    with pytest.raises(ValidationError):
        Dataset(X, [0, 1, 1], [1, 2, 3], anchor_index=0)


def test_immutable_and_roundtrip(tmp_path, rng):
    X = np.column_stack([np.ones(6), rng.standard_normal((6, 2))])
    d = Dataset(X, [0, 1, 0, 1, 1, 0], rng.standard_normal(6), ("intercept", "x1", "x2"))
    with pytest.raises(ValueError):
        d.covariates[0, 0] = 5.0
    d.to_csv(tmp_path / "r.csv")
    back = load_csv(tmp_path / "r.csv", "y", "a", ["x1", "x2"])
    np.testing.assert_array_equal(back.covariates, d.covariates)
    np.testing.assert_array_equal(back.outcome, d.outcome)
    assert back.drop_columns(["x2"]).column_names == ("intercept", "x1")
    with pytest.raises(ValidationError):
        back.drop_columns(["x1"])
