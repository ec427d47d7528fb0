"""Observed samples ``(x_i, A_i, Y_i)`` and CSV ingestion."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable sample.

    Attributes
    ----------
    covariates : ndarray, shape (n, p)
        Design matrix, intercept column first when ``has_intercept``.
    treatment : ndarray, shape (n,)
        Entries in {0, 1}.
    outcome : ndarray, shape (n,)
    column_names : tuple of str
    anchor_index : int
        Coefficient normalized to absolute value one.
    has_intercept : bool
        Whether column 0 is the constant 1.
    """

    covariates: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray
    column_names: tuple = field(default=None)
    anchor_index: int = 1
    has_intercept: bool = True

    def __post_init__(self):
        X = np.asarray(self.covariates, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        A = np.asarray(self.treatment, dtype=float).ravel()
        Y = np.asarray(self.outcome, dtype=float).ravel()
        if X.ndim != 2:
            raise ValidationError("covariates must be a 2-d matrix", module="data")
        n, p = X.shape
        if not (len(A) == len(Y) == n):
            raise ValidationError(
                f"sample sizes disagree: covariates {n}, treatment {len(A)}, outcome {len(Y)}",
                module="data")
        if n < 2:
            raise ValidationError(f"need at least 2 observations, got {n}", module="data")
        if not np.all(np.isfinite(X)):
            raise ValidationError("covariates contain non-finite values", module="data")
        if not np.all(np.isfinite(Y)):
            raise ValidationError("outcome contains non-finite values", module="data")
        if not np.all((A == 0) | (A == 1)):
            raise ValidationError("treatment entries must be 0 or 1", module="data")
        names = self.column_names
        if names is None:
            names = tuple(("intercept" if (j == 0 and self.has_intercept) else f"x{j}")
                          for j in range(p))
        names = tuple(str(s) for s in names)
        if len(names) != p:
            raise ValidationError(f"{len(names)} column names for {p} columns", module="data")
        anchor = int(self.anchor_index)
        if not 0 <= anchor < p:
            raise ValidationError(f"anchor index {anchor} outside [0, {p})", module="data")
        if self.has_intercept and anchor == 0:
            raise ValidationError("anchor cannot be the intercept column", module="data")
        object.__setattr__(self, "covariates", _frozen(X))
        object.__setattr__(self, "treatment", _frozen(A))
        object.__setattr__(self, "outcome", _frozen(Y))
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "anchor_index", anchor)

    @property
    def n(self):
        return self.covariates.shape[0]

    @property
    def p(self):
        return self.covariates.shape[1]

    @property
    def anchor_name(self):
        return self.column_names[self.anchor_index]

    def drop_columns(self, names):
        """Copy without the named covariate columns (anchor must survive)."""
        keep = [j for j, c in enumerate(self.column_names) if c not in set(names)]
        if self.anchor_index not in keep:
            raise ValidationError("cannot drop the anchor column", module="data")
        return Dataset(self.covariates[:, keep], self.treatment, self.outcome,
                       tuple(self.column_names[j] for j in keep),
                       keep.index(self.anchor_index), self.has_intercept)

    def to_csv(self, path, outcome_col="y", treatment_col="a"):
        """Write back in the layout :func:`load_csv` reads (intercept omitted)."""
        cols = list(range(1, self.p)) if self.has_intercept else list(range(self.p))
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([outcome_col, treatment_col] + [self.column_names[j] for j in cols])
            for i in range(self.n):
                w.writerow([repr(float(self.outcome[i])), int(self.treatment[i])]
                           + [repr(float(self.covariates[i, j])) for j in cols])


def load_csv(path, outcome_col, treatment_col, covariate_cols, add_intercept=True, anchor_col=None):
    """Read a comma-separated file with a header row into a :class:`Dataset`.

    Columns are ordered ``intercept`` (if requested) then ``covariate_cols``
    as listed. ``anchor_col`` defaults to the first covariate. Missing or
    unparseable cells are rejected with the (1-based, header excluded) data
    row and the column name.
    """
    covariate_cols = list(covariate_cols)
    if not covariate_cols:
        raise ValidationError("at least one covariate column is required", module="data")
    anchor_col = covariate_cols[0] if anchor_col is None else anchor_col
    if anchor_col not in covariate_cols:
        raise ValidationError(f"anchor column {anchor_col!r} is not among the covariates",
                              module="data")
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot open {path}: {exc.strerror}", module="data") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path} is empty", module="data")
        header = [h.strip() for h in header]
        wanted = [outcome_col, treatment_col] + covariate_cols
        for name in wanted:
            if name not in header:
                raise ValidationError(f"missing column {name!r} in {path}", module="data")
        idx = [header.index(name) for name in wanted]
        rows = []
        for rownum, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            vals = []
            for name, j in zip(wanted, idx):
                cell = rec[j].strip() if j < len(rec) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise ValidationError(
                        f"row {rownum}, column {name!r}: cannot parse {cell!r} as a number",
                        module="data") from None
                if not np.isfinite(v):
                    raise ValidationError(f"row {rownum}, column {name!r}: non-finite value",
                                          module="data")
                vals.append(v)
            if vals[1] not in (0.0, 1.0):
                raise ValidationError(
                    f"row {rownum}, column {treatment_col!r}: treatment must be 0 or 1, got {rec[idx[1]].strip()}",
                    module="data")
            rows.append(vals)
    if len(rows) < 2:
        raise ValidationError(f"need at least 2 data rows, found {len(rows)}", module="data")
    M = np.array(rows)
    X = M[:, 2:]
    names = list(covariate_cols)
    if add_intercept:
        X = np.column_stack([np.ones(len(M)), X])
        names = ["intercept"] + names
    return Dataset(X, M[:, 1], M[:, 0], tuple(names), names.index(anchor_col), add_intercept)


def validate_for_estimation(data):
    """Raise unless both arms are present and the anchor column varies."""
    A = data.treatment
    if A.min() == A.max():
        raise ValidationError("single treatment arm: need treated and control units",
                              module="data")
    if np.unique(data.covariates[:, data.anchor_index]).size < 2:
        raise ValidationError(
            f"degenerate anchor: column {data.anchor_name!r} is constant", module="data")
