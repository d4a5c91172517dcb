"""Readers and writers for point CSVs, spectra TSVs, model files and tables.

Model files are ``key = value`` text with floats written by ``repr`` so
they round-trip exactly.
"""
from __future__ import annotations

import csv
import math
import warnings
from pathlib import Path

import numpy as np

from .errors import FormatError
from .metrics import bic
from .model import ClampEvent, FitResult, MixtureParams, WeightedSample

MODEL_FORMAT = "dpmix-model 1"


def _float(cell, line, column):
    try:
        v = float(cell)
    except ValueError:
        raise FormatError(f"non-numeric value {cell!r}", line, column) from None
    if not math.isfinite(v):
        raise FormatError(f"non-finite value {cell!r}", line, column)
    return v


def read_points(path) -> WeightedSample:
    """Read a CSV of observations: header row, column ``x``, optional ``count``.

    Repeated values are merged into counts.
    """
    xs, ys = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file", 1)
        ncol = len(header)
        if ncol not in (1, 2):
            raise FormatError(f"expected 1 or 2 columns, found {ncol}", 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != ncol:
                raise FormatError(f"expected {ncol} columns, found {len(row)}", line)
            xs.append(_float(row[0], line, 1))
            ys.append(_float(row[1], line, 2) if ncol == 2 else 1.0)
    if not xs:
        raise FormatError("no data rows", 2)
    ys = np.array(ys)
    if np.any(ys < 0):
        raise FormatError("counts must be nonnegative")
    try:
        return WeightedSample.from_observations(xs, ys)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_points(path, data: WeightedSample):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "count"])
        for x, y in zip(data.xs, data.ys):
            w.writerow([repr(float(x)), repr(float(y))])


def parse_range(text):
    """``"2000..4120"`` -> ``(2000.0, 4120.0)``."""
    if text is None:
        return None
    try:
        lo, hi = text.split("..")
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise ValueError(f"range must look like LO..HI, got {text!r}") from None
    if not lo <= hi:
        raise ValueError("range needs LO <= HI")
    return lo, hi


def read_spectra(path, mz_range=None, return_names=False):
    """Read a TSV of spectra sharing one m/z grid.

    Column 1 is the bin centre, every further column one sample. Rows must
    be ascending with a constant step (1e-6 relative); the step becomes
    ``bin_width``. Negative intensities are set to zero with a warning.
    ``mz_range=(lo, hi)`` keeps rows with lo <= m/z <= hi.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file", 1)
        ncol = len(header)
        if ncol < 2:
            raise FormatError("need an m/z column and at least one sample column", 1)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != ncol:
                raise FormatError(f"expected {ncol} columns, found {len(row)}", line)
            rows.append([_float(c, line, col + 1) for col, c in enumerate(row)])
    if not rows:
        raise FormatError("no data rows", 2)
    table = np.array(rows)
    mz = table[:, 0]
    if mz_range is not None:
        keep = (mz >= mz_range[0]) & (mz <= mz_range[1])
        table = table[keep]
        mz = table[:, 0]
        if len(mz) == 0:
            raise FormatError(f"no rows inside range {mz_range[0]}..{mz_range[1]}")
    bin_width = None
    if len(mz) > 1:
        steps = np.diff(mz)
        bin_width = (mz[-1] - mz[0]) / (len(mz) - 1)
        if not bin_width > 0 or np.max(np.abs(steps - bin_width)) > 1e-6 * bin_width:
            raise FormatError("m/z column must be ascending with a constant step")
        if np.max(np.abs(steps - bin_width)) > 1e-9 * bin_width:
            mz = mz[0] + bin_width * np.arange(len(mz))
    intens = table[:, 1:]
    n_neg = int(np.sum(intens < 0))
    if n_neg:
        warnings.warn(f"{path}: {n_neg} negative intensities clipped to 0", stacklevel=2)
        intens = np.maximum(intens, 0.0)
    samples = []
    for s in range(intens.shape[1]):
        try:
            samples.append(WeightedSample(mz, intens[:, s], bin_width))
        except ValueError as exc:
            raise FormatError(f"sample column {s + 2} ({header[s + 1]}): {exc}") from None
    if return_names:
        return samples, header[1:]
    return samples


def write_spectra(path, mz, intensities, names=None):
    intensities = np.atleast_2d(np.asarray(intensities, dtype=float))
    if intensities.shape[0] != len(mz):
        intensities = intensities.T
    names = names or [f"sample{i + 1}" for i in range(intensities.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["mz", *names])
        for x, row in zip(mz, intensities):
            w.writerow([repr(float(x)), *(repr(float(v)) for v in row)])


def _vec(values):
    return " ".join(repr(float(v)) for v in values)


def write_model(path, result: FitResult, data: WeightedSample, method: str = "", config=None):
    """Write a fitted model as ``key = value`` lines."""
    p = result.params
    W = data.total_weight
    lines = [
        "# univariate Gaussian mixture fitted by EM",
        f"format = {MODEL_FORMAT}",
        f"method = {method}",
        f"K = {p.K}",
        f"N = {data.N}",
        f"total_weight = {float(W)!r}",
        f"loglik = {float(result.loglik)!r}",
        f"bic = {bic(result.loglik, p.K, W)!r}" if W > 1 else "bic = nan",
        f"iterations = {result.iterations}",
        f"converged = {'true' if result.converged else 'false'}",
    ]
    if config is not None:
        lines += [
            f"sigma_min = {config.sigma_min!r}",
            f"alpha_min = {config.alpha_min!r}",
            f"max_iters = {config.max_iters}",
            f"rel_tol = {config.rel_tol!r}",
        ]
    lines += [
        f"weights = {_vec(p.weights)}",
        f"means = {_vec(p.means)}",
        f"stds = {_vec(p.stds)}",
        f"clamp_events = {len(result.clamp_events)}",
    ]
    lines += [f"clamp = {e.iteration} {e.component} {e.kind}" for e in result.clamp_events]
    Path(path).write_text("\n".join(lines) + "\n")


def write_params(path, params: MixtureParams, comment: str = "true mixture parameters"):
    lines = [
        f"# {comment}",
        f"format = {MODEL_FORMAT}",
        f"K = {params.K}",
        f"weights = {_vec(params.weights)}",
        f"means = {_vec(params.means)}",
        f"stds = {_vec(params.stds)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_model(path) -> dict:
    """Parse a model file into a dict; ``params`` holds a :class:`MixtureParams`."""
    out: dict = {"clamps": []}
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError("expected 'key = value'", n)
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "clamp":
            it, comp, kind = value.split()
            out["clamps"].append(ClampEvent(int(it), int(comp), kind))
        elif key in ("weights", "means", "stds"):
            out[key] = np.array([_float(v, n, None) for v in value.split()])
        elif key in ("K", "N", "iterations", "clamp_events", "max_iters"):
            out[key] = int(value)
        elif key in ("total_weight", "loglik", "bic", "sigma_min", "alpha_min", "rel_tol"):
            out[key] = float(value)
        elif key == "converged":
            out[key] = value == "true"
        else:
            out[key] = value
    try:
        out["params"] = MixtureParams(out["weights"], out["means"], out["stds"])
    except KeyError as exc:
        raise FormatError(f"model file lacks {exc.args[0]!r}") from None
    return out


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path, columns, rows):
    """CSV with a fixed column order; floats via ``repr``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])
