"""CSV ingestion/emission and the DCT image-reduction utility."""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

import numpy as np
from scipy.fft import dctn, idctn

SCORES_HEADER = ["index", "est_dim", "k_obs", "mmd", "p_value", "log_inv_p", "label"]


class InputError(Exception):
    """User-supplied input could not be used (maps to exit code 2)."""


def _try_parse_row(cells: list[str]) -> list[float] | None:
    try:
        return [float(c) for c in cells]
    except ValueError:
        return None


def read_point_cloud_csv(path: str | Path) -> np.ndarray:
    """Headerless CSV of one point per row; a leading row with non-numeric
    cells is treated as a header.  Malformed rows are reported by line number."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh), start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            parsed = _try_parse_row(cells)
            if parsed is None:
                if lineno == 1:
                    continue  # header row
                raise InputError(f"{path}:{lineno}: row is not numeric")
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise InputError(
                    f"{path}:{lineno}: expected {width} columns, got {len(parsed)}"
                )
            if not all(math.isfinite(v) for v in parsed):
                raise InputError(f"{path}:{lineno}: non-finite value")
            rows.append(parsed)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_point_cloud_csv(path: str | Path, coords: np.ndarray) -> None:
    lines = [",".join(format(v, ".17g") for v in row) for row in np.atleast_2d(coords)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_scores_csv(path: str | Path, results, labels) -> None:
    """Per-point detect output: index, est_dim, k_obs, mmd, p_value,
    log_inv_p, label.  Missing score fields are left empty."""
    lines = [",".join(SCORES_HEADER)]
    for res, label in zip(results, labels):
        liv = None if res.p_value is None else -math.log(res.p_value)
        lines.append(
            ",".join(
                _fmt(v)
                for v in (res.index, res.d_hat, res.k_obs, res.mmd, res.p_value, liv, label)
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_scores_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read a detect output back; empty cells become NaN."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"scores file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SCORES_HEADER:
            raise InputError(f"{path}: not a scores CSV (expected header {SCORES_HEADER})")
        columns: list[list[float]] = [[] for _ in SCORES_HEADER]
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(SCORES_HEADER):
                raise InputError(f"{path}:{lineno}: wrong column count")
            for col, cell in zip(columns, cells):
                col.append(float(cell) if cell.strip() else math.nan)
    return {name: np.asarray(col) for name, col in zip(SCORES_HEADER, columns)}


def read_label_column(path: str | Path) -> np.ndarray:
    """Single-column binary labels; any blank or non-binary row is an error."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"labels file not found: {path}")
    labels = []
    with open(path, newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh), start=1):
            if not cells or all(not c.strip() for c in cells):
                raise InputError(f"{path}:{lineno}: missing label")
            cell = cells[0].strip()
            if lineno == 1 and _try_parse_row([cell]) is None:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise InputError(f"{path}:{lineno}: missing or non-numeric label")
            if value not in (0.0, 1.0):
                raise InputError(f"{path}:{lineno}: label must be 0 or 1")
            labels.append(int(value))
    if not labels:
        raise InputError(f"{path}: no labels")
    return np.asarray(labels, dtype=int)


def dct_reduce(rows: np.ndarray, keep: int) -> np.ndarray:
    """Reduce flattened square grayscale images to their top-left keep x keep
    block of orthonormal type-II DCT coefficients (row-major)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    side = int(round(math.sqrt(rows.shape[1])))
    if side * side != rows.shape[1]:
        raise InputError(
            f"rows of length {rows.shape[1]} do not reshape to a square image"
        )
    if keep < 1 or keep > side:
        raise InputError(f"keep must be in [1, {side}]")
    out = np.empty((rows.shape[0], keep * keep))
    for i, row in enumerate(rows):
        coeffs = dctn(row.reshape(side, side), type=2, norm="ortho")
        out[i] = coeffs[:keep, :keep].ravel()
    return out


def dct_restore(coeffs_rows: np.ndarray, side: int) -> np.ndarray:
    """Inverse of dct_reduce when keep == side (full coefficient block)."""
    coeffs_rows = np.atleast_2d(np.asarray(coeffs_rows, dtype=float))
    out = np.empty((coeffs_rows.shape[0], side * side))
    for i, row in enumerate(coeffs_rows):
        out[i] = idctn(row.reshape(side, side), type=2, norm="ortho").ravel()
    return out
