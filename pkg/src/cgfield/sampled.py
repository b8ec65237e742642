"""Reader and writer for the CGF1 sampled-field text format.

Layout::

    CGF1 nt nx ny nz ht hx hy hz ncomp
    <one line per grid point, t-major, ncomp values each>

Real fields store plain numbers; complex fields store ``re,im`` tokens. An
optional ``# origin t x y z`` comment line may follow the header.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .spacetime_fields import Grid4, SpinorField, VecPotential

MAGIC = "CGF1"


class FormatError(ValueError):
    pass


def _parse_token(tok: str, row: int, col: int) -> complex:
    try:
        if "," in tok:
            re_, im = tok.split(",")
            val = complex(float(re_), float(im))
        else:
            val = complex(float(tok), 0.0)
    except ValueError:
        raise FormatError(f"row {row}, column {col}: cannot parse {tok!r}") from None
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise FormatError(f"row {row}, column {col}: non-finite value {tok!r}")
    return val


def read_cgf1(path) -> tuple[Grid4, np.ndarray, bool]:
    """Return (grid, values with shape (ncomp, nt, nx, ny, nz), is_complex)."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise FormatError("empty file")
    head = text[0].split()
    if len(head) != 10 or head[0] != MAGIC:
        raise FormatError(f"header must be '{MAGIC} nt nx ny nz ht hx hy hz ncomp'")
    try:
        dims = tuple(int(x) for x in head[1:5])
        spacing = tuple(float(x) for x in head[5:9])
        ncomp = int(head[9])
    except ValueError:
        raise FormatError("malformed header numbers") from None
    if ncomp < 1:
        raise FormatError("ncomp must be positive")
    origin = (0.0, 0.0, 0.0, 0.0)
    body_start = 1
    if len(text) > 1 and text[1].startswith("#"):
        parts = text[1][1:].split()
        if parts and parts[0] == "origin":
            if len(parts) != 5:
                raise FormatError("origin line needs four coordinates")
            origin = tuple(float(x) for x in parts[1:])
        body_start = 2
    grid = Grid4(dims, spacing, origin)
    rows = [ln for ln in text[body_start:] if ln.strip()]
    npts = int(np.prod(dims))
    if len(rows) != npts:
        raise FormatError(f"body has {len(rows)} rows, header implies {npts}")
    vals = np.empty((npts, ncomp), dtype=complex)
    is_complex = False
    for r, line in enumerate(rows):
        toks = line.split()
        if len(toks) != ncomp:
            raise FormatError(f"row {r + 1}: expected {ncomp} values, found {len(toks)}")
        for c, tok in enumerate(toks):
            is_complex |= "," in tok
            vals[r, c] = _parse_token(tok, r + 1, c + 1)
    data = vals.T.reshape((ncomp, *dims))
    return grid, (data if is_complex else data.real.copy()), is_complex


def load_sampled_field(path) -> VecPotential | SpinorField:
    """Four real components load as a potential, four complex ones as a spinor."""
    grid, data, is_complex = read_cgf1(path)
    if data.shape[0] != 4:
        raise FormatError(f"expected 4 components, found {data.shape[0]}")
    if is_complex:
        return SpinorField(grid, data, f"sampled:{path}")
    return VecPotential(grid, data, f"sampled:{path}")


def _fmt(x) -> str:
    if np.iscomplexobj(x):
        return f"{float(x.real)!r},{float(x.imag)!r}"
    return repr(float(x))


def write_cgf1(path, grid: Grid4, data: np.ndarray) -> None:
    """Write values exactly (shortest round-trip repr) and atomically."""
    data = np.asarray(data)
    if data.shape[1:] != grid.dims:
        raise ValueError("data does not match grid")
    ncomp = data.shape[0]
    flat = data.reshape(ncomp, -1).T
    lines = [
        " ".join([MAGIC, *(str(d) for d in grid.dims), *(repr(h) for h in grid.spacing), str(ncomp)]),
        "# origin " + " ".join(repr(o) for o in grid.origin),
    ]
    lines.extend(" ".join(_fmt(v) for v in row) for row in flat)
    atomic_write_text(path, "\n".join(lines) + "\n")


def save_field(path, field: VecPotential | SpinorField) -> None:
    write_cgf1(path, field.grid, field.a if isinstance(field, VecPotential) else field.psi)


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
