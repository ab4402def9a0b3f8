"""Step-function kernels on a uniform grid and their contraction algebra.

A kernel of arity q is a function on [0, bins*cell_width)^q that is constant
on grid cells, stored as a dense complex table of shape (bins,)*q. The class
is closed under every contraction used here, so all integrals are exact
cell sums and no quadrature error enters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import GridMismatchError, GroundSetMismatchError, MirrorSymmetryError, SizeLimitError
from .partitions import SetPartition, block_partition, iter_partition_blocks, meet_is_zero

MAX_TABLE_ENTRIES = 10**6
MAX_TAMED_GROUND = 12
MIRROR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GridKernel:
    """Dense step-function kernel: arity, grid, and a complex value table."""

    arity: int
    bins: int
    cell_width: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError(f"arity must be >= 0, got {self.arity}")
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if not self.cell_width > 0:
            raise ValueError(f"cell_width must be > 0, got {self.cell_width}")
        if self.arity > 0 and self.bins ** self.arity > MAX_TABLE_ENTRIES:
            raise SizeLimitError(
                f"table would hold {self.bins ** self.arity} entries, cap is {MAX_TABLE_ENTRIES}"
            )
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.bins,) * self.arity:
            raise ValueError(f"values shape {vals.shape} != {(self.bins,) * self.arity}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, arity: int, bins: int, cell_width: float) -> GridKernel:
        return cls(arity, bins, cell_width, np.zeros((bins,) * arity, dtype=np.complex128))

    @classmethod
    def constant(cls, value: complex, bins: int, cell_width: float) -> GridKernel:
        """Arity-0 kernel holding a single scalar."""
        return cls(0, bins, cell_width, np.asarray(value, dtype=np.complex128))

    @classmethod
    def indicator(cls, bins: int, cell_width: float = 1.0, cells: Sequence[int] | None = None) -> GridKernel:
        """Arity-1 indicator of a set of cells (all cells when omitted)."""
        v = np.zeros(bins, dtype=np.complex128)
        if cells is None:
            v[:] = 1.0
        else:
            for c in cells:
                if not 0 <= c < bins:
                    raise ValueError(f"cell index {c} out of range [0, {bins})")
                v[c] = 1.0
        return cls(1, bins, cell_width, v)

    @classmethod
    def random_mirror_symmetric(cls, arity: int, bins: int, cell_width: float, seed: int) -> GridKernel:
        """Seeded real kernel symmetrized by averaging with its adjoint."""
        rng = np.random.default_rng(seed)
        raw = rng.uniform(-1.0, 1.0, size=(bins,) * arity)
        k = cls(arity, bins, cell_width, raw.astype(np.complex128))
        return scale(add(k, adjoint(k)), 0.5)


def _require_same_grid(f: GridKernel, g: GridKernel) -> None:
    if f.bins != g.bins or f.cell_width != g.cell_width:
        raise GridMismatchError(
            f"grids differ: ({f.bins}, {f.cell_width}) vs ({g.bins}, {g.cell_width})"
        )


def adjoint(f: GridKernel) -> GridKernel:
    """Conjugate and reverse the argument order."""
    if f.arity == 0:
        return GridKernel(0, f.bins, f.cell_width, np.conj(f.values))
    rev = np.transpose(f.values, axes=tuple(reversed(range(f.arity))))
    return GridKernel(f.arity, f.bins, f.cell_width, np.conj(rev))


def is_mirror_symmetric(f: GridKernel, tol: float = MIRROR_TOL) -> bool:
    """Whether f equals its adjoint up to tol, relative to the peak value."""
    gap = float(np.max(np.abs(f.values - adjoint(f).values))) if f.arity else abs(
        complex(f.values) - complex(np.conj(f.values))
    )
    scale_ = max(1.0, float(np.max(np.abs(f.values))) if f.values.size else 0.0)
    return gap <= tol * scale_


def add(f: GridKernel, g: GridKernel) -> GridKernel:
    _require_same_grid(f, g)
    if f.arity != g.arity:
        raise GridMismatchError(f"arity mismatch: {f.arity} vs {g.arity}")
    return GridKernel(f.arity, f.bins, f.cell_width, f.values + g.values)


def subtract(f: GridKernel, g: GridKernel) -> GridKernel:
    return add(f, scale(g, -1.0))


def scale(f: GridKernel, c: complex) -> GridKernel:
    return GridKernel(f.arity, f.bins, f.cell_width, f.values * c)


def arc_contraction(f: GridKernel, g: GridKernel, k: int) -> GridKernel:
    """Integrate the last k arguments of f against the first k of g, in
    opposite order: the innermost integrated argument of f is the outermost
    of g. k = 0 is the plain tensor product. Output arity is m + n - 2k.
    """
    _require_same_grid(f, g)
    m, n = f.arity, g.arity
    if not 0 <= k <= min(m, n):
        raise ValueError(f"arc depth {k} outside 0..{min(m, n)}")
    if k == 0:
        vals = np.tensordot(f.values, g.values, axes=0)
    else:
        f_axes = list(range(m - k, m))
        g_axes = list(range(k - 1, -1, -1))
        vals = np.tensordot(f.values, g.values, axes=(f_axes, g_axes)) * f.cell_width**k
    return GridKernel(m + n - 2 * k, f.bins, f.cell_width, vals)


def star_contraction(f: GridKernel, g: GridKernel, k: int) -> GridKernel:
    """Like the depth-k arc, but the innermost pair of arguments is identified
    instead of integrated: k-1 pairs are integrated and one variable is shared
    by both factors. Output arity is m + n - 2k + 1.
    """
    _require_same_grid(f, g)
    m, n = f.arity, g.arity
    if not 1 <= k <= min(m, n):
        raise ValueError(f"star depth {k} outside 1..{min(m, n)}")
    out_arity = m + n - 2 * k + 1
    shared = m - k  # output slot of the identified variable
    s_labels = list(range(out_arity, out_arity + k - 1))
    f_labels = list(range(m - k + 1)) + s_labels[::-1]
    g_labels = s_labels + [shared] + list(range(m - k + 1, out_arity))
    vals = np.einsum(f.values, f_labels, g.values, g_labels, list(range(out_arity)))
    vals = vals * f.cell_width ** (k - 1)
    return GridKernel(out_arity, f.bins, f.cell_width, vals)


def norm2(f: GridKernel) -> float:
    """Squared L2 norm: cell_width^arity times the squared table sum."""
    return float(f.cell_width**f.arity * np.vdot(f.values, f.values).real)


def inner(f: GridKernel, g: GridKernel) -> complex:
    """L2 inner product, conjugate-linear in g."""
    _require_same_grid(f, g)
    if f.arity != g.arity:
        raise GridMismatchError(f"arity mismatch: {f.arity} vs {g.arity}")
    return complex(f.cell_width**f.arity * np.vdot(g.values, f.values))


def diagram_integral(f: GridKernel, m: int, sigma: SetPartition, absolute: bool = False) -> complex:
    """Integral of the m-fold tensor power of f with arguments glued along sigma.

    Position p of the tensor power (copy j holds positions (j-1)q+1 .. jq)
    takes the variable of the sigma-block containing p; one integral per block.
    With absolute=True the integrand is |f| in every copy.
    """
    q = f.arity
    if q < 1 or m < 1:
        raise ValueError(f"need arity >= 1 and m >= 1, got arity={q}, m={m}")
    if sigma.n != m * q:
        raise GroundSetMismatchError(f"partition of [{sigma.n}] cannot glue {m} copies of arity {q}")
    label = sigma.block_index()
    table = np.abs(f.values) if absolute else f.values
    args: list = []
    for j in range(m):
        args.append(table)
        args.append([label[p] for p in range(j * q + 1, j * q + q + 1)])
    args.append([])
    total = np.einsum(*args)
    return complex(total * f.cell_width ** len(sigma.blocks))


@dataclass(frozen=True)
class TamednessRow:
    sigma: SetPartition
    values: tuple[float, ...]
    peak: float
    bounded: bool


@dataclass(frozen=True)
class TamednessReport:
    """Glued |f_n| integrals over every partition with zero meet against the
    block partition, checked against a caller threshold.

    Boundedness here certifies only the supplied kernels at the supplied m;
    it is evidence, not a statement about the whole sequence.
    """

    m: int
    q: int
    threshold: float
    rows: tuple[TamednessRow, ...]
    scope: str = "bounded over the supplied kernels at this m only"

    @property
    def all_bounded(self) -> bool:
        return all(r.bounded for r in self.rows)


def tamedness_report(fs: Sequence[GridKernel], m: int, threshold: float) -> TamednessReport:
    """Scan all partitions of [mq] meeting the block partition in zero."""
    if not fs:
        raise ValueError("need at least one kernel")
    q = fs[0].arity
    if any(f.arity != q for f in fs):
        raise GridMismatchError("kernels must share one arity")
    if q < 1 or m < 1:
        raise ValueError(f"need arity >= 1 and m >= 1, got arity={q}, m={m}")
    if m * q > MAX_TAMED_GROUND:
        raise SizeLimitError(f"tamedness_report needs m*q <= {MAX_TAMED_GROUND}, got {m * q}")
    pi = block_partition(m, q)
    rows: list[TamednessRow] = []
    for blocks in iter_partition_blocks(m * q):
        sigma = SetPartition(m * q, blocks)
        if not meet_is_zero(sigma, pi):
            continue
        vals = tuple(diagram_integral(f, m, sigma, absolute=True).real for f in fs)
        peak = max(vals)
        rows.append(TamednessRow(sigma, vals, peak, peak <= threshold))
    return TamednessReport(m, q, threshold, tuple(rows))


def kernel_to_dict(f: GridKernel) -> dict:
    """File form: grid header plus sparse [i1..iq, re, im] rows for nonzero cells."""
    entries: list[list] = []
    if f.arity == 0:
        v = complex(f.values)
        if v != 0:
            entries.append([v.real, v.imag])
    else:
        for idx in np.ndindex(*f.values.shape):
            v = complex(f.values[idx])
            if v != 0:
                entries.append([*map(int, idx), v.real, v.imag])
    return {"q": f.arity, "bins": f.bins, "cell_width": f.cell_width, "entries": entries}


def kernel_from_dict(obj: dict) -> GridKernel:
    """Validate and rebuild a kernel from its file form."""
    if not isinstance(obj, dict):
        raise ValueError("kernel file must hold a JSON object")
    for key in ("q", "bins", "cell_width", "entries"):
        if key not in obj:
            raise ValueError(f"kernel file missing key '{key}'")
    q, bins = obj["q"], obj["bins"]
    if not (isinstance(q, int) and isinstance(bins, int)):
        raise ValueError("'q' and 'bins' must be integers")
    width = obj["cell_width"]
    if not isinstance(width, (int, float)) or isinstance(width, bool):
        raise ValueError("'cell_width' must be a number")
    if q < 0 or bins < 1 or not width > 0:
        raise ValueError(f"bad grid header: q={q}, bins={bins}, cell_width={width}")
    if q > 0 and bins**q > MAX_TABLE_ENTRIES:
        raise SizeLimitError(f"table would hold {bins ** q} entries, cap is {MAX_TABLE_ENTRIES}")
    values = np.zeros((bins,) * q, dtype=np.complex128)
    seen: set[tuple[int, ...]] = set()
    for row in obj["entries"]:
        if not isinstance(row, list) or len(row) != q + 2:
            raise ValueError(f"entry {row!r} must be a list of {q} indices plus re, im")
        idx = tuple(row[:q])
        re, im = row[q], row[q + 1]
        if any(not isinstance(i, int) or isinstance(i, bool) for i in idx):
            raise ValueError(f"entry indices must be integers, got {row!r}")
        if any(not 0 <= i < bins for i in idx):
            raise ValueError(f"entry index out of range in {row!r}")
        if any(not isinstance(x, (int, float)) or isinstance(x, bool) for x in (re, im)):
            raise ValueError(f"entry values must be numbers, got {row!r}")
        if idx in seen:
            raise ValueError(f"duplicate entry at index {idx}")
        seen.add(idx)
        values[idx] = complex(re, im)
    return GridKernel(q, bins, float(width), values)


def save_kernel(f: GridKernel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kernel_to_dict(f), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_kernel(path: str) -> GridKernel:
    with open(path, encoding="utf-8") as fh:
        return kernel_from_dict(json.load(fh))
