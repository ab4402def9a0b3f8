"""Shared helpers: naive loop-based oracles the fast paths are checked against."""

from __future__ import annotations

import itertools

import numpy as np

from freechaos import GridKernel, SetPartition


def rel_close(a, b, tol=1e-12) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def naive_arc(f: GridKernel, g: GridKernel, k: int) -> np.ndarray:
    """Arc contraction by explicit nested summation.

    Output slot order: the free arguments of f, then the free arguments of g.
    The innermost integrated argument of f pairs with the outermost of g.
    """
    m, n, B = f.arity, g.arity, f.bins
    out_arity = m + n - 2 * k
    out = np.zeros((B,) * out_arity, dtype=np.complex128)
    for t in itertools.product(range(B), repeat=out_arity):
        total = 0j
        for s in itertools.product(range(B), repeat=k):
            fa = t[: m - k] + tuple(reversed(s))
            ga = s + t[m - k:]
            total += complex(f.values[fa]) * complex(g.values[ga])
        out[t] = total * f.cell_width**k
    return out


def naive_star(f: GridKernel, g: GridKernel, k: int) -> np.ndarray:
    """Shared-variable contraction by explicit nested summation.

    Slot m-k (0-based) of the output is the identified variable, present in
    both factors and not integrated; the other k-1 pairs are integrated in
    the same opposite order as the arc.
    """
    m, n, B = f.arity, g.arity, f.bins
    out_arity = m + n - 2 * k + 1
    out = np.zeros((B,) * out_arity, dtype=np.complex128)
    for t in itertools.product(range(B), repeat=out_arity):
        shared = t[m - k]
        total = 0j
        for s in itertools.product(range(B), repeat=k - 1):
            fa = t[: m - k + 1] + tuple(reversed(s))
            ga = s + (shared,) + t[m - k + 1:]
            total += complex(f.values[fa]) * complex(g.values[ga])
        out[t] = total * f.cell_width ** (k - 1)
    return out


def naive_glued(f: GridKernel, m: int, sigma: SetPartition, absolute: bool = False) -> complex:
    """Glued tensor-power integral by assigning one cell per block."""
    q, B = f.arity, f.bins
    label = sigma.block_index()
    nblocks = len(sigma.blocks)
    total = 0j
    for cells in itertools.product(range(B), repeat=nblocks):
        prod = 1 + 0j
        for j in range(m):
            idx = tuple(cells[label[p]] for p in range(j * q + 1, j * q + q + 1))
            v = complex(f.values[idx])
            prod *= abs(v) if absolute else v
        total += prod
    return total * f.cell_width**nblocks


def random_kernel(arity: int, bins: int, cell_width: float, seed: int, complex_values=False) -> GridKernel:
    """Seeded kernel with no symmetry imposed."""
    rng = np.random.default_rng(seed)
    vals = rng.uniform(-1.0, 1.0, size=(bins,) * arity)
    if complex_values:
        vals = vals + 1j * rng.uniform(-1.0, 1.0, size=(bins,) * arity)
    return GridKernel(arity, bins, cell_width, vals)


def element_gap(a, b) -> float:
    """Largest relative entrywise gap between two chaos elements, over all orders."""
    gap = 0.0
    for order in set(a.orders()) | set(b.orders()):
        fa, fb = a.term(order), b.term(order)
        va = fa.values if fa is not None else np.zeros(())
        vb = fb.values if fb is not None else np.zeros(())
        diff = float(np.max(np.abs(va - vb)))
        scale = max(1.0, float(np.max(np.abs(va))), float(np.max(np.abs(vb))))
        gap = max(gap, diff / scale)
    return gap
