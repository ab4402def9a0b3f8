"""Chaos expansions over grid kernels: products, traces, and moment engines.

An element is a finite sum of orthogonal integrals, stored as a map from
order to kernel; order 0 is the scalar part, kept inside the map (as an
arity-0 kernel) so multiplication and trace stay uniform. Three independent
routes compute the same moments: iterated products, diagram sums over
non-crossing classes, and a closed trace formula over contraction chains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .errors import GridMismatchError, MirrorSymmetryError, SizeLimitError
from .kernels import (
    GridKernel,
    adjoint,
    arc_contraction,
    diagram_integral,
    inner,
    is_mirror_symmetric,
    norm2,
    star_contraction,
)
from .partitions import MAX_NC_GROUND, catalan, nc0_classes, riordan

Measure = Literal["poisson", "wigner"]
MAX_ORACLE_ORDER = 14


def _check_measure(measure: str) -> None:
    if measure not in ("poisson", "wigner"):
        raise ValueError(f"measure must be 'poisson' or 'wigner', got {measure!r}")


def _require_mirror(f: GridKernel) -> None:
    if not is_mirror_symmetric(f):
        raise MirrorSymmetryError("kernel is not mirror symmetric")


@dataclass(frozen=True, eq=False)
class ChaosElement:
    """Finite chaos expansion on one grid: order -> kernel, zero terms pruned."""

    bins: int
    cell_width: float
    terms: dict[int, GridKernel]

    def __post_init__(self) -> None:
        for order, kern in self.terms.items():
            if order != kern.arity:
                raise ValueError(f"order {order} holds a kernel of arity {kern.arity}")
            if kern.bins != self.bins or kern.cell_width != self.cell_width:
                raise GridMismatchError("term kernel does not match the element grid")

    @classmethod
    def integral(cls, f: GridKernel) -> ChaosElement:
        """The single chaos integral of f."""
        if f.arity < 1:
            raise ValueError("integral needs arity >= 1; use from_scalar for constants")
        return cls(f.bins, f.cell_width, {f.arity: f})

    @classmethod
    def from_scalar(cls, value: complex, bins: int, cell_width: float) -> ChaosElement:
        if value == 0:
            return cls(bins, cell_width, {})
        return cls(bins, cell_width, {0: GridKernel.constant(value, bins, cell_width)})

    def term(self, order: int) -> GridKernel | None:
        return self.terms.get(order)

    def orders(self) -> tuple[int, ...]:
        return tuple(sorted(self.terms))

    def element_adjoint(self) -> ChaosElement:
        return ChaosElement(
            self.bins, self.cell_width, {k: adjoint(v) for k, v in self.terms.items()}
        )


def _accumulate(acc: dict[int, np.ndarray], order: int, kern: GridKernel) -> None:
    if order in acc:
        acc[order] = acc[order] + kern.values
    else:
        acc[order] = kern.values.copy()


def _build(bins: int, cell_width: float, acc: dict[int, np.ndarray]) -> ChaosElement:
    terms: dict[int, GridKernel] = {}
    for order in sorted(acc):
        vals = acc[order]
        if not np.any(vals):
            continue  # prune exact zeros only
        terms[order] = GridKernel(order, bins, cell_width, vals)
    return ChaosElement(bins, cell_width, terms)


def _multiply(a: ChaosElement, b: ChaosElement, with_star: bool) -> ChaosElement:
    if a.bins != b.bins or a.cell_width != b.cell_width:
        raise GridMismatchError("elements live on different grids")
    acc: dict[int, np.ndarray] = {}
    for p in sorted(a.terms):
        f = a.terms[p]
        for r in sorted(b.terms):
            g = b.terms[r]
            if p == 0 or r == 0:
                _accumulate(acc, p + r, GridKernel(p + r, a.bins, a.cell_width, f.values * g.values))
                continue
            for k in range(0, min(p, r) + 1):
                _accumulate(acc, p + r - 2 * k, arc_contraction(f, g, k))
            if with_star:
                for k in range(1, min(p, r) + 1):
                    _accumulate(acc, p + r - 2 * k + 1, star_contraction(f, g, k))
    return _build(a.bins, a.cell_width, acc)


def poisson_multiply(a: ChaosElement, b: ChaosElement) -> ChaosElement:
    """Product rule with both arc and shared-variable contraction terms."""
    return _multiply(a, b, with_star=True)


def wigner_multiply(a: ChaosElement, b: ChaosElement) -> ChaosElement:
    """Product rule with arc terms only."""
    return _multiply(a, b, with_star=False)


def trace(a: ChaosElement) -> complex:
    """The state applied to an element: its order-0 coefficient."""
    t = a.terms.get(0)
    return complex(t.values) if t is not None else 0j


def moment_product(f: GridKernel, m: int, measure: Measure = "poisson") -> complex:
    """m-th moment of the chaos integral of f by iterating the product rule."""
    _check_measure(measure)
    _require_mirror(f)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    mul = poisson_multiply if measure == "poisson" else wigner_multiply
    x = ChaosElement.integral(f)
    acc = x
    for _ in range(m - 1):
        acc = mul(acc, x)
    return trace(acc)


def moment_diagram(f: GridKernel, m: int, measure: Measure = "poisson") -> complex:
    """m-th moment as a sum of glued integrals over non-crossing diagram classes."""
    _check_measure(measure)
    _require_mirror(f)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m * f.arity > MAX_NC_GROUND:
        raise SizeLimitError(f"moment_diagram needs m*q <= {MAX_NC_GROUND}, got {m * f.arity}")
    pairings, _, ge2 = nc0_classes(m, f.arity)
    classes = ge2 if measure == "poisson" else pairings
    total = 0j
    for sigma in classes:
        total += diagram_integral(f, m, sigma)
    return total


@dataclass(frozen=True)
class MultisetWord:
    """Binary word of length m-1 marking which product steps keep a shared variable."""

    m: int
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"need m >= 1, got {self.m}")
        if len(self.word) != self.m - 1:
            raise ValueError(f"word length {len(self.word)} != m-1 = {self.m - 1}")
        if any(c not in (0, 1) for c in self.word):
            raise ValueError("word letters must be 0 or 1")

    @property
    def weight(self) -> int:
        return sum(self.word)

    @classmethod
    def zeros(cls, m: int) -> MultisetWord:
        return cls(m, (0,) * (m - 1))

    @classmethod
    def ones(cls, m: int) -> MultisetWord:
        return cls(m, (1,) * (m - 1))


def multiset_words(m: int, weight: int) -> list[MultisetWord]:
    """All length-(m-1) binary words of the given weight, lexicographic."""
    if not 0 <= weight <= m - 1:
        return []
    out = []
    for pos in itertools.combinations(range(m - 1), weight):
        w = [0] * (m - 1)
        for p in pos:
            w[p] = 1
        out.append(MultisetWord(m, tuple(w)))
    return out


def _admissible_upper(p: int, q: int, word: tuple[int, ...], r: tuple[int, ...]) -> int:
    return p * q + sum(word[k - 1] - 2 * r[k - 1] for k in range(1, p))


def _admissible_tuples(m: int, q: int, word: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    # depth r_p of step p must cover the shared variable (word letter) and
    # cannot exceed the arity accumulated before that step
    for r in itertools.product(range(q + 1), repeat=m - 1):
        ok = True
        for p in range(1, m):
            if not word[p - 1] <= r[p - 1] <= _admissible_upper(p, q, word, r):
                ok = False
                break
        if ok:
            yield r


@dataclass(frozen=True)
class IndexSets:
    """Contraction-depth tuples attached to a word, graded by what they select.

    admissible: every tuple a product chain can realize.
    closed: admissible tuples whose chain ends at order 0 (2*sum(r) = mq + weight).
    aligned: closed tuples with every depth in {0, (q+1)/2, q}, the letter
             forcing the midpoint exactly at the shared-variable steps;
             only defined for odd q (aligned_defined marks that).
    remainder: closed tuples not aligned.
    """

    m: int
    q: int
    word: MultisetWord
    admissible: tuple[tuple[int, ...], ...]
    closed: tuple[tuple[int, ...], ...]
    aligned: tuple[tuple[int, ...], ...]
    remainder: tuple[tuple[int, ...], ...]
    aligned_defined: bool


def index_sets(m: int, q: int, word: MultisetWord) -> IndexSets:
    """Enumerate the depth-tuple families for one word by exhaustive scan."""
    if m < 2 or q < 1:
        raise ValueError(f"need m >= 2 and q >= 1, got m={m}, q={q}")
    if word.m != m:
        raise ValueError(f"word is for m={word.m}, not m={m}")
    admissible = tuple(_admissible_tuples(m, q, word.word))
    target = m * q + word.weight
    closed = tuple(r for r in admissible if 2 * sum(r) == target)
    aligned_defined = q % 2 == 1
    aligned: tuple[tuple[int, ...], ...] = ()
    if aligned_defined:
        mid = (q + 1) // 2
        picked = []
        for r in closed:
            ok = all(v in (0, mid, q) for v in r)
            ok = ok and all(
                ((v in (0, q)) == (c == 0)) and ((v == mid) == (c == 1))
                for v, c in zip(r, word.word)
            )
            if ok:
                picked.append(r)
        aligned = tuple(picked)
    remainder = tuple(r for r in closed if r not in set(aligned))
    return IndexSets(m, q, word, admissible, closed, aligned, remainder, aligned_defined)


def _chain(f: GridKernel, word: tuple[int, ...], depths: tuple[int, ...]) -> GridKernel:
    # left-nested: ((f . f) . f) . f, one contraction per word letter
    x = f
    for letter, k in zip(word, depths):
        if letter == 0:
            x = arc_contraction(x, f, k)
        else:
            x = star_contraction(x, f, k)
    return x


def power_expansion(f: GridKernel, m: int) -> ChaosElement:
    """Closed form of the m-th power of the chaos integral of f.

    Sums left-nested contraction chains over all words and admissible depth
    tuples; the term for word sigma and depths r lands at order
    mq + weight(sigma) - 2*sum(r).
    """
    _require_mirror(f)
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    q = f.arity
    acc: dict[int, np.ndarray] = {}
    for weight in range(m):
        for word in multiset_words(m, weight):
            for depths in _admissible_tuples(m, q, word.word):
                kern = _chain(f, word.word, depths)
                _accumulate(acc, m * q + weight - 2 * sum(depths), kern)
    return _build(f.bins, f.cell_width, acc)


def _closing_tuples(m: int, q: int, word: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Depth tuples of length m-2 whose chain has arity exactly q at the end,
    ready to be closed by a full arc against one more copy.

    These are the admissible tuples for m-1 copies restricted by
    2*sum(r) = (m-2)q + weight; the literal order-0 restriction for m-1
    copies is unsatisfiable here because the closing arc supplies the last
    depth-q step itself.
    """
    out = []
    target = (m - 2) * q + sum(word)
    for r in itertools.product(range(q + 1), repeat=m - 2):
        ok = True
        for p in range(1, m - 1):
            if not word[p - 1] <= r[p - 1] <= _admissible_upper(p, q, word, r):
                ok = False
                break
        if ok and 2 * sum(r) == target:
            out.append(r)
    return out


def moment_trace_formula(f: GridKernel, m: int) -> complex:
    """m-th moment as a sum of closed contraction chains.

    Words of length m-2 whose weight differs in parity from mq contribute
    no tuples; the scan skips them up front.
    """
    _require_mirror(f)
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    q = f.arity
    total = 0j
    for weight in range(m - 1):
        if (weight - m * q) % 2:
            continue
        for word in multiset_words(m - 1, weight):
            for depths in _closing_tuples(m, q, word.word):
                chain = _chain(f, word.word, depths)
                total += complex(arc_contraction(chain, f, q).values)
    return total


def free_poisson_moment(lam: float, m: int) -> float:
    """m-th moment of the centered free Poisson law with rate lam."""
    if not lam > 0:
        raise ValueError(f"rate must be > 0, got {lam}")
    if not 1 <= m <= MAX_ORACLE_ORDER:
        raise SizeLimitError(f"free_poisson_moment needs 1 <= m <= {MAX_ORACLE_ORDER}, got {m}")
    table = riordan(m)
    return float(sum(count * lam**j for j, count in table.counts))


def semicircular_moment(lam: float, m: int) -> float:
    """m-th moment of the centered semicircular law with variance lam."""
    if not lam > 0:
        raise ValueError(f"variance must be > 0, got {lam}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m % 2:
        return 0.0
    return float(catalan(m // 2) * lam ** (m // 2))


@dataclass(frozen=True)
class MomentReport:
    """One computed moment next to its distribution oracle."""

    q: int
    m: int
    lam: float
    method: str
    value: complex
    oracle: float

    @property
    def delta(self) -> float:
        return self.value.real - self.oracle

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "m": self.m,
            "lambda": self.lam,
            "method": self.method,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "oracle": self.oracle,
            "delta": self.delta,
        }


def moment_report(f: GridKernel, m: int, method: str, measure: Measure = "poisson") -> MomentReport:
    """Compute one moment by the named engine and pair it with the matching oracle."""
    if method == "product":
        value = moment_product(f, m, measure)
    elif method == "diagram":
        value = moment_diagram(f, m, measure)
    elif method == "trace":
        if measure != "poisson":
            raise ValueError("the trace engine covers the poisson product rule only")
        value = moment_trace_formula(f, m)
    else:
        raise ValueError(f"method must be product, diagram, or trace, got {method!r}")
    lam = norm2(f)
    if measure == "poisson":
        oracle = free_poisson_moment(lam, m) if lam > 0 else 0.0
    else:
        oracle = semicircular_moment(lam, m) if lam > 0 else 0.0
    return MomentReport(f.arity, m, lam, method, value, oracle)


def element_inner(a: ChaosElement, b: ChaosElement) -> complex:
    """State of a times the adjoint of b, using term orthogonality."""
    if a.bins != b.bins or a.cell_width != b.cell_width:
        raise GridMismatchError("elements live on different grids")
    total = 0j
    for order in sorted(a.terms):
        g = b.terms.get(order)
        if g is None:
            continue
        if order == 0:
            total += complex(a.terms[0].values) * complex(np.conj(g.values))
        else:
            total += inner(a.terms[order], g)
    return total
