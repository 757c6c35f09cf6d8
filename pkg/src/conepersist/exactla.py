"""Exact linear algebra over prime fields, plus finite poset diagrams.

Everything is small and dense: matrices are tuples of tuples of residues
mod p.  The three consumers are structure maps of persistence modules,
limits/colimits of cell diagrams, and the block-unknown linear systems that
back morphism search.  F_2 systems get a bit-packed elimination path since
they sit on the hot loop.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

__all__ = [
    "FieldMat",
    "Diagram",
    "LimitResult",
    "ColimitResult",
    "SolutionSpace",
    "affine_solution_space",
]


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"field order must be prime, got {p}")


@dataclass(frozen=True)
class FieldMat:
    """Immutable dense matrix over F_p.

    The column count is stored explicitly so matrices with zero rows keep
    their shape (compositions through a zero dimensional space must still
    typecheck).
    """

    p: int
    entries: tuple[tuple[int, ...], ...]
    cols: int = -1

    def __post_init__(self):
        if self.cols < 0:
            inferred = len(self.entries[0]) if self.entries else 0
            object.__setattr__(self, "cols", inferred)
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("row length disagrees with column count")

    @staticmethod
    def make(p: int, rows: Sequence[Sequence[int]], cols: int = -1) -> "FieldMat":
        _check_prime(p)
        ent = tuple(tuple(int(x) % p for x in row) for row in rows)
        return FieldMat(p, ent, cols)

    @staticmethod
    def zero(p: int, rows: int, cols: int) -> "FieldMat":
        return FieldMat(p, tuple((0,) * cols for _ in range(rows)), cols)

    @staticmethod
    def identity(p: int, n: int) -> "FieldMat":
        return FieldMat(p, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return self.cols

    def __add__(self, other: "FieldMat") -> "FieldMat":
        self._compat(other, same_shape=True)
        return FieldMat(
            self.p,
            tuple(
                tuple((a + b) % self.p for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
            self.cols,
        )

    def __sub__(self, other: "FieldMat") -> "FieldMat":
        self._compat(other, same_shape=True)
        return FieldMat(
            self.p,
            tuple(
                tuple((a - b) % self.p for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
            self.cols,
        )

    def __neg__(self) -> "FieldMat":
        return FieldMat(
            self.p,
            tuple(tuple((-a) % self.p for a in row) for row in self.entries),
            self.cols,
        )

    def __mul__(self, other: "FieldMat") -> "FieldMat":
        self._compat(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} * {other.nrows}x{other.ncols}")
        p = self.p
        bt = tuple(
            tuple(other.entries[r][c] for r in range(other.nrows)) for c in range(other.ncols)
        )
        out = []
        for row in self.entries:
            out.append(tuple(sum(a * b for a, b in zip(row, col)) % p for col in bt))
        return FieldMat(p, tuple(out), other.ncols)

    __matmul__ = __mul__

    def _compat(self, other: "FieldMat", same_shape: bool = False) -> None:
        if self.p != other.p:
            raise ValueError("field mismatch")
        if same_shape and (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")

    def transpose(self) -> "FieldMat":
        return FieldMat(
            self.p,
            tuple(tuple(self.entries[r][c] for r in range(self.nrows)) for c in range(self.ncols)),
            self.nrows,
        )

    @staticmethod
    def vstack(a: "FieldMat", b: "FieldMat") -> "FieldMat":
        if a.ncols != b.ncols:
            raise ValueError("column count mismatch")
        return FieldMat(a.p, a.entries + b.entries, a.ncols)

    @staticmethod
    def hstack(a: "FieldMat", b: "FieldMat") -> "FieldMat":
        if a.nrows != b.nrows:
            raise ValueError("row count mismatch")
        return FieldMat(
            a.p,
            tuple(ra + rb for ra, rb in zip(a.entries, b.entries)),
            a.ncols + b.ncols,
        )

    def is_zero(self) -> bool:
        return all(all(a == 0 for a in row) for row in self.entries)

    def rref(self) -> tuple["FieldMat", tuple[int, ...]]:
        rows = [list(r) for r in self.entries]
        pivots = _rref_mod(rows, self.p)
        return FieldMat(self.p, tuple(tuple(r) for r in rows), self.cols), tuple(pivots)

    def rank(self) -> int:
        rows = [list(r) for r in self.entries]
        return len(_rref_mod(rows, self.p))

    def kernel_basis(self) -> "FieldMat":
        """Matrix whose columns span the right kernel (ncols x k)."""
        red, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        cols = []
        for fc in free:
            v = [0] * self.ncols
            v[fc] = 1
            for r, pc in enumerate(pivots):
                v[pc] = (-red.entries[r][fc]) % self.p
            cols.append(v)
        return FieldMat(
            self.p,
            tuple(tuple(col[i] for col in cols) for i in range(self.ncols)),
            len(cols),
        )

    def column_space_basis(self) -> "FieldMat":
        """Matrix whose columns are a basis of the column space (nrows x r):
        the pivot columns of the original matrix."""
        _, piv = self.rref()
        cols = [tuple(self.entries[i][c] for i in range(self.nrows)) for c in piv]
        return FieldMat(
            self.p,
            tuple(tuple(col[i] for col in cols) for i in range(self.nrows)),
            len(cols),
        )

    def inverse(self) -> "FieldMat | None":
        if self.nrows != self.ncols:
            return None
        sol = self.solve(FieldMat.identity(self.p, self.nrows))
        if sol is None:
            return None
        # a one-sided inverse of a square matrix is two-sided
        return sol

    def solve(self, rhs: "FieldMat") -> "FieldMat | None":
        """Any X with self @ X = rhs, or None. rhs has matching row count."""
        self._compat(rhs)
        if rhs.nrows != self.nrows:
            raise ValueError("rhs row count mismatch")
        n, k = self.ncols, rhs.ncols
        aug = [list(r) + list(b) for r, b in zip(self.entries, rhs.entries)]
        if not aug:
            return FieldMat.zero(self.p, n, k)
        pivots = _rref_mod(aug, self.p)
        if any(c >= n for c in pivots):
            return None
        x = [[0] * k for _ in range(n)]
        for r, c in enumerate(pivots):
            for j in range(k):
                x[c][j] = aug[r][n + j]
        return FieldMat(self.p, tuple(tuple(row) for row in x), k)

    def __repr__(self):
        return f"FieldMat(p={self.p}, {self.nrows}x{self.ncols})"


def _rref_mod(rows: list[list[int]], p: int) -> list[int]:
    """In-place reduced row echelon form; returns pivot column list."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, nr) if rows[i][c] % p), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return pivots


def _rref_f2_packed(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Gauss-Jordan over F_2 with rows as bitmasks (bit j = column j)."""
    out: list[int] = []
    pivots: list[int] = []
    work = [r for r in rows if r]
    for c in range(ncols):
        bit = 1 << c
        src = next((i for i, r in enumerate(work) if r & bit), None)
        if src is None:
            continue
        row = work.pop(src)
        work = [r ^ row if r & bit else r for r in work]
        out = [r ^ row if r & bit else r for r in out]
        out.append(row)
        pivots.append(c)
        work = [r for r in work if r]
        if not work:
            break
    return out, pivots


# -- finite poset diagrams --------------------------------------------------


class Diagram:
    """A functor from a finite poset to F_p vector spaces.

    elements: hashable poset elements; leq: the order relation (callable);
    dims: dimension per element; arrows: matrix per cover pair (a, b) with
    a covered by b, mapping the space at a to the space at b (shape
    dims[b] x dims[a]).  Construction validates cover keys, shapes, and
    functoriality (all composites between comparable pairs agree).
    """

    def __init__(
        self,
        elements: Sequence,
        leq: Callable,
        dims: dict,
        arrows: dict,
        p: int,
    ):
        _check_prime(p)
        self.p = p
        self.elements = tuple(elements)
        self.dims = dict(dims)
        es = self.elements
        self._leq = {(a, b) for a in es for b in es if leq(a, b)}
        for a in es:
            if (a, a) not in self._leq:
                raise ValueError("order must be reflexive")
        covers = set()
        for a, b in self._leq:
            if a == b:
                continue
            if not any(c != a and c != b and (a, c) in self._leq and (c, b) in self._leq for c in es):
                covers.add((a, b))
        self.covers = covers
        if set(arrows) != covers:
            missing = covers - set(arrows)
            extra = set(arrows) - covers
            raise ValueError(f"arrows must be keyed by cover pairs; missing={missing} extra={extra}")
        self.arrows = dict(arrows)
        for (a, b), m in self.arrows.items():
            if m.p != p or (m.nrows, m.ncols) != (self.dims[b], self.dims[a]):
                raise ValueError(f"arrow {a}->{b} has wrong shape or field")
        self._composites: dict = {}
        self._validate_functorial()

    def leq(self, a, b) -> bool:
        return (a, b) in self._leq

    def composite(self, a, b) -> FieldMat:
        """The composite map from a up to b (a <= b), path independent."""
        if (a, b) not in self._leq:
            raise ValueError(f"{a} not <= {b}")
        return self._composite_checked(a, b)[0]

    def _composite_checked(self, a, b):
        key = (a, b)
        if key in self._composites:
            return self._composites[key]
        if a == b:
            res = (FieldMat.identity(self.p, self.dims[a]), True)
        else:
            candidates = []
            for (m, bb), arrow in self.arrows.items():
                if bb == b and (a, m) in self._leq:
                    sub, ok = self._composite_checked(a, m)
                    candidates.append((arrow * sub, ok))
            first = candidates[0][0]
            agree = all(ok and c == first for c, ok in candidates)
            res = (first, agree)
        self._composites[key] = res
        return res

    def _validate_functorial(self) -> None:
        for a in self.elements:
            for b in self.elements:
                if (a, b) in self._leq and not self._composite_checked(a, b)[1]:
                    raise ValueError(f"functoriality violation between {a} and {b}")

    def _order_blocks(self) -> tuple[list, dict, int]:
        order = list(self.elements)
        offset = {}
        total = 0
        for e in order:
            offset[e] = total
            total += self.dims[e]
        return order, offset, total


@dataclass(frozen=True)
class LimitResult:
    dim: int
    projections: dict  # element -> FieldMat (dims[e] x dim)


@dataclass(frozen=True)
class ColimitResult:
    dim: int
    injections: dict  # element -> FieldMat (dim x dims[e])


def limit(d: Diagram) -> LimitResult:
    """Limit of the diagram: compatible families, as the kernel of the
    stacked constraints arrow(x_a) - x_b = 0 over all cover pairs."""
    order, offset, total = d._order_blocks()
    rows: list[list[int]] = []
    for (a, b), m in sorted(d.arrows.items(), key=lambda kv: (order.index(kv[0][0]), order.index(kv[0][1]))):
        for i in range(d.dims[b]):
            row = [0] * total
            for j in range(d.dims[a]):
                row[offset[a] + j] = m.entries[i][j]
            row[offset[b] + i] = (row[offset[b] + i] - 1) % d.p
            rows.append(row)
    if not rows:
        k = FieldMat.identity(d.p, total)
    else:
        k = FieldMat.make(d.p, rows).kernel_basis()
    projections = {
        e: FieldMat(d.p, tuple(k.entries[offset[e] + i] for i in range(d.dims[e])), k.ncols)
        for e in order
    }
    return LimitResult(k.ncols, projections)


def colimit(d: Diagram) -> ColimitResult:
    """Colimit: direct sum of the spaces modulo x_a ~ arrow(x_a)."""
    order, offset, total = d._order_blocks()
    relations: list[list[int]] = []
    for (a, b), m in sorted(d.arrows.items(), key=lambda kv: (order.index(kv[0][0]), order.index(kv[0][1]))):
        for j in range(d.dims[a]):
            rel = [0] * total
            rel[offset[a] + j] = 1
            for i in range(d.dims[b]):
                rel[offset[b] + i] = (rel[offset[b] + i] - m.entries[i][j]) % d.p
            relations.append(rel)
    if relations:
        red = [row[:] for row in relations]
        pivots = _rref_mod(red, d.p)
        red = red[: len(pivots)]
    else:
        red, pivots = [], []
    free = [c for c in range(total) if c not in pivots]
    # quotient coordinates: reduce a vector by the relation rows, then read
    # off the free coordinates
    def project(vec: list[int]) -> list[int]:
        v = vec[:]
        for r, pc in enumerate(pivots):
            if v[pc]:
                f = v[pc]
                v = [(x - f * y) % d.p for x, y in zip(v, red[r])]
        return [v[c] for c in free]

    injections = {}
    for e in order:
        cols = []
        for j in range(d.dims[e]):
            unit = [0] * total
            unit[offset[e] + j] = 1
            cols.append(project(unit))
        injections[e] = FieldMat(
            d.p, tuple(tuple(col[i] for col in cols) for i in range(len(free))), d.dims[e]
        )
    return ColimitResult(len(free), injections)


# -- block-unknown linear systems -------------------------------------------


Term = tuple  # (left: FieldMat | None, unknown name, right: FieldMat | None)


class SolutionSpace:
    """Affine solution set of a linear system in named matrix unknowns.

    particular is None when the system is infeasible; basis spans the
    homogeneous solutions.  Elements come back as dicts name -> FieldMat.
    """

    def __init__(self, p, layout, particular, basis):
        self.p = p
        self._layout = layout  # list of (name, rows, cols, offset)
        self._particular = particular
        self._basis = basis

    @property
    def feasible(self) -> bool:
        return self._particular is not None

    @property
    def dim(self) -> int:
        return len(self._basis)

    def _unflatten(self, vec: list[int]) -> dict:
        out = {}
        for name, r, c, off in self._layout:
            out[name] = FieldMat(
                self.p, tuple(tuple(vec[off + i * c + j] for j in range(c)) for i in range(r)), c
            )
        return out

    def element(self, coeffs: Sequence[int]) -> dict:
        if not self.feasible:
            raise ValueError("infeasible system has no elements")
        if len(coeffs) != self.dim:
            raise ValueError("coefficient count mismatch")
        vec = list(self._particular)
        for c, b in zip(coeffs, self._basis):
            if c % self.p:
                vec = [(x + c * y) % self.p for x, y in zip(vec, b)]
        return self._unflatten(vec)

    def particular(self) -> dict | None:
        return self._unflatten(list(self._particular)) if self.feasible else None

    def iter_coeffs(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.p), repeat=self.dim)


def affine_solution_space(
    p: int,
    unknowns: dict,
    equations: Iterable[tuple[list, "FieldMat"]],
) -> SolutionSpace:
    """Solve a system linear in matrix unknowns.

    unknowns: name -> (rows, cols).  Each equation is (terms, rhs) where a
    term (L, name, R) contributes L @ X_name @ R (None means identity of
    the fitting size) and the term sum must equal rhs.
    """
    _check_prime(p)
    layout = []
    off = 0
    for name, (r, c) in unknowns.items():
        layout.append((name, r, c, off))
        off += r * c
    total = off
    index = {name: (r, c, o) for name, r, c, o in layout}

    rows: list[list[int]] = []
    rhs_vals: list[int] = []
    for terms, rhs in equations:
        m, n = rhs.nrows, rhs.ncols
        for i in range(m):
            for j in range(n):
                row = [0] * total
                for L, name, R in terms:
                    r, c, o = index[name]
                    if L is not None and (L.nrows != m or L.ncols != r):
                        raise ValueError("left factor shape mismatch")
                    if R is not None and (R.nrows != c or R.ncols != n):
                        raise ValueError("right factor shape mismatch")
                    for a in range(r):
                        la = 1 if L is None and a == i else (L.entries[i][a] if L is not None else 0)
                        if la == 0:
                            continue
                        for b in range(c):
                            rb = 1 if R is None and b == j else (R.entries[b][j] if R is not None else 0)
                            if rb:
                                row[o + a * c + b] = (row[o + a * c + b] + la * rb) % p
                rows.append(row)
                rhs_vals.append(rhs.entries[i][j] % p)

    if p == 2:
        return _solve_space_f2(layout, total, rows, rhs_vals)
    return _solve_space_generic(p, layout, total, rows, rhs_vals)


def _solve_space_generic(p, layout, total, rows, rhs_vals) -> SolutionSpace:
    aug = [row + [b] for row, b in zip(rows, rhs_vals)]
    if aug:
        pivots = _rref_mod(aug, p)
    else:
        pivots = []
    if any(c == total for c in pivots):
        return SolutionSpace(p, layout, None, [])
    particular = [0] * total
    red = aug[: len(pivots)]
    for r, c in enumerate(pivots):
        particular[c] = red[r][total]
    free = [c for c in range(total) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * total
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-red[r][fc]) % p
        basis.append(v)
    return SolutionSpace(p, layout, particular, basis)


def _solve_space_f2(layout, total, rows, rhs_vals) -> SolutionSpace:
    packed = []
    rhs_bit = 1 << total
    for row, b in zip(rows, rhs_vals):
        word = 0
        for j, x in enumerate(row):
            if x & 1:
                word |= 1 << j
        if b & 1:
            word |= rhs_bit
        if word:
            packed.append(word)
    red, pivots = _rref_f2_packed(packed, total + 1)
    if total in pivots:
        return SolutionSpace(2, layout, None, [])
    particular = [0] * total
    for row, c in zip(red, pivots):
        if row & rhs_bit:
            particular[c] = 1
    pivset = set(pivots)
    free = [c for c in range(total) if c not in pivset]
    basis = []
    pivrow = {c: row for row, c in zip(red, pivots)}
    for fc in free:
        v = [0] * total
        v[fc] = 1
        bit = 1 << fc
        for c in pivots:
            if pivrow[c] & bit:
                v[c] = 1
        basis.append(v)
    return SolutionSpace(2, layout, particular, basis)
