"""Arithmetic over the 2-local integers, plus Smith normal form over them.

The ring is Z localized at the prime 2: reduced fractions with odd
denominator.  It is a discrete valuation ring, which keeps Smith reduction
simple.  Picking a global minimum-valuation pivot means one clearing pass
per pivot suffices (every quotient is exact and the remaining entries keep
valuation >= the pivot's), and the diagonal comes out as a divisibility
chain of powers of 2 with no extra sorting.

Convention used by the whole package: matrices act on ROW vectors.  Rows
index the source basis, columns the target, so the cokernel of M is the
column module modulo the row span, and a left kernel is a set of row
vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import MathInvariantError, NonUnitDivisionError


def val2(x) -> int | float:
    """2-adic valuation of an int or TwoLocal; val2(0) is +infinity."""
    if isinstance(x, TwoLocal):
        x = x.num  # denominator is odd, contributes nothing
    if x == 0:
        return math.inf
    return (x & -x).bit_length() - 1


class TwoLocal:
    """A 2-local integer: reduced fraction, odd positive denominator.

    Immutable by convention; all arithmetic returns fresh objects.
    Operations that would leave the ring raise NonUnitDivisionError
    rather than fall back to plain rationals.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        if isinstance(num, TwoLocal):
            num, den = num.num, num.den * den
        elif isinstance(num, Fraction):
            num, den = num.numerator, num.denominator * den
        if not isinstance(num, int) or not isinstance(den, int):
            raise TypeError(f"need integers, got {num!r}/{den!r}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num, den)
        if g > 1:
            num //= g
            den //= g
        if den & 1 == 0:
            raise NonUnitDivisionError(f"{num}/{den} is not 2-locally integral")
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num: int, den: int) -> "TwoLocal":
        # caller guarantees: reduced, den odd positive
        self = object.__new__(cls)
        self.num = num
        self.den = den
        return self

    @classmethod
    def parse(cls, text: str) -> "TwoLocal":
        """Inverse of str(): "p" or "p/q"."""
        if "/" in text:
            p, q = text.split("/", 1)
            return cls(int(p), int(q))
        return cls(int(text))

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_unit(self) -> bool:
        return self.num & 1 == 1

    def __bool__(self) -> bool:
        return self.num != 0

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.den == 1 and other.den == 1:
            return TwoLocal._raw(self.num + other.num, 1)
        return TwoLocal(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.den == 1 and other.den == 1:
            return TwoLocal._raw(self.num - other.num, 1)
        return TwoLocal(self.num * other.den - other.num * self.den,
                        self.den * other.den)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.den == 1 and other.den == 1:
            return TwoLocal._raw(self.num * other.num, 1)
        return TwoLocal(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if other.num == 0:
            raise ZeroDivisionError("division by zero")
        # legal exactly when val2(other) <= val2(self); the constructor
        # rejects the leftover even denominator otherwise
        return TwoLocal(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return TwoLocal._raw(-self.num, self.den)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e >= 0:
            return TwoLocal._raw(self.num ** e, self.den ** e)
        if self.num == 0:
            raise ZeroDivisionError("zero to a negative power")
        return TwoLocal(self.den ** (-e), self.num ** (-e))

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"TwoLocal({self})"


def _coerce(x):
    if isinstance(x, TwoLocal):
        return x
    if isinstance(x, int):
        return TwoLocal._raw(x, 1)
    # deliberately no Fraction branch: mixed-field arithmetic is a bug
    return None


ZERO = TwoLocal._raw(0, 1)
ONE = TwoLocal._raw(1, 1)


@dataclass(frozen=True)
class ModuleStructure:
    """Isomorphism type of a finitely generated Z_(2)-module.

    torsion holds the cyclic orders (each a power of 2, > 1) in
    nondecreasing order, e.g. (2, 2, 8).
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for t in self.torsion:
            if t < 2 or t & (t - 1):
                raise ValueError(f"torsion order {t} is not a power of 2 above 1")
        if list(self.torsion) != sorted(self.torsion):
            raise ValueError("torsion orders must be nondecreasing")

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def as_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


class LocalMatrix:
    """Dense matrix over TwoLocal, stored row-major."""

    __slots__ = ("nrows", "ncols", "data")

    def __init__(self, rows: Sequence[Sequence], ncols: int | None = None):
        data = []
        for row in rows:
            data.append([x if isinstance(x, TwoLocal) else TwoLocal(x) for x in row])
        if data:
            if ncols is None:
                ncols = len(data[0])
            for row in data:
                if len(row) != ncols:
                    raise ValueError("ragged rows")
        elif ncols is None:
            raise ValueError("an empty matrix needs an explicit column count")
        self.data = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "LocalMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "LocalMatrix":
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    def copy(self) -> "LocalMatrix":
        return LocalMatrix([row[:] for row in self.data], self.ncols)

    def transpose(self) -> "LocalMatrix":
        return LocalMatrix([[self.data[i][j] for i in range(self.nrows)]
                            for j in range(self.ncols)], self.nrows)

    def row(self, i: int) -> list:
        return self.data[i][:]

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, LocalMatrix):
            return NotImplemented
        return (self.nrows == other.nrows and self.ncols == other.ncols
                and self.data == other.data)

    def __matmul__(self, other: "LocalMatrix") -> "LocalMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ "
                             f"{other.nrows}x{other.ncols}")
        out = []
        for row in self.data:
            acc = [ZERO] * other.ncols
            for k, a in enumerate(row):
                if a.num == 0:
                    continue
                orow = other.data[k]
                for j, b in enumerate(orow):
                    if b.num:
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return LocalMatrix(out, other.ncols)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"LocalMatrix({self.nrows}x{self.ncols}: {body})"


def stack_rows(mats: Sequence[LocalMatrix]) -> LocalMatrix:
    ncols = {m.ncols for m in mats}
    if len(ncols) != 1:
        raise ValueError("column counts differ")
    rows = []
    for m in mats:
        rows.extend(row[:] for row in m.data)
    return LocalMatrix(rows, ncols.pop())


def row_times_matrix(v: Sequence[TwoLocal], M: LocalMatrix) -> list:
    if len(v) != M.nrows:
        raise ValueError("length mismatch")
    acc = [ZERO] * M.ncols
    for k, a in enumerate(v):
        if not isinstance(a, TwoLocal):
            a = TwoLocal(a)
        if a.num == 0:
            continue
        row = M.data[k]
        for j, b in enumerate(row):
            if b.num:
                acc[j] = acc[j] + a * b
    return acc


def snf_with_transforms(M: LocalMatrix):
    """Smith form over Z_(2): returns (D, U, V) with U @ M @ V == D.

    U and V are invertible over Z_(2) (unit determinant) and the nonzero
    diagonal of D consists of powers of 2 in nondecreasing valuation.
    """
    D = M.copy()
    U = LocalMatrix.identity(M.nrows)
    V = LocalMatrix.identity(M.ncols)
    limit = min(D.nrows, D.ncols)
    k = 0
    while k < limit:
        bi = bj = -1
        bv = math.inf
        for i in range(k, D.nrows):
            row = D.data[i]
            for j in range(k, D.ncols):
                v = val2(row[j])
                if v < bv:
                    bv, bi, bj = v, i, j
                    if v == 0:
                        break
            if bv == 0:
                break
        if bv is math.inf:
            break  # remaining block is zero
        if bi != k:
            D.data[k], D.data[bi] = D.data[bi], D.data[k]
            U.data[k], U.data[bi] = U.data[bi], U.data[k]
        if bj != k:
            for row in D.data:
                row[k], row[bj] = row[bj], row[k]
            for row in V.data:
                row[k], row[bj] = row[bj], row[k]
        pivot = D.data[k][k]
        # absorb the unit part of the pivot into U, leaving a clean 2^bv
        unit_inv = TwoLocal(pivot.den, pivot.num >> bv)
        if unit_inv != ONE:
            D.data[k] = [unit_inv * x for x in D.data[k]]
            U.data[k] = [unit_inv * x for x in U.data[k]]
        pivot = D.data[k][k]
        for i in range(k + 1, D.nrows):
            a = D.data[i][k]
            if a.num == 0:
                continue
            c = a / pivot  # exact: pivot has minimal valuation
            drow, prow = D.data[i], D.data[k]
            for j in range(k, D.ncols):
                if prow[j].num:
                    drow[j] = drow[j] - c * prow[j]
            urow, upow = U.data[i], U.data[k]
            for j in range(U.ncols):
                if upow[j].num:
                    urow[j] = urow[j] - c * upow[j]
        for j in range(k + 1, D.ncols):
            a = D.data[k][j]
            if a.num == 0:
                continue
            c = a / pivot
            # the pivot column is zero away from row k, so only row k changes
            D.data[k][j] = ZERO
            for row in V.data:
                if row[k].num:
                    row[j] = row[j] - c * row[k]
        k += 1
    if (U @ M) @ V != D:
        raise MathInvariantError("Smith reduction lost U*M*V == D")
    return D, U, V


def _diag_rank(D: LocalMatrix) -> int:
    r = 0
    for i in range(min(D.nrows, D.ncols)):
        if D.data[i][i].num:
            r += 1
        else:
            break
    return r


def snf(M: LocalMatrix) -> tuple[int, ...]:
    """Nonzero Smith invariants of M, as plain ints (powers of 2)."""
    D, _, _ = snf_with_transforms(M)
    return tuple(D.data[i][i].num for i in range(_diag_rank(D)))


def rank(M: LocalMatrix) -> int:
    return len(snf(M))


def cokernel_structure(M: LocalMatrix) -> ModuleStructure:
    """Structure of the column module modulo the row span of M."""
    invs = snf(M)
    return ModuleStructure(M.ncols - len(invs), tuple(d for d in invs if d > 1))


def kernel_basis(M: LocalMatrix) -> LocalMatrix:
    """Basis of the left kernel {x : x @ M == 0}, as rows."""
    D, U, _ = snf_with_transforms(M)
    r = _diag_rank(D)
    return LocalMatrix([U.data[i][:] for i in range(r, M.nrows)], M.nrows)


def solve_left(A: LocalMatrix, v: Sequence, decomp=None):
    """One solution x of x @ A == v over Z_(2), or None if there is none."""
    if decomp is None:
        decomp = snf_with_transforms(A)
    D, U, V = decomp
    r = _diag_rank(D)
    w = row_times_matrix(list(v), V)
    y = [ZERO] * A.nrows
    for i in range(r):
        try:
            y[i] = w[i] / D.data[i][i]
        except NonUnitDivisionError:
            return None
    for i in range(r, A.ncols):
        if w[i].num:
            return None
    return row_times_matrix(y, U)


def row_basis(M: LocalMatrix) -> LocalMatrix:
    """Lattice basis of the row span, via invertible row operations only.

    Columns are processed left to right with a minimum-valuation pivot, so
    every elimination quotient stays in Z_(2).
    """
    W = M.copy()
    r = 0
    for j in range(W.ncols):
        if r == W.nrows:
            break
        bi, bv = -1, math.inf
        for i in range(r, W.nrows):
            v = val2(W.data[i][j])
            if v < bv:
                bi, bv = i, v
                if v == 0:
                    break
        if bv is math.inf:
            continue
        if bi != r:
            W.data[r], W.data[bi] = W.data[bi], W.data[r]
        p = W.data[r][j]
        for i in range(r + 1, W.nrows):
            a = W.data[i][j]
            if a.num == 0:
                continue
            c = a / p
            wrow, prow = W.data[i], W.data[r]
            for jj in range(j, W.ncols):
                if prow[jj].num:
                    wrow[jj] = wrow[jj] - c * prow[jj]
        r += 1
    return LocalMatrix([W.data[i][:] for i in range(r)], W.ncols)


def quotient_structure(K: LocalMatrix, B: LocalMatrix) -> ModuleStructure:
    """Structure of span(K) / span(B).

    K's rows must be independent (use kernel_basis or row_basis output) and
    every row of B must lie in span(K); violations raise MathInvariantError.
    """
    if K.ncols != B.ncols:
        raise ValueError("ambient dimensions differ")
    if K.nrows == 0:
        for row in B.data:
            if any(x.num for x in row):
                raise MathInvariantError("nonzero row against an empty span")
        return ModuleStructure(0, ())
    if B.nrows == 0:
        return ModuleStructure(K.nrows, ())
    decomp = snf_with_transforms(K)
    if _diag_rank(decomp[0]) != K.nrows:
        raise MathInvariantError("quotient basis rows are dependent")
    coords = []
    for row in B.data:
        x = solve_left(K, row, decomp)
        if x is None:
            raise MathInvariantError("row escapes the span it must lie in")
        coords.append(x)
    return cokernel_structure(LocalMatrix(coords, K.nrows))


def preimage_rows(A: LocalMatrix, T: LocalMatrix) -> LocalMatrix:
    """Basis of the lattice {x : x @ A lies in rowspan(T)}."""
    if A.ncols != T.ncols:
        raise ValueError("ambient dimensions differ")
    if T.nrows == 0:
        return kernel_basis(A)
    G = stack_rows([A, T])
    K = kernel_basis(G)
    X = LocalMatrix([row[:A.nrows] for row in K.data], A.nrows)
    return row_basis(X)
