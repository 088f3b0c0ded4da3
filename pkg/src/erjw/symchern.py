"""Conjugate characteristic classes via formal roots.

A rank-q bundle is handled through q formal roots; its k-th class is the
k-th elementary symmetric polynomial of the roots.  Conjugating the bundle
replaces each root x by the formal inverse iota(x), and expressing the
result in elementary symmetric polynomials again yields the conjugate
classes.  The reduction is the classical Gauss descent on the
lexicographically largest root exponent, which terminates because each
step strictly lowers it.

The context works with a literal root count equal to the bundle rank.
Naturality ties ranks together: killing the top class of a rank-(q+1)
answer gives the rank-q answer, and a test holds that line.

The Thom ratio for a rank-2k bundle is the product over all roots of
iota(x_i)/x_i.  It is symmetric with constant term 1, and satisfies
ratio * e_2k(x) = e_2k(iota(x)) on the nose; that identity is recomputed
at a padded weight every time so the returned truncation is fully pinned.
"""

from __future__ import annotations

from itertools import combinations

from .errors import (
    InputError,
    MathInvariantError,
    PrecisionError,
    ReductionError,
    SymmetryError,
)
from .fgl import UniSeries
from .graded import GradedSeries, GradingSpec
from .scalar2 import TwoLocal, val2


class SymmetricContext:
    """Root calculus for one bundle rank at one weight bound."""

    def __init__(self, iota: UniSeries, q: int, weight: int):
        if q < 1:
            raise InputError("need at least one root")
        if weight < 0:
            raise InputError("negative weight bound")
        base = iota.spec
        if base.q or base.roots:
            raise InputError("iota must live over the bare coefficient ring")
        self.iota = iota
        self.q = q
        self.weight = weight
        self.spec = GradingSpec(base.n, q=q, roots=q, alphabet=base.alphabet)
        self._conj_chern: dict[int, GradedSeries] = {}

    # -- basic series -----------------------------------------------------

    def root(self, i: int) -> GradedSeries:
        if not 1 <= i <= self.q:
            raise InputError(f"root index {i} out of range")
        return GradedSeries.gen(self.spec, f"x{i}", trunc=self.weight)

    def chern_class(self, k: int, exp: int = 1) -> GradedSeries:
        if not 1 <= k <= self.q:
            raise InputError(f"class index {k} out of range")
        return GradedSeries.gen(self.spec, f"c{k}", exp=exp, trunc=self.weight)

    def elementary(self, k: int) -> GradedSeries:
        """k-th elementary symmetric polynomial of the roots."""
        if k == 0:
            return GradedSeries.unit(self.spec, 1, self.weight)
        if not 0 <= k <= self.q:
            raise InputError(f"elementary index {k} out of range")
        terms = {}
        for picks in combinations(range(self.q), k):
            x = tuple(1 if i in picks else 0 for i in range(self.q))
            terms[(0, (0,) * (self.spec.n - 1), 0, (0,) * self.q, x)] = 1
        return GradedSeries(self.spec, terms, self.weight)

    # -- symmetry ----------------------------------------------------------

    def _swap_roots(self, series: GradedSeries, j: int) -> GradedSeries:
        out = {}
        for (y, vh, vn, c, x), coeff in series.terms.items():
            lx = list(x)
            lx[j], lx[j + 1] = lx[j + 1], lx[j]
            out[(y, vh, vn, c, tuple(lx))] = coeff
        return GradedSeries(self.spec, out, series.trunc)

    def is_symmetric(self, series: GradedSeries) -> bool:
        return all(self._swap_roots(series, j) == series
                   for j in range(self.q - 1))

    # -- elementary reduction ----------------------------------------------

    def elementary_reduce(self, series: GradedSeries) -> GradedSeries:
        """Rewrite a symmetric root polynomial in the classes.

        Input must be free of classes; output is free of roots.  Internal
        degree is preserved because |c_k| matches |e_k|.
        """
        if series.spec != self.spec:
            raise InputError("series from a different context")
        if any(any(key[3]) for key in series.terms):
            raise InputError("input already contains classes")
        if series.max_weight() > self.weight:
            raise InputError("input exceeds the context weight bound")
        if not self.is_symmetric(series):
            raise SymmetryError("input is not symmetric in the roots")
        residual = series
        out = GradedSeries.zero(self.spec, series.trunc)
        prev = None
        while residual:
            alpha = max(key[4] for key in residual.terms)
            if any(alpha[i] < alpha[i + 1] for i in range(self.q - 1)):
                raise SymmetryError(f"leading exponent {alpha} not dominant")
            if prev is not None and not alpha < prev:
                raise ReductionError("descent stalled")
            prev = alpha
            coeff_terms = {}
            zero_x = (0,) * self.q
            for (y, vh, vn, c, x), coeff in residual.terms.items():
                if x == alpha:
                    coeff_terms[(y, vh, vn, c, zero_x)] = coeff
            C = GradedSeries(self.spec, coeff_terms, residual.trunc)
            cexp = [alpha[i] - (alpha[i + 1] if i + 1 < self.q else 0)
                    for i in range(self.q)]
            P = GradedSeries.unit(self.spec, 1, residual.trunc)
            emit_c = tuple(cexp)
            for i, e in enumerate(cexp, start=1):
                if e:
                    P = P * self.elementary(i) ** e
            out = out + C * GradedSeries.monomial(
                self.spec, c=emit_c, trunc=series.trunc)
            residual = residual - C * P
        return out

    # -- conjugation ---------------------------------------------------------

    def conjugate_root(self, i: int) -> GradedSeries:
        return self.iota.evaluate_at(self.root(i))

    def conjugate_elementary(self, k: int) -> GradedSeries:
        """e_k of the conjugated roots, built by the standard DP."""
        if not 0 <= k <= self.q:
            raise InputError(f"elementary index {k} out of range")
        P = [GradedSeries.unit(self.spec, 1, self.weight)]
        P += [GradedSeries.zero(self.spec, self.weight) for _ in range(k)]
        for i in range(1, self.q + 1):
            xb = self.conjugate_root(i)
            for j in range(min(i, k), 0, -1):
                P[j] = P[j] + xb * P[j - 1]
        return P[k]

    def conjugate_chern(self, k: int) -> GradedSeries:
        """The conjugate k-th class, as a polynomial in the classes."""
        if not 1 <= k <= self.q:
            raise InputError(f"need at least {k} roots for class {k}")
        if self.weight < k:
            raise PrecisionError(f"weight bound {self.weight} cannot see "
                                 f"a weight-{k} class")
        if k not in self._conj_chern:
            self._conj_chern[k] = self.elementary_reduce(
                self.conjugate_elementary(k))
        return self._conj_chern[k]

    def conjugation_on_classes(self, series: GradedSeries) -> GradedSeries:
        """Extend conjugation multiplicatively to a polynomial in classes.

        Coefficients conjugate through the coefficient involution; each
        class c_k is replaced by its conjugate.
        """
        if series.spec != self.spec:
            raise InputError("series from a different context")
        out = GradedSeries.zero(self.spec, self.weight)
        zq = (0,) * self.q
        for (y, vh, vn, c, x), coeff in series.terms.items():
            if any(x):
                raise InputError("roots present; conjugate them directly")
            term = GradedSeries(self.spec, {(y, vh, vn, zq, zq): coeff},
                                self.weight).conjugate()
            for j, e in enumerate(c, start=1):
                if e:
                    term = term * self.conjugate_chern(j) ** e
            out = out + term
        return out

    def conjugation_defect_mod2(self, k: int) -> dict[int, GradedSeries]:
        """Weight profile of (conjugate class - class), coefficients mod 2."""
        defect = self.conjugate_chern(k) - self.chern_class(k)

        def mod2(c):
            if isinstance(c, (TwoLocal, int)):
                return TwoLocal(1) if val2(c) == 0 else TwoLocal(0)
            raise InputError(f"mod-2 profile needs 2-local coefficients, got {c!r}")

        profile = {}
        for w, part in defect.weight_parts().items():
            reduced = part.map_coefficients(mod2)
            if reduced:
                profile[w] = reduced
        return profile


def thom_ratio(iota: UniSeries, k: int, weight: int) -> GradedSeries:
    """Conjugation ratio of the top class of a rank-2k bundle.

    Returns the ratio as a class polynomial, truncated at `weight`.  The
    defining identity ratio * e_2k(x) = e_2k(iota(x)) is recomputed at
    weight + 2k + 1 so every returned coefficient is pinned by it.
    """
    if k < 1:
        raise InputError("k must be positive")
    q = 2 * k
    big = SymmetricContext(iota, q, weight + q + 1)
    ratio = GradedSeries.unit(big.spec, 1, big.weight - 1)
    for i in range(1, q + 1):
        xi_key = next(iter(big.root(i).terms))
        u = big.conjugate_root(i).divide_by_key(xi_key)
        ratio = ratio * u
    if ratio.coefficient(big.spec.unit_key()) != 1:
        raise MathInvariantError("thom ratio constant term is not 1")
    if not big.is_symmetric(ratio):
        raise SymmetryError("thom ratio is not symmetric")
    lhs = ratio * big.elementary(q)
    rhs = big.conjugate_elementary(q).truncated(lhs.trunc)
    if lhs != rhs:
        raise MathInvariantError("thom ratio identity failed")
    return big.elementary_reduce(ratio).truncated(weight)
