"""Two-typical formal group law over a truncated 2-local coefficient ring.

The logarithm uses the Araki normalization: with l_0 = 1 and v_0 = 2,

    (2 - 2^(2^k)) l_k = sum over i+j = k, i >= 1 of  l_j * v_i^(2^j),

and generators above v_n are set to zero.  Logarithm and exponential live
over the rationals (their coefficients are genuinely non-integral, e.g.
l_1 = -v_1/2), but the group law F = exp(log x + log y), the formal
inverse, and every k-series must come out 2-locally integral; conversion
asserts that and raises IntegralityError otherwise.

Series in one formal variable are kept as a tuple of coefficient-ring
elements indexed by the power of the variable; precision means the series
is exact through that power and unknown beyond it.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    ConstantTermError,
    IntegralityError,
    MathInvariantError,
    NonUnitDivisionError,
    PrecisionError,
)
from .graded import GradedSeries, GradingSpec
from .scalar2 import TwoLocal


def _to_two_local(series: GradedSeries) -> GradedSeries:
    def conv(c):
        if isinstance(c, TwoLocal):
            return c
        try:
            return TwoLocal(c)
        except NonUnitDivisionError as e:
            raise IntegralityError(f"coefficient {c} is not 2-locally integral") from e
    return series.map_coefficients(conv)


class UniSeries:
    """Truncated power series in one variable over a coefficient ring."""

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: GradingSpec, coeffs):
        coeffs = tuple(coeffs)
        for c in coeffs:
            if not isinstance(c, GradedSeries) or c.spec != spec:
                raise ValueError("coefficients must be series over the law's spec")
        self.spec = spec
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, spec, precision: int):
        z = GradedSeries.zero(spec)
        return cls(spec, [z] * (precision + 1))

    @classmethod
    def identity(cls, spec, precision: int):
        z = GradedSeries.zero(spec)
        coeffs = [z] * (precision + 1)
        coeffs[1] = GradedSeries.unit(spec, 1)
        return cls(spec, coeffs)

    @classmethod
    def from_terms(cls, spec, terms: dict, precision: int):
        z = GradedSeries.zero(spec)
        coeffs = [z] * (precision + 1)
        for m, c in terms.items():
            if not isinstance(c, GradedSeries):
                c = GradedSeries.unit(spec, c)
            if m <= precision:
                coeffs[m] = coeffs[m] + c
        return cls(spec, coeffs)

    # -- basics ----------------------------------------------------------

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, m: int) -> GradedSeries:
        return self.coeffs[m]

    def order(self):
        for m, c in enumerate(self.coeffs):
            if c:
                return m
        return None

    def is_zero(self) -> bool:
        return self.order() is None

    def __eq__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __repr__(self):
        parts = [f"({c})*u^{m}" for m, c in enumerate(self.coeffs) if c]
        return "UniSeries(" + (" + ".join(parts) or "0") + ")"

    def prefix(self, precision: int) -> "UniSeries":
        if precision >= self.precision:
            return self
        return UniSeries(self.spec, self.coeffs[:precision + 1])

    # -- arithmetic -------------------------------------------------------

    def _zip_len(self, other) -> int:
        if self.spec != other.spec:
            raise ValueError("spec mismatch")
        return min(len(self.coeffs), len(other.coeffs))

    def __add__(self, other):
        n = self._zip_len(other)
        return UniSeries(self.spec,
                         [self.coeffs[m] + other.coeffs[m] for m in range(n)])

    def __sub__(self, other):
        n = self._zip_len(other)
        return UniSeries(self.spec,
                         [self.coeffs[m] - other.coeffs[m] for m in range(n)])

    def __neg__(self):
        return UniSeries(self.spec, [-c for c in self.coeffs])

    def scale(self, factor) -> "UniSeries":
        """Multiply every coefficient by a coefficient-ring element."""
        if not isinstance(factor, GradedSeries):
            factor = GradedSeries.unit(self.spec, factor)
        return UniSeries(self.spec, [c * factor for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        n = self._zip_len(other)
        z = GradedSeries.zero(self.spec)
        out = [z] * n
        for i, a in enumerate(self.coeffs[:n]):
            if not a:
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return UniSeries(self.spec, out)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = UniSeries.from_terms(self.spec, {0: 1}, self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def compose(self, inner: "UniSeries") -> "UniSeries":
        """self evaluated at inner(u); inner must have zero constant term."""
        if inner.coeffs[0]:
            raise ConstantTermError("inner series has a constant term")
        n = self._zip_len(inner)
        out = UniSeries.zero(self.spec, n - 1)
        p = UniSeries.from_terms(self.spec, {0: 1}, n - 1)
        inner = inner.prefix(n - 1)
        for k in range(n):
            c = self.coeffs[k]
            if c:
                out = out + p.scale(c)
            if k < n - 1:
                p = p * inner
                if p.is_zero():
                    break
        return out

    # -- bridges to the graded world --------------------------------------

    def map_coefficients(self, f) -> "UniSeries":
        return UniSeries(self.spec, [c.map_coefficients(f) for c in self.coeffs])

    def regrade_to_hat(self) -> "UniSeries":
        coeffs = [c.regrade_to_hat() for c in self.coeffs]
        return UniSeries(coeffs[0].spec, coeffs)

    def evaluate_at(self, at: GradedSeries) -> GradedSeries:
        """Substitute a weight-positive truncated series for the variable.

        Every term of `at` must have weight >= 1 and `at` must carry a
        truncation bound, so powers die out; if they survive past this
        series' precision the answer would be wrong and PrecisionError
        is raised instead.
        """
        if at.trunc is None:
            raise PrecisionError("substitution target carries no truncation bound")
        wof = at.spec.weight_of
        if any(wof(k) < 1 for k in at.terms):
            raise ConstantTermError("substitution target has weight-0 content")
        acc = GradedSeries.zero(at.spec, at.trunc)
        p = GradedSeries.unit(at.spec, 1, at.trunc)
        for k, c in enumerate(self.coeffs):
            if c:
                acc = acc + c.extended_to(at.spec) * p
            p = p * at
            if p.is_zero:
                return acc
        raise PrecisionError(
            f"need powers beyond u^{self.precision} to honor trunc={at.trunc}")


class _LawBase:
    """Shared machinery for anything that exposes a law table F_{ij}."""

    spec: GradingSpec
    precision: int

    def law_table(self) -> dict:
        raise NotImplementedError

    def _check_table(self, table: dict) -> dict:
        z = self.spec.unit_key()
        one = GradedSeries.unit(self.spec, 1)
        if table.get((0, 0)):
            raise MathInvariantError("law has a constant term")
        if table.get((1, 0)) != one or table.get((0, 1)) != one:
            raise MathInvariantError("law is not normalized: F(x,0) != x")
        for (i, j), c in table.items():
            if table.get((j, i), GradedSeries.zero(self.spec)) != c:
                raise MathInvariantError(f"law not commutative at {(i, j)}")
        return table

    def apply2(self, a: UniSeries, b: UniSeries) -> UniSeries:
        """F(a(u), b(u)) for series with zero constant term."""
        if a.coeffs[0] or b.coeffs[0]:
            raise ConstantTermError("apply2 needs order >= 1 on both inputs")
        n = min(len(a), len(b)) - 1
        out = UniSeries.zero(self.spec, n)
        apow: dict[int, UniSeries] = {0: UniSeries.from_terms(self.spec, {0: 1}, n)}
        bpow: dict[int, UniSeries] = {0: UniSeries.from_terms(self.spec, {0: 1}, n)}

        def power(cache, base, e):
            while e not in cache:
                top = max(cache)
                cache[top + 1] = cache[top] * base
            return cache[e]

        for (i, j), c in sorted(self.law_table().items()):
            if i + j > n:
                continue
            term = power(apow, a.prefix(n), i) * power(bpow, b.prefix(n), j)
            out = out + term.scale(c)
        return out

    def formal_sum(self, parts) -> UniSeries:
        parts = list(parts)
        if not parts:
            raise ValueError("empty formal sum")
        acc = parts[0]
        for p in parts[1:]:
            acc = self.apply2(acc, p)
        return acc

    def iota_by_inversion(self) -> UniSeries:
        """Formal inverse solved degree by degree from F(u, inverse) = 0."""
        n = self.precision
        ident = UniSeries.identity(self.spec, n)
        inv = UniSeries.from_terms(self.spec, {1: -1}, n)
        for m in range(2, n + 1):
            g = self.apply2(ident, inv)[m]
            if g:
                inv = inv - UniSeries.from_terms(self.spec, {m: g}, n)
        check = self.apply2(ident, inv)
        if not check.is_zero():
            raise MathInvariantError("formal inverse failed to invert")
        return inv

    def iota(self) -> UniSeries:
        if not hasattr(self, "_iota"):
            self._iota = self.iota_by_inversion()
        return self._iota

    def k_series(self, k: int) -> UniSeries:
        """The k-fold formal sum of the identity, for any integer k."""
        if not hasattr(self, "_k_cache"):
            self._k_cache = {
                0: UniSeries.zero(self.spec, self.precision),
                1: UniSeries.identity(self.spec, self.precision),
            }
        cache = self._k_cache
        if k not in cache:
            if k < 0:
                cache[k] = self.iota().compose(self.k_series(-k))
            elif k & 1:
                cache[k] = self.apply2(self.k_series(k - 1), cache[1])
            else:
                half = self.k_series(k // 2)
                cache[k] = self.apply2(half, half)
        return cache[k]


class ToyLaw(_LawBase):
    """Hand-specified law table, for exercising consumers of the interface."""

    def __init__(self, spec: GradingSpec, entries: dict, precision: int):
        self.spec = spec
        self.precision = precision
        table = {}
        for (i, j), c in entries.items():
            if not isinstance(c, GradedSeries):
                c = GradedSeries.unit(spec, c)
            if c:
                table[(i, j)] = c
        self._table = self._check_table(table)

    def law_table(self) -> dict:
        return self._table


def additive_law(spec: GradingSpec, precision: int) -> ToyLaw:
    return ToyLaw(spec, {(1, 0): 1, (0, 1): 1}, precision)


class GroupLaw(_LawBase):
    """The Araki-normalized law with generators truncated above v_n."""

    def __init__(self, n: int, precision: int | None = None):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.precision = precision if precision is not None else 2 ** (n + 2)
        if self.precision < 2:
            raise ValueError("precision below 2 carries no law content")
        self.spec = GradingSpec(n, alphabet="standard")

    # -- logarithm and exponential (rational world) -----------------------

    def log_series(self) -> UniSeries:
        if hasattr(self, "_log"):
            return self._log
        spec, N = self.spec, self.precision
        lk = [GradedSeries.unit(spec, Fraction(1))]
        k = 1
        while 2 ** k <= N:
            acc = GradedSeries.zero(spec)
            for j in range(k):
                i = k - j
                if i > self.n:
                    continue
                vi = GradedSeries.gen(spec, f"v{i}", exp=2 ** j, coeff=Fraction(1))
                acc = acc + lk[j] * vi
            lk.append(acc * Fraction(1, 2 - 2 ** (2 ** k)))
            k += 1
        self._log = UniSeries.from_terms(
            spec, {2 ** j: c for j, c in enumerate(lk)}, N)
        return self._log

    def exp_series(self) -> UniSeries:
        if hasattr(self, "_exp"):
            return self._exp
        spec, N = self.spec, self.precision
        log = self.log_series()
        z = GradedSeries.zero(spec)
        E = [z, GradedSeries.unit(spec, Fraction(1))]
        for m in range(2, N + 1):
            partial = UniSeries(spec, E + [z] * (m + 1 - len(E)))
            c = z
            k = 1
            while 2 ** k <= m:
                lc = log[2 ** k]
                if lc:
                    c = c + lc * (partial ** (2 ** k))[m]
                k += 1
            E.append(-c)
        self._exp = UniSeries(spec, E)
        # functional inverse really inverts, through the precision
        if not (self._exp.compose(log) - UniSeries.identity(spec, N)).is_zero():
            raise MathInvariantError("exp does not invert log")
        return self._exp

    # -- the law itself ----------------------------------------------------

    def law_table(self) -> dict:
        if hasattr(self, "_table"):
            return self._table
        N = self.precision
        spec2 = GradingSpec(self.n, q=0, roots=2, alphabet="standard")
        log = self.log_series()
        exp = self.exp_series()
        L = GradedSeries.zero(spec2, trunc=N)
        for m, c in enumerate(log.coeffs):
            if not c:
                continue
            for slot in ("x1", "x2"):
                L = L + c.extended_to(spec2) * GradedSeries.gen(
                    spec2, slot, exp=m, trunc=N)
        S = GradedSeries.zero(spec2, trunc=N)
        p = GradedSeries.unit(spec2, 1, trunc=N)
        for m in range(1, N + 1):
            p = p * L
            if p.is_zero:
                break
            em = exp[m]
            if em:
                S = S + em.extended_to(spec2) * p
        S = _to_two_local(S)
        table: dict[tuple[int, int], GradedSeries] = {}
        for (y, vh, vn, c, x), coeff in S.terms.items():
            key = (y, vh, vn, (), ())
            i, j = x
            entry = table.setdefault((i, j), GradedSeries.zero(self.spec))
            table[(i, j)] = entry + GradedSeries(self.spec, {key: coeff})
        self._check_table(table)
        lam_like = 2  # standard grading: the law is homogeneous in degree 2
        for (i, j), entry in table.items():
            if entry.internal_degree() != lam_like - 2 * (i + j):
                raise MathInvariantError(f"law coefficient {(i, j)} off-degree")
        self._table = table
        return table

    def iota(self) -> UniSeries:
        if hasattr(self, "_iota"):
            return self._iota
        log = self.log_series()
        exp = self.exp_series()
        self._iota = _to_two_local(exp.compose(-log))
        return self._iota

    # -- hat-alphabet views -------------------------------------------------

    def hat_iota(self) -> UniSeries:
        if not hasattr(self, "_hat_iota"):
            self._hat_iota = self.iota().regrade_to_hat()
        return self._hat_iota

    def hat_k_series(self, k: int) -> UniSeries:
        if not hasattr(self, "_hat_k"):
            self._hat_k = {}
        if k not in self._hat_k:
            self._hat_k[k] = self.k_series(k).regrade_to_hat()
        return self._hat_k[k]

    def hat_law_table(self) -> dict:
        if not hasattr(self, "_hat_table"):
            self._hat_table = {ij: c.regrade_to_hat()
                               for ij, c in self.law_table().items()}
        return self._hat_table

    # -- the defining identity, checked through an independent route --------

    def two_series_via_formal_sum(self) -> UniSeries:
        """Formal sum of v_i u^(2^i) with v_0 = 2, computed term by term."""
        parts = [UniSeries.from_terms(self.spec, {1: 2}, self.precision)]
        for i in range(1, self.n + 1):
            if 2 ** i > self.precision:
                break
            vi = GradedSeries.gen(self.spec, f"v{i}", coeff=TwoLocal(1))
            parts.append(UniSeries.from_terms(
                self.spec, {2 ** i: vi}, self.precision))
        return self.formal_sum(parts)

    def araki_identity_holds(self) -> bool:
        return self.k_series(2) == self.two_series_via_formal_sum()
