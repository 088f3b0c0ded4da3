"""Page bookkeeping for the y-filtration spectral sequence, three ways.

Pages live over the hat alphabet.  A chart position is (m, t): m is the
filtration row (the y exponent) and t = internal - m * lambda is the
column, so every differential d_r moves by (+r, +1).  Only
r = 2^(k+1) - 1 with 0 <= k <= n carries a nonzero map:

    d_1(A v^b)       = 2 A v^(b - (2^n - 1)) y           for odd b,
    d_r(A v^(2^k b)) = -A b vhat_k v^(2^k b + 2^k - 2^(n+k)) y^r
                                                          for odd b, k >= 1,

with the convention that vhat_n means v^(-P), P = 2^(n+1)(2^(n-1)-1).
Both formulas raise the internal degree by exactly 1 + r * lambda.

The engines:

  * closed_form_page writes each page down directly.  Every row is a sum
    of standard blocks I_i (R[v^(+-2^s)] / I_j) v^c with I_i the ideal
    (2, vhat_1, ..., vhat_(i-1)); a block is zero when 0 < i <= j or when
    j = n + 1.
  * homology_step takes a page in that shape through one differential by
    splitting each block into its kernel and reduction parts; iterating
    from page 1 is the second, independent route.
  * TruncatedOracle forgets the closed forms entirely: it enumerates
    monomials in a (m, t) window with capped vhat exponents, keeps honest
    cycle and boundary lattices per position, and advances them with the
    raw formulas.  Window and cap overflows are flagged per position so
    comparisons skip exactly the positions the truncation polluted.

Base change along a flat coefficient module tensors a page with either a
free module (degree-shifted copies of each block) or a presented one
(class generators and homogeneous relations); the latter yields chart
structures through per-degree lattice quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product as iter_product

from .errors import (
    EmptyBasisError,
    FlatnessCertificateError,
    InputError,
    MathInvariantError,
    PageShapeError,
)
from .graded import GradedSeries, GradingSpec
from .scalar2 import (
    LocalMatrix,
    ModuleStructure,
    TwoLocal,
    cokernel_structure,
    preimage_rows,
    quotient_structure,
    row_basis,
    snf_with_transforms,
    solve_left,
    stack_rows,
)

ZERO = TwoLocal(0)
ONE = TwoLocal(1)


def admissible_differentials(n: int) -> tuple[int, ...]:
    return tuple(2 ** (k + 1) - 1 for k in range(n + 1))


def _page_level(r: int) -> int:
    if r < 1:
        raise InputError(f"page index {r} out of range")
    return r.bit_length() - 1


def _merge(parts) -> ModuleStructure:
    free = 0
    torsion: list[int] = []
    for p in parts:
        free += p.free_rank
        torsion.extend(p.torsion)
    return ModuleStructure(free, tuple(sorted(torsion)))


# -- the differential formulas -------------------------------------------


def apply_differential(series: GradedSeries, r: int,
                       strict: bool = True) -> GradedSeries:
    """Apply d_r to a hat-alphabet series.

    In strict mode a vn exponent that is not divisible by 2^k (for
    r = 2^(k+1) - 1) is an error; with strict=False such monomials are
    sent to zero, which is how the oracle treats blocks the formula does
    not reach.
    """
    spec = series.spec
    if spec.alphabet != "hat":
        raise InputError("differentials act on the hat alphabet")
    n = spec.n
    if r < 1 or (r + 1) & r or r > 2 ** (n + 1) - 1:
        raise InputError(f"d_{r} is not admissible for n={n}")
    k = (r + 1).bit_length() - 2
    P = spec.hat_offset
    out: dict = {}
    for (y, vh, vn, c, x), A in series.terms.items():
        if k == 0:
            if vn % 2 == 0:
                continue
            key = (y + 1, vh, vn - (2 ** n - 1), c, x)
            coeff = 2 * A
        else:
            if vn % (2 ** k):
                if strict:
                    raise InputError(
                        f"vn exponent {vn} is not a multiple of 2^{k}")
                continue
            b = vn // (2 ** k)
            if b % 2 == 0:
                continue
            new_vn = vn + 2 ** k - 2 ** (n + k)
            if k == n:
                new_vn -= P
                new_vh = vh
            else:
                lst = list(vh)
                lst[k - 1] += 1
                new_vh = tuple(lst)
            key = (y + r, new_vh, new_vn, c, x)
            coeff = A * (-b)
        prev = out.get(key, 0)
        tot = prev + coeff
        if tot:
            out[key] = tot
        else:
            out.pop(key, None)
    return GradedSeries(spec, out, series.trunc)


# -- standard blocks and closed-form pages ---------------------------------


@dataclass(frozen=True)
class StandardSummand:
    """One block I_i (R[v^(+-2^s)] / I_j) v^c, possibly degree-shifted."""

    n: int
    i: int
    j: int
    s: int
    c: int
    shift: int = 0
    tag: str = ""

    def __post_init__(self):
        if not 0 <= self.i <= self.n + 1 or not 0 <= self.j <= self.n + 1:
            raise InputError(f"ideal indices out of range in {self}")
        if self.s < 0:
            raise InputError("negative periodicity exponent")
        object.__setattr__(self, "c", self.c % 2 ** self.s)

    @property
    def is_zero(self) -> bool:
        return (0 < self.i <= self.j) or self.j == self.n + 1

    def notation(self) -> str:
        num = "R" if self.i == 0 else f"I_{self.i}R"
        den = "" if self.j == 0 else f"/I_{self.j}"
        off = f"v^{self.c}" if self.c else ""
        sh = f"<{self.shift}>" if self.shift else ""
        return f"{num}{den}[v^±{2 ** self.s}]{off}{sh}"

    def structure_at(self, D: int, caps: int) -> ModuleStructure:
        """Z_(2)-module structure in internal degree D, vhat exponents
        capped at `caps`.  The ideal index i is invisible when j = 0 (the
        block is a full-rank sublattice of a free module); for j >= 1 each
        monomial is one Z/2."""
        if self.is_zero:
            return ModuleStructure(0, ())
        n = self.n
        spec = GradingSpec(n, alphabet="hat")
        lam1 = spec.lam - 1
        wl = [(2 ** l - 1) * lam1 for l in range(1, n)]
        wn = -2 * (2 ** n - 1)
        target = D - self.shift
        count = 0
        for a in iter_product(range(caps + 1), repeat=n - 1):
            if self.j >= 1 and any(a[l] for l in range(self.j - 1)):
                continue
            if self.i > self.j >= 1:
                if not any(a[l] for l in range(self.j - 1, self.i - 1)):
                    continue
            rem = target - sum(e * w for e, w in zip(a, wl))
            if rem % wn:
                continue
            b = rem // wn
            if (b - self.c) % 2 ** self.s:
                continue
            count += 1
        if self.j == 0:
            return ModuleStructure(count, ())
        return ModuleStructure(0, (2,) * count)


@dataclass
class Page:
    n: int
    r: int
    rows: dict[int, tuple[StandardSummand, ...]]
    m_max: int

    @property
    def level(self) -> int:
        return min(_page_level(self.r), self.n + 1)

    def chart_structure(self, m: int, t: int, caps: int = 6) -> ModuleStructure:
        spec = GradingSpec(self.n, alphabet="hat")
        D = t + m * spec.lam
        return _merge(s.structure_at(D, caps)
                      for s in self.rows.get(m, ()) if not s.is_zero)

    def chart(self, t_values, caps: int = 6) -> dict:
        out = {}
        for m in range(self.m_max + 1):
            for t in t_values:
                st = self.chart_structure(m, t, caps)
                if not st.is_zero:
                    out[(m, t)] = st
        return out


def closed_form_page(n: int, r: int, m_max: int | None = None) -> Page:
    """The page at index r, written down directly.

    Pages are constant between consecutive admissible differentials, and
    everything from 2^(n+1) on is the last one.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if m_max is None:
        m_max = 2 ** (n + 2)
    k = min(_page_level(r), n + 1)
    rows: dict[int, tuple[StandardSummand, ...]] = {}
    for m in range(m_max + 1):
        if k == 0:
            rows[m] = (StandardSummand(n, 0, 0, 0, 0),)
        elif m >= 2 ** k - 1:
            rows[m] = (StandardSummand(n, 0, k, k, 0),)
        else:
            j = (m + 1).bit_length() - 1
            blocks = [StandardSummand(n, 0, j, k, 0)]
            blocks += [StandardSummand(n, i, j, i + 1, 2 ** i)
                       for i in range(j + 1, k)]
            rows[m] = tuple(blocks)
    return Page(n, r, rows, m_max)


def homology_step(page: Page, r: int) -> Page:
    """Run d_r through a page in standard shape.

    Per row, blocks with i > 0 pass through untouched; the single i = 0
    block (0, j, k, 0) splits into the doubled-period part (0, j', k+1, 0)
    with j' = j except on hit rows (m >= r, where j = k must hold and j'
    is k + 1), plus the kernel block (k, j, k+1, 2^k) unless j = k.
    """
    k = _page_level(page.r)
    if k > page.n:
        raise PageShapeError("no differentials remain past the last page")
    if r != 2 ** (k + 1) - 1:
        raise PageShapeError(
            f"page {page.r} carries d_{2 ** (k + 1) - 1}, not d_{r}")
    new_rows: dict[int, tuple[StandardSummand, ...]] = {}
    for m, blocks in page.rows.items():
        main = [s for s in blocks if s.i == 0]
        if len(main) != 1:
            raise PageShapeError(f"row {m} lacks a unique i=0 block")
        s0 = main[0]
        if s0.s != k or s0.c != 0:
            raise PageShapeError(f"row {m} block {s0} has the wrong period")
        j = s0.j
        hit = m >= r
        if hit and j != k:
            raise PageShapeError(f"hit row {m} carries j={j}, expected {k}")
        one_part = StandardSummand(page.n, 0, j + 1 if hit else j, k + 1, 0,
                                   s0.shift, s0.tag)
        out = [one_part]
        out += [s for s in blocks if s.i > 0]
        if j != k:
            out.append(StandardSummand(page.n, k, j, k + 1, 2 ** k,
                                       s0.shift, s0.tag))
        new_rows[m] = tuple(out)
    return Page(page.n, 2 ** (k + 1), new_rows, page.m_max)


def step_engine_page(n: int, r: int, m_max: int | None = None) -> Page:
    """Reach page r from page 1 by iterated homology steps."""
    page = closed_form_page(n, 1, m_max)
    target = min(_page_level(r), n + 1)
    for k in range(target):
        page = homology_step(page, 2 ** (k + 1) - 1)
    return Page(page.n, r, page.rows, page.m_max)


# -- the truncated oracle ---------------------------------------------------


class TruncatedOracle:
    """Honest subquotient bookkeeping on a capped monomial window.

    Per position (m, t) the oracle holds a cycle lattice Z and boundary
    lattice B over the monomial basis; advancing through d_r replaces Z by
    the preimage of the target's boundaries and grows the target's B by
    the images of current cycles, all positions simultaneously.  A
    position is flagged, permanently, when the truncation makes any of
    that arithmetic unknowable there.
    """

    def __init__(self, n: int, t_lo: int, t_hi: int, caps: int = 6,
                 m_max: int | None = None):
        if n < 1:
            raise InputError("n must be at least 1")
        if t_hi < t_lo:
            raise InputError("empty window")
        if caps < 0:
            raise InputError("negative caps")
        self.n = n
        self.caps = caps
        self.t_lo, self.t_hi = t_lo, t_hi
        self.m_max = m_max if m_max is not None else 2 ** (n + 2)
        self.spec = GradingSpec(n, alphabet="hat")
        lam1 = self.spec.lam - 1
        self._wl = [(2 ** l - 1) * lam1 for l in range(1, n)]
        self._wn = -2 * (2 ** n - 1)
        self.basis: dict[tuple[int, int], list] = {}
        self.index: dict[tuple[int, int], dict] = {}
        content = 0
        constant_only = True
        for m in range(self.m_max + 1):
            for t in range(t_lo, t_hi + 1):
                keys = self._basis_for(m, t)
                if keys:
                    cell = (m, t)
                    self.basis[cell] = keys
                    self.index[cell] = {key: i for i, key in enumerate(keys)}
                    content += len(keys)
                    for key in keys:
                        if key[0] or any(key[1]) or key[2]:
                            constant_only = False
        if content == 0 or (content <= 1 and constant_only):
            raise EmptyBasisError("window and caps leave nothing to chart")
        self.Z = {cell: LocalMatrix.identity(len(keys))
                  for cell, keys in self.basis.items()}
        self.B = {cell: LocalMatrix.zeros(0, len(keys))
                  for cell, keys in self.basis.items()}
        self.flags: set[tuple[int, int]] = set()
        self.level = 0
        self.charts: dict[int, dict] = {1: self._chart_now()}

    def _basis_for(self, m: int, t: int) -> list:
        D = t + m * self.spec.lam
        keys = []
        for a in iter_product(range(self.caps + 1), repeat=self.n - 1):
            rem = D - sum(e * w for e, w in zip(a, self._wl))
            if rem % self._wn:
                continue
            b = rem // self._wn
            keys.append((m, a, b, (), ()))
        return keys

    def _structure(self, cell) -> ModuleStructure:
        return quotient_structure(self.Z[cell], self.B[cell])

    def _chart_now(self) -> dict:
        out = {}
        for cell in self.basis:
            st = self._structure(cell)
            if not st.is_zero:
                out[cell] = st
        return out

    def structure_at(self, m: int, t: int) -> ModuleStructure:
        cell = (m, t)
        if cell not in self.basis:
            if not (0 <= m <= self.m_max and self.t_lo <= t <= self.t_hi):
                raise InputError(f"position {cell} outside the window")
            return ModuleStructure(0, ())
        return self._structure(cell)

    def _diff_data(self, cell, r):
        """Matrix of d_r on the cell basis, split into the representable
        part and overflow columns (image monomials the window lacks)."""
        m, t = cell
        tgt = (m + r, t + 1)
        tindex = self.index.get(tgt, {})
        over_cols: dict = {}
        rows_in = []
        rows_over = []
        for key in self.basis[cell]:
            img = apply_differential(GradedSeries(self.spec, {key: ONE}),
                                     r, strict=False)
            if apply_differential(img, r, strict=False):
                raise MathInvariantError("d∘d is nonzero at the formula level")
            rin = [ZERO] * len(tindex)
            rover = {}
            for kk, cc in img.terms.items():
                col = tindex.get(kk)
                if col is None:
                    rover[over_cols.setdefault(kk, len(over_cols))] = cc
                else:
                    rin[col] = cc
            rows_in.append(rin)
            rows_over.append(rover)
        Din = LocalMatrix(rows_in, len(tindex))
        Dover = LocalMatrix(
            [[row.get(j, ZERO) for j in range(len(over_cols))]
             for row in rows_over], len(over_cols))
        return Din, Dover, tgt

    def advance(self) -> int:
        """Run the next admissible differential; returns the new page index."""
        if self.level > self.n:
            raise InputError("already at the final page")
        k = self.level
        r = 2 ** (k + 1) - 1
        cells = list(self.basis)
        data = {cell: self._diff_data(cell, r) for cell in cells}

        new_flags = set(self.flags)
        for cell in cells:
            if cell in self.flags:
                continue
            m, t = cell
            _, Dover, tgt = data[cell]
            if Dover.ncols and any(
                    x.num for row in (self.Z[cell] @ Dover).data for x in row):
                new_flags.add(cell)
                continue
            if tgt in self.flags:
                new_flags.add(cell)
                continue
            src = (m - r, t - 1)
            if m - r >= 0:
                if t - 1 < self.t_lo:
                    if self._basis_for(m - r, t - 1):
                        new_flags.add(cell)
                elif src in self.flags:
                    new_flags.add(cell)

        new_Z = {}
        extra = {cell: [] for cell in cells}
        for cell in cells:
            Din, _, tgt = data[cell]
            Z = self.Z[cell]
            images = Z @ Din
            if tgt in self.basis:
                Btgt = self.B[tgt]
                X = preimage_rows(images, Btgt)
                # the boundary lattice must consist of next-page cycles:
                # d_r of every boundary has to be an existing boundary
                if self.B[cell].nrows:
                    bimg = self.B[cell] @ Din
                    decomp = snf_with_transforms(Btgt) if Btgt.nrows else None
                    for row in bimg.data:
                        if not any(x.num for x in row):
                            continue
                        if Btgt.nrows == 0 or solve_left(Btgt, row, decomp) is None:
                            if cell not in new_flags:
                                raise MathInvariantError(
                                    f"boundary at {cell} escapes under d_{r}")
                for row in images.data:
                    if any(x.num for x in row):
                        extra[tgt].append(row)
            else:
                X = preimage_rows(images, LocalMatrix.zeros(0, Din.ncols))
            new_Z[cell] = X @ Z

        for cell in cells:
            self.Z[cell] = new_Z[cell]
        for cell in cells:
            if extra[cell]:
                self.B[cell] = row_basis(stack_rows(
                    [self.B[cell], LocalMatrix(extra[cell], self.B[cell].ncols)]))
        self.flags = new_flags

        for cell in cells:
            if cell in self.flags:
                continue
            odd_cols = [i for i, key in enumerate(self.basis[cell])
                        if key[2] % 2]
            for row in self.Z[cell].data:
                for i in odd_cols:
                    if row[i].num:
                        raise MathInvariantError(
                            f"odd-exponent cycle survived d_1 at {cell}")

        self.level += 1
        self.charts[2 ** self.level] = self._chart_now()
        return 2 ** self.level

    def run(self) -> None:
        while self.level <= self.n:
            self.advance()

    def chart_at(self, r: int) -> dict:
        """Chart at page r; pages between differentials repeat."""
        lvl = min(_page_level(r), self.n + 1)
        idx = 2 ** lvl
        if idx not in self.charts:
            raise InputError(f"oracle has not advanced to page {idx} yet")
        return self.charts[idx]

    def populated_unflagged(self, r: int) -> list:
        chart = self.chart_at(r)
        return [cell for cell in chart if cell not in self.flags]

    def inadmissible_pairs(self, r: int) -> list:
        """Positions where a d_r could act between nonzero groups.

        For inadmissible r this list must come back empty; every source
        and target is only counted when inside the window and unflagged.
        """
        chart = self.chart_at(r)
        pairs = []
        for (m, t) in chart:
            if (m, t) in self.flags:
                continue
            tgt = (m + r, t + 1)
            if tgt in self.flags:
                continue
            if not (tgt[0] <= self.m_max and self.t_lo <= tgt[1] <= self.t_hi):
                continue
            if chart.get(tgt):
                pairs.append(((m, t), tgt))
        return pairs


# -- flat base change --------------------------------------------------------


@dataclass(frozen=True)
class FreeModule:
    """Finitely many free generators with internal degree shifts."""

    shifts: tuple[int, ...]
    flat_certificate: str
    description: str = ""


@dataclass
class PresentedModule:
    """Quotient of a weight-truncated class ring by homogeneous relations.

    The ambient ring augments the coefficient ring with q class
    generators, truncated above class weight `weight`; that truncation is
    a ring quotient, so dropping overweight terms of relation multiples
    is exact.  The vhat exponent caps are a window, not a quotient:
    degrees where a relation or ideal multiple left the capped basis are
    recorded in `incomplete_degrees` and its answers there are
    approximations.
    """

    spec: GradingSpec
    weight: int
    relations: tuple[GradedSeries, ...]
    flat_certificate: str
    description: str = ""
    caps: int = 6

    def __post_init__(self):
        if self.spec.alphabet != "hat" or self.spec.roots:
            raise InputError("presented modules live over the hat class ring")
        self.relations = tuple(self.relations)
        for rel in self.relations:
            if rel.spec != self.spec:
                raise InputError("relation over the wrong spec")
            if not rel.is_homogeneous():
                raise InputError("relations must be homogeneous")
        self.incomplete_degrees: set[int] = set()
        self._cache: dict = {}

    # ambient monomials y^0 vhat^a c^e vhatn^tau at one internal degree
    def ambient_basis(self, D: int) -> list:
        n = self.spec.n
        key = ("basis", D)
        if key in self._cache:
            return self._cache[key]
        lam1 = self.spec.lam - 1
        wl = [(2 ** l - 1) * lam1 for l in range(1, n)]
        wtopE = (2 ** n - 1) * lam1
        P = self.spec.hat_offset
        out = []
        for e in self._class_tuples():
            cdeg = -lam1 * sum(k * ek for k, ek in enumerate(e, start=1))
            for a in iter_product(range(self.caps + 1), repeat=n - 1):
                rem = D - cdeg - sum(x * w for x, w in zip(a, wl))
                if n == 1:
                    if rem == 0:
                        out.append((0, a, 0, e, ()))
                    continue
                if rem % wtopE:
                    continue
                tau = rem // wtopE
                out.append((0, a, -tau * P, e, ()))
        out.sort()
        self._cache[key] = out
        return out

    def _class_tuples(self):
        key = ("classes",)
        if key not in self._cache:
            q, W = self.spec.q, self.weight
            tuples = []
            for e in iter_product(*(range(W // k + 1) for k in range(1, q + 1))):
                if sum(k * ek for k, ek in enumerate(e, start=1)) <= W:
                    tuples.append(e)
            self._cache[key] = tuples or [()]
        return self._cache[key]

    def _series_to_row(self, series: GradedSeries, D: int):
        idx = {k: i for i, k in enumerate(self.ambient_basis(D))}
        row = [ZERO] * len(idx)
        complete = True
        for k, coeff in series.terms.items():
            col = idx.get(k)
            if col is None:
                complete = False
            else:
                row[col] = row[col] + coeff
        return row, complete

    def relation_rows(self, D: int) -> LocalMatrix:
        key = ("rel", D)
        if key in self._cache:
            return self._cache[key]
        nb = len(self.ambient_basis(D))
        rows = []
        for rel in self.relations:
            if not rel:
                continue
            d = rel.internal_degree()
            for mono in self.ambient_basis(D - d):
                prod = (GradedSeries(self.spec, {mono: ONE}, self.weight)
                        * rel.truncated(self.weight))
                row, complete = self._series_to_row(prod, D)
                if not complete:
                    self.incomplete_degrees.add(D)
                    continue
                if any(x.num for x in row):
                    rows.append(row)
        mat = LocalMatrix(rows, nb)
        self._cache[key] = mat
        return mat

    def _ideal_rows(self, D: int, i: int) -> LocalMatrix:
        """Generators of I_i applied to the degree-D basis, as rows."""
        basis = self.ambient_basis(D)
        nb = len(basis)
        rows = [[(2 if col == rix else 0) for col in range(nb)]
                for rix in range(nb)]
        lam1 = self.spec.lam - 1
        for l in range(1, i):
            wl = (2 ** l - 1) * lam1
            for mono in self.ambient_basis(D - wl):
                prod = GradedSeries(self.spec, {mono: ONE}, self.weight) \
                    * GradedSeries.gen(self.spec, f"vh{l}", trunc=self.weight)
                row, complete = self._series_to_row(prod, D)
                if not complete:
                    self.incomplete_degrees.add(D)
                    continue
                rows.append(row)
        return LocalMatrix(rows, nb)

    def structure_at(self, D: int) -> ModuleStructure:
        return cokernel_structure(self.relation_rows(D))

    def twisted_structure_at(self, D: int, i: int, j: int) -> ModuleStructure:
        """Structure of I_i (M / I_j M) in internal degree D."""
        n = self.spec.n
        if (0 < i <= j) or j == n + 1:
            return ModuleStructure(0, ())
        if i == n + 1:
            # the top ideal contains the invertible periodicity generator
            i = 0
        key = ("tw", D, i, j)
        if key in self._cache:
            return self._cache[key]
        nb = len(self.ambient_basis(D))
        if nb == 0:
            self._cache[key] = ModuleStructure(0, ())
            return self._cache[key]
        rel = self.relation_rows(D)
        denom_parts = [rel]
        if j >= 1:
            denom_parts.append(self._ideal_rows(D, j))
        denom = stack_rows([p for p in denom_parts if p.nrows]
                           or [LocalMatrix.zeros(0, nb)])
        if i == 0:
            numer = LocalMatrix.identity(nb)
        else:
            numer = self._ideal_rows(D, i)
        K = row_basis(stack_rows([numer, denom]))
        st = quotient_structure(K, denom)
        self._cache[key] = st
        return st


class TensoredPage:
    """Chart view of a page tensored with a presented flat module."""

    def __init__(self, page: Page, module: PresentedModule):
        if module.spec.n != page.n:
            raise InputError("chromatic heights differ")
        self.page = page
        self.module = module
        self.spec = module.spec

    @property
    def r(self) -> int:
        return self.page.r

    def chart_structure(self, m: int, t: int) -> ModuleStructure:
        n = self.page.n
        lam = self.spec.lam
        P = self.spec.hat_offset
        wn = -2 * (2 ** n - 1)
        D = t + m * lam
        parts = []
        for s in self.page.rows.get(m, ()):
            if s.is_zero:
                continue
            if n == 1:
                rem = D - s.shift
                if rem % wn:
                    continue
                b = rem // wn
                if (b - s.c) % 2 ** s.s:
                    continue
                parts.append(self.module.twisted_structure_at(0, s.i, s.j))
            else:
                for tp in range(P // 2 ** s.s):
                    e = 2 ** s.s * tp + s.c
                    parts.append(self.module.twisted_structure_at(
                        D - s.shift - e * wn, s.i, s.j))
        return _merge(parts)

    def chart(self, t_values) -> dict:
        out = {}
        for m in range(self.page.m_max + 1):
            for t in t_values:
                st = self.chart_structure(m, t)
                if not st.is_zero:
                    out[(m, t)] = st
        return out


def flat_base_change(page: Page, module):
    """Tensor a coefficient page with a flat module.

    Free modules give an honest page again (shifted copies of each
    block); presented modules give a chart-compatible tensored view.
    Either way the module must carry a nonempty flatness certificate.
    """
    cert = getattr(module, "flat_certificate", "")
    if not cert:
        raise FlatnessCertificateError(
            "flat base change without a flatness certificate")
    if isinstance(module, FreeModule):
        rows = {}
        for m, blocks in page.rows.items():
            out = []
            for d in module.shifts:
                for s in blocks:
                    out.append(replace(s, shift=s.shift + d,
                                       tag=module.description or s.tag))
            rows[m] = tuple(out)
        return Page(page.n, page.r, rows, page.m_max)
    if isinstance(module, PresentedModule):
        return TensoredPage(page, module)
    raise InputError(f"cannot base change along {type(module).__name__}")
