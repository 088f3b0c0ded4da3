"""The class ring modulo conjugation: presentation, normal forms, the
periodicity decomposition, and window-scale flatness checks.

The fixed-point cohomology of the classifying spaces is the coefficient
ring with one class generator per rank, modulo the differences between
each class and its conjugate.  Everything here works at a finite weight
bound W: the weight truncation is a ring quotient, so identities proved
below W are exact statements about the truncated ring.

`present` expands the relation series and pins their leading terms.
`reduce` rewrites ring elements to a normal form by eliminating, at each
step, the smallest term divisible by some relation head; heads are
minimal in the order (class weight, class tuple, vhat tuple, periodicity
exponent), and an elimination only ever creates larger terms, which is
the termination argument.  Division by a head requires matching 2-adic
valuation; coefficients are never split.

`hat_decompose` splits a homogeneous element over the periodic
coefficient ring into parts indexed by the residue of the periodicity
exponent, each part a multiple of a fixed residue basis element with
hat-graded coefficient.  `landweber_window_check` verifies, degree by
degree inside a window, that multiplication by the stage-k generator has
zero kernel on the presented quotient modulo the stage-k ideal.  The
vhat caps are a window, not a quotient: monomials pushed past the cap by
a relation tail or a multiplication get fresh overflow columns, so no
lattice row is silently projected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bss import PresentedModule
from .coeff import named_generators, total_period
from .errors import InputError, MathInvariantError, ReductionError
from .fgl import GroupLaw, UniSeries
from .graded import GradedSeries, GradingSpec
from .scalar2 import (ONE, ZERO, LocalMatrix, TwoLocal, preimage_rows,
                      snf_with_transforms, solve_left, val2)
from .symchern import SymmetricContext

__all__ = [
    "RingPresentation",
    "HatDecomposition",
    "FlatnessCertificate",
    "present",
    "reduce",
    "in_ideal",
    "hat_decompose",
    "residue_certificate",
    "landweber_window_check",
]


# -- term order ------------------------------------------------------------


def _order_key(spec: GradingSpec, key):
    y, vh, vn, c, x = key
    return (spec.weight_of(key), c, vh, vn)


def _head(spec: GradingSpec, series: GradedSeries):
    """Minimal term in the rewriting order, or None for zero."""
    best = None
    for key, coeff in series.terms.items():
        ok = _order_key(spec, key)
        if best is None or ok < best[0]:
            best = (ok, key, coeff)
    if best is None:
        return None
    return (best[1], best[2])


def _check_carrier(series: GradedSeries, spec: GradingSpec) -> None:
    P = spec.hat_offset
    for (y, vh, vn, c, x) in series.terms:
        if y or any(x):
            raise InputError("element leaves the class ring")
        if vn if P == 0 else vn % P:
            raise InputError("periodicity exponent off the hat lattice")


def _into_class_spec(series: GradedSeries, spec: GradingSpec) -> GradedSeries:
    # drop the root slots once elimination has emptied them
    out = {}
    for (y, vh, vn, c, x), coeff in series.terms.items():
        if any(x):
            raise MathInvariantError("root content survived elimination")
        out[(y, vh, vn, c, ())] = coeff
    return GradedSeries(spec, out, series.trunc)


# -- presentation ----------------------------------------------------------


@dataclass(frozen=True)
class RingPresentation:
    """Class generators and the conjugation relations at one weight bound."""

    n: int
    q: int
    weight: int
    spec: GradingSpec
    generator_degrees: tuple[int, ...]
    relations: tuple[GradedSeries, ...]
    heads: tuple
    coefficients: str


def _class_key(spec: GradingSpec, k: int):
    return (0, (0,) * (spec.n - 1), 0,
            tuple(1 if j == k else 0 for j in range(1, spec.q + 1)), ())


def _assert_head_shape(spec: GradingSpec, rel: GradedSeries, k: int) -> None:
    if k % 2:
        head = _head(spec, rel)
        if head is None or head[0] != _class_key(spec, k) or \
                head[1] != TwoLocal(2):
            raise MathInvariantError(
                f"odd relation {k} does not lead with twice the class")
    elif any(spec.weight_of(key) == k for key in rel.terms):
        raise MathInvariantError(
            f"even relation {k} keeps weight-{k} content")


def present(n: int, q: int, weight: int,
            iota: UniSeries | None = None) -> RingPresentation:
    """Generators and relations for q classes at weight bound `weight`.

    The k-th relation is the class minus its conjugate; pass a toy `iota`
    to exercise consumers against a hand-built law.
    """
    if weight < 1:
        raise InputError("weight bound must be positive")
    if q < 1:
        raise InputError("need at least one class")
    if iota is None:
        iota = GroupLaw(n, precision=weight + 1).hat_iota()
    if iota.spec.n != n:
        raise InputError("conjugation series built at a different height")
    ctx = SymmetricContext(iota, q=q, weight=weight)
    spec = GradingSpec(n, q=q, alphabet=iota.spec.alphabet)
    relations = []
    heads = []
    for k in range(1, q + 1):
        rel = _into_class_spec(ctx.chern_class(k) - ctx.conjugate_chern(k),
                               spec)
        _assert_head_shape(spec, rel, k)
        relations.append(rel)
        heads.append(_head(spec, rel))
    named = named_generators(n)
    coeffs = (f"coefficient chart with {len(named)} named classes, "
              f"total period {total_period(n)}")
    degrees = tuple(-k * (spec.lam - 1) for k in range(1, q + 1))
    return RingPresentation(n, q, weight, spec, degrees, tuple(relations),
                            tuple(heads), coeffs)


# -- reduction to normal form ----------------------------------------------


def _divides(head_key, key) -> bool:
    _, vhh, _, ch, _ = head_key
    _, vh, _, c, _ = key
    return (all(a >= b for a, b in zip(vh, vhh))
            and all(a >= b for a, b in zip(c, ch)))


def reduce(z: GradedSeries, p: RingPresentation) -> GradedSeries:
    """Normal form of z modulo the relation ideal.

    Eliminates whole terms only: a term falls to a relation when the head
    monomial divides it componentwise (the periodicity exponent is free,
    both being on the hat lattice) and the head coefficient's 2-adic
    valuation does not exceed the term's.
    """
    if z.spec != p.spec:
        raise InputError("element over a different class ring")
    _check_carrier(z, p.spec)
    if any(p.spec.weight_of(k) > p.weight for k in z.terms):
        raise InputError(f"element exceeds the weight bound {p.weight}")
    work = z.truncated(p.weight)
    rules = []
    for h, rel in zip(p.heads, p.relations):
        if h is not None:
            rules.append((h[0], h[1], rel))
    limit = 64 * (len(work.terms) + 8) * (p.weight + 1)
    steps = 0
    last = None
    while True:
        target = None
        for key, coeff in work.terms.items():
            for hk, hc, rel in rules:
                if _divides(hk, key) and val2(hc) <= val2(coeff):
                    ok = _order_key(p.spec, key)
                    if target is None or ok < target[0]:
                        target = (ok, key, coeff, hk, hc, rel)
                    break
        if target is None:
            return work
        ok, key, coeff, hk, hc, rel = target
        if last is not None and ok <= last:
            raise ReductionError("rewriting order failed to increase")
        last = ok
        y, vh, vn, c, x = key
        _, vhh, vnh, ch, _ = hk
        quot_key = (0, tuple(a - b for a, b in zip(vh, vhh)), vn - vnh,
                    tuple(a - b for a, b in zip(c, ch)), ())
        ratio = coeff / hc
        quot = GradedSeries(p.spec, {quot_key: ONE}, p.weight)
        work = work - (quot * rel).map_coefficients(lambda v: v * ratio)
        if work.coefficient(key):
            raise ReductionError("head elimination left the term behind")
        steps += 1
        if steps > limit:
            raise ReductionError("rewriting exceeded the step bound")


def in_ideal(z: GradedSeries, p: RingPresentation, caps: int = 6) -> bool:
    """Membership of z in the relation ideal of the weight-truncated ring.

    Head rewriting alone cannot decide membership: the relations are not
    a complete rewriting system, and a zero normal form is sufficient
    but not necessary.  This solves instead: each homogeneous part of z
    must be an integral combination of relation multiples inside the
    weight-W quotient, where the weight truncation is exact.  Monomials
    pushed past the vhat caps still get honest overflow columns; a False
    can therefore only mean the capped multiple lattice misses z, never
    that a cap silently projected a row.
    """
    if z.spec != p.spec:
        raise InputError("element over a different class ring")
    _check_carrier(z, p.spec)
    if any(p.spec.weight_of(k) > p.weight for k in z.terms):
        raise InputError(f"element exceeds the weight bound {p.weight}")
    module = PresentedModule(p.spec, p.weight, (),
                             flat_certificate="membership probe", caps=caps)
    for D in z.degrees():
        part = z.homogeneous_part(D)
        cols = _Columns(module.ambient_basis(D))
        vec = _series_cols(part, cols)
        rows = _lattice_rows(module, p.relations, D, 0, cols, p.weight)
        num = _materialize(rows, cols.width)
        padded = [vec.get(c, ZERO) for c in range(cols.width)]
        if num.nrows == 0:
            if any(v.num for v in padded):
                return False
        elif solve_left(num, padded, snf_with_transforms(num)) is None:
            return False
    return True


# -- periodicity decomposition ----------------------------------------------


@dataclass(frozen=True)
class HatDecomposition:
    """A homogeneous element split along the periodicity residue basis."""

    n: int
    source_spec: GradingSpec
    components: dict
    residues: tuple[int, ...]
    bounded: bool

    def recombine(self) -> GradedSeries:
        out = {}
        for j, comp in self.components.items():
            for (y, vh, vn, c, x), coeff in comp.terms.items():
                out[(y, vh, vn + j, c, x)] = coeff
        return GradedSeries(self.source_spec, out)


def hat_decompose(element: GradedSeries,
                  residue_bound: int | None = None) -> HatDecomposition:
    """Split a homogeneous element by its periodicity-exponent residue.

    Each component is the cofactor of one residue basis element, carried
    over to the hat grading, where its degree is a multiple of the hat
    degree unit.  Height one has no finite residue basis, so a bound on
    the exponents must be supplied there.
    """
    spec = element.spec
    if spec.alphabet != "standard":
        raise InputError("decomposition starts from the standard alphabet")
    if not element.is_homogeneous():
        raise InputError("element must be homogeneous")
    n = spec.n
    hat_spec = GradingSpec(n, spec.q, spec.roots, "hat")
    P = hat_spec.hat_offset
    if P == 0 and residue_bound is None:
        raise InputError("height one needs an explicit residue bound")
    parts: dict[int, dict] = {}
    for (y, vh, vn, c, x), coeff in element.terms.items():
        if P == 0:
            if abs(vn) >= residue_bound:
                raise InputError(f"exponent {vn} outside the residue bound")
            j = vn
        else:
            j = vn % P
        parts.setdefault(j, {})[(y, vh, vn - j, c, x)] = coeff
    lam1 = hat_spec.lam - 1
    components = {}
    for j, terms in sorted(parts.items()):
        comp = GradedSeries(hat_spec, terms)
        for d in comp.degrees():
            if lam1 and d % lam1:
                raise MathInvariantError(
                    "component degree misses the hat lattice")
        components[j] = comp
    residues = tuple(sorted(parts)) if P == 0 else tuple(range(P))
    return HatDecomposition(n, spec, components, residues, P == 0)


def residue_certificate(n: int) -> dict[int, int]:
    """Degree class of each residue basis element, shown pairwise distinct.

    The classes cover exactly the even residues modulo the hat degree
    unit; the gcd witness is (2^n - 1) - 2(2^(n-1) - 1) = 1.
    """
    if n < 2:
        raise InputError("height one has no finite residue basis")
    P = GradingSpec(n, alphabet="hat").hat_offset
    lam1 = 2 * P
    step = 2 * (2 ** n - 1)
    if (2 ** n - 1) - 2 * (2 ** (n - 1) - 1) != 1:
        raise MathInvariantError("gcd witness identity failed")
    classes = {j: (-step * j) % lam1 for j in range(P)}
    if len(set(classes.values())) != P:
        raise MathInvariantError("residue degree classes collide")
    if set(classes.values()) != set(range(0, lam1, 2)):
        raise MathInvariantError("residue classes miss an even degree slot")
    return classes


# -- window-scale flatness ---------------------------------------------------


@dataclass(frozen=True)
class FlatnessCertificate:
    n: int
    q: int
    k: int
    window: tuple[int, int]
    weight: int
    caps: int
    ok: bool
    checked: tuple[tuple[int, int], ...]
    failures: tuple[int, ...]


class _Columns:
    """Column registry: the capped basis first, overflow keys after."""

    def __init__(self, basis):
        self.index = {key: i for i, key in enumerate(basis)}
        self.base = len(basis)
        self.extra: dict = {}

    def col(self, key) -> int:
        c = self.index.get(key)
        if c is not None:
            return c
        return self.extra.setdefault(key, self.base + len(self.extra))

    @property
    def width(self) -> int:
        return self.base + len(self.extra)


def _series_cols(series: GradedSeries, cols: _Columns) -> dict:
    row: dict[int, TwoLocal] = {}
    for key, coeff in series.terms.items():
        c = cols.col(key)
        row[c] = row.get(c, ZERO) + coeff
    return {c: v for c, v in row.items() if v.num}


def _lattice_rows(module: PresentedModule, relations, D: int, k: int,
                  cols: _Columns, deep: int) -> list[dict]:
    """Relation multiples plus the stage-k ideal at degree D.

    Rows live in the registry's extended coordinates: tails past the vhat
    cap or past the basis weight bound stay visible as overflow instead of
    vanishing.  Silent truncation here would close rewriting staircases
    and fabricate torsion the completed ring does not have, so the
    relations come in expanded to `deep` and the enumeration never clips
    below that.  After everything degree-D is enumerated, the stage ideal
    gets a doubling row for every registered column, overflow included:
    twice any ambient monomial lies in the ideal regardless of whether
    the monomial fits the reporting basis.
    """
    spec = module.spec
    rows = []
    for rel in relations:
        if not rel:
            continue
        d = rel.internal_degree()
        for mono in module.ambient_basis(D - d):
            prod = GradedSeries(spec, {mono: ONE}, deep) * rel
            row = _series_cols(prod, cols)
            if row:
                rows.append(row)
    if k >= 1:
        lam1 = spec.lam - 1
        for l in range(1, k):
            wl = (2 ** l - 1) * lam1
            gen = GradedSeries.gen(spec, f"vh{l}", trunc=deep)
            for mono in module.ambient_basis(D - wl):
                prod = GradedSeries(spec, {mono: ONE}, deep) * gen
                row = _series_cols(prod, cols)
                if row:
                    rows.append(row)
        for col in range(cols.width):
            rows.append({col: TwoLocal(2)})
    return rows


def _materialize(rows: list[dict], width: int) -> LocalMatrix:
    data = [[row.get(c, ZERO) for c in range(width)] for row in rows]
    return LocalMatrix(data, width)


def _stage_multiplier(spec: GradingSpec, k: int, weight: int) -> GradedSeries:
    if k == 0:
        return GradedSeries.unit(spec, TwoLocal(2), weight)
    if k < spec.n:
        return GradedSeries.gen(spec, f"vh{k}", trunc=weight)
    return GradedSeries.monomial(spec, vn=-spec.hat_offset, trunc=weight)


def landweber_window_check(n: int, q: int, k: int,
                           window: tuple[int, int], weight: int = 8,
                           caps: int = 6,
                           iota: UniSeries | None = None
                           ) -> FlatnessCertificate:
    """Zero-kernel check for the stage-k multiplication inside a window.

    For every hat-lattice degree D with the pair (D, D + |stage k|) in
    the window, multiplication by the stage-k generator on the presented
    quotient modulo the stage-k ideal must have zero kernel: the preimage
    of the target denominator lattice may not exceed the source one.
    """
    if not 0 <= k <= n:
        raise InputError("stage index out of range")
    lo, hi = window
    if lo > hi:
        raise InputError("empty degree window")
    # The presentation is expanded well past the reporting weight: lattice
    # rows built from weight-truncated relations would close rewriting
    # staircases and show torsion the completed quotient does not have.
    deep = 2 * weight
    if iota is None:
        iota = GroupLaw(n, precision=deep + 1).hat_iota()
    pres = present(n, q, deep, iota=iota)
    module = PresentedModule(pres.spec, weight, (),
                             flat_certificate="window check input",
                             caps=caps)
    spec = pres.spec
    lam1 = spec.lam - 1
    wk = 0 if k == 0 else (2 ** k - 1) * lam1
    if lam1 == 0:
        degrees = [0] if lo <= 0 <= hi else []
    else:
        start = -(-lo // lam1) * lam1
        degrees = [D for D in range(start, hi + 1, lam1) if D + wk <= hi]
    if not degrees:
        raise InputError("window too small for any multiplication pair")
    mult = _stage_multiplier(spec, k, deep)

    checked = []
    failures = []
    for D in degrees:
        tgt = D + wk
        src_basis = module.ambient_basis(D)
        src_cols = _Columns(src_basis)
        tgt_cols = _Columns(module.ambient_basis(tgt))
        img = [_series_cols(GradedSeries(spec, {mono: ONE}, deep) * mult,
                            tgt_cols) for mono in src_basis]
        den_rows = _lattice_rows(module, pres.relations, tgt, k, tgt_cols,
                                 deep)
        num_rows = _lattice_rows(module, pres.relations, D, k, src_cols,
                                 deep)
        A = _materialize(img, tgt_cols.width)
        den = _materialize(den_rows, tgt_cols.width)
        num = _materialize(num_rows, src_cols.width)
        pre = preimage_rows(A, den)
        decomp = snf_with_transforms(num) if num.nrows else None
        bad = False
        for row in pre.data:
            padded = list(row) + [ZERO] * (src_cols.width - len(row))
            if num.nrows == 0:
                bad = bad or any(v.num for v in padded)
            elif solve_left(num, padded, decomp) is None:
                bad = True
        if bad:
            failures.append(D)
        else:
            checked.append((D, tgt))
    return FlatnessCertificate(n, q, k, (lo, hi), weight, caps,
                               not failures, tuple(checked), tuple(failures))
