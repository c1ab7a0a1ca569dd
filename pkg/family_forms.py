# --- family_forms.py ---
"""
Postacie normalne rodzin indeksowanych przez n i rozstrzyganie F(n) >= 0 dla wszystkich n.

Rodzina ciągów (SeqFamilyForm), dla n poza jawnym prefiksem:

    F(n)(j) = H(j) + sum_w P_w(j)·[j <= a_w·n + b_w] + sum_r s_r(n)·y_r(j)

czyli "głowa" H, okna (a >= 1, b, P) obcinane przez afiniczny próg oraz wyrazy
rzędu jeden o współczynnikach s_r będących elementami w zmiennej n.

Rodzina funkcji PL (PLFamilyForm): F(n) = alpha·phi_n + beta·rho_n + G.
Suma prosta C[0,1] ⊕ L1 to para takich postaci.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import pl_functions as plf
from errors import NoClosedForm, NoStabilization, NotInC, Unsupported
from lattice_core import (ALL, ZERO, ResidueMask, SeqElement, SpaceTag, class_limits, constant, first_negative_index,
                          monotone_direction, seq_abs, seq_add, seq_combine, seq_compose_affine, seq_element,
                          seq_inf_from, seq_limit, seq_multiply, seq_negative_part, seq_positive_part, seq_reindex,
                          seq_scale, seq_shift, seq_sub, seq_sup_norm, seq_truncate, to_rat, zero)
from pl_functions import HALF, DirectSumElement, PLFunction
from utils import format_rational

logger = logging.getLogger(__name__)

# Ile indeksów n przeglądamy, szukając konkretnego kontrprzykładu dla danej współrzędnej.
COUNTEREXAMPLE_SCAN = 512


class Window(NamedTuple):
    slope: int
    offset: int
    pattern: SeqElement

    @property
    def key(self) -> Tuple[int, int]:
        return self.slope, self.offset

    def threshold(self, n: int) -> int:
        return self.slope * n + self.offset


class RankTerm(NamedTuple):
    coeffs: SeqElement
    vector: SeqElement


class NonnegResult(NamedTuple):
    status: str  # proved | failed | unknown
    n: Optional[int] = None
    coordinate: Optional[object] = None

    @property
    def proved(self) -> bool:
        return self.status == "proved"


PROVED = NonnegResult("proved")


@dataclass(frozen=True)
class SeqFamilyForm:
    head: SeqElement
    windows: Tuple[Window, ...] = ()
    ranks: Tuple[RankTerm, ...] = ()
    prefix: Tuple[SeqElement, ...] = ()
    space: SpaceTag = SpaceTag.LINF


@dataclass(frozen=True)
class PLFamilyForm:
    alpha: Fraction
    beta: Fraction
    base: PLFunction
    space: SpaceTag = SpaceTag.L1


@dataclass(frozen=True)
class DirectSumFamilyForm:
    cform: PLFamilyForm
    lform: PLFamilyForm
    space: SpaceTag = field(default=SpaceTag.CL1)


FamilyForm = Union[SeqFamilyForm, PLFamilyForm, DirectSumFamilyForm]


# --- Konstruktory ---

def seq_form(head: Optional[SeqElement] = None, windows=(), ranks=(), prefix=(),
             space: SpaceTag = SpaceTag.LINF) -> SeqFamilyForm:
    """Postać kanoniczna: okna o tym samym progu scalone, zerowe wyrazy usunięte."""
    merged: Dict[Tuple[int, int], SeqElement] = {}
    for w in windows:
        if w.slope < 1:
            raise Unsupported(f"Nachylenie okna musi być >= 1 (otrzymano {w.slope})")
        merged[w.key] = seq_add(merged.get(w.key, zero()), w.pattern)
    wins = tuple(Window(a, b, p) for (a, b), p in sorted(merged.items()) if not p.is_zero())
    by_vector: Dict[SeqElement, SeqElement] = {}
    for r in ranks:
        if r.vector.is_zero():
            continue
        scale, unit = normalized_vector(r.vector)
        by_vector[unit] = seq_add(by_vector.get(unit, zero()), seq_scale(scale, r.coeffs))
    rks = tuple(RankTerm(c, y) for y, c in by_vector.items() if not c.is_zero())
    return SeqFamilyForm(head if head is not None else zero(), wins, rks, tuple(prefix), space)


def normalized_vector(y: SeqElement) -> Tuple[Fraction, SeqElement]:
    """(s, u) z y = s·u, s > 0 i |u| = 1 w pierwszej niezerowej współrzędnej."""
    j = first_negative_index(seq_scale(-1, seq_abs(y)))
    if j is None:
        return Fraction(1), y
    scale = abs(y.value(j))
    return scale, seq_scale(1 / scale, y)


def pl_form(alpha=0, beta=0, base: Optional[PLFunction] = None, space: SpaceTag = SpaceTag.L1) -> PLFamilyForm:
    return PLFamilyForm(to_rat(alpha), to_rat(beta), base if base is not None else plf.pl_constant(0), space)


def form_constant(element, space: SpaceTag) -> FamilyForm:
    if isinstance(element, SeqElement):
        return seq_form(head=element, space=space)
    if isinstance(element, PLFunction):
        return pl_form(base=element, space=space)
    return DirectSumFamilyForm(pl_form(base=element.cpart, space=SpaceTag.C01),
                               pl_form(base=element.lpart, space=SpaceTag.L1))


# --- Ewaluacja ---

def _tail_eval(form: SeqFamilyForm, n: int) -> SeqElement:
    out = form.head
    for w in form.windows:
        out = seq_add(out, seq_truncate(w.pattern, w.threshold(n)))
    for r in form.ranks:
        out = seq_add(out, seq_scale(r.coeffs.value(n), r.vector))
    return out


def _tail_value(form: SeqFamilyForm, n: int, j: int) -> Fraction:
    total = form.head.value(j)
    for w in form.windows:
        if j <= w.threshold(n):
            total += w.pattern.value(j)
    for r in form.ranks:
        total += r.coeffs.value(n) * r.vector.value(j)
    return total


def form_eval(form: FamilyForm, n: int):
    if n < 1:
        raise Unsupported(f"Indeks rodziny musi być >= 1 (otrzymano {n})")
    if isinstance(form, SeqFamilyForm):
        if n <= len(form.prefix):
            return form.prefix[n - 1]
        return _tail_eval(form, n)
    if isinstance(form, PLFamilyForm):
        out = form.base
        if form.alpha:
            out = plf.pl_combine(out, plf.pl_scale(form.alpha, plf.phi(n)), "add")
        if form.beta:
            out = plf.pl_combine(out, plf.pl_scale(form.beta, plf.rho(n)), "add")
        return out
    return DirectSumElement(form_eval(form.cform, n), form_eval(form.lform, n))


def form_value_at(form: SeqFamilyForm, n: int, j: int) -> Fraction:
    if n <= len(form.prefix):
        return form.prefix[n - 1].value(j)
    return _tail_value(form, n, j)


# --- Algebra postaci ---

def _check_same(f: FamilyForm, g: FamilyForm) -> None:
    if type(f) is not type(g):
        raise Unsupported(f"Niezgodne rodzaje rodzin: {type(f).__name__} vs {type(g).__name__}")


def form_add(f: FamilyForm, g: FamilyForm) -> FamilyForm:
    _check_same(f, g)
    if isinstance(f, SeqFamilyForm):
        length = max(len(f.prefix), len(g.prefix))
        prefix = [seq_add(form_eval(f, n), form_eval(g, n)) for n in range(1, length + 1)]
        return seq_form(seq_add(f.head, g.head), f.windows + g.windows, f.ranks + g.ranks, prefix, f.space)
    if isinstance(f, PLFamilyForm):
        return PLFamilyForm(f.alpha + g.alpha, f.beta + g.beta, plf.pl_combine(f.base, g.base, "add"), f.space)
    return DirectSumFamilyForm(form_add(f.cform, g.cform), form_add(f.lform, g.lform))


def form_scale(alpha, f: FamilyForm) -> FamilyForm:
    a = to_rat(alpha)
    if isinstance(f, SeqFamilyForm):
        return seq_form(seq_scale(a, f.head), [Window(w.slope, w.offset, seq_scale(a, w.pattern)) for w in f.windows],
                        [RankTerm(seq_scale(a, r.coeffs), r.vector) for r in f.ranks],
                        [seq_scale(a, p) for p in f.prefix], f.space)
    if isinstance(f, PLFamilyForm):
        return PLFamilyForm(a * f.alpha, a * f.beta, plf.pl_scale(a, f.base), f.space)
    return DirectSumFamilyForm(form_scale(a, f.cform), form_scale(a, f.lform))


def form_sub(f: FamilyForm, g: FamilyForm) -> FamilyForm:
    return form_add(f, form_scale(-1, g))


def form_shift(f: FamilyForm, k: int) -> FamilyForm:
    """n -> F(n + k)."""
    if k == 0:
        return f
    if isinstance(f, SeqFamilyForm):
        prefix = [form_eval(f, n + k) for n in range(1, len(f.prefix) - k + 1)]
        return seq_form(f.head, [Window(w.slope, w.offset + w.slope * k, w.pattern) for w in f.windows],
                        [RankTerm(seq_shift(r.coeffs, k), r.vector) for r in f.ranks], prefix, f.space)
    if isinstance(f, PLFamilyForm) and f.alpha == 0 and f.beta == 0:
        return f
    raise Unsupported("Przesunięcie rodziny phi_n/rho_n nie ma postaci w gramatyce")


def map_elements(f: SeqFamilyForm, op) -> SeqFamilyForm:
    """Obraz rodziny przez odwzorowanie liniowe działające na elementach."""
    return seq_form(op(f.head), [Window(w.slope, w.offset, op(w.pattern)) for w in f.windows],
                    [RankTerm(r.coeffs, op(r.vector)) for r in f.ranks], [op(p) for p in f.prefix], f.space)


# --- Regiony progów ---

def order_stabilization(windows) -> int:
    """Najmniejsze N, od którego progi a·n + b są uporządkowane jak klucze (a, b)."""
    stab = 1
    ordered = sorted(windows, key=lambda w: w.key)
    for lo, hi in zip(ordered, ordered[1:]):
        if hi.slope > lo.slope:
            stab = max(stab, -((hi.offset - lo.offset) // (hi.slope - lo.slope)))
    return stab


class Region(NamedTuple):
    active: Tuple[int, ...]
    lower: Optional[Tuple[int, int]]
    upper: Optional[Tuple[int, int]]
    domain: Tuple[Tuple[ResidueMask, int], ...]
    explicit: Tuple[int, ...] = ()


def _regions(windows: Tuple[Window, ...], stab: int) -> List[Region]:
    k = len(windows)
    if k == 0:
        return [Region((), None, None, ((ALL, 1),))]
    out = [Region(tuple(range(k)), None, windows[0].key, ((ALL, 1),))]
    for i in range(1, k):
        (a_lo, b_lo), (a_up, b_up) = windows[i - 1].key, windows[i].key
        active = tuple(range(i, k))
        if a_lo < a_up:
            meet = max(stab, -((b_up - a_lo - b_lo) // (a_up - a_lo)))
            explicit = tuple(j for n in range(stab, meet)
                             for j in range(max(1, a_lo * n + b_lo + 1), a_up * n + b_up + 1))
            domain = ((ALL, max(1, a_lo * meet + b_lo + 1)),)
            out.append(Region(active, (a_lo, b_lo), (a_up, b_up), domain, explicit))
        else:
            gap = b_up - b_lo
            j_lo = max(1, a_lo * stab + b_lo + 1)
            if gap >= a_lo:
                domain = ((ALL, j_lo),)
            else:
                domain = tuple((ResidueMask(a_lo, (b_lo + t) % a_lo), j_lo) for t in range(1, gap + 1))
            out.append(Region(active, (a_lo, b_lo), (a_up, b_up), domain))
    a, b = windows[-1].key
    out.append(Region((), (a, b), None, ((ALL, max(1, a * stab + b + 1)),)))
    return out


def _region_head(form: SeqFamilyForm, region: Region) -> SeqElement:
    out = form.head
    for idx in region.active:
        out = seq_add(out, form.windows[idx].pattern)
    return out


def _n_range(region: Region, stab: int, j: int) -> Tuple[int, Optional[int]]:
    lo, hi = stab, None
    if region.upper is not None:
        a, b = region.upper
        lo = max(lo, -((b - j) // a))
    if region.lower is not None:
        a, b = region.lower
        hi = (j - b - 1) // a
    return lo, hi


def _coefficient_floor(t: SeqElement, region: Region, stab: int) -> SeqElement:
    """Dolne ograniczenie t(n) po n dopuszczalnych dla współrzędnej j, jako element w j."""
    try:
        direction = monotone_direction(t, stab)
        if direction == "const":
            return constant(t.value(stab))
        if direction == "dec":
            if region.lower is None:
                return constant(seq_limit(t))
            a, b = region.lower
            return seq_reindex(t, a, -b - 1, clamp_from=stab)
        if direction == "inc":
            if region.upper is None:
                return constant(t.value(stab))
            a, b = region.upper
            return seq_reindex(t, a, a - 1 - b, clamp_from=stab)
    except (Unsupported, NotInC) as e:
        logger.debug(f"Ograniczenie współczynnika przez inf (powód: {e})")
    return constant(seq_inf_from(t, stab))


def _positive_basis(ranks: Tuple[RankTerm, ...]) -> Dict[SeqElement, SeqElement]:
    basis: Dict[SeqElement, SeqElement] = {}
    for r in ranks:
        for vec, sign in ((seq_positive_part(r.vector), 1), (seq_negative_part(r.vector), -1)):
            if vec.is_zero():
                continue
            scale, unit = normalized_vector(vec)
            basis[unit] = seq_add(basis.get(unit, zero()), seq_scale(sign * scale, r.coeffs))
    return basis


def _first_negative_on(x: SeqElement, region: Region) -> Optional[int]:
    best = None
    for mask, j_lo in region.domain:
        j = first_negative_index(x, mask, j_lo)
        if j is not None and (best is None or j < best):
            best = j
    for j in region.explicit:
        if x.value(j) < 0 and (best is None or j < best):
            best = j
    return best


def _seq_nonneg(form: SeqFamilyForm, n_from: int) -> NonnegResult:
    stab = max(n_from, len(form.prefix) + 1, order_stabilization(form.windows))
    for n in range(n_from, stab):
        j = first_negative_index(form_eval(form, n))
        if j is not None:
            return NonnegResult("failed", n, j)
    basis = _positive_basis(form.ranks)
    outcome = PROVED
    for region in _regions(form.windows, stab):
        floor = _region_head(form, region)
        for vec, coeffs in basis.items():
            floor = seq_add(floor, seq_multiply(_coefficient_floor(coeffs, region, stab), vec))
        j = _first_negative_on(floor, region)
        if j is None:
            continue
        lo, hi = _n_range(region, stab, j)
        top = lo + COUNTEREXAMPLE_SCAN if hi is None else min(hi, lo + COUNTEREXAMPLE_SCAN)
        for n in range(lo, top + 1):
            if _tail_value(form, n, j) < 0:
                return NonnegResult("failed", n, j)
        logger.debug(f"Dolne ograniczenie ujemne we współrzędnej {j}, brak konkretnego n w [{lo}, {top}]")
        outcome = NonnegResult("unknown", None, j)
    return outcome


# --- Rodziny PL ---

def _phi_gap_point(n: int) -> Fraction:
    """Punkt, w którym phi_n < phi_{n+1}."""
    return HALF - Fraction(3, 2 ** (n + 2))


def _phi_saturation(x: Fraction) -> int:
    """Najmniejsze n z phi_n(x) = 1 (dla x < 1/2)."""
    n = 1
    while Fraction(1, 2 ** n) > HALF - x:
        n += 1
    return n


def _pl_nonneg(form: PLFamilyForm, n_from: int, mode: str) -> NonnegResult:
    n_from = max(1, n_from)
    at_start = form_eval(form, n_from)
    if form.alpha >= 0:
        x = plf.pl_negative_point(at_start, mode, 0, HALF)
        if x is not None:
            return NonnegResult("failed", n_from, x)
    else:
        limit_left = plf.pl_combine(form.base, plf.pl_scale(form.alpha, plf.phi_limit()), "add")
        x = plf.pl_negative_point(limit_left, mode, 0, HALF)
        if x is not None:
            n = n_from if x >= HALF else max(n_from, _phi_saturation(x))
            return NonnegResult("failed", n, x)
    if form.beta >= 0:
        x = plf.pl_negative_point(form.base, mode, HALF, 1, include_lo=False)
        if x is not None:
            n = n_from
            while plf.rho(n)(x) != 0:
                n += 1
            return NonnegResult("failed", n, x)
    else:
        x = plf.pl_negative_point(at_start, mode, HALF, 1, include_lo=False)
        if x is not None:
            return NonnegResult("failed", n_from, x)
    return PROVED


def _pl_mode(form: PLFamilyForm) -> str:
    return "everywhere" if form.space == SpaceTag.C01 else "ae"


def form_nonneg(form: FamilyForm, n_from: int = 1) -> NonnegResult:
    """Rozstrzyga F(n) >= 0 dla wszystkich n >= n_from: proved / failed(n, współrzędna) / unknown."""
    if isinstance(form, SeqFamilyForm):
        result = _seq_nonneg(form, n_from)
    elif isinstance(form, PLFamilyForm):
        result = _pl_nonneg(form, n_from, _pl_mode(form))
    else:
        result = _pl_nonneg(form.cform, n_from, "everywhere")
        if result.proved:
            result = _pl_nonneg(form.lform, n_from, "ae")
            if not result.proved:
                result = NonnegResult(result.status, result.n, ("L1", result.coordinate))
        elif result.status == "failed":
            result = NonnegResult(result.status, result.n, ("C", result.coordinate))
    logger.debug(f"form_nonneg(n >= {n_from}): {result.status}")
    return result


def form_decreasing(form: FamilyForm, n_from: int = 1) -> NonnegResult:
    """F(n) - F(n+1) >= 0 dla n >= n_from; dla PL: alpha <= 0 i beta >= 0."""
    if isinstance(form, SeqFamilyForm):
        return form_nonneg(form_sub(form, form_shift(form, 1)), n_from)
    if isinstance(form, PLFamilyForm):
        n = max(1, n_from)
        if form.alpha > 0:
            return NonnegResult("failed", n, _phi_gap_point(n))
        if form.beta < 0:
            return NonnegResult("failed", n, HALF + Fraction(1, 2 ** (n + 1)))
        return PROVED
    result = form_decreasing(form.cform, n_from)
    if not result.proved:
        return NonnegResult(result.status, result.n, ("C", result.coordinate))
    result = form_decreasing(form.lform, n_from)
    if not result.proved:
        return NonnegResult(result.status, result.n, ("L1", result.coordinate))
    return PROVED


# --- Granice i współrzędne ---

def form_pointwise_limit(form: FamilyForm):
    """Granica punktowa (dla PL: granica w każdym punkcie, więc także a.e.)."""
    if isinstance(form, SeqFamilyForm):
        out = form.head
        for w in form.windows:
            out = seq_add(out, w.pattern)
        for r in form.ranks:
            try:
                out = seq_add(out, seq_scale(seq_limit(r.coeffs), r.vector))
            except NotInC as e:
                raise NoStabilization(f"Współczynnik {r.coeffs} nie ma granicy: {e}") from e
        return out
    if isinstance(form, PLFamilyForm):
        return plf.pl_combine(form.base, plf.pl_scale(form.alpha, plf.phi_limit()), "add")
    return DirectSumElement(form_pointwise_limit(form.cform), form_pointwise_limit(form.lform))


def _pl_point_sequence(form: PLFamilyForm, x: Fraction) -> SeqElement:
    x = Fraction(x)
    overrides: Dict[int, Fraction] = {}
    limit = form.base(x)
    if x < HALF:
        limit += form.alpha
        sat = _phi_saturation(x)
        for n in range(1, sat):
            overrides[n] = overrides.get(n, form.base(x)) + form.alpha * (2 ** n) * (HALF - x)
        head = sat
    elif x > HALF:
        head = 1
        while Fraction(2 ** head) * (x - HALF) < 1:
            head += 1
        for n in range(1, head):
            overrides[n] = form.base(x) + form.beta * (1 - Fraction(2 ** n) * (x - HALF))
    else:
        head = 1
    return seq_element(overrides, constant(limit).tail, head)


def form_coordinate(form: FamilyForm, coordinate) -> SeqElement:
    """n -> F(n)(coordinate) jako element w zmiennej n."""
    if isinstance(form, PLFamilyForm):
        return _pl_point_sequence(form, coordinate)
    if isinstance(form, DirectSumFamilyForm):
        part, point = coordinate
        return _pl_point_sequence(form.cform if part == "C" else form.lform, point)
    j = int(coordinate)
    tail = constant(form.head.value(j))
    for w in form.windows:
        value = w.pattern.value(j)
        if value:
            first = max(1, -((w.offset - j) // w.slope))
            tail = seq_add(tail, seq_element({}, constant(value).tail, first))
    for r in form.ranks:
        tail = seq_add(tail, seq_scale(r.vector.value(j), r.coeffs))
    length = len(form.prefix)
    if not length:
        return tail
    start = max(length + 1, tail.start)
    overrides = {n: (form.prefix[n - 1].value(j) if n <= length else tail.value(n)) for n in range(1, start)}
    return seq_element(overrides, tail.tail, start)


# --- Kresy rodzin ---

def _lattice_seq(f: SeqFamilyForm, g: SeqFamilyForm, kind: str) -> SeqFamilyForm:
    if f.ranks or g.ranks:
        raise Unsupported("Kres rodzin z wyrazami rzędu jeden nie ma postaci w gramatyce")
    keys = sorted({w.key for w in f.windows} | {w.key for w in g.windows})
    marks = [Window(a, b, zero()) for a, b in keys]
    stab = max(len(f.prefix) + 1, len(g.prefix) + 1, order_stabilization(marks))
    regions = _regions(tuple(marks), stab)
    levels = []
    for region in regions:
        bound = {marks[i].key for i in region.active}
        gf = seq_add(f.head, _sum_patterns(f, bound))
        gg = seq_add(g.head, _sum_patterns(g, bound))
        levels.append(seq_combine(gf, gg, kind))
    windows = [Window(a, b, seq_sub(levels[i], levels[i + 1])) for i, (a, b) in enumerate(keys)]
    prefix = [seq_combine(form_eval(f, n), form_eval(g, n), kind) for n in range(1, stab)]
    return seq_form(levels[-1], windows, (), prefix, f.space)


def _sum_patterns(form: SeqFamilyForm, keys) -> SeqElement:
    out = zero()
    for w in form.windows:
        if w.key in keys:
            out = seq_add(out, w.pattern)
    return out


def form_lattice(f: FamilyForm, g: FamilyForm, kind: str) -> FamilyForm:
    _check_same(f, g)
    if isinstance(f, SeqFamilyForm):
        return _lattice_seq(f, g, kind)
    if f == g:
        return f
    raise Unsupported("Kres rodzin PL o różnych parametrach nie ma postaci w gramatyce")


def form_abs(f: FamilyForm) -> FamilyForm:
    if isinstance(f, SeqFamilyForm) and f.ranks:
        if f.windows or not f.head.is_zero() or len(f.ranks) > 1:
            raise Unsupported("Moduł rodziny z wyrazami rzędu jeden obsługiwany tylko dla s(n)·y")
        (r,) = f.ranks
        prefix = [seq_abs(p) for p in f.prefix]
        return seq_form(ranks=[RankTerm(seq_abs(r.coeffs), seq_abs(r.vector))], prefix=prefix, space=f.space)
    if isinstance(f, PLFamilyForm) and f.alpha == 0 and f.beta == 0:
        return PLFamilyForm(ZERO, ZERO, plf.pl_abs(f.base), f.space)
    return form_lattice(f, form_scale(-1, f), "sup")


# --- Obwiednie ---

def _inf_on_class(x: SeqElement, mask: ResidueMask, j_lo: int) -> Fraction:
    m, r = mask
    offset = r - m if r >= 1 else r
    sub = seq_compose_affine(x, m, offset)
    t_lo = max(1, -((offset - j_lo) // m))
    return seq_inf_from(sub, t_lo)


def envelope_lower_bound(form: SeqFamilyForm) -> Tuple[Fraction, int]:
    """(c, N): ||F(n)||_sup >= c dla każdego n >= N; c > 0 wyklucza świadka p_n -> 0."""
    if not isinstance(form, SeqFamilyForm):
        raise NoClosedForm("Obwiednia dostępna tylko dla rodzin ciągów")
    stab = max(len(form.prefix) + 1, order_stabilization(form.windows))
    regions = _regions(form.windows, stab)
    last = _region_head(form, regions[-1])
    for r in form.ranks:
        if any(lim != 0 for _, lim in class_limits(r.vector)):
            raise NoClosedForm("Wyraz rzędu jeden o niezerowej granicy w j")
    best = max(abs(lim) for _, lim in class_limits(last))
    valid_from = stab
    if not form.ranks:
        for region in regions[:-1]:
            level = seq_abs(_region_head(form, region))
            if region.lower is None:
                a, b = region.upper
                top = a * stab + b
                if top >= 1:
                    best = max(best, max(level.value(j) for j in range(1, top + 1)))
                continue
            bound = min(_inf_on_class(level, mask, j_lo) for mask, j_lo in region.domain)
            if bound > best:
                (a_lo, b_lo), (a_up, b_up) = region.lower, region.upper
                # region niepusty: c_up(n) >= max(1, c_lo(n) + 1)
                nonempty = -((b_up - 1) // a_up)
                if a_lo < a_up:
                    # od tego n każda współrzędna regionu leży w domain
                    nonempty = max(nonempty, -((b_up - a_lo - b_lo) // (a_up - a_lo)))
                valid_from = max(valid_from, nonempty)
                best = bound
    return best, valid_from


def form_sup_norm_at(form: FamilyForm, n: int) -> Fraction:
    value = form_eval(form, n)
    if isinstance(value, SeqElement):
        return seq_sup_norm(value)
    raise NoClosedForm("Norma obwiedni dostępna tylko dla rodzin ciągów")


def describe_form(form: FamilyForm) -> str:
    if isinstance(form, SeqFamilyForm):
        parts = [f"H={form.head}"]
        parts += [f"[j<={w.slope}n{w.offset:+d}]·({w.pattern})" for w in form.windows]
        parts += [f"({r.coeffs})·({r.vector})" for r in form.ranks]
        return " + ".join(parts)
    if isinstance(form, PLFamilyForm):
        return f"{format_rational(form.alpha)}·phi_n + {format_rational(form.beta)}·rho_n + {form.base}"
    return f"({describe_form(form.cform)}, {describe_form(form.lform)})"
