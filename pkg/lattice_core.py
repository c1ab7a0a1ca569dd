# --- lattice_core.py ---
"""
Dokładne elementy krat ciągów (c00, c0, c, l-nieskończoność oraz R jako ciągi
o nośniku {1}) i rozstrzygalne operacje porządkowe na nich.

Element = skończona lista nadpisań (indeksy < start) + ogon złożony z wyrazów
geometrycznych na klasach reszt. Postać kanoniczna czyni równość składniową
równoważną równości wartości. Indeksy są 1-bazowe.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import integer_nthroot

from errors import DomainMismatch, IllFormedGrammar, NotInC, Unsupported, ZeroCoefficient
from utils import format_rational
from verdicts import MembershipRefutation, Refuted, Verdict, Verified
import pl_functions as plf
from pl_functions import DirectSumElement, PLFunction

logger = logging.getLogger(__name__)

Rat = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)

RatLike = Union[int, str, Fraction]


def to_rat(value: RatLike) -> Fraction:
    """Zamienia int / "p/q" / Fraction na Fraction. Liczby zmiennoprzecinkowe są odrzucane."""
    if isinstance(value, bool):
        raise IllFormedGrammar(f"Wartość logiczna zamiast liczby wymiernej: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise IllFormedGrammar(f"Zapis dziesiętny nie jest dozwolony: '{value}' (użyj 'p/q')")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise IllFormedGrammar(f"Niepoprawna liczba wymierna '{value}': {e}") from e
    raise IllFormedGrammar(f"Niedozwolony typ liczby: {type(value).__name__} ({value!r})")


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def exact_root(q: Fraction, k: int) -> Optional[Fraction]:
    """Dokładny pierwiastek k-tego stopnia z q >= 0 albo None."""
    if k == 1:
        return q
    if q < 0:
        return None
    num, exact_num = integer_nthroot(q.numerator, k)
    den, exact_den = integer_nthroot(q.denominator, k)
    if exact_num and exact_den:
        return Fraction(int(num), int(den))
    return None


# --- Maski i wyrazy ogona ---

class ResidueMask(NamedTuple):
    modulus: int
    residue: int

    def matches(self, n: int) -> bool:
        return n % self.modulus == self.residue

    def first_at_least(self, n: int) -> int:
        return n + ((self.residue - n) % self.modulus)

    def __str__(self) -> str:
        if self.modulus == 1:
            return "all"
        return f"{self.residue} mod {self.modulus}"


ALL = ResidueMask(1, 0)
ODD = ResidueMask(2, 1)
EVEN = ResidueMask(2, 0)


def make_mask(modulus: int, residue: int) -> ResidueMask:
    if not isinstance(modulus, int) or modulus < 1:
        raise IllFormedGrammar(f"Moduł maski musi być dodatnią liczbą całkowitą (otrzymano {modulus!r})")
    if not isinstance(residue, int) or not 0 <= residue < modulus:
        raise IllFormedGrammar(f"Reszta maski musi należeć do [0, {modulus}) (otrzymano {residue!r})")
    return ResidueMask(modulus, residue)


class TailTerm(NamedTuple):
    coeff: Fraction
    ratio: Fraction
    mask: ResidueMask

    def value(self, n: int) -> Fraction:
        if not self.mask.matches(n):
            return ZERO
        return self.coeff * self.ratio ** n


def make_term(coeff: RatLike, ratio: RatLike, mask: ResidueMask = ALL) -> TailTerm:
    c, r = to_rat(coeff), to_rat(ratio)
    if not ZERO <= r <= ONE:
        raise IllFormedGrammar(f"Iloraz wyrazu geometrycznego poza [0,1]: {format_rational(r)}")
    return TailTerm(c, r, make_mask(mask.modulus, mask.residue))


ClassMap = Dict[Fraction, Fraction]


def _lcm_of(moduli: Iterable[int]) -> int:
    result = 1
    for m in moduli:
        result = math.lcm(result, m)
    return result


def _refine(terms: Iterable[TailTerm], modulus: int) -> List[ClassMap]:
    """Rozkład ogona na klasy reszt modulo `modulus` (moduł musi dzielić się przez każdy moduł maski)."""
    maps: List[ClassMap] = [{} for _ in range(modulus)]
    for t in terms:
        m, s = t.mask
        if t.ratio == 0 or t.coeff == 0:
            continue
        for r in range(s, modulus, m):
            cmap = maps[r]
            cmap[t.ratio] = cmap.get(t.ratio, ZERO) + t.coeff
    for cmap in maps:
        for ratio in [q for q, c in cmap.items() if c == 0]:
            del cmap[ratio]
    return maps


def _period(maps: Sequence[ClassMap]) -> int:
    size = len(maps)
    for d in range(1, size + 1):
        if size % d:
            continue
        if all(maps[r] == maps[r % d] for r in range(d, size)):
            return d
    return size


def _terms_from_maps(maps: Sequence[ClassMap]) -> Tuple[TailTerm, ...]:
    d = _period(maps)
    terms: List[TailTerm] = []
    for r in range(d):
        for ratio in sorted(maps[r], reverse=True):
            terms.append(TailTerm(maps[r][ratio], ratio, ResidueMask(d, r)))
    return tuple(terms)


def _tail_value(terms: Iterable[TailTerm], n: int) -> Fraction:
    return sum((t.value(n) for t in terms), ZERO)


def _tail_modulus(terms: Iterable[TailTerm]) -> int:
    return _lcm_of(t.mask.modulus for t in terms)


# --- Element ciągu ---

@dataclass(frozen=True)
class SeqElement:
    """Element kraty ciągów w postaci kanonicznej (tworzyć przez seq_element/konstruktory)."""
    overrides: Tuple[Tuple[int, Fraction], ...] = ()
    tail: Tuple[TailTerm, ...] = ()
    start: int = 1

    @cached_property
    def _override_map(self) -> Dict[int, Fraction]:
        return dict(self.overrides)

    def value(self, n: int) -> Fraction:
        if n < 1:
            raise IllFormedGrammar(f"Indeksy są 1-bazowe (otrzymano {n})")
        if n < self.start:
            return self._override_map.get(n, ZERO)
        return _tail_value(self.tail, n)

    def values(self, upto: int) -> List[Fraction]:
        return [self.value(n) for n in range(1, upto + 1)]

    @property
    def period(self) -> int:
        return _tail_modulus(self.tail)

    def is_zero(self) -> bool:
        return not self.overrides and not self.tail

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "overrides": {str(i): format_rational(v) for i, v in self.overrides},
            "tail": [{"coeff": format_rational(t.coeff), "ratio": format_rational(t.ratio),
                      "mask": [t.mask.modulus, t.mask.residue]} for t in self.tail],
            "start": self.start,
        }

    def __str__(self) -> str:
        parts = [f"{format_rational(v)}·e{i}" for i, v in self.overrides]
        for t in self.tail:
            ratio = "" if t.ratio == 1 else f"·({format_rational(t.ratio)})^n"
            mask = "" if t.mask == ALL else f"[{t.mask}]"
            parts.append(f"{format_rational(t.coeff)}{ratio}{mask}(n>={self.start})")
        return " + ".join(parts) if parts else "0"


def seq_element(overrides: Optional[Mapping[int, RatLike]] = None, tail: Iterable[TailTerm] = (),
                start: Optional[int] = None) -> SeqElement:
    """Buduje element w postaci kanonicznej; bez `start` ogon działa od indeksu po ostatnim nadpisaniu."""
    ov = {int(i): to_rat(v) for i, v in (overrides or {}).items()}
    if any(i < 1 for i in ov):
        raise IllFormedGrammar(f"Indeksy nadpisań muszą być >= 1: {sorted(ov)}")
    if start is None:
        start = max(ov, default=0) + 1
    if start < 1:
        raise IllFormedGrammar(f"Indeks startu ogona musi być >= 1 (otrzymano {start})")
    if any(i >= start for i in ov):
        raise IllFormedGrammar(f"Nadpisania muszą leżeć przed startem ogona ({start}): {sorted(ov)}")
    terms = list(tail)
    for t in terms:
        if not ZERO <= t.ratio <= ONE:
            raise IllFormedGrammar(f"Iloraz wyrazu geometrycznego poza [0,1]: {format_rational(t.ratio)}")
    modulus = _tail_modulus(terms)
    canonical = _terms_from_maps(_refine(terms, modulus))
    ov = {i: v for i, v in ov.items() if v != 0}
    while start > 1:
        idx = start - 1
        if ov.get(idx, ZERO) != _tail_value(canonical, idx):
            break
        ov.pop(idx, None)
        start -= 1
    return SeqElement(tuple(sorted(ov.items())), canonical, start)


def zero() -> SeqElement:
    return SeqElement()


def unit_vector(k: int, coeff: RatLike = 1) -> SeqElement:
    return seq_element({k: coeff})


def constant(c: RatLike, mask: ResidueMask = ALL) -> SeqElement:
    return seq_element(tail=[make_term(c, 1, mask)], start=1)


def geometric(coeff: RatLike, ratio: RatLike, mask: ResidueMask = ALL) -> SeqElement:
    return seq_element(tail=[make_term(coeff, ratio, mask)], start=1)


def real(value: RatLike) -> SeqElement:
    """Skalar z R jako element o nośniku {1}."""
    return unit_vector(1, value)


def from_values(values: Mapping[int, RatLike]) -> SeqElement:
    return seq_element(values)


# --- Porównanie ostateczne ---

def _leading_sign(cmap: ClassMap) -> Tuple[int, int]:
    """Znak wyrażenia sum c*r^n dla dużych n i indeks, od którego ten znak obowiązuje."""
    items = sorted(((r, c) for r, c in cmap.items() if c != 0 and r != 0), reverse=True)
    if not items:
        return 0, 0
    r1, c1 = items[0]
    rest = items[1:]
    if not rest:
        return _sign(c1), 1
    bound = abs(c1)

    def dominated(n: int) -> bool:
        return sum((abs(c) * (r / r1) ** n for r, c in rest), ZERO) < bound

    hi = 1
    while not dominated(hi):
        hi *= 2
    lo = hi // 2 + 1 if hi > 1 else 1
    while lo < hi:
        mid = (lo + hi) // 2
        if dominated(mid):
            hi = mid
        else:
            lo = mid + 1
    return _sign(c1), hi


def eventual_signs(terms: Iterable[TailTerm], mask: ResidueMask = ALL) -> List[Tuple[ResidueMask, int, int]]:
    """Znak i indeks stabilizacji w każdej podklasie maski (podział wg NWW modułów)."""
    terms = list(terms)
    modulus = _lcm_of([mask.modulus] + [t.mask.modulus for t in terms])
    maps = _refine(terms, modulus)
    out = []
    for r in range(mask.residue, modulus, mask.modulus):
        sign, n0 = _leading_sign(maps[r])
        out.append((ResidueMask(modulus, r), sign, n0))
    return out


def eventual_compare(terms_a: Iterable[TailTerm], terms_b: Iterable[TailTerm],
                     mask: ResidueMask = ALL) -> Tuple[Optional[int], int]:
    """(znak, N0): sign(A(n) - B(n)) = znak dla każdego n >= N0 pasującego do maski.

    Znak None: ciągi nieporównywalne na masce (różne znaki w podklasach, patrz
    eventual_signs); od N0 znak w każdej podklasie jest już ustalony.
    """
    diff = list(terms_a) + [TailTerm(-t.coeff, t.ratio, t.mask) for t in terms_b]
    per_class = eventual_signs(diff, mask)
    signs = {s for _, s, _ in per_class}
    if signs == {0}:
        return 0, 0
    n0 = max(n for _, _, n in per_class)
    if len(signs) > 1:
        detail = ", ".join(f"[{m}] -> {s}" for m, s, _ in per_class)
        logger.debug(f"Znak różnicy zależy od podklasy maski {mask}: {detail}")
        return None, n0
    return signs.pop(), n0


def first_negative_index(x: SeqElement, mask: ResidueMask = ALL, n_from: int = 1) -> Optional[int]:
    """Najmniejsze n >= n_from na masce z x(n) < 0, albo None."""
    n_from = max(1, n_from)
    for n in range(n_from, x.start):
        if mask.matches(n) and x.value(n) < 0:
            return n
    base = max(n_from, x.start)
    best: Optional[int] = None
    for cls, sign, n0 in eventual_signs(x.tail, mask):
        limit = max(base, n0)
        found = None
        n = cls.first_at_least(base)
        while n < limit and (best is None or n < best):
            if _tail_value(x.tail, n) < 0:
                found = n
                break
            n += cls.modulus
        if found is None and sign < 0:
            found = cls.first_at_least(limit)
        if found is not None and (best is None or found < best):
            best = found
    return best


# --- Operacje kratowe ---

def seq_scale(alpha: RatLike, x: SeqElement) -> SeqElement:
    a = to_rat(alpha)
    if a == 0:
        return zero()
    return seq_element({i: a * v for i, v in x.overrides},
                       [TailTerm(a * t.coeff, t.ratio, t.mask) for t in x.tail], x.start)


def seq_add(x: SeqElement, y: SeqElement) -> SeqElement:
    start = max(x.start, y.start)
    ov = {n: x.value(n) + y.value(n) for n in range(1, start)}
    return seq_element(ov, list(x.tail) + list(y.tail), start)


def seq_sub(x: SeqElement, y: SeqElement) -> SeqElement:
    return seq_add(x, seq_scale(-1, y))


def seq_combine(x: SeqElement, y: SeqElement, kind: str) -> SeqElement:
    """Dodawanie lub kres górny/dolny punktowo; dla sup/inf materializuje prefiks do stabilizacji."""
    if kind == "add":
        return seq_add(x, y)
    if kind not in ("sup", "inf"):
        raise Unsupported(f"Nieznany rodzaj operacji kratowej: '{kind}'")
    pick = max if kind == "sup" else min
    start = max(x.start, y.start)
    diff = list(x.tail) + [TailTerm(-t.coeff, t.ratio, t.mask) for t in y.tail]
    per_class = eventual_signs(diff, ALL)
    modulus = per_class[0][0].modulus if per_class else 1
    maps_x = _refine(x.tail, modulus)
    maps_y = _refine(y.tail, modulus)
    stab = max([start] + [n0 for _, _, n0 in per_class])
    chosen: List[ClassMap] = []
    for cls, sign, _ in per_class:
        take_x = sign >= 0 if kind == "sup" else sign <= 0
        chosen.append(maps_x[cls.residue] if take_x else maps_y[cls.residue])
    terms = [TailTerm(c, r, ResidueMask(modulus, res)) for res, cmap in enumerate(chosen) for r, c in cmap.items()]
    ov = {n: pick(x.value(n), y.value(n)) for n in range(1, stab)}
    return seq_element(ov, terms, stab)


def seq_sup(x: SeqElement, y: SeqElement) -> SeqElement:
    return seq_combine(x, y, "sup")


def seq_inf(x: SeqElement, y: SeqElement) -> SeqElement:
    return seq_combine(x, y, "inf")


def seq_abs(x: SeqElement) -> SeqElement:
    return seq_combine(x, seq_scale(-1, x), "sup")


def seq_positive_part(x: SeqElement) -> SeqElement:
    return seq_combine(x, zero(), "sup")


def seq_negative_part(x: SeqElement) -> SeqElement:
    return seq_combine(seq_scale(-1, x), zero(), "sup")


def seq_leq(x: SeqElement, y: SeqElement) -> bool:
    """x(n) <= y(n) dla każdego n."""
    return first_negative_index(seq_sub(y, x)) is None


def first_nonzero_index(x: SeqElement, n_from: int = 1) -> Optional[int]:
    return first_negative_index(seq_scale(-1, seq_abs(x)), n_from=n_from)


# --- Przynależność do przestrzeni ---

class SpaceTag(str, Enum):
    C00 = "C00"
    C0 = "C0"
    C = "C"
    LINF = "LINF"
    REAL = "REAL"
    C01 = "C01"
    L1 = "L1"
    CL1 = "CL1"

    def __str__(self) -> str:
        return self.value


SEQUENCE_SPACES = frozenset({SpaceTag.C00, SpaceTag.C0, SpaceTag.C, SpaceTag.LINF, SpaceTag.REAL})
PL_SPACES = frozenset({SpaceTag.C01, SpaceTag.L1, SpaceTag.CL1})


def parse_space(name: str) -> SpaceTag:
    from errors import UnknownSpace
    try:
        return SpaceTag(str(name).upper() if str(name).upper() != "C01" else "C01")
    except ValueError as e:
        raise UnknownSpace(f"Nieznana przestrzeń '{name}' (dozwolone: {', '.join(t.value for t in SpaceTag)})") from e


def class_limits(x: SeqElement) -> List[Tuple[ResidueMask, Fraction]]:
    """Granice ogona w klasach reszt okresu kanonicznego."""
    if not x.tail:
        return [(ALL, ZERO)]
    d = x.period
    maps = _refine(x.tail, d)
    return [(ResidueMask(d, r), maps[r].get(ONE, ZERO)) for r in range(d)]


def space_membership(x: SeqElement, tag: SpaceTag) -> Verdict:
    if tag in PL_SPACES:
        raise DomainMismatch(f"space_membership dotyczy krat ciągów, nie {tag}")
    limits = class_limits(x)
    table = tuple((m.modulus, m.residue, lim) for m, lim in limits)
    if tag == SpaceTag.LINF:
        return Verified(method="grammar")
    if tag == SpaceTag.REAL:
        if x.tail or any(i != 1 for i, _ in x.overrides):
            return Refuted(MembershipRefutation(tag.value, "support outside index 1", table))
        return Verified(method="support")
    if tag == SpaceTag.C00:
        if x.tail:
            return Refuted(MembershipRefutation(tag.value, "infinitely many nonzero coordinates", table))
        return Verified(method="finite support")
    if tag == SpaceTag.C0:
        bad = tuple(row for row in table if row[2] != 0)
        if bad:
            return Refuted(MembershipRefutation(tag.value, "nonvanishing limit", bad[:1]))
        return Verified(method="class limits", limit=ZERO)
    values = {lim for _, lim in limits}
    if len(values) > 1:
        first = table[0]
        other = next(row for row in table if row[2] != first[2])
        return Refuted(MembershipRefutation(tag.value, "class limits differ", (first, other)))
    return Verified(method="class limits", limit=values.pop())


def seq_limit(x: SeqElement) -> Fraction:
    verdict = space_membership(x, SpaceTag.C)
    if not isinstance(verdict, Verified):
        raise NotInC(f"Element {x} nie należy do c: {verdict.certificate.to_json_dict()}")
    return verdict.limit


# --- Iloczyny, ilorazy, przesunięcia ---

def seq_multiply(x: SeqElement, y: SeqElement) -> SeqElement:
    start = max(x.start, y.start)
    ov = {n: x.value(n) * y.value(n) for n in range(1, start)}
    modulus = _lcm_of([x.period, y.period])
    mx, my = _refine(x.tail, modulus), _refine(y.tail, modulus)
    terms = []
    for r in range(modulus):
        for r1, c1 in mx[r].items():
            for r2, c2 in my[r].items():
                terms.append(TailTerm(c1 * c2, r1 * r2, ResidueMask(modulus, r)))
    return seq_element(ov, terms, start)


def seq_divide(y: SeqElement, d: SeqElement) -> SeqElement:
    """y/d punktowo; d musi mieć w każdej klasie dokładnie jeden wyraz, a iloraz ilorazów <= 1."""
    start = max(y.start, d.start)
    modulus = _lcm_of([y.period, d.period])
    my, md = _refine(y.tail, modulus), _refine(d.tail, modulus)
    for r in range(modulus):
        if not md[r]:
            raise ZeroCoefficient(f"Dzielnik znika na klasie {r} mod {modulus}")
    for n in range(1, start):
        if d.value(n) == 0:
            raise ZeroCoefficient(f"Dzielnik równy 0 w indeksie {n}")
    terms = []
    for r in range(modulus):
        if len(md[r]) > 1:
            raise Unsupported(f"Dzielnik ma kilka wyrazów w klasie {r} mod {modulus}")
        (dr, dc), = md[r].items()
        for q, c in my[r].items():
            ratio = q / dr
            if ratio > 1:
                raise Unsupported(f"Iloraz rośnie wykładniczo (iloraz {format_rational(ratio)}) na klasie {r} mod {modulus}")
            terms.append(TailTerm(c / dc, ratio, ResidueMask(modulus, r)))
    ov = {n: y.value(n) / d.value(n) for n in range(1, start)}
    return seq_element(ov, terms, start)


def seq_restrict_mask(x: SeqElement, mask: ResidueMask) -> SeqElement:
    ov = {n: v for n, v in x.overrides if mask.matches(n)}
    modulus = _lcm_of([x.period, mask.modulus])
    maps = _refine(x.tail, modulus)
    terms = [TailTerm(c, r, ResidueMask(modulus, res)) for res, cmap in enumerate(maps)
             if mask.matches(res) for r, c in cmap.items()]
    return seq_element(ov, terms, x.start)


def seq_truncate(x: SeqElement, upto: int) -> SeqElement:
    """Wartości x na indeksach <= upto, zero dalej."""
    return seq_element({n: x.value(n) for n in range(1, max(upto, 0) + 1)}, (), max(upto, 0) + 1)


def seq_shift(x: SeqElement, k: int) -> SeqElement:
    """v(n) = x(n + k), k >= 0."""
    if k < 0:
        raise Unsupported("Przesunięcie wstecz nie jest obsługiwane")
    new_start = max(1, x.start - k)
    ov = {n: x.value(n + k) for n in range(1, new_start)}
    terms = [TailTerm(t.coeff * t.ratio ** k, t.ratio, ResidueMask(t.mask.modulus, (t.mask.residue - k) % t.mask.modulus))
             for t in x.tail]
    return seq_element(ov, terms, new_start)


def seq_compose_affine(x: SeqElement, slope: int, offset: int) -> SeqElement:
    """v(n) = x(max(1, slope*n + offset)) dla slope >= 1."""
    if slope < 1:
        raise Unsupported(f"Nachylenie musi być >= 1 (otrzymano {slope})")
    valid = max(1, -((offset - x.start) // slope))  # slope*n + offset >= start
    ov = {n: x.value(max(1, slope * n + offset)) for n in range(1, valid)}
    terms = []
    for t in x.tail:
        m, s = t.mask
        cycle = m // math.gcd(slope, m)
        for res in range(cycle):
            if (slope * res + offset) % m == s:
                terms.append(TailTerm(t.coeff * t.ratio ** offset, t.ratio ** slope, ResidueMask(cycle, res)))
    return seq_element(ov, terms, valid)


def seq_reindex(u: SeqElement, slope: int, offset: int, clamp_from: int = 1) -> SeqElement:
    """v(j) = u(max(clamp_from, floor((j + offset)/slope))); wymaga dokładnych pierwiastków ilorazów."""
    if slope < 1:
        raise Unsupported(f"Nachylenie musi być >= 1 (otrzymano {slope})")
    floor_start = max(clamp_from, u.start, 1)
    first_tail = max(1, slope * floor_start - offset)

    def source(j: int) -> int:
        return max(clamp_from, (j + offset) // slope, 1)

    ov = {j: u.value(source(j)) for j in range(1, first_tail)}
    terms = []
    for t in u.tail:
        root = exact_root(t.ratio, slope)
        if root is None:
            raise Unsupported(f"Brak dokładnego pierwiastka stopnia {slope} z {format_rational(t.ratio)}")
        m, s = t.mask
        big = slope * m
        for res in range(big):
            e = (res + offset) % slope
            if ((res + offset) // slope) % m != s:
                continue
            terms.append(TailTerm(t.coeff * root ** (offset - e), root, ResidueMask(big, res)))
    return seq_element(ov, terms, first_tail)


def partial_sum_sequence(q: SeqElement, slope: int, offset: int) -> SeqElement:
    """S(n) = suma q(j) po 1 <= j <= slope*n + offset, jako element w zmiennej n."""
    if slope < 1:
        raise Unsupported(f"Nachylenie musi być >= 1 (otrzymano {slope})")
    if any(t.ratio == 1 for t in q.tail):
        raise Unsupported("Sumy częściowe ogona stałego rosną liniowo")
    st = q.start
    total = sum((v for _, v in q.overrides), ZERO)
    terms: List[TailTerm] = []
    for t in q.tail:
        m, s = t.mask
        denom = 1 - t.ratio ** m
        j0 = t.mask.first_at_least(st)
        total += t.coeff * t.ratio ** j0 / denom
        cycle = m // math.gcd(slope, m)
        for res in range(cycle):
            delta = 1 + ((s - slope * res - offset - 1) % m)
            coeff = -t.coeff * t.ratio ** (offset + delta) / denom
            terms.append(TailTerm(coeff, t.ratio ** slope, ResidueMask(cycle, res)))
    terms.append(TailTerm(total, ONE, ALL))
    valid = max(1, -((offset - st + 1) // slope))  # slope*n + offset >= st - 1

    def direct(n: int) -> Fraction:
        top = slope * n + offset
        return sum((q.value(j) for j in range(1, top + 1)), ZERO)

    ov = {n: direct(n) for n in range(1, valid)}
    return seq_element(ov, terms, valid)


def seq_total_sum(q: SeqElement) -> Fraction:
    """Suma szeregu; ogon musi mieć ilorazy < 1."""
    if any(t.ratio == 1 for t in q.tail):
        raise Unsupported("Szereg o stałym ogonie jest rozbieżny")
    total = sum((v for _, v in q.overrides), ZERO)
    for t in q.tail:
        j0 = t.mask.first_at_least(q.start)
        total += t.coeff * t.ratio ** j0 / (1 - t.ratio ** t.mask.modulus)
    return total


# --- Ekstrema i monotoniczność ---

def seq_inf_from(u: SeqElement, n_from: int = 1) -> Fraction:
    """Dokładny kres dolny u(n) po n >= n_from."""
    n_from = max(1, n_from)
    candidates = [u.value(n) for n in range(n_from, u.start)]
    base = max(n_from, u.start)
    modulus = u.period
    maps = _refine(u.tail, modulus)
    for r, cmap in enumerate(maps):
        cls = ResidueMask(modulus, r)
        limit = cmap.get(ONE, ZERO)
        moving = {q: c for q, c in cmap.items() if q != ONE}
        if not moving:
            candidates.append(limit)
            continue
        step = {q: c * (q ** modulus - 1) for q, c in moving.items()}
        sign, n1 = _leading_sign(step)
        stop = max(base, n1)
        n = cls.first_at_least(base)
        while n <= stop:
            candidates.append(_tail_value(u.tail, n))
            n += modulus
        candidates.append(_tail_value(u.tail, n))
        if sign < 0:
            candidates.append(limit)
    if not candidates:
        candidates.append(ZERO)
    return min(candidates)


def seq_sup_from(u: SeqElement, n_from: int = 1) -> Fraction:
    return -seq_inf_from(seq_scale(-1, u), n_from)


def seq_sup_norm(x: SeqElement) -> Fraction:
    return seq_sup_from(seq_abs(x), 1)


def monotone_direction(u: SeqElement, n_from: int = 1) -> Optional[str]:
    """'const' / 'dec' / 'inc' dla n >= n_from albo None."""
    step = seq_sub(u, seq_shift(u, 1))
    nonincreasing = first_negative_index(step, n_from=n_from) is None
    nondecreasing = first_negative_index(seq_scale(-1, step), n_from=n_from) is None
    if nonincreasing and nondecreasing:
        return "const"
    if nonincreasing:
        return "dec"
    if nondecreasing:
        return "inc"
    return None


def scalar_majorant(u: SeqElement) -> SeqElement:
    """Nierosnący ciąg tau >= |u|; przy u -> 0 również tau -> 0."""
    per_ratio: Dict[Fraction, Fraction] = {}
    for t in u.tail:
        per_ratio[t.ratio] = per_ratio.get(t.ratio, ZERO) + abs(t.coeff)
    terms = [TailTerm(c, r, ALL) for r, c in per_ratio.items()]
    ov: Dict[int, Fraction] = {}
    following = _tail_value(terms, u.start)
    for n in range(u.start - 1, 0, -1):
        following = max(abs(u.value(n)), following)
        ov[n] = following
    return seq_element(ov, terms, u.start)


def tail_sup_majorant(p: SeqElement, slope: int, offset: int) -> SeqElement:
    """Nierosnący ciąg w n ograniczający sup_{j > slope*n + offset} |p(j)|."""
    return seq_compose_affine(scalar_majorant(p), slope, offset + 1)


def hull_in_space(x: SeqElement, tag: SpaceTag) -> Optional[SeqElement]:
    """Majoranta x >= 0 leżąca w przestrzeni tag (None, gdy jej nie ma w gramatyce)."""
    if isinstance(space_membership(x, tag), Verified):
        return x
    if tag == SpaceTag.C:
        level = max(lim for _, lim in class_limits(x))
        return seq_sup(x, constant(level))
    return None


# --- Dyspozycja po rodzajach elementów ---

Element = Union[SeqElement, PLFunction, DirectSumElement]


def element_zero(space: SpaceTag) -> Element:
    if space in SEQUENCE_SPACES:
        return zero()
    if space == SpaceTag.CL1:
        return DirectSumElement(plf.pl_constant(0), plf.pl_constant(0))
    return plf.pl_constant(0)


def _check_kind(x: Element, y: Element) -> None:
    if type(x) is not type(y):
        raise DomainMismatch(f"Niezgodne rodzaje elementów: {type(x).__name__} vs {type(y).__name__}")


def element_add(x: Element, y: Element) -> Element:
    _check_kind(x, y)
    if isinstance(x, SeqElement):
        return seq_add(x, y)
    if isinstance(x, PLFunction):
        return plf.pl_combine(x, y, "add")
    return DirectSumElement(plf.pl_combine(x.cpart, y.cpart, "add"), plf.pl_combine(x.lpart, y.lpart, "add"))


def element_scale(alpha: RatLike, x: Element) -> Element:
    a = to_rat(alpha)
    if isinstance(x, SeqElement):
        return seq_scale(a, x)
    if isinstance(x, PLFunction):
        return plf.pl_scale(a, x)
    return DirectSumElement(plf.pl_scale(a, x.cpart), plf.pl_scale(a, x.lpart))


def element_sub(x: Element, y: Element) -> Element:
    return element_add(x, element_scale(-1, y))


def element_lattice(x: Element, y: Element, kind: str) -> Element:
    _check_kind(x, y)
    if isinstance(x, SeqElement):
        return seq_combine(x, y, kind)
    if isinstance(x, PLFunction):
        return plf.pl_combine(x, y, kind)
    return DirectSumElement(plf.pl_combine(x.cpart, y.cpart, kind), plf.pl_combine(x.lpart, y.lpart, kind))


def element_abs(x: Element) -> Element:
    return element_lattice(x, element_scale(-1, x), "sup")


def pl_mode(space: SpaceTag) -> str:
    return "ae" if space == SpaceTag.L1 else "everywhere"


def element_leq(x: Element, y: Element, space: SpaceTag) -> bool:
    _check_kind(x, y)
    if isinstance(x, SeqElement):
        return seq_leq(x, y)
    if isinstance(x, PLFunction):
        return plf.pl_leq(x, y, pl_mode(space))
    return plf.pl_leq(x.cpart, y.cpart, "everywhere") and plf.pl_leq(x.lpart, y.lpart, "ae")


def element_equal(x: Element, y: Element, space: SpaceTag) -> bool:
    return element_leq(x, y, space) and element_leq(y, x, space)


def element_norm(x: Element, space: SpaceTag) -> Fraction:
    """Norma kratowa: sup dla ciągów i C[0,1], całka z modułu dla L1, suma dla sumy prostej."""
    if isinstance(x, SeqElement):
        return seq_sup_norm(x)
    if isinstance(x, PLFunction):
        if space == SpaceTag.L1:
            return plf.pl_integral(plf.pl_abs(x))
        return plf.pl_sup_norm(x)
    return plf.pl_sup_norm(x.cpart) + plf.pl_integral(plf.pl_abs(x.lpart))


def element_membership(x: Element, space: SpaceTag) -> Verdict:
    """Przynależność elementu do przestrzeni (dla PL: ciągłość części C[0,1])."""
    if space in SEQUENCE_SPACES:
        if not isinstance(x, SeqElement):
            raise DomainMismatch(f"Element {type(x).__name__} w przestrzeni ciągów {space}")
        return space_membership(x, space)
    if space == SpaceTag.CL1:
        if not isinstance(x, DirectSumElement):
            raise DomainMismatch(f"Przestrzeń {space} wymaga pary (cpart, lpart)")
        return plf.pl_continuity(x.cpart)
    if not isinstance(x, PLFunction):
        raise DomainMismatch(f"Przestrzeń {space} wymaga funkcji kawałkami liniowej")
    if space == SpaceTag.C01:
        return plf.pl_continuity(x)
    return Verified(method="grammar")


def describe(x: Element) -> str:
    return str(x)
