# --- pl_functions.py ---
"""
Funkcje kawałkami liniowe na [0,1] o wymiernych punktach załamania.

Funkcja = posortowane punkty załamania 0 = b0 < ... < bk = 1, afiniczny kawałek
(nachylenie, wyraz wolny) na każdym otwartym przedziale (b_i, b_{i+1}) oraz
wartość w każdym punkcie załamania. Skoki są dozwolone (elementy L1);
dla C[0,1] ciągłość sprawdza pl_continuity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from errors import IllFormedGrammar, Unsupported
from utils import format_rational
from verdicts import Jump, JumpList, Refuted, Verdict, Verified

logger = logging.getLogger(__name__)

Piece = Tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def _at(piece: Piece, x: Fraction) -> Fraction:
    return piece[0] * x + piece[1]


@dataclass(frozen=True)
class PLFunction:
    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Piece, ...]
    values: Tuple[Fraction, ...]

    def piece_index(self, x: Fraction) -> int:
        """Indeks przedziału otwartego zawierającego x (x nie jest punktem załamania)."""
        for i in range(len(self.pieces)):
            if self.breakpoints[i] < x < self.breakpoints[i + 1]:
                return i
        raise IllFormedGrammar(f"Punkt {format_rational(x)} nie leży wewnątrz żadnego przedziału")

    def __call__(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        if not ZERO <= x <= ONE:
            raise IllFormedGrammar(f"Punkt {format_rational(x)} poza [0,1]")
        if x in self.breakpoints:
            return self.values[self.breakpoints.index(x)]
        return _at(self.pieces[self.piece_index(x)], x)

    def left_limit(self, i: int) -> Fraction:
        return _at(self.pieces[i - 1], self.breakpoints[i])

    def right_limit(self, i: int) -> Fraction:
        return _at(self.pieces[i], self.breakpoints[i])

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "pieces": [[format_rational(a), format_rational(b)] for a, b in self.pieces],
            "values": [format_rational(v) for v in self.values],
        }

    def __str__(self) -> str:
        parts = []
        for i, (a, b) in enumerate(self.pieces):
            lo, hi = self.breakpoints[i], self.breakpoints[i + 1]
            parts.append(f"({format_rational(lo)},{format_rational(hi)}): {format_rational(a)}x+{format_rational(b)}")
        return "PL[" + "; ".join(parts) + "]"


@dataclass(frozen=True)
class DirectSumElement:
    """Element C[0,1] ⊕ L1: para (część ciągła, część całkowalna)."""
    cpart: PLFunction
    lpart: PLFunction

    def to_json_dict(self) -> Dict[str, object]:
        return {"cpart": self.cpart.to_json_dict(), "lpart": self.lpart.to_json_dict()}

    def __str__(self) -> str:
        return f"({self.cpart}, {self.lpart})"


def _normalize(bps: Sequence[Fraction], pieces: Sequence[Piece], values: Sequence[Fraction]) -> PLFunction:
    """Usuwa zbędne wewnętrzne punkty załamania (ten sam kawałek po obu stronach i zgodna wartość)."""
    out_b, out_p, out_v = [bps[0]], [], [values[0]]
    current = pieces[0]
    for i in range(1, len(bps) - 1):
        nxt = pieces[i]
        if nxt == current and values[i] == _at(current, bps[i]):
            continue
        out_p.append(current)
        out_b.append(bps[i])
        out_v.append(values[i])
        current = nxt
    out_p.append(current)
    out_b.append(bps[-1])
    out_v.append(values[-1])
    return PLFunction(tuple(out_b), tuple(out_p), tuple(out_v))


def pl_from_pieces(breakpoints: Iterable, pieces: Iterable, values: Iterable) -> PLFunction:
    bps = [Fraction(b) for b in breakpoints]
    pcs = [(Fraction(a), Fraction(b)) for a, b in pieces]
    vals = [Fraction(v) for v in values]
    if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
        raise IllFormedGrammar("Punkty załamania muszą zaczynać się w 0 i kończyć w 1")
    if any(bps[i] >= bps[i + 1] for i in range(len(bps) - 1)):
        raise IllFormedGrammar(f"Punkty załamania nie są ściśle rosnące: {[format_rational(b) for b in bps]}")
    if len(pcs) != len(bps) - 1 or len(vals) != len(bps):
        raise IllFormedGrammar(
            f"Niezgodne długości: {len(bps)} punktów, {len(pcs)} kawałków, {len(vals)} wartości")
    return _normalize(bps, pcs, vals)


def pl_from_vertices(points: Iterable[Tuple]) -> PLFunction:
    """Ciągła funkcja łamana przez wierzchołki (x, y); powtórzone x muszą mieć to samo y."""
    pts: List[Tuple[Fraction, Fraction]] = []
    for x, y in sorted((Fraction(x), Fraction(y)) for x, y in points):
        if pts and pts[-1][0] == x:
            if pts[-1][1] != y:
                raise IllFormedGrammar(f"Niespójna definicja w punkcie {format_rational(x)}")
            continue
        pts.append((x, y))
    pieces = []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append((slope, y0 - slope * x0))
    return pl_from_pieces([x for x, _ in pts], pieces, [y for _, y in pts])


def pl_constant(c) -> PLFunction:
    c = Fraction(c)
    return PLFunction((ZERO, ONE), ((ZERO, c),), (c, c))


def pl_indicator(lo, hi, include_lo: bool = True, include_hi: bool = True) -> PLFunction:
    """Funkcja charakterystyczna przedziału [lo, hi] z wybranymi końcami."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not ZERO <= lo <= hi <= ONE:
        raise IllFormedGrammar(f"Niepoprawny przedział [{format_rational(lo)}, {format_rational(hi)}]")
    grid = sorted({ZERO, lo, hi, ONE})
    pieces = [((ZERO, ONE) if lo <= a and b <= hi else (ZERO, ZERO)) for a, b in zip(grid, grid[1:])]
    values = []
    for x in grid:
        inside = lo < x < hi or (x == lo and include_lo) or (x == hi and include_hi)
        values.append(ONE if inside else ZERO)
    return pl_from_pieces(grid, pieces, values)


def phi(n: int) -> PLFunction:
    """1 na [0, 1/2 - 2^-n], 0 na [1/2, 1], liniowo pomiędzy."""
    if n < 1:
        raise IllFormedGrammar(f"Indeks rodziny musi być >= 1 (otrzymano {n})")
    knee = HALF - Fraction(1, 2 ** n)
    return pl_from_vertices([(0, 1), (knee, 1), (HALF, 0), (1, 0)])


def rho(n: int) -> PLFunction:
    """0 na [0, 1/2], 1 - 2^n (x - 1/2) na (1/2, 1/2 + 2^-n], 0 dalej."""
    if n < 1:
        raise IllFormedGrammar(f"Indeks rodziny musi być >= 1 (otrzymano {n})")
    scale = Fraction(2 ** n)
    end = HALF + 1 / scale
    grid = sorted({ZERO, HALF, end, ONE})
    pieces = [(ZERO, ZERO), (-scale, 1 + scale * HALF)] + ([(ZERO, ZERO)] if end < ONE else [])
    return pl_from_pieces(grid, pieces, [ZERO] * len(grid))


def phi_limit() -> PLFunction:
    """Granica punktowa phi_n: funkcja charakterystyczna [0, 1/2)."""
    return pl_indicator(0, HALF, include_lo=True, include_hi=False)


def half_indicator() -> PLFunction:
    """Funkcja charakterystyczna [0, 1/2] (z wartością 1 w 1/2)."""
    return pl_indicator(0, HALF)


# --- Wspólna siatka ---

def _on_grid(f: PLFunction, grid: Sequence[Fraction]) -> Tuple[List[Piece], List[Fraction]]:
    pieces = [f.pieces[f.piece_index((a + b) / 2)] for a, b in zip(grid, grid[1:])]
    return pieces, [f(x) for x in grid]


def _common_grid(*fs: PLFunction, extra: Iterable[Fraction] = ()) -> List[Fraction]:
    points = set(extra)
    for f in fs:
        points.update(f.breakpoints)
    return sorted(points)


def pl_combine(f: PLFunction, g: PLFunction, kind: str) -> PLFunction:
    """Suma lub sup/inf punktowo; przy sup/inf dokładane są punkty przecięcia kawałków."""
    grid = _common_grid(f, g)
    pf, vf = _on_grid(f, grid)
    pg, vg = _on_grid(g, grid)
    if kind == "add":
        return _normalize(grid, [(a[0] + b[0], a[1] + b[1]) for a, b in zip(pf, pg)],
                          [a + b for a, b in zip(vf, vg)])
    if kind not in ("sup", "inf"):
        raise Unsupported(f"Nieznany rodzaj operacji kratowej: '{kind}'")
    pick = max if kind == "sup" else min
    out_b, out_p, out_v = [grid[0]], [], [pick(vf[0], vg[0])]
    for i, (p, q) in enumerate(zip(pf, pg)):
        lo, hi = grid[i], grid[i + 1]
        cuts = [lo, hi]
        if p[0] != q[0]:
            cross = (q[1] - p[1]) / (p[0] - q[0])
            if lo < cross < hi:
                cuts = [lo, cross, hi]
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            chosen = p if pick(_at(p, mid), _at(q, mid)) == _at(p, mid) else q
            out_p.append(chosen)
            out_b.append(b)
            out_v.append(_at(chosen, b) if b != hi else pick(vf[i + 1], vg[i + 1]))
    return _normalize(out_b, out_p, out_v)


def pl_scale(alpha, f: PLFunction) -> PLFunction:
    a = Fraction(alpha)
    return _normalize(f.breakpoints, [(a * s, a * b) for s, b in f.pieces], [a * v for v in f.values])


def pl_sub(f: PLFunction, g: PLFunction) -> PLFunction:
    return pl_combine(f, pl_scale(-1, g), "add")


def pl_abs(f: PLFunction) -> PLFunction:
    return pl_combine(f, pl_scale(-1, f), "sup")


# --- Porządek ---

def pl_negative_point(h: PLFunction, mode: str = "everywhere", lo=ZERO, hi=ONE,
                      include_lo: bool = True, include_hi: bool = True) -> Optional[Fraction]:
    """Punkt z [lo, hi], w którym h < 0 (dla 'ae' tylko wnętrza przedziałów), albo None."""
    lo, hi = Fraction(lo), Fraction(hi)
    grid = _common_grid(h, extra=(lo, hi))
    pieces, values = _on_grid(h, grid)
    if mode == "everywhere":
        for x, v in zip(grid, values):
            if v < 0 and (lo < x < hi or (x == lo and include_lo) or (x == hi and include_hi)):
                return x
    for i, p in enumerate(pieces):
        a, b = grid[i], grid[i + 1]
        if a < lo or b > hi:
            continue
        left, right = _at(p, a), _at(p, b)
        if left >= 0 and right >= 0:
            continue
        if left < 0 and right < 0:
            return (a + b) / 2
        root = -p[1] / p[0]
        return (a + root) / 2 if left < 0 else (root + b) / 2
    return None


def pl_nonneg_on(h: PLFunction, mode: str = "everywhere", lo=ZERO, hi=ONE,
                 include_lo: bool = True, include_hi: bool = True) -> bool:
    return pl_negative_point(h, mode, lo, hi, include_lo, include_hi) is None


def pl_leq(f: PLFunction, g: PLFunction, mode: str = "everywhere") -> bool:
    """f <= g wszędzie ('everywhere') albo prawie wszędzie ('ae')."""
    if mode not in ("everywhere", "ae"):
        raise Unsupported(f"Nieznany tryb porządku: '{mode}'")
    return pl_negative_point(pl_sub(g, f), mode) is None


def pl_equal(f: PLFunction, g: PLFunction, mode: str = "everywhere") -> bool:
    return pl_leq(f, g, mode) and pl_leq(g, f, mode)


def pl_nonzero_point(f: PLFunction, mode: str = "everywhere") -> Optional[Fraction]:
    """Punkt, w którym f != 0 (dla 'ae' punkt wewnątrz przedziału), albo None."""
    point = pl_negative_point(pl_scale(-1, pl_abs(f)), mode)
    return point


# --- Miary ---

def pl_integral(f: PLFunction) -> Fraction:
    total = ZERO
    for i, p in enumerate(f.pieces):
        a, b = f.breakpoints[i], f.breakpoints[i + 1]
        total += (b - a) * (_at(p, a) + _at(p, b)) / 2
    return total


def pl_sup_norm(f: PLFunction, essential: bool = False) -> Fraction:
    """sup |f|; z essential=True pomija wartości w punktach załamania."""
    candidates = []
    for i, p in enumerate(f.pieces):
        candidates += [abs(_at(p, f.breakpoints[i])), abs(_at(p, f.breakpoints[i + 1]))]
    if not essential:
        candidates += [abs(v) for v in f.values]
    return max(candidates)


# --- Ciągłość ---

def pl_jumps(f: PLFunction, ignore_point_values: bool = False) -> List[Jump]:
    jumps = []
    last = len(f.breakpoints) - 1
    for i, x in enumerate(f.breakpoints):
        left = f.left_limit(i) if i > 0 else None
        right = f.right_limit(i) if i < last else None
        sides = [s for s in (left, right) if s is not None]
        broken = len(set(sides)) > 1 or (not ignore_point_values and f.values[i] != sides[0])
        if broken:
            jumps.append(Jump(x, left if left is not None else f.values[i],
                              right if right is not None else f.values[i], f.values[i]))
    return jumps


def pl_continuity(f: PLFunction, ignore_point_values: bool = False) -> Verdict:
    """Verified, gdy f jest ciągła na [0,1]; w przeciwnym razie Refuted(JumpList)."""
    jumps = pl_jumps(f, ignore_point_values)
    if jumps:
        logger.debug(f"Funkcja ma {len(jumps)} nieciągłości, pierwsza w {format_rational(jumps[0].location)}")
        return Refuted(JumpList(tuple(jumps)))
    return Verified(method="one-sided limits")


def pl_continuous_version(f: PLFunction) -> Optional[PLFunction]:
    """Ciągły reprezentant klasy a.e. funkcji f albo None, gdy f ma prawdziwy skok."""
    if pl_jumps(f, ignore_point_values=True):
        return None
    last = len(f.breakpoints) - 1
    values = [f.right_limit(i) if i < last else f.left_limit(i) for i in range(last + 1)]
    return _normalize(f.breakpoints, f.pieces, values)
