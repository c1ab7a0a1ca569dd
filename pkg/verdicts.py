# --- verdicts.py ---
"""
Werdykty i certyfikaty.

Verified | Refuted(certyfikat) | Inconclusive(horyzont). Każdy certyfikat da się
sprawdzić jedną niezależną ewaluacją (zob. convergence.recheck_certificate).
Wszystkie rekordy są niemutowalne i serializują się przez to_json_dict(),
z liczbami wymiernymi zapisanymi jako "p/q".
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, ClassVar, Dict, Optional, Tuple, Union

from utils import format_rational


def jsonable(value: Any) -> Any:
    """Zamienia wartość na strukturę JSON; Fraction -> "p/q"."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return value
    if hasattr(value, "to_json_dict"):
        return value.to_json_dict()
    if isinstance(value, tuple) and hasattr(value, "_asdict"):
        return {k: jsonable(v) for k, v in value._asdict().items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    return value if isinstance(value, (str, float)) else str(value)


class _Record:
    """Wspólna serializacja rekordów certyfikatów."""

    kind: ClassVar[str] = "record"

    def to_json_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        for f in fields(self):  # type: ignore[arg-type]
            out[f.name] = jsonable(getattr(self, f.name))
        return out


# --- Certyfikaty ---

@dataclass(frozen=True)
class MembershipRefutation(_Record):
    """Element nie należy do przestrzeni: klasy reszt (moduł, reszta, granica) albo opis."""
    space: str
    reason: str
    classes: Tuple[Tuple[int, int, Fraction], ...] = ()
    kind: ClassVar[str] = "membership"


@dataclass(frozen=True)
class Jump(_Record):
    location: Fraction
    left: Fraction
    right: Fraction
    value: Fraction
    kind: ClassVar[str] = "jump"


@dataclass(frozen=True)
class JumpList(_Record):
    jumps: Tuple[Jump, ...]
    kind: ClassVar[str] = "jumps"


@dataclass(frozen=True)
class FailedDominationAt(_Record):
    """|a_n - c| <= p_n nie zachodzi w indeksie n (współrzędna/punkt `coordinate`).

    `pair` = (n', n'') dla warunku Cauchy'ego, `member` = numer członka rodziny,
    `scale` = mnożnik lambda dla rodzin skalowanych.
    """
    n: int
    coordinate: Any
    lhs: Fraction
    rhs: Fraction
    pair: Optional[Tuple[int, int]] = None
    member: Optional[int] = None
    scale: Optional[Fraction] = None
    kind: ClassVar[str] = "failed_domination"


@dataclass(frozen=True)
class NotDecreasingAt(_Record):
    n: int
    coordinate: Any
    value_n: Fraction
    value_next: Fraction
    kind: ClassVar[str] = "not_decreasing"


@dataclass(frozen=True)
class PointwiseInfPositive(_Record):
    """inf_n W(n)(index) = bound != 0, więc W nie zbiega do 0."""
    index: Any
    bound: Fraction
    kind: ClassVar[str] = "pointwise_inf_positive"


@dataclass(frozen=True)
class LimitEscapesSpace(_Record):
    limit: Any
    refutation: Any
    kind: ClassVar[str] = "limit_escapes_space"


@dataclass(frozen=True)
class EnvelopeLowerBound(_Record):
    """Obwiednia q_n >= bound > 0 dla wszystkich n - żaden świadek p_n -> 0 jej nie zdominuje.

    `samples` to pary (n, q_n) do ponownego sprawdzenia, `reason` opisuje rodzaj obwiedni.
    """
    family: str
    bound: Fraction
    samples: Tuple[Tuple[int, Fraction], ...] = ()
    reason: str = "deviation"
    kind: ClassVar[str] = "envelope_lower_bound"


@dataclass(frozen=True)
class NoPreimageCertificate(_Record):
    """Brak przeciwobrazu w gramatyce dziedziny; `detail` to certyfikat przynależności/skoków."""
    reason: str
    detail: Any = None
    kind: ClassVar[str] = "no_preimage"


@dataclass(frozen=True)
class OrderViolation(_Record):
    """(T - S)x nie jest >= 0 dla dodatniego x."""
    witness: Any
    reason: str
    kind: ClassVar[str] = "order_violation"


Certificate = Union[MembershipRefutation, JumpList, FailedDominationAt, NotDecreasingAt,
                    PointwiseInfPositive, LimitEscapesSpace, EnvelopeLowerBound,
                    NoPreimageCertificate, OrderViolation]


# --- Werdykty ---

@dataclass(frozen=True)
class Verified:
    method: str
    witness: Any = None
    limit: Any = None
    note: str = ""
    status: ClassVar[str] = "verified"

    def to_json_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status, "method": self.method}
        if self.limit is not None:
            out["limit"] = jsonable(self.limit)
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Refuted:
    certificate: Any
    note: str = ""
    status: ClassVar[str] = "refuted"

    def to_json_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status, "certificate": jsonable(self.certificate)}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Inconclusive:
    horizon: int
    reason: str = ""
    status: ClassVar[str] = "inconclusive"

    def to_json_dict(self) -> Dict[str, Any]:
        return {"status": self.status, "horizon": self.horizon, "reason": self.reason}


Verdict = Union[Verified, Refuted, Inconclusive]


def is_verified(verdict: Any) -> bool:
    return isinstance(verdict, Verified)


def is_refuted(verdict: Any) -> bool:
    return isinstance(verdict, Refuted)


def conjunction(verdicts) -> Verdict:
    """Koniunkcja: pierwszy Refuted wygrywa, potem Inconclusive, na końcu Verified."""
    verdicts = list(verdicts)
    for v in verdicts:
        if isinstance(v, Refuted):
            return v
    for v in verdicts:
        if isinstance(v, Inconclusive):
            return v
    if not verdicts:
        return Verified(method="empty")
    return verdicts[0] if len(verdicts) == 1 else Verified(method="conjunction")
