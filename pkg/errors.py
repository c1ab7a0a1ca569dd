# --- errors.py ---
"""
Hierarchia wyjątków biblioteki.

Wszystkie błędy dziedziczą po ValueError - tak samo jak reszta kodu sygnalizuje
krytyczne problemy z danymi wejściowymi. Werdykty (Verified/Refuted/Inconclusive)
NIE są wyjątkami; wyjątek oznacza, że pytanie było źle postawione.
"""

from typing import Optional


class LeviError(ValueError):
    """Bazowy błąd biblioteki."""


class NotInC(LeviError):
    """Element nie należy do przestrzeni c (klasy reszt mają różne granice)."""


class WitnessInvalid(LeviError):
    """Świadek nie przeszedł check_decreasing_null."""


class NoStabilization(LeviError):
    """Jakaś współrzędna rodziny nie ma granicy (oscyluje)."""


class NoClosedForm(LeviError):
    """Brak zamkniętej postaci dla obwiedni lub sumy."""


class NotSummable(LeviError):
    """Wagi nie są bezwzględnie sumowalne w zamkniętej postaci (albo suma > 1)."""


class UnboundedWitness(LeviError):
    """Świadek wychodzi poza zadaną kulę (M·𝟙)."""


class DomainMismatch(LeviError):
    """Element lub rodzina spoza dziedziny operatora."""


class ZeroCoefficient(LeviError):
    """Współczynnik diagonali równy zero - odwrotność nie istnieje."""


class Unsupported(LeviError):
    """Przypadek poza obsługiwaną gramatyką."""


class NotMonotone(LeviError):
    """Ciąg z katalogu nie jest rosnący."""


class NotBounded(LeviError):
    """Ciąg z katalogu nie jest ograniczony przez zadaną wielokrotność 𝟙 (lub nie jest dodatni)."""


class WitnessMissing(LeviError):
    """Zbiór operatorów nie ma zweryfikowanego świadka kolektywnego."""


class PositivityMissing(LeviError):
    """Operator w zbiorze dominowanym nie jest dodatni."""


class PairingIncomplete(LeviError):
    """Parowanie S -> T_S niepełne albo S <= T_S nie zachodzi."""


class ModelError(LeviError):
    """Błąd pliku modelu; niesie pozycję (linia/kolumna) i ścieżkę w dokumencie."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 path: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(self.__str__())

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f" (linia {self.line}, kolumna {self.column or 1})"
        loc = f" [{self.path}]" if self.path else ""
        return f"{self.message}{loc}{where}"


class ModelSyntaxError(ModelError):
    """Niepoprawny JSON albo niedozwolone pole."""


class UnknownSpace(ModelError):
    """Nieznany znacznik przestrzeni."""


class IllFormedGrammar(ModelError):
    """Naruszenie niezmiennika gramatyki (np. iloraz spoza [0,1])."""


class UnknownName(ModelError):
    """Odwołanie do niezadeklarowanej nazwy."""
