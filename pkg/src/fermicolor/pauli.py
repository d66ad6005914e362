"""
Sparse Pauli strings with exact global phase.

A Pauli string is stored as a phase exponent k (the phase is i**k, k in 0..3)
and a sorted tuple of (qubit, letter) factors with identity qubits omitted.
Qubit ids are global integers and never need to be declared up front, so
operators built on different vertices of a system graph can be multiplied
directly.

Every encoding and conflict rule in this package is cross-checked against the
products computed here.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

logger = logging.getLogger(__name__)

Letter = Literal["X", "Y", "Z"]

LETTERS: tuple[Letter, ...] = ("X", "Y", "Z")

# (a, b) -> (exponent of i, letter) for a*b on one qubit; None is identity.
_PRODUCT_TABLE: dict[tuple[Letter, Letter], tuple[int, Letter | None]] = {
    ("X", "X"): (0, None),
    ("Y", "Y"): (0, None),
    ("Z", "Z"): (0, None),
    ("X", "Y"): (1, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"),
    ("Z", "Y"): (3, "X"),
    ("X", "Z"): (3, "Y"),
}

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TEXT_PHASE = {text: k for k, text in _PHASE_TEXT.items()}
_FACTOR_RE = re.compile(r"^([XYZ])(\d+)$")


class PauliError(Exception):
    """Base exception for Pauli string errors."""
    pass


class PauliParseError(PauliError):
    """Raised when a textual Pauli string cannot be parsed."""
    pass


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli string: phase i**phase times a tensor product of letters."""

    phase: int = 0
    factors: tuple[tuple[int, Letter], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", self.phase % 4)
        canonical = tuple(sorted(self.factors))
        qubits = [q for q, _ in canonical]
        if len(set(qubits)) != len(qubits):
            raise PauliError(f"Repeated qubit in factors: {canonical}")
        for qubit, letter in canonical:
            if letter not in LETTERS:
                raise PauliError(f"Invalid Pauli letter {letter!r} on qubit {qubit}")
            if qubit < 0:
                raise PauliError(f"Qubit ids must be non-negative, got {qubit}")
        object.__setattr__(self, "factors", canonical)

    @classmethod
    def identity(cls) -> PauliString:
        return cls()

    @classmethod
    def single(cls, qubit: int, letter: Letter) -> PauliString:
        return cls(factors=((qubit, letter),))

    @classmethod
    def from_mapping(cls, letters: Mapping[int, Letter], phase: int = 0) -> PauliString:
        return cls(phase=phase, factors=tuple(letters.items()))

    @property
    def letters(self) -> dict[int, Letter]:
        return dict(self.factors)

    @property
    def weight(self) -> int:
        return len(self.factors)

    @property
    def is_identity(self) -> bool:
        return not self.factors

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(phase=self.phase + 2, factors=self.factors)

    def scaled(self, exponent: int) -> PauliString:
        """Return this string multiplied by i**exponent."""
        return PauliString(phase=self.phase + exponent, factors=self.factors)

    def render(self) -> str:
        """Render as e.g. ``-i X3 Z7``; the identity renders as ``+ I``."""
        body = " ".join(f"{letter}{qubit}" for qubit, letter in self.factors) or "I"
        return f"{_PHASE_TEXT[self.phase]} {body}"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse the output of :meth:`render`."""
        tokens = text.split()
        if not tokens:
            raise PauliParseError("Empty Pauli string")
        if tokens[0] not in _TEXT_PHASE:
            raise PauliParseError(f"Unknown phase token {tokens[0]!r} in {text!r}")
        phase = _TEXT_PHASE[tokens[0]]
        body = tokens[1:]
        if body == ["I"]:
            return cls(phase=phase)
        factors: list[tuple[int, Letter]] = []
        for token in body:
            match = _FACTOR_RE.match(token)
            if match is None:
                raise PauliParseError(f"Malformed factor {token!r} in {text!r}")
            letter = match.group(1)
            factors.append((int(match.group(2)), letter))  # type: ignore[arg-type]
        try:
            return cls(phase=phase, factors=tuple(factors))
        except PauliError as e:
            raise PauliParseError(f"Invalid Pauli string {text!r}: {e}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a*b with exact phase."""
    letters = dict(a.factors)
    phase = a.phase + b.phase
    for qubit, letter in b.factors:
        left = letters.get(qubit)
        if left is None:
            letters[qubit] = letter
            continue
        exponent, result = _PRODUCT_TABLE[(left, letter)]
        phase += exponent
        if result is None:
            del letters[qubit]
        else:
            letters[qubit] = result
    return PauliString(phase=phase, factors=tuple(letters.items()))


def product(strings: Iterable[PauliString]) -> PauliString:
    """Ordered product of ``strings``; the empty product is the identity."""
    result = PauliString()
    for s in strings:
        result = multiply(result, s)
    return result


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff ab = ba: an even number of qubits carry different letters."""
    if len(a.factors) > len(b.factors):
        a, b = b, a
    other = dict(b.factors)
    clashes = 0
    for qubit, letter in a.factors:
        theirs = other.get(qubit)
        if theirs is not None and theirs != letter:
            clashes += 1
    return clashes % 2 == 0


def support(a: PauliString) -> frozenset[int]:
    """Qubits carrying a non-identity letter."""
    return frozenset(q for q, _ in a.factors)
