"""
Tests for sparse Pauli strings.

Products and commutation are checked against dense matrices on a few qubits.
"""

from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermicolor.pauli import (
    PauliError,
    PauliParseError,
    PauliString,
    commutes,
    multiply,
    product,
    support,
)

N_QUBITS = 3

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliString) -> np.ndarray:
    letters = p.letters
    mats = [_MATRICES[letters.get(q, "I")] for q in range(N_QUBITS)]
    return (1j ** p.phase) * reduce(np.kron, mats)


pauli_strings = st.builds(
    lambda phase, letters: PauliString.from_mapping(
        {q: l for q, l in enumerate(letters) if l != "I"}, phase=phase
    ),
    st.integers(min_value=0, max_value=3),
    st.lists(st.sampled_from("IXYZ"), min_size=N_QUBITS, max_size=N_QUBITS),
)


class TestPauliStringConstruction:
    """Test canonical form and validation."""

    def test_factors_sorted_and_phase_reduced(self):
        """Factors are sorted by qubit and the phase taken mod 4."""
        p = PauliString(phase=6, factors=((7, "Z"), (3, "X")))
        assert p.phase == 2
        assert p.factors == ((3, "X"), (7, "Z"))

    def test_identity(self):
        """The identity has no factors and weight zero."""
        p = PauliString.identity()
        assert p.is_identity
        assert p.weight == 0
        assert support(p) == frozenset()

    def test_repeated_qubit_rejected(self):
        """A qubit may appear at most once."""
        with pytest.raises(PauliError, match="Repeated qubit"):
            PauliString(factors=((1, "X"), (1, "Z")))

    def test_invalid_letter_rejected(self):
        """Only X, Y and Z are letters."""
        with pytest.raises(PauliError, match="Invalid Pauli letter"):
            PauliString(factors=((0, "W"),))  # type: ignore[arg-type]

    def test_negative_qubit_rejected(self):
        """Qubit ids are non-negative."""
        with pytest.raises(PauliError, match="non-negative"):
            PauliString.single(-1, "X")

    def test_hermitian_phases(self):
        """Phases +1 and -1 are Hermitian, +-i are not."""
        x = PauliString.single(0, "X")
        assert x.is_hermitian
        assert (-x).is_hermitian
        assert not x.scaled(1).is_hermitian


class TestPauliAlgebra:
    """Test products and commutation."""

    def test_xy_is_iz(self):
        """X*Y = iZ on one qubit."""
        assert PauliString.single(0, "X") * PauliString.single(0, "Y") == PauliString(1, ((0, "Z"),))

    def test_yx_is_minus_iz(self):
        """Y*X = -iZ on one qubit."""
        assert PauliString.single(0, "Y") * PauliString.single(0, "X") == PauliString(3, ((0, "Z"),))

    def test_square_is_identity(self):
        """Every letter squares to the identity."""
        for letter in ("X", "Y", "Z"):
            p = PauliString.single(4, letter)  # type: ignore[arg-type]
            assert (p * p).is_identity
            assert (p * p).phase == 0

    def test_disjoint_product_concatenates(self):
        """Strings on different qubits multiply without phase."""
        p = multiply(PauliString.single(0, "X"), PauliString.single(5, "Z"))
        assert p == PauliString(factors=((0, "X"), (5, "Z")))

    def test_empty_product(self):
        """The empty product is the identity."""
        assert product([]) == PauliString.identity()

    def test_anticommuting_pair(self):
        """X0 Z1 and Z0 Z1 anticommute: one clash."""
        a = PauliString(factors=((0, "X"), (1, "Z")))
        b = PauliString(factors=((0, "Z"), (1, "Z")))
        assert not commutes(a, b)

    def test_commuting_pair(self):
        """X0 X1 and Z0 Z1 commute: two clashes."""
        a = PauliString(factors=((0, "X"), (1, "X")))
        b = PauliString(factors=((0, "Z"), (1, "Z")))
        assert commutes(a, b)

    @given(pauli_strings, pauli_strings)
    @settings(max_examples=200, deadline=None)
    def test_product_matches_dense(self, a, b):
        """The sparse product equals the matrix product, phase included."""
        assert np.allclose(dense(a * b), dense(a) @ dense(b))

    @given(pauli_strings, pauli_strings)
    @settings(max_examples=200, deadline=None)
    def test_commutes_matches_dense(self, a, b):
        """commutes() agrees with the matrix commutator."""
        da, db = dense(a), dense(b)
        assert commutes(a, b) == np.allclose(da @ db, db @ da)

    @given(pauli_strings, pauli_strings, pauli_strings)
    @settings(max_examples=100, deadline=None)
    def test_product_is_associative(self, a, b, c):
        """(ab)c = a(bc)."""
        assert (a * b) * c == a * (b * c)


class TestPauliText:
    """Test rendering and parsing."""

    def test_render(self):
        """Phase token first, then factors in qubit order."""
        p = PauliString(phase=3, factors=((7, "Z"), (3, "X")))
        assert p.render() == "-i X3 Z7"
        assert str(PauliString.identity()) == "+ I"

    def test_parse_render(self):
        """parse() reads what render() writes."""
        p = PauliString(phase=1, factors=((0, "Y"), (12, "X")))
        assert PauliString.parse(p.render()) == p
        assert PauliString.parse("- I") == PauliString(phase=2)

    def test_parse_errors(self):
        """Malformed text raises PauliParseError."""
        with pytest.raises(PauliParseError, match="Empty"):
            PauliString.parse("   ")
        with pytest.raises(PauliParseError, match="Unknown phase"):
            PauliString.parse("* X0")
        with pytest.raises(PauliParseError, match="Malformed factor"):
            PauliString.parse("+ Q0")
        with pytest.raises(PauliParseError, match="Invalid Pauli string"):
            PauliString.parse("+ X0 Z0")
