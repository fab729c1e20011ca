"""Signed multi-site Pauli strings with exact phase arithmetic.

Phases are stored as an integer power of i (0..3) so products never touch
floating point.
"""
from __future__ import annotations

from typing import Hashable, Mapping

# (left, right) -> (power of i, product letter)
_MUL = {
    ("X", "Y"): (1, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"),
    ("Z", "Y"): (3, "X"),
    ("X", "Z"): (3, "Y"),
}

_SIGN_TO_PHASE = {1: 0, 1j: 1, -1: 2, -1j: 3}
_PHASE_TO_SIGN = (1, 1j, -1, -1j)


class PauliString:
    __slots__ = ("phase", "letters", "_hash")

    def __init__(self, letters: Mapping[Hashable, str] | None = None, phase: int = 0):
        clean = {}
        for site, letter in (letters or {}).items():
            if letter == "I":
                continue
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"invalid Pauli letter {letter!r}")
            clean[site] = letter
        self.letters = clean
        self.phase = phase % 4
        self._hash = None

    @classmethod
    def from_sign(cls, letters: Mapping[Hashable, str] | None = None, sign=1) -> "PauliString":
        try:
            phase = _SIGN_TO_PHASE[sign]
        except KeyError:
            raise ValueError(f"sign must be one of +1, -1, +i, -i; got {sign!r}") from None
        return cls(letters, phase)

    @classmethod
    def identity(cls) -> "PauliString":
        return cls()

    @property
    def sign(self) -> complex:
        return _PHASE_TO_SIGN[self.phase]

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.letters))

    @property
    def x_support(self) -> tuple:
        """Sites carrying X or Y (the letters that anticommute with Z)."""
        return tuple(sorted(s for s, p in self.letters.items() if p != "Z"))

    @property
    def weight(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        phase = self.phase + other.phase
        out = dict(self.letters)
        for site, q in other.letters.items():
            p = out.get(site)
            if p is None:
                out[site] = q
            elif p == q:
                del out[site]
            else:
                k, r = _MUL[(p, q)]
                phase += k
                out[site] = r
        res = PauliString.__new__(PauliString)
        res.letters = out
        res.phase = phase % 4
        res._hash = None
        return res

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.phase + 2)

    def commutes_with(self, other: "PauliString") -> bool:
        clashes = 0
        small, big = (self, other) if len(self.letters) <= len(other.letters) else (other, self)
        for site, p in small.letters.items():
            q = big.letters.get(site)
            if q is not None and q != p:
                clashes += 1
        return clashes % 2 == 0

    def same_letters(self, other: "PauliString") -> bool:
        return self.letters == other.letters

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return self.phase == other.phase and self.letters == other.letters

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.phase, frozenset(self.letters.items())))
        return self._hash

    def __repr__(self) -> str:
        sign = ("+", "+i", "-", "-i")[self.phase]
        if not self.letters:
            return f"{sign}I"
        body = " ".join(f"{p}{s}" for s, p in sorted(self.letters.items()))
        return f"{sign}{body}"

