"""Atomic substitutions, reducts and the cube correspondence."""

from __future__ import annotations

from typing import Iterable, Mapping

from .formula import BOT, TOP, Assignment, Atom, Clause, Const, Cube, _Marker, var

TRIVIALIZED = _Marker("TRIVIALIZED")


def _check_atom(a) -> None:
    if isinstance(a, Const):
        return
    if not isinstance(a, int) or isinstance(a, bool) or a == 0:
        raise ValueError(f"not an atom: {a!r}")


class Substitution:
    """A finite map from variables to atoms.

    Only the image of each variable's positive literal is stored; the
    negative literal maps to the complement, and unmapped variables (as well
    as the constants) are fixed.  Identity entries are dropped on
    construction.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[int, Atom] | Iterable[tuple[int, Atom]] = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        m: dict[int, Atom] = {}
        for v, a in items:
            if not isinstance(v, int) or v <= 0:
                raise ValueError(f"substitution domain must be variables, got {v!r}")
            _check_atom(a)
            if v in m:
                raise ValueError(f"variable {v} mapped twice")
            if a != v:
                m[v] = a
        self._map = m
        self._hash = None

    @classmethod
    def identity(cls) -> "Substitution":
        return _IDENTITY

    def __call__(self, atom: Atom) -> Atom:
        if isinstance(atom, Const):
            return atom
        img = self._map.get(atom if atom > 0 else -atom)
        if img is None:
            return atom
        return img if atom > 0 else -img

    apply = __call__

    def items(self):
        return sorted(self._map.items())

    def domain(self) -> frozenset[int]:
        return frozenset(self._map)

    def image_vars(self) -> set[int]:
        return {var(a) for a in self._map.values() if not isinstance(a, Const)}

    def is_identity(self) -> bool:
        return not self._map

    def is_constant(self) -> bool:
        """True when every non-identity entry maps to a constant (a cube witness)."""
        return all(isinstance(a, Const) for a in self._map.values())

    def to_cube(self) -> Cube:
        if not self.is_constant():
            raise ValueError("substitution maps some variable to a literal")
        return Cube(v if a is TOP else -v for v, a in self._map.items())

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{v}↦{a!r}" for v, a in self.items()) + "}"


_IDENTITY = Substitution()


def apply_atom(s: Substitution, a: Atom) -> Atom:
    return s(a)


def compose(s: Substitution, t: Substitution) -> Substitution:
    """``s ∘ t``: apply ``t`` first, then ``s``."""
    out: dict[int, Atom] = {}
    for v in t.domain() | s.domain():
        out[v] = s(t(v))
    return Substitution(out)


def trivializes(s: Substitution, c: Iterable[int]) -> bool:
    seen = set()
    for l in c:
        a = s(l)
        if a is TOP:
            return True
        if a is BOT:
            continue
        if -a in seen:
            return True
        seen.add(a)
    return False


def reduct_clause(s: Substitution, c: Iterable[int]):
    """``c`` under ``s`` with falsified images dropped, or :data:`TRIVIALIZED`."""
    seen = set()
    for l in c:
        a = s(l)
        if a is TOP:
            return TRIVIALIZED
        if a is BOT:
            continue
        if -a in seen:
            return TRIVIALIZED
        seen.add(a)
    return Clause._trusted(seen)


def reduct_formula(s: Substitution, f: Iterable[Clause]) -> set[Clause]:
    out = set()
    for c in f:
        r = reduct_clause(s, c)
        if r is not TRIVIALIZED:
            out.add(r)
    return out


def from_cube(q: Iterable[int]) -> Substitution:
    return Substitution({var(l): (TOP if l > 0 else BOT) for l in q})


def apply_to_model(i: Assignment, s: Substitution) -> Assignment:
    """The model ``i ∘ s``; its value on variable ``v`` is ``i(s(v))``."""
    return Assignment({v: i(s(v)) for v in i.universe | s.domain()})
