"""Propositional building blocks.

Literals are plain DIMACS integers: ``k`` is variable ``k`` and ``-k`` its
negation.  Atoms additionally include the constants :data:`TOP` and
:data:`BOT`; every atom supports unary minus as complementation.

Clauses and cubes are canonical tuples (sorted by variable, no duplicates,
no complementary pair), so equality and hashing are structural.
"""

from __future__ import annotations

import enum
import itertools
from typing import Iterable, Iterator, Union


class Const(enum.Enum):
    TOP = "T"
    BOT = "F"

    def __neg__(self) -> "Const":
        return Const.BOT if self is Const.TOP else Const.TOP

    def __repr__(self) -> str:
        return "⊤" if self is Const.TOP else "⊥"


TOP = Const.TOP
BOT = Const.BOT

Atom = Union[int, Const]


class _Marker:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name

    def __bool__(self) -> bool:
        return False


TAUTOLOGY = _Marker("TAUTOLOGY")


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def _key(lit: int) -> int:
    # negative before positive on the same variable; only matters for
    # unnormalized input since canonical sets never hold both
    return 2 * lit if lit > 0 else -2 * lit - 1


class Clause(tuple):
    """A disjunction of literals in canonical order.

    Use :func:`normalize_clause` for arbitrary input; the constructor raises
    ``ValueError`` on complementary literals.
    """

    __slots__ = ()

    def __new__(cls, lits: Iterable[int] = ()):
        s = set(lits)
        for l in s:
            if l == 0 or not isinstance(l, int):
                raise ValueError(f"not a literal: {l!r}")
            if -l in s:
                raise ValueError(f"complementary literals {l} and {-l}")
        return tuple.__new__(cls, sorted(s, key=_key))

    @classmethod
    def _trusted(cls, lits: Iterable[int]) -> "Clause":
        return tuple.__new__(cls, sorted(lits, key=_key))

    def negate(self) -> "Cube":
        """Complement of the clause, as a cube."""
        return Cube._trusted(-l for l in self)

    def __repr__(self) -> str:
        return "[" + " ".join(map(str, self)) + "]"


class Cube(tuple):
    """A conjunction of literals in canonical order."""

    __slots__ = ()

    def __new__(cls, lits: Iterable[int] = ()):
        s = set(lits)
        for l in s:
            if l == 0 or not isinstance(l, int):
                raise ValueError(f"not a literal: {l!r}")
            if -l in s:
                raise ValueError(f"complementary literals {l} and {-l}")
        return tuple.__new__(cls, sorted(s, key=_key))

    @classmethod
    def _trusted(cls, lits: Iterable[int]) -> "Cube":
        return tuple.__new__(cls, sorted(lits, key=_key))

    def negate(self) -> Clause:
        return Clause._trusted(-l for l in self)

    def __repr__(self) -> str:
        return "<" + " ".join(map(str, self)) + ">"


def normalize_clause(lits: Iterable[int]):
    """Deduplicate and sort ``lits``; return :data:`TAUTOLOGY` on a complementary pair."""
    s = set(lits)
    for l in s:
        if -l in s:
            return TAUTOLOGY
    return Clause._trusted(s)


def resolve(c: Clause, d: Clause, lit: int):
    """Resolvent of ``c`` and ``d`` on ``lit`` (``lit`` in ``c``, ``-lit`` in ``d``)."""
    if lit not in c or -lit not in d:
        raise ValueError(f"pivot {lit} not present in {c!r} / {-lit} not in {d!r}")
    return normalize_clause(itertools.chain((l for l in c if l != lit), (l for l in d if l != -lit)))


def subsumes(c: Iterable[int], d: Iterable[int]) -> bool:
    return set(c) <= set(d)


def variables(clauses: Iterable[Iterable[int]]) -> set[int]:
    out: set[int] = set()
    for c in clauses:
        out.update(var(l) for l in c)
    return out


class Assignment:
    """Total assignment over a finite set of variables."""

    __slots__ = ("_val",)

    def __init__(self, values: dict[int, bool]):
        self._val = dict(values)

    @classmethod
    def from_literals(cls, lits: Iterable[int]) -> "Assignment":
        return cls({var(l): l > 0 for l in lits})

    @property
    def universe(self) -> frozenset[int]:
        return frozenset(self._val)

    def __call__(self, atom: Atom) -> bool:
        if atom is TOP:
            return True
        if atom is BOT:
            return False
        try:
            v = self._val[var(atom)]
        except KeyError:
            raise KeyError(f"variable {var(atom)} outside the assignment universe") from None
        return v if atom > 0 else not v

    def items(self):
        return self._val.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Assignment) and self._val == other._val

    def __hash__(self) -> int:
        return hash(frozenset(self._val.items()))

    def __repr__(self) -> str:
        return "Assignment(" + " ".join(str(v if b else -v) for v, b in sorted(self._val.items())) + ")"


def evaluate(i: Assignment, target) -> bool:
    """Truth value of a literal, clause, cube or formula (iterable of clauses)."""
    if isinstance(target, (int, Const)):
        return i(target)
    if isinstance(target, Clause):
        return any(i(l) for l in target)
    if isinstance(target, Cube):
        return all(i(l) for l in target)
    return all(evaluate(i, c if isinstance(c, (Clause, Cube)) else Clause(c)) for c in target)


ORACLE_CAP = 20


def all_models(universe: Iterable[int], cap: int = ORACLE_CAP) -> Iterator[Assignment]:
    vs = sorted(set(universe))
    if len(vs) > cap:
        raise ValueError(f"{len(vs)} variables exceed the oracle cap of {cap}")
    for bits in itertools.product((False, True), repeat=len(vs)):
        yield Assignment(dict(zip(vs, bits)))


def _clauses(f) -> list[Clause]:
    return [c if isinstance(c, Clause) else Clause(c) for c in f]


def oracle_sat(f, cap: int = ORACLE_CAP) -> bool:
    cs = _clauses(f)
    return any(all(evaluate(i, c) for c in cs) for i in all_models(variables(cs), cap))


def oracle_entails(f, c, cap: int = ORACLE_CAP) -> bool:
    cs = _clauses(f)
    c = c if isinstance(c, Clause) else Clause(c)
    for i in all_models(variables(cs) | variables([c]), cap):
        if all(evaluate(i, d) for d in cs) and not evaluate(i, c):
            return False
    return True


def oracle_sat_equiv(f, g, cap: int = ORACLE_CAP) -> bool:
    return oracle_sat(f, cap) == oracle_sat(g, cap)


class ClauseDb:
    """Identifier-indexed multiset of clauses with active flags.

    Identifiers start at 1 and are never reused.  The content index only
    tracks active entries.
    """

    def __init__(self, clauses: Iterable[Clause] = ()):
        self._clauses: list[Clause | None] = [None]
        self._active: list[bool] = [False]
        self._index: dict[Clause, list[int]] = {}
        for c in clauses:
            self.add(c)

    def add(self, clause: Clause) -> int:
        cid = len(self._clauses)
        self._clauses.append(clause)
        self._active.append(True)
        self._index.setdefault(clause, []).append(cid)
        return cid

    def __getitem__(self, cid: int) -> Clause:
        c = self._clauses[cid] if 0 < cid < len(self._clauses) else None
        if c is None:
            raise KeyError(cid)
        return c

    def __len__(self) -> int:
        return len(self._clauses) - 1

    def is_active(self, cid: int) -> bool:
        return 0 < cid < len(self._active) and self._active[cid]

    def deactivate(self, cid: int) -> None:
        if not self._active[cid]:
            raise ValueError(f"clause {cid} is not active")
        self._active[cid] = False
        ids = self._index[self._clauses[cid]]
        ids.remove(cid)
        if not ids:
            del self._index[self._clauses[cid]]

    def activate(self, cid: int) -> None:
        if self._active[cid]:
            raise ValueError(f"clause {cid} is already active")
        self._active[cid] = True
        ids = self._index.setdefault(self._clauses[cid], [])
        ids.append(cid)
        ids.sort()

    def find(self, clause: Clause, exclude: Iterable[int] = ()) -> int | None:
        """Lowest active identifier holding ``clause``, skipping ``exclude``."""
        ids = self._index.get(clause)
        if not ids:
            return None
        if not exclude:
            return ids[0]
        ex = set(exclude)
        return next((i for i in ids if i not in ex), None)

    def active_ids(self) -> list[int]:
        return [i for i in range(1, len(self._active)) if self._active[i]]

    def active(self) -> dict[int, Clause]:
        return {i: self._clauses[i] for i in range(1, len(self._active)) if self._active[i]}

    def clauses(self) -> list[Clause]:
        return [self._clauses[i] for i in self.active_ids()]

    def copy(self) -> "ClauseDb":
        db = ClauseDb.__new__(ClauseDb)
        db._clauses = list(self._clauses)
        db._active = list(self._active)
        db._index = {k: list(v) for k, v in self._index.items()}
        return db
