"""Pigeonhole formulas and their short refutations.

Variables are numbered once for the largest instance, ``p(i, j) =
(i - 1) * (n - 1) + j``, so every level of the recursive proof shares one
universe.
"""

from __future__ import annotations

from itertools import combinations

from .formula import Clause
from .proofio import Instruction, Intro
from .substitution import Substitution, from_cube


def php_var(i: int, j: int, n: int) -> int:
    if not (1 <= i <= n and 1 <= j <= n - 1):
        raise IndexError(f"p({i},{j}) undefined for {n} pigeons")
    return (i - 1) * (n - 1) + j


def hole_clause(i: int, k: int, n: int) -> Clause:
    """H_ik: pigeon ``i`` sits in one of the holes ``1..k-1``."""
    return Clause(php_var(i, j, n) for j in range(1, k))


def pair_clause(i: int, j: int, h: int, n: int) -> Clause:
    """P_ijh: pigeons ``i`` and ``j`` do not share hole ``h``."""
    return Clause((-php_var(i, h, n), -php_var(j, h, n)))


def last_hole_clause(i: int, k: int, n: int) -> Clause:
    """R_ik: pigeon ``i`` is not in hole ``k-1``."""
    return Clause((-php_var(i, k - 1, n),))


def lemma_clause(i: int, j: int, k: int, n: int) -> Clause:
    """L_ijk: if pigeon ``i`` is in hole ``k-1`` then pigeon ``k`` is not in hole ``j``."""
    return Clause((-php_var(i, k - 1, n), -php_var(k, j, n)))


def lemma_cube(i: int, j: int, k: int, n: int) -> tuple[int, ...]:
    """The PR witness for L_ijk: move pigeon ``i`` to hole ``j`` and pigeon ``k`` to hole ``k-1``."""
    return (-php_var(i, k - 1, n), -php_var(k, j, n), php_var(i, j, n), php_var(k, k - 1, n))


def php_level(k: int, n: int) -> list[Clause]:
    """Pi_k over the variables of the ``n``-pigeon instance."""
    out = [hole_clause(i, k, n) for i in range(1, k + 1)]
    for h in range(1, k):
        out += [pair_clause(i, j, h, n) for i, j in combinations(range(1, k + 1), 2)]
    return out


def php_formula(n: int) -> list[Clause]:
    if n < 1:
        raise ValueError("need at least one pigeon")
    return php_level(n, n)


def num_vars(n: int) -> int:
    return n * (n - 1)


def php_swap(i: int, k: int, n: int | None = None) -> Substitution:
    """Swap pigeons ``i`` and ``k`` over the holes ``1..k-1``."""
    n = k if n is None else n
    if not 1 <= i < k <= n:
        raise IndexError(f"cannot swap pigeons {i} and {k} of {n}")
    m = {}
    for j in range(1, k):
        a, b = php_var(i, j, n), php_var(k, j, n)
        m[a], m[b] = b, a
    return Substitution(m)


def _level_diff(k: int, n: int) -> list[Clause]:
    lower = set(php_level(k - 1, n))
    return [c for c in php_level(k, n) if c not in lower]


def php_wsr_proof(n: int) -> list[Instruction]:
    """The quadratic WSR refutation: per level, swap lemmas then shrink the holes."""
    if n < 1:
        raise ValueError("need at least one pigeon")
    proof: list[Instruction] = []
    for k in range(n, 1, -1):
        for i in range(1, k):
            proof.append(Intro(last_hole_clause(i, k, n), php_swap(i, k, n)))
        for i in range(1, k - 1):
            proof.append(Intro(hole_clause(i, k - 1, n), modulo=(last_hole_clause(i, k, n),)))
        final = (last_hole_clause(1, k, n), *_level_diff(k, n))
        proof.append(Intro(hole_clause(k - 1, k - 1, n), modulo=final))
    return proof


def php_pr_proof(n: int) -> list[Instruction]:
    """The cubic PR-style refutation built from L lemmas.

    Clauses no longer needed at the end of a level are deleted through the
    modulo blocks of that level's last instruction.
    """
    if n < 2:
        raise ValueError("need at least two pigeons")
    proof: list[Instruction] = []
    for k in range(n, 1, -1):
        lemmas = []
        for i in range(1, k):
            for j in range(1, k - 1):
                c = lemma_clause(i, j, k, n)
                lemmas.append(c)
                proof.append(Intro(c, from_cube(lemma_cube(i, j, k, n))))
        rs = [last_hole_clause(i, k, n) for i in range(1, k)]
        proof += [Intro(r) for r in rs]
        for i in range(1, k - 1):
            proof.append(Intro(hole_clause(i, k - 1, n)))
        proof.append(Intro(hole_clause(k - 1, k - 1, n), modulo=(*lemmas, *rs, *_level_diff(k, n))))
    return proof
