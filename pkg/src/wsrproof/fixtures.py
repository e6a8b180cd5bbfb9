"""Small hand-made instances used by tests, the acceptance run and the CLI demos.

Letters name variables in the order ``a b c t u v x y z`` (1 to 9).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .formula import BOT, TOP, Clause, ClauseDb
from .proofio import Delete, Instruction, Intro
from .propagation import Propagator
from .substitution import Substitution

LETTERS = "abctuvxyz"
VAR = {ch: k for k, ch in enumerate(LETTERS, 1)}


def clause(text: str) -> Clause:
    """``clause("a -c x")`` builds the clause over the letter variables."""
    lits = []
    for tok in text.split():
        neg = tok.startswith("-")
        lits.append(-VAR[tok[1:]] if neg else VAR[tok])
    return Clause(lits)


def rup_refutation(clauses: Sequence[Clause], order: Sequence[int] | None = None) -> list[Clause]:
    """A RUP refutation read off a DPLL search tree.

    Each closed node contributes the negation of its decisions, emitted
    after both children, so every clause is RUP when it appears and the
    last one is the empty clause.  ``clauses`` must be unsatisfiable.
    """
    db = ClauseDb(clauses)
    out: list[Clause] = []

    def pick(trail_lits: set[int]) -> int:
        vs = order if order is not None else sorted({abs(l) for c in clauses for l in c})
        for v in vs:
            if v not in trail_lits and -v not in trail_lits:
                return v
        raise ValueError("formula is satisfiable")

    def refute(decisions: list[int]) -> None:
        trail = Propagator(db.active()).propagate(decisions)
        if trail.conflict is None:
            v = pick(set(trail.literals))
            for lit in (v, -v):
                refute(decisions + [lit])
        c = Clause(-l for l in decisions)
        out.append(c)
        db.add(c)

    refute([])
    return out


@dataclass
class CoreExample:
    """Backward checking instance where WSR marks fewer clauses than the SR fixpoint."""

    marked: list[Clause]
    delta: list[Clause]
    gamma: list[Clause]
    clause: Clause
    witness: Substitution
    proof: list[Instruction] = field(default_factory=list)

    @property
    def formula(self) -> list[Clause]:
        return self.marked + self.delta + self.gamma


def core_example() -> CoreExample:
    m = [clause(s) for s in (
        "a -c x", "-a -u -v -x", "c -u -v x", "a -x -y -z", "a -c -x y", "-a b u",
        "c u", "-u y z", "-a -b -c", "c -x -z", "-c -x z", "c -x -y", "-a b -u v -x",
    )]
    delta = [clause(s) for s in ("b -u x", "-b -t v x -y", "-b t v x -z", "t v -y z", "-t v y -z")]
    gamma = [clause("-b x -u y -z")]
    c = clause("x -u")
    sigma = Substitution({VAR["x"]: TOP, VAR["a"]: TOP, VAR["v"]: BOT, VAR["t"]: TOP})
    ex = CoreExample(m, delta, gamma, c, sigma)
    # the SR introduction comes first; the rest refutes M and C by RUP only,
    # after deleting the clauses outside M so that none of them is marked later
    tail = rup_refutation(m + [c])
    ex.proof = [Intro(c, sigma)] + [Delete(d) for d in delta + gamma] + [Intro(t) for t in tail]
    return ex


@dataclass
class LemmaExample:
    """Forward instance where RUP lemmas make a clause WSR but not SR."""

    formula: list[Clause]
    lemmas: list[Clause]
    clause: Clause
    witness: Substitution
    proof: list[Instruction]
    sr_failure: Clause


def lemma_example() -> LemmaExample:
    f = [clause(s) for s in (
        "a b -x y", "a b x y -z", "a b x z", "-a u v", "-c u v", "a c -b y", "a c b -y",
        "c -b -y -z", "c -b x -y z", "c -b -x z", "-u v", "u -v", "-u -v",
    )]
    l1, l2 = clause("-a y v"), clause("-a y")
    c = clause("x")
    sigma = Substitution({VAR["x"]: TOP, VAR["y"]: VAR["z"], VAR["z"]: VAR["y"]})
    proof: list[Instruction] = [Intro(l1), Intro(l2), Intro(c, sigma, (l1, l2))]
    return LemmaExample(f, [l1, l2], c, sigma, proof, clause("-a x z"))
