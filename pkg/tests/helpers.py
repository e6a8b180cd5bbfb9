"""Independent reference implementations and random generators for the tests.

Nothing here reuses the watched-literal propagator or the redundancy code;
the oracles work straight from the definitions.
"""

from __future__ import annotations

import random
from itertools import product

from wsrproof.formula import BOT, TOP, Assignment, Clause, all_models, evaluate
from wsrproof.substitution import Substitution


def naive_propagate(clauses, assumptions=()):
    """Counting unit propagation by repeated full scans.

    Returns ``(assigned literal set, conflict flag)``.
    """
    val = set()
    for a in assumptions:
        if -a in val:
            return val, True
        val.add(a)
    changed = True
    while changed:
        changed = False
        for c in clauses:
            if any(l in val for l in c):
                continue
            free = [l for l in c if -l not in val]
            if not free:
                return val, True
            if len(free) == 1:
                val.add(free[0])
                changed = True
    return val, False


def naive_rup(clauses, c) -> bool:
    return naive_propagate(list(clauses), [-l for l in c])[1]


def naive_condition(clauses, c, s, d) -> bool:
    """SR/WSR per-clause condition computed directly from the definitions."""
    imgs = [s(l) for l in d]
    if TOP in imgs:
        return True
    lits = [a for a in imgs if a is not BOT]
    if any(-a in lits for a in lits):
        return True
    if any(-l in lits for l in c):
        return True
    return naive_rup(clauses, set(c) | set(lits))


def naive_wsr(clauses, c, s, delta=()) -> bool:
    """``clauses`` is the full formula; ``delta`` lists positions exempt from checking."""
    ex = set(delta)
    targets = [d for k, d in enumerate(clauses) if k not in ex] + [c]
    return all(naive_condition(clauses, c, s, d) for d in targets)


def naive_sr(clauses, c, s) -> bool:
    imgs = [s(l) for l in c]
    triv = TOP in imgs or any(-a in imgs for a in imgs if a not in (TOP, BOT))
    return triv and all(naive_condition(clauses, c, s, d) for d in clauses)


def random_clause(rng: random.Random, nvars: int, maxlen: int = 4, minlen: int = 1) -> Clause:
    k = rng.randint(minlen, min(maxlen, nvars))
    vs = rng.sample(range(1, nvars + 1), k)
    return Clause(v if rng.random() < 0.5 else -v for v in vs)


def random_formula(rng: random.Random, nvars: int, nclauses: int, maxlen: int = 4) -> list[Clause]:
    return [random_clause(rng, nvars, maxlen) for _ in range(nclauses)]


def random_substitution(rng: random.Random, nvars: int, density: float = 0.5) -> Substitution:
    m = {}
    for v in range(1, nvars + 1):
        if rng.random() >= density:
            continue
        r = rng.random()
        if r < 0.3:
            m[v] = TOP if rng.random() < 0.5 else BOT
        else:
            w = rng.randint(1, nvars)
            m[v] = w if rng.random() < 0.5 else -w
    return Substitution(m)


def models_of(clauses, universe):
    return [i for i in all_models(universe) if evaluate(i, clauses)]


def compose_pointwise(s, t, universe):
    return {a: s(t(a)) for v in universe for a in (v, -v, TOP, BOT)}


def random_unsat(rng: random.Random, nvars: int, nclauses: int, maxlen: int = 3):
    """Random formula that is unsatisfiable (brute force), retrying as needed."""
    from wsrproof.formula import oracle_sat

    while True:
        f = random_formula(rng, nvars, nclauses, maxlen)
        if not oracle_sat(f):
            return f


def all_assignments(nvars: int):
    for bits in product((False, True), repeat=nvars):
        yield Assignment({v: b for v, b in zip(range(1, nvars + 1), bits)})


def random_wsr_refutation(rng: random.Random, nvars: int, nclauses: int, intros: int = 3):
    """An unsatisfiable formula and a refutation opening with accepted WSR steps.

    Candidate (clause, witness, modulo) triples are drawn at random and kept
    when the checker accepts them; a RUP refutation of what remains follows.
    """
    from wsrproof.fixtures import rup_refutation
    from wsrproof.formula import ClauseDb, oracle_sat
    from wsrproof.proofio import Intro
    from wsrproof.redundancy import check_wsr

    f = random_unsat(rng, nvars, nclauses)
    db = ClauseDb(f)
    proof = []
    tries = 0
    while len(proof) < intros and tries < 40:
        tries += 1
        c = random_clause(rng, nvars, 3)
        s = random_substitution(rng, nvars)
        ids = db.active_ids()
        delta = [i for i in ids if rng.random() < 0.2]
        if c in (db[i] for i in ids) or not check_wsr(db, c, s, delta).ok:
            continue
        modulo = tuple(db[i] for i in delta)
        # modulo clauses are resolved by content, so duplicates would be ambiguous
        if len(set(modulo)) != len(modulo) or any(db.find(m, delta) is not None for m in modulo):
            continue
        # deleting the modulo set may make the formula satisfiable again
        rest = [d for i, d in db.active().items() if i not in delta] + [c]
        if oracle_sat(rest):
            continue
        proof.append(Intro(c, s, modulo))
        db.add(c)
        for i in delta:
            db.deactivate(i)
    tail = rup_refutation(list(db.active().values()))
    proof += [Intro(t) for t in tail]
    return f, proof


# one "PASS n: ..." / "FAIL n: ..." line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def naive_check(formula, proof) -> bool:
    """Forward check straight from the definitions, for comparison with the real checker.

    Modulo clauses are matched by content to the first active copy, as the
    checker does; every step must be valid, a refutation is not required.
    """
    from wsrproof.proofio import Delete

    active = list(formula)
    if Clause() in active:
        return True
    for ins in proof:
        if isinstance(ins, Delete):
            if ins.clause in active:
                active.remove(ins.clause)
            continue
        delta: list[int] = []
        for m in ins.modulo:
            pos = next((k for k, d in enumerate(active) if d == m and k not in delta), None)
            if pos is not None:
                delta.append(pos)
        if ins.witness.is_identity():
            if not naive_rup(active, ins.clause):
                return False
        elif not naive_wsr(active, ins.clause, ins.witness, delta):
            return False
        active = [d for k, d in enumerate(active) if k not in delta] + [ins.clause]
        if len(ins.clause) == 0:
            return True
    return True


def random_core_instance(rng: random.Random):
    """An instance shaped like the core example: one SR step, then the extra clauses go.

    ``m`` is satisfiable but not together with ``c``; ``c`` is SR over
    ``m`` plus random extra clauses, which are deleted before a RUP
    refutation of ``m`` and ``c``.
    """
    from wsrproof.fixtures import rup_refutation
    from wsrproof.formula import ClauseDb, oracle_sat
    from wsrproof.proofio import Delete, Intro
    from wsrproof.redundancy import check_sr

    while True:
        n = rng.randint(4, 7)
        m = random_formula(rng, n, rng.randint(4, 12), 3)
        c = random_clause(rng, n, 3)
        if not oracle_sat(m) or oracle_sat(m + [c]):
            continue
        extra = [d for d in random_formula(rng, n, rng.randint(3, 10), 3) if d not in m]
        s = random_substitution(rng, n, 0.6)
        f = m + extra
        if c in f or not check_sr(ClauseDb(f), c, s).ok:
            continue
        proof = [Intro(c, s)] + [Delete(d) for d in extra] + [Intro(t) for t in rup_refutation(m + [c])]
        return f, proof
