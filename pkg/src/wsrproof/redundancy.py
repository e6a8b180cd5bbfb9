"""RAT, PR, SR and WSR checks with per-clause certificates."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

from .formula import TAUTOLOGY, Clause, ClauseDb, normalize_clause
from .propagation import Propagator, rup_with
from .substitution import TRIVIALIZED, Substitution, from_cube, reduct_clause, trivializes


class Outcome(enum.Enum):
    TRIVIALIZED = "trivialized"
    ENTAILED = "entailed-by-negated-clause"
    RUP = "rup"
    FAILED = "failed"


@dataclass(frozen=True)
class ConditionResult:
    outcome: Outcome
    premises: frozenset[int] = frozenset()

    @property
    def ok(self) -> bool:
        return self.outcome is not Outcome.FAILED


@dataclass
class Certificate:
    """Outcome of a redundancy check.

    ``results`` maps clause ids of the database to their condition result;
    ``own`` is the result for the introduced clause itself (WSR only).
    On rejection ``reason`` names the failed requirement, ``failed`` the
    offending clause id (``0`` for the introduced clause) and
    ``failed_target`` the clause that was not RUP.
    """

    kind: str
    clause: Clause
    witness: Substitution
    delta: frozenset[int] = frozenset()
    results: dict[int, ConditionResult] = field(default_factory=dict)
    own: ConditionResult | None = None
    reason: str | None = None
    failed: int | None = None
    failed_clause: Clause | None = None
    failed_target: Clause | None = None

    @property
    def ok(self) -> bool:
        return self.reason is None

    def __bool__(self) -> bool:
        return self.ok

    def premises(self) -> set[int]:
        out: set[int] = set()
        for r in self.results.values():
            out |= r.premises
        if self.own is not None:
            out |= self.own.premises
        return out


class RupOracle:
    """Cached RUP queries against one database snapshot.

    Exact-content lookups short-circuit the common case where the queried
    clause (or the queried clause without the introduced clause's literals)
    is already present; the premise is then that single clause.
    """

    def __init__(self, db: ClauseDb, priority: Iterable[int] | None = None):
        self.db = db
        self._priority = None if priority is None else frozenset(priority)
        self._prop: Propagator | None = None
        self.checks = 0

    def _propagator(self) -> Propagator:
        if self._prop is None:
            self._prop = Propagator(self.db.active(), self._priority)
        return self._prop

    def lookup(self, candidates: Iterable[Clause]) -> int | None:
        for cand in candidates:
            cid = self.db.find(cand)
            if cid is not None:
                return cid
        return None

    def rup(self, target: Clause, hint: Clause | None = None) -> tuple[bool, frozenset[int]]:
        self.checks += 1
        cands = [target] if hint is None else [target, hint]
        cid = self.lookup(cands)
        if cid is not None:
            return True, frozenset((cid,))
        return rup_with(self._propagator(), target)


def _oracle(db) -> RupOracle:
    return db if isinstance(db, RupOracle) else RupOracle(db)


def check_condition(db, c: Clause, s: Substitution, d: Clause) -> ConditionResult:
    """Classify ``d`` against the per-clause condition for introducing ``c`` upon ``s``."""
    red = reduct_clause(s, d)
    if red is TRIVIALIZED:
        return ConditionResult(Outcome.TRIVIALIZED)
    neg = {-l for l in c}
    if any(l in neg for l in red):
        return ConditionResult(Outcome.ENTAILED)
    target = normalize_clause(list(c) + list(red))
    ok, prem = _oracle(db).rup(target, red)
    if ok:
        return ConditionResult(Outcome.RUP, prem)
    return ConditionResult(Outcome.FAILED)


def _conditions(oracle: RupOracle, c: Clause, s: Substitution, items: list, jobs: int = 1):
    """Yield ``(cid, result)`` in id order, stopping after the first failure.

    With ``jobs > 1`` the items are split into contiguous chunks, each checked
    by its own oracle on a worker thread; the database must not change meanwhile.
    """
    if jobs <= 1 or len(items) < 2 * jobs:
        for cid, d in items:
            r = check_condition(oracle, c, s, d)
            yield cid, r
            if not r.ok:
                return
        return
    size = -(-len(items) // jobs)
    chunks = [items[k:k + size] for k in range(0, len(items), size)]

    def work(chunk):
        o = RupOracle(oracle.db)
        out = []
        for cid, d in chunk:
            r = check_condition(o, c, s, d)
            out.append((cid, r))
            if not r.ok:
                break
        return out, o.checks

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        done = list(pool.map(work, chunks))
    for part, checks in done:
        oracle.checks += checks
        for cid, r in part:
            yield cid, r
            if not r.ok:
                return


def _reject(cert: Certificate, reason: str, failed: int | None = None, clause: Clause | None = None) -> Certificate:
    cert.reason = reason
    cert.failed = failed
    cert.failed_clause = clause
    if clause is not None and cert.kind != "rat":
        red = reduct_clause(cert.witness, clause)
        if red is not TRIVIALIZED:
            cert.failed_target = normalize_clause(list(cert.clause) + list(red))
    return cert


def check_rat(db, c: Clause, lit: int) -> Certificate:
    oracle = _oracle(db)
    cert = Certificate("rat", c, from_cube([lit]))
    if lit not in c:
        return _reject(cert, f"witness literal {lit} not in clause")
    for cid, d in oracle.db.active().items():
        if -lit not in d:
            continue
        res = normalize_clause([l for l in c] + [l for l in d if l != -lit])
        if res is TAUTOLOGY:
            cert.results[cid] = ConditionResult(Outcome.ENTAILED)
            continue
        ok, prem = oracle.rup(res)
        if not ok:
            cert.results[cid] = ConditionResult(Outcome.FAILED)
            _reject(cert, "resolvent is not RUP", cid, d)
            cert.failed_target = res
            return cert
        cert.results[cid] = ConditionResult(Outcome.RUP, prem)
    return cert


def check_pr(db, c: Clause, q: Iterable[int], jobs: int = 1) -> Certificate:
    """PR check; propagation runs over the full database with ``¬c`` assumed."""
    oracle = _oracle(db)
    q = tuple(q)
    s = from_cube(q)
    cert = Certificate("pr", c, s)
    if not set(q) & set(c):
        return _reject(cert, "witness cube does not intersect the clause")
    for cid, r in _conditions(oracle, c, s, list(oracle.db.active().items()), jobs):
        if r.outcome is Outcome.TRIVIALIZED:
            continue
        cert.results[cid] = r
        if not r.ok:
            return _reject(cert, "reduct is not RUP", cid, oracle.db[cid])
    return cert


def check_sr(db, c: Clause, s: Substitution, jobs: int = 1) -> Certificate:
    oracle = _oracle(db)
    cert = Certificate("sr", c, s)
    if not trivializes(s, c):
        return _reject(cert, "witness does not trivialize the clause", 0, c)
    for cid, r in _conditions(oracle, c, s, list(oracle.db.active().items()), jobs):
        cert.results[cid] = r
        if not r.ok:
            return _reject(cert, "condition fails", cid, oracle.db[cid])
    return cert


def check_wsr(db, c: Clause, s: Substitution, delta: Iterable[int] = (), jobs: int = 1) -> Certificate:
    """WSR check modulo ``delta``; RUP checks still use the clauses in ``delta``."""
    oracle = _oracle(db)
    delta = frozenset(delta)
    for cid in delta:
        if not oracle.db.is_active(cid):
            raise ValueError(f"modulo clause {cid} is not an active clause")
    cert = Certificate("wsr", c, s, delta)
    cert.own = check_condition(oracle, c, s, c)
    if not cert.own.ok:
        return _reject(cert, "condition fails on the introduced clause", 0, c)
    items = [(cid, d) for cid, d in oracle.db.active().items() if cid not in delta]
    for cid, r in _conditions(oracle, c, s, items, jobs):
        cert.results[cid] = r
        if not r.ok:
            return _reject(cert, "condition fails", cid, oracle.db[cid])
    return cert


def replay(db: ClauseDb, cert: Certificate) -> bool:
    """Re-validate every RUP result of ``cert`` using only its recorded premises."""
    from .propagation import is_rup

    pairs = list(cert.results.items())
    if cert.own is not None:
        pairs.append((0, cert.own))
    for cid, r in pairs:
        d = cert.clause if cid == 0 else db[cid]
        if r.outcome is Outcome.FAILED:
            return False
        if r.outcome is not Outcome.RUP:
            if check_condition(RupOracle(ClauseDb()), cert.clause, cert.witness, d).outcome is not r.outcome:
                return False
            continue
        red = reduct_clause(cert.witness, d)
        target = normalize_clause(list(cert.clause) + list(red))
        ok, _ = is_rup({p: db[p] for p in r.premises}, target)
        if not ok:
            return False
    return True
