"""Unit propagation, RUP checks and subsumption-merge chains."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .formula import Clause, ClauseDb, resolve, var


@dataclass
class Trail:
    """Assigned literals in order, each with its reason clause id (``None`` for assumptions)."""

    steps: list[tuple[int, int | None]] = field(default_factory=list)
    conflict: int | None = None

    @property
    def literals(self) -> list[int]:
        return [l for l, _ in self.steps]


@dataclass
class Chain:
    """Subsumption-merge chain: ``premises[0] ⊆ derived[0]``, then one merge per premise."""

    premises: list[int]
    derived: list[Clause]
    pivots: list[int]

    @property
    def conclusion(self) -> Clause:
        return self.derived[-1]


class Propagator:
    """Two-watched-literal propagator over a fixed clause snapshot.

    With ``priority`` given, clauses in it form the first tier: propagation
    runs that tier to fixpoint and only then takes a single implication from
    the remaining clauses (the one with the lowest id) before returning to
    the first tier.  A context
    may be reused across calls; watch positions persist between them.
    """

    def __init__(self, clauses: Mapping[int, Clause], priority: Iterable[int] | None = None):
        self.clauses = clauses
        prio = None if priority is None else set(priority)
        ntiers = 1 if prio is None else 2
        self._lits: dict[int, list[int]] = {}
        self._units: list[list[int]] = [[] for _ in range(ntiers)]
        self._empty: list[list[int]] = [[] for _ in range(ntiers)]
        self._watch: list[dict[int, list[int]]] = [{} for _ in range(ntiers)]
        for cid in sorted(clauses):
            c = clauses[cid]
            t = 0 if prio is None or cid in prio else 1
            if len(c) == 0:
                self._empty[t].append(cid)
            elif len(c) == 1:
                self._units[t].append(cid)
            else:
                lits = list(c)
                self._lits[cid] = lits
                w = self._watch[t]
                w.setdefault(lits[0], []).append(cid)
                w.setdefault(lits[1], []).append(cid)
        self.ntiers = ntiers

    def propagate(self, assumptions: Iterable[int] = ()) -> Trail:
        true: set[int] = set()
        steps: list[tuple[int, int | None]] = []
        for a in assumptions:
            if a in true:
                continue
            if -a in true:
                raise ValueError("contradictory assumptions")
            true.add(a)
            steps.append((a, None))

        for t in range(self.ntiers):
            if self._empty[t]:
                return Trail(steps, self._empty[t][0])

        clauses = self.clauses
        for cid in self._units[0]:
            l = clauses[cid][0]
            if l in true:
                continue
            if -l in true:
                return Trail(steps, cid)
            true.add(l)
            steps.append((l, cid))
        if self.ntiers == 1:
            conflict = self._scan(0, 0, true, steps, None)
            return Trail(steps, conflict)

        # second tier: collect candidate implications and take the one from
        # the lowest clause id, then return to the first tier
        pending = [(cid, clauses[cid][0]) for cid in self._units[1]]
        heapq.heapify(pending)
        heads = [0, 0]
        while True:
            conflict = self._scan(0, heads[0], true, steps, None)
            if conflict is not None:
                return Trail(steps, conflict)
            heads[0] = len(steps)
            conflict = self._scan(1, heads[1], true, steps, pending)
            if conflict is not None:
                return Trail(steps, conflict)
            heads[1] = len(steps)
            while pending:
                cid, l = heapq.heappop(pending)
                if l in true:
                    continue
                if -l in true:
                    return Trail(steps, cid)
                true.add(l)
                steps.append((l, cid))
                break
            else:
                return Trail(steps, None)

    def _scan(self, t: int, head: int, true: set[int], steps: list, pending: list | None) -> int | None:
        """Visit watches of tier ``t`` for trail literals from ``head`` on.

        Implications are assigned immediately, or queued in ``pending`` when
        given.  Returns a conflicting clause id, if any; in queueing mode the
        scan completes and the lowest conflicting id is returned.
        """
        watch = self._watch[t]
        lits = self._lits
        best = None
        while head < len(steps):
            neg = -steps[head][0]
            head += 1
            ws = watch.get(neg)
            if not ws:
                continue
            i = 0
            while i < len(ws):
                cid = ws[i]
                c = lits[cid]
                if c[0] == neg:
                    c[0], c[1] = c[1], neg
                first = c[0]
                if first in true:
                    i += 1
                    continue
                for k in range(2, len(c)):
                    if -c[k] not in true:
                        c[1], c[k] = c[k], neg
                        ws[i] = ws[-1]
                        ws.pop()
                        watch.setdefault(c[1], []).append(cid)
                        break
                else:
                    if -first in true:
                        if pending is None:
                            return cid
                        if best is None or cid < best:
                            best = cid
                    elif pending is None:
                        true.add(first)
                        steps.append((first, cid))
                    else:
                        heapq.heappush(pending, (cid, first))
                    i += 1
        return best


def _snapshot(db) -> dict[int, Clause]:
    return db.active() if isinstance(db, ClauseDb) else dict(db)


def propagate(db, assumptions: Iterable[int] = (), priority: Iterable[int] | None = None) -> Trail:
    """Propagate the active clauses of ``db`` (a ClauseDb or id→clause mapping)."""
    return Propagator(_snapshot(db), priority).propagate(assumptions)


def conflict_cone(trail: Trail, clauses: Mapping[int, Clause]) -> set[int]:
    """Clause ids reachable from the conflict through reason links."""
    if trail.conflict is None:
        return set()
    reason = {var(l): r for l, r in trail.steps}
    seen: set[int] = set()
    cone = {trail.conflict}
    stack = [trail.conflict]
    while stack:
        for l in clauses[stack.pop()]:
            v = var(l)
            if v in seen:
                continue
            seen.add(v)
            r = reason.get(v)
            if r is not None and r not in cone:
                cone.add(r)
                stack.append(r)
    return cone


def rup_with(prop: Propagator, c: Iterable[int]) -> tuple[bool, frozenset[int]]:
    trail = prop.propagate(-l for l in c)
    if trail.conflict is None:
        return False, frozenset()
    return True, frozenset(conflict_cone(trail, prop.clauses))


def is_rup(db, c: Iterable[int], priority: Iterable[int] | None = None) -> tuple[bool, frozenset[int]]:
    """Whether ``c`` is a RUP clause over ``db``, with the premises used on success."""
    return rup_with(Propagator(_snapshot(db), priority), c)


def extract_chain(trail: Trail, db, target: Iterable[int] | None = None) -> Chain:
    """Rebuild the subsumption-merge chain behind a conflicting trail.

    The chain's conclusion consists of the complements of the assumption
    literals that the conflict depends on, so it is subsumed by ``target``
    whenever the trail came from a RUP check of ``target``.
    """
    if trail.conflict is None:
        raise ValueError("trail has no conflict")
    clauses = _snapshot(db) if not isinstance(db, Mapping) else db
    cone = conflict_cone(trail, clauses)
    propagated = [(l, r) for l, r in trail.steps if r is not None and r in cone]
    implied = {l for l, _ in propagated}
    start: set[int] = set()
    for cid in cone:
        start.update(l for l in clauses[cid] if l not in implied)
    a = Clause._trusted(start)
    premises = [trail.conflict]
    derived = [a]
    pivots: list[int] = []
    for l, r in reversed(propagated):
        if -l not in a:
            continue
        a = resolve(a, clauses[r], -l)
        premises.append(r)
        derived.append(a)
        pivots.append(-l)
    if target is not None and not set(a) <= set(target):
        raise ValueError("chain conclusion is not subsumed by the target clause")
    return Chain(premises, derived, pivots)


def chain_is_valid(chain: Chain, clauses: Mapping[int, Clause]) -> bool:
    """Check the subsumption and self-subsuming-merge conditions of ``chain``."""
    if not set(clauses[chain.premises[0]]) <= set(chain.derived[0]):
        return False
    for i in range(1, len(chain.premises)):
        prev, e, l = chain.derived[i - 1], clauses[chain.premises[i]], chain.pivots[i - 1]
        if l not in prev or -l not in e:
            return False
        if not set(e) - {-l} <= set(prev):
            return False
        if resolve(prev, e, l) != chain.derived[i]:
            return False
    return True
