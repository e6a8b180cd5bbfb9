"""Forward and backward proof checking, cores and trimmed proofs."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import Clause, ClauseDb
from .proofio import Delete, Instruction, Intro
from .propagation import Propagator, rup_with
from .redundancy import (
    Certificate,
    ConditionResult,
    Outcome,
    RupOracle,
    check_condition,
    check_pr,
    check_rat,
    check_sr,
    check_wsr,
)

log = logging.getLogger(__name__)

MODES = ("rup", "rat", "pr", "sr", "wsr")


class Strategy(enum.Enum):
    WSR_DELTA = "wsr"
    SR_FIXPOINT = "sr-fixpoint"


@dataclass
class CheckStats:
    rup_checks: int = 0
    clauses_marked: int = 0
    core_size: int = 0
    trimmed_length: int = 0
    wall_time: float = 0.0

    def lines(self) -> list[str]:
        return [
            f"rup_checks {self.rup_checks}",
            f"clauses_marked {self.clauses_marked}",
            f"core_size {self.core_size}",
            f"trimmed_length {self.trimmed_length}",
            f"wall_time {self.wall_time:.6f}",
        ]


@dataclass
class StepRecord:
    """Identifiers touched by one instruction during replay."""

    index: int
    instruction: Instruction
    clause_id: int | None = None
    delta_ids: tuple[int, ...] = ()
    certificate: Certificate | None = None


@dataclass
class CheckResult:
    ok: bool
    refutation: bool
    db: ClauseDb
    num_input: int
    records: list[StepRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    failed_index: int | None = None
    message: str | None = None
    failed_clause: Clause | None = None
    failed_target: Clause | None = None
    stats: CheckStats = field(default_factory=CheckStats)

    @property
    def certificates(self) -> list[Certificate]:
        return [r.certificate for r in self.records if r.certificate is not None]


def _resolve_delta(db: ClauseDb, modulo: Sequence[Clause], warnings: list[str], index: int) -> tuple[int, ...]:
    chosen: list[int] = []
    for m in modulo:
        cid = db.find(m, chosen)
        if cid is None:
            warnings.append(f"instruction {index}: modulo clause {m!r} is not active, ignored")
            continue
        chosen.append(cid)
    return tuple(chosen)


def _validate(oracle: RupOracle, ins: Intro, delta: tuple[int, ...], mode: str, jobs: int = 1) -> Certificate:
    c, s = ins.clause, ins.witness
    if s.is_identity():
        ok, prem = oracle.rup(c)
        cert = Certificate("rup", c, s, frozenset(delta))
        cert.own = ConditionResult(Outcome.RUP, prem) if ok else ConditionResult(Outcome.FAILED)
        if not ok:
            cert.reason, cert.failed, cert.failed_clause = "clause is not RUP", 0, c
            cert.failed_target = c
        return cert
    if mode == "rup":
        cert = Certificate("rup", c, s)
        cert.reason = "witness given but mode rup only allows RUP steps"
        return cert
    if mode == "wsr":
        return check_wsr(oracle, c, s, delta, jobs)
    if mode == "sr":
        return check_sr(oracle, c, s, jobs)
    if not s.is_constant():
        cert = Certificate(mode, c, s)
        cert.reason = f"mode {mode} requires a cube witness"
        return cert
    cube = s.to_cube()
    if mode == "pr":
        return check_pr(oracle, c, cube, jobs)
    if len(cube) != 1:
        cert = Certificate(mode, c, s)
        cert.reason = "mode rat requires a single-literal witness"
        return cert
    return check_rat(oracle, c, cube[0])


def check_forward(
    formula: Iterable[Clause],
    proof: Sequence[Instruction],
    mode: str = "wsr",
    keep_certificates: bool = False,
    jobs: int = 1,
) -> CheckResult:
    """Validate every instruction in order against the accumulated formula.

    Stops at the first introduction of the empty clause.  In modes other
    than ``wsr`` the modulo set is not exempt from checking; it is simply
    deleted after the introduction.  ``jobs`` spreads the per-clause
    conditions of one instruction over that many threads.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    db = ClauseDb(formula)
    res = CheckResult(True, False, db, len(db))
    if db.find(Clause()) is not None:
        res.refutation = True
        res.stats.wall_time = time.perf_counter() - t0
        return res
    for k, ins in enumerate(proof):
        rec = StepRecord(k, ins)
        res.records.append(rec)
        if isinstance(ins, Delete):
            cid = db.find(ins.clause)
            if cid is None:
                res.warnings.append(f"instruction {k}: deleted clause {ins.clause!r} is not active, ignored")
            else:
                db.deactivate(cid)
                rec.delta_ids = (cid,)
            continue
        delta = _resolve_delta(db, ins.modulo, res.warnings, k)
        oracle = RupOracle(db)
        cert = _validate(oracle, ins, delta, mode, jobs)
        res.stats.rup_checks += oracle.checks
        if not cert.ok:
            res.ok = False
            res.failed_index = k
            res.message = cert.reason
            res.failed_clause = cert.failed_clause
            res.failed_target = cert.failed_target
            if keep_certificates:
                rec.certificate = cert
            break
        if keep_certificates:
            rec.certificate = cert
        rec.delta_ids = delta
        rec.clause_id = db.add(ins.clause)
        for cid in delta:
            db.deactivate(cid)
        if len(ins.clause) == 0:
            res.refutation = True
            break
    res.stats.wall_time = time.perf_counter() - t0
    return res


@dataclass
class BackwardResult:
    ok: bool
    refutation: bool
    core: list[Clause] = field(default_factory=list)
    core_ids: list[int] = field(default_factory=list)
    trimmed: list[Instruction] = field(default_factory=list)
    stats: CheckStats = field(default_factory=CheckStats)
    warnings: list[str] = field(default_factory=list)
    failed_index: int | None = None
    message: str | None = None
    marked_history: list[frozenset[int]] = field(default_factory=list)


class _Marker:
    """RUP checks preferring marked clauses.

    Order of attempts: an exact marked match, propagation over the marked
    clauses only (if ``restricted_first``), any exact match, and finally
    propagation over the whole active database with marked clauses first.
    """

    def __init__(self, db: ClauseDb, marked: set[int], restricted_first: bool, stats: CheckStats):
        self.db = db
        self.marked = marked
        self.restricted_first = restricted_first
        self.stats = stats
        self.reset()

    def reset(self) -> None:
        self._full: Propagator | None = None
        self._full_key: frozenset[int] | None = None
        self._core: Propagator | None = None
        self._core_key: frozenset[int] | None = None

    def _core_prop(self) -> Propagator:
        key = frozenset(self.marked)
        if self._core is None or self._core_key != key:
            self._core = Propagator({i: self.db[i] for i in key})
            self._core_key = key
        return self._core

    def _full_prop(self) -> Propagator:
        key = frozenset(self.marked)
        if self._full is None or self._full_key != key:
            self._full = Propagator(self.db.active(), key)
            self._full_key = key
        return self._full

    def rup(self, target: Clause, hint: Clause | None = None) -> tuple[bool, frozenset[int]]:
        self.stats.rup_checks += 1
        cands = (target,) if hint is None else (target, hint)
        for cand in cands:
            for cid in self.db._index.get(cand, ()):
                if cid in self.marked:
                    return True, frozenset((cid,))
        if self.restricted_first:
            ok, prem = rup_with(self._core_prop(), target)
            if ok:
                return ok, prem
        for cand in cands:
            cid = self.db.find(cand)
            if cid is not None:
                return True, frozenset((cid,))
        return rup_with(self._full_prop(), target)


class _MarkedOracle(RupOracle):
    def __init__(self, marker: _Marker):
        super().__init__(marker.db)
        self.marker = marker

    def rup(self, target, hint=None):
        self.checks += 1
        return self.marker.rup(target, hint)


def check_backward(
    formula: Sequence[Clause],
    proof: Sequence[Instruction],
    strategy: Strategy | str = Strategy.WSR_DELTA,
    restricted_first: bool = True,
    record_history: bool = False,
) -> BackwardResult:
    """Check a refutation from the empty clause backwards, marking what is used.

    Unmarked introductions are skipped.  For a marked introduction with a
    witness, the conditions are checked for the marked clauses and the
    introduced clause; clauses that only the full database could supply
    become marked.  ``sr-fixpoint`` then also checks those newly marked
    clauses (except the instruction's own modulo set) until nothing new is
    marked.
    """
    strategy = Strategy(strategy)
    t0 = time.perf_counter()
    out = BackwardResult(False, False)
    db = ClauseDb(formula)
    num_input = len(db)

    # forward replay without validation
    records: list[StepRecord] = []
    end = None
    if db.find(Clause()) is not None:
        end = -1
    else:
        for k, ins in enumerate(proof):
            rec = StepRecord(k, ins)
            records.append(rec)
            if isinstance(ins, Delete):
                cid = db.find(ins.clause)
                if cid is None:
                    out.warnings.append(f"instruction {k}: deleted clause {ins.clause!r} is not active, ignored")
                else:
                    db.deactivate(cid)
                    rec.delta_ids = (cid,)
                continue
            rec.delta_ids = _resolve_delta(db, ins.modulo, out.warnings, k)
            rec.clause_id = db.add(ins.clause)
            for cid in rec.delta_ids:
                db.deactivate(cid)
            if len(ins.clause) == 0:
                end = k
                break
    if end is None:
        out.message = "proof does not derive the empty clause"
        out.stats.wall_time = time.perf_counter() - t0
        return out
    out.refutation = True

    if end == -1:
        cid = db.find(Clause())
        out.ok = True
        out.core_ids = [cid]
        out.core = [Clause()]
        out.stats.core_size = out.stats.clauses_marked = 1
        out.stats.wall_time = time.perf_counter() - t0
        return out

    marked: set[int] = {records[end].clause_id}
    ever_marked = set(marked)
    keep: dict[int, frozenset[int]] = {}
    marker = _Marker(db, marked, restricted_first, out.stats)

    for rec in reversed(records):
        ins = rec.instruction
        marker.reset()
        if isinstance(ins, Delete):
            for cid in rec.delta_ids:
                db.activate(cid)
            continue
        for cid in rec.delta_ids:
            db.activate(cid)
        db.deactivate(rec.clause_id)
        if rec.clause_id not in marked:
            if record_history:
                out.marked_history.append(frozenset(marked))
            continue
        marked.discard(rec.clause_id)
        checked = set(marked)
        if ins.witness.is_identity():
            ok, prem = marker.rup(ins.clause)
            if not ok:
                out.failed_index = rec.index
                out.message = "clause is not RUP"
                return _finish(out, t0)
            marked |= prem
        else:
            oracle = _MarkedOracle(marker)
            c, s = ins.clause, ins.witness
            own = check_condition(oracle, c, s, c)
            if not own.ok:
                out.failed_index = rec.index
                out.message = "condition fails on the introduced clause"
                return _finish(out, t0)
            newly = set(own.premises - marked)
            marked |= own.premises
            todo = sorted(checked)
            exempt = set(rec.delta_ids)
            done: set[int] = set()
            while todo:
                for cid in todo:
                    r = check_condition(oracle, c, s, db[cid])
                    done.add(cid)
                    if not r.ok:
                        out.failed_index = rec.index
                        out.message = f"condition fails on clause {db[cid]!r}"
                        return _finish(out, t0)
                    newly |= r.premises - marked
                    marked |= r.premises
                if strategy is Strategy.SR_FIXPOINT:
                    todo = sorted(i for i in newly if i not in done and i not in exempt)
                    newly = set()
                else:
                    todo = []
            checked |= done
        keep[rec.index] = frozenset(checked)
        ever_marked |= marked
        if record_history:
            out.marked_history.append(frozenset(marked))

    out.ok = True
    out.core_ids = sorted(i for i in marked if i <= num_input)
    out.core = [db[i] for i in out.core_ids]
    out.trimmed = _trim(db, records, keep, out.core_ids)
    out.stats.clauses_marked = len(ever_marked)
    out.stats.core_size = len(out.core)
    out.stats.trimmed_length = len(out.trimmed)
    if record_history:
        out.marked_history.reverse()
    return _finish(out, t0)


def _finish(out: BackwardResult, t0: float) -> BackwardResult:
    out.stats.wall_time = time.perf_counter() - t0
    return out


def _trim(db: ClauseDb, records: list[StepRecord], keep: dict[int, frozenset[int]], core_ids: list[int]) -> list[Instruction]:
    """Marked introductions in order; each deletes whatever later steps do not need."""
    active = set(core_ids)
    out: list[Instruction] = []
    for rec in records:
        if rec.index not in keep:
            continue
        ins = rec.instruction
        drop = sorted(active - keep[rec.index])
        out.append(Intro(ins.clause, ins.witness, tuple(db[i] for i in drop)))
        active -= set(drop)
        active.add(rec.clause_id)
    return out


def extract_core(result: BackwardResult) -> list[Clause]:
    return list(result.core)


def emit_trimmed(result: BackwardResult) -> list[Instruction]:
    return list(result.trimmed)
