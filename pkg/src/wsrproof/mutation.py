"""Mutation clauses, their proof system and the translation of WSR proofs.

A mutation rule ``(sigma := Q)`` rewrites a model through ``sigma`` when the
model satisfies the cube ``Q`` and leaves it alone otherwise.  A mutation
clause ``prefix C`` holds in a model when ``C`` holds after applying the
prefix rules left to right.

Five inference rules are checked by :func:`verify_step`:

RES    two premises with the same prefix, resolved on the pivot
SUB    one premise whose clause is a subset of the conclusion's; with no
       premise, an axiom whose empty-prefix clause contains an input clause
TAUT   no premise; ``(sigma := ~C) C`` where ``sigma`` trivializes ``C``
INTRO  ``eps C`` and ``eps (~Q | C|sigma)`` give ``eps (sigma := Q) C``
ELIM   ``eps r C`` and ``eps r C|sigma`` give ``eps C|sigma``

The second INTRO premise is waived when ``sigma`` trivializes ``C`` or ``Q``
shares a literal with ``C|sigma``.  The first INTRO premise is waived when
every literal of ``~Q`` lies in ``C``: a model falsifying ``Q`` then already
satisfies ``C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import Assignment, Clause, Cube, evaluate, normalize_clause, resolve, TAUTOLOGY, var
from .propagation import Propagator, extract_chain
from .proofio import ParseError, format_witness, parse_witness
from .substitution import TRIVIALIZED, Substitution, apply_to_model, reduct_clause, trivializes

RULES = ("RES", "SUB", "TAUT", "INTRO", "ELIM")


@dataclass(frozen=True)
class MutationRule:
    effect: Substitution
    trigger: Cube

    def __repr__(self) -> str:
        return f"({self.effect!r} := {self.trigger!r})"


@dataclass(frozen=True)
class MutationClause:
    prefix: tuple[MutationRule, ...]
    clause: Clause

    def __repr__(self) -> str:
        return "".join(f"∇{r!r}" for r in self.prefix) + repr(self.clause)


@dataclass
class MutationStep:
    id: int
    rule: str
    premises: tuple[int, ...]
    conclusion: MutationClause
    pivot: int | None = None

    @property
    def parameter(self) -> MutationRule | None:
        """The rule introduced (TAUT, INTRO) by this step; ELIM reads it off its premises."""
        if self.rule in ("TAUT", "INTRO") and self.conclusion.prefix:
            return self.conclusion.prefix[-1]
        return None


@dataclass
class MutationProof:
    steps: list[MutationStep] = field(default_factory=list)
    conclusion: int | None = None

    def by_id(self) -> dict[int, MutationStep]:
        return {s.id: s for s in self.steps}

    def conclusion_clause(self) -> MutationClause | None:
        cid = self.conclusion if self.conclusion is not None else (self.steps[-1].id if self.steps else None)
        if cid is None:
            return None
        return self.by_id()[cid].conclusion


@dataclass(frozen=True)
class Violation:
    step: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"step {self.step}: {self.code}: {self.message}"


@dataclass
class VerifyReport:
    ok: bool
    conclusion: MutationClause | None = None
    violation: Violation | None = None


def _universe_check(i: Assignment, r: MutationRule) -> None:
    u = i.universe
    needed = set(r.effect.domain()) | r.effect.image_vars() | {var(l) for l in r.trigger}
    missing = needed - u
    if missing:
        raise KeyError(f"variables {sorted(missing)} outside the assignment universe")


def apply_rule_to_model(i: Assignment, r: MutationRule) -> Assignment:
    _universe_check(i, r)
    if not evaluate(i, r.trigger):
        return i
    return apply_to_model(i, r.effect)


def eval_mutation_clause(i: Assignment, mc: MutationClause) -> bool:
    for r in mc.prefix:
        i = apply_rule_to_model(i, r)
    return evaluate(i, mc.clause)


# -- verification ----------------------------------------------------------


def _v(step: MutationStep, code: str, msg: str) -> Violation:
    return Violation(step.id, code, msg)


def verify_step(
    proof: MutationProof,
    step: MutationStep,
    formula: Iterable[Clause] = (),
    index: Mapping[int, MutationStep] | None = None,
) -> Violation | None:
    """Check one step against its rule; ``None`` means it is a correct instance."""
    index = proof.by_id() if index is None else index
    prem: list[MutationClause] = []
    for p in step.premises:
        if p >= step.id:
            return _v(step, "forward-reference", f"premise {p} is not earlier than step {step.id}")
        if p not in index:
            return _v(step, "unknown-premise", f"premise {p} does not exist")
        prem.append(index[p].conclusion)
    concl = step.conclusion
    rule = step.rule

    if rule == "RES":
        if len(prem) != 2:
            return _v(step, "premise-count", "RES takes two premises")
        a, b = prem
        if a.prefix != b.prefix or a.prefix != concl.prefix:
            return _v(step, "prefix-mismatch", "RES premises and conclusion need identical prefixes")
        l = step.pivot
        if l is None or l not in a.clause or -l not in b.clause:
            return _v(step, "bad-pivot", f"pivot {l} must occur in the first premise and its complement in the second")
        r = resolve(a.clause, b.clause, l)
        if r is TAUTOLOGY or r != concl.clause:
            return _v(step, "wrong-conclusion", f"resolvent is {r!r}, not {concl.clause!r}")
        return None

    if rule == "SUB":
        if len(prem) == 0:
            if concl.prefix:
                return _v(step, "prefix-mismatch", "an axiom must have an empty prefix")
            target = set(concl.clause)
            if not any(set(c) <= target for c in formula):
                return _v(step, "not-an-axiom", f"{concl.clause!r} contains no premise clause")
            return None
        if len(prem) != 1:
            return _v(step, "premise-count", "SUB takes one premise")
        if prem[0].prefix != concl.prefix:
            return _v(step, "prefix-mismatch", "SUB premise and conclusion need identical prefixes")
        if not set(prem[0].clause) <= set(concl.clause):
            return _v(step, "not-subsumed", f"{prem[0].clause!r} is not a subset of {concl.clause!r}")
        return None

    if rule in ("TAUT", "INTRO"):
        if not concl.prefix:
            return _v(step, "prefix-mismatch", f"{rule} conclusion needs a mutation rule")
        eps, r = concl.prefix[:-1], concl.prefix[-1]
        c, s, q = concl.clause, r.effect, r.trigger
        if rule == "TAUT":
            if prem:
                return _v(step, "premise-count", "TAUT takes no premises")
            if q != c.negate():
                return _v(step, "taut-trigger", "TAUT trigger must be the complement of the clause")
            if not trivializes(s, c):
                return _v(step, "taut-not-trivializing", f"{s!r} does not trivialize {c!r}")
            return None
        red = reduct_clause(s, c)
        star = None
        if red is not TRIVIALIZED:
            qs = set(q)
            if not any(l in qs for l in red):
                star = MutationClause(eps, normalize_clause([-l for l in q] + list(red)))
        left = None if set(q.negate()) <= set(c) else MutationClause(eps, c)
        need = {"left": left, "star": star}
        for p in prem:
            if p == left:
                need["left"] = None
            elif p == star:
                need["star"] = None
            elif p.prefix != eps:
                return _v(step, "prefix-mismatch", "INTRO premises need the conclusion's prefix minus its last rule")
            elif p != MutationClause(eps, c):
                return _v(step, "unexpected-premise", f"premise {p!r} matches neither INTRO premise")
        if need["left"] is not None:
            return _v(step, "missing-left-premise", f"INTRO needs {left!r}")
        if need["star"] is not None:
            return _v(step, "missing-star-premise", f"INTRO needs {star!r} since the trigger does not entail the reduct")
        return None

    if rule == "ELIM":
        if len(prem) != 2:
            return _v(step, "premise-count", "ELIM takes two premises")
        a, b = prem
        if not a.prefix or a.prefix != b.prefix or concl.prefix != a.prefix[:-1]:
            return _v(step, "prefix-mismatch", "ELIM premises share a prefix that the conclusion drops the last rule of")
        s = a.prefix[-1].effect
        red = reduct_clause(s, a.clause)
        if red is TRIVIALIZED:
            return _v(step, "elim-trivialized", f"{s!r} trivializes {a.clause!r}")
        if b.clause != red or concl.clause != red:
            return _v(step, "wrong-conclusion", f"second premise and conclusion must be the reduct {red!r}")
        return None

    return _v(step, "unknown-rule", f"no rule named {rule!r}")


def verify_proof(proof: MutationProof, formula: Iterable[Clause] = ()) -> VerifyReport:
    formula = list(formula)
    index: dict[int, MutationStep] = {}
    for step in proof.steps:
        if step.id in index:
            return VerifyReport(False, violation=_v(step, "duplicate-id", f"step id {step.id} reused"))
        v = verify_step(proof, step, formula, index)
        if v is not None:
            return VerifyReport(False, violation=v)
        index[step.id] = step
    if not proof.steps:
        return VerifyReport(False, violation=Violation(0, "empty-proof", "no steps"))
    cid = proof.conclusion if proof.conclusion is not None else proof.steps[-1].id
    if cid not in index:
        return VerifyReport(False, violation=Violation(cid, "unknown-conclusion", "conclusion id does not exist"))
    return VerifyReport(True, index[cid].conclusion)


# -- translation -----------------------------------------------------------


class MissingCertificate(ValueError):
    pass


class _Builder:
    def __init__(self, clauses):
        self.clauses = clauses  # id -> Clause, every clause ever seen
        self.steps: list[MutationStep] = []
        self.leaves: dict[int, int] = {}

    def add(self, rule: str, premises: Sequence[int], concl: MutationClause, pivot: int | None = None) -> int:
        sid = len(self.steps) + 1
        self.steps.append(MutationStep(sid, rule, tuple(premises), concl, pivot))
        return sid

    def chain(self, prefix, cur: dict[int, int], premises: Iterable[int], target: Clause) -> int:
        """Derive ``prefix target`` from the current steps of ``premises``."""
        sub = {p: self.clauses[p] for p in premises}
        trail = Propagator(sub).propagate(-l for l in target)
        if trail.conflict is None:
            raise RuntimeError(f"recorded premises do not make {target!r} RUP")
        ch = extract_chain(trail, sub, target)
        first = ch.premises[0]
        sid = cur[first]
        if ch.derived[0] != self.clauses[first]:
            sid = self.add("SUB", (sid,), MutationClause(prefix, ch.derived[0]))
        for k in range(1, len(ch.premises)):
            sid = self.add("RES", (sid, cur[ch.premises[k]]), MutationClause(prefix, ch.derived[k]), ch.pivots[k - 1])
        if ch.conclusion != target:
            sid = self.add("SUB", (sid,), MutationClause(prefix, target))
        return sid


def translate_proof(formula: Sequence[Clause], checked) -> MutationProof:
    """Turn a forward-checked WSR proof into a mutation proof.

    ``checked`` is the result of ``check_forward(..., keep_certificates=True)``.
    Deletions vanish, RUP steps become SUB/RES chains under the current
    prefix, and a WSR step appends ``(sigma := ~C)`` to the prefix after
    deriving every clause it keeps under the longer prefix.  A refutation
    ends with ELIM steps that strip the prefix from the empty clause.
    """
    if not checked.ok:
        raise ValueError("proof was not accepted")
    db = checked.db
    clauses = {i: db[i] for i in range(1, len(db) + 1)}
    b = _Builder(clauses)
    num_input = checked.num_input
    active = set(range(1, num_input + 1))
    prefix: tuple[MutationRule, ...] = ()
    cur: dict[int, int] = {}

    def ensure_leaves(ids: Iterable[int]) -> None:
        for i in ids:
            if i not in cur:
                if prefix or i > num_input:
                    raise RuntimeError(f"clause {i} has no derivation under the current prefix")
                cur[i] = b.add("SUB", (), MutationClause((), clauses[i]))

    empty_ids = [i for i in active if len(clauses[i]) == 0]
    if empty_ids:
        sid = b.add("SUB", (), MutationClause((), Clause()))
        return MutationProof(b.steps, sid)

    last = None
    for rec in checked.records:
        ins = rec.instruction
        if rec.clause_id is None:
            active -= set(rec.delta_ids)
            continue
        cert = rec.certificate
        if cert is None:
            raise MissingCertificate(f"instruction {rec.index} has no certificate; check with keep_certificates=True")
        c = ins.clause
        if ins.witness.is_identity():
            prem = cert.own.premises
            ensure_leaves(prem)
            sid = b.chain(prefix, cur, prem, c)
            new_cur = dict(cur)
            new_cur[rec.clause_id] = sid
        else:
            s = ins.witness
            rule = MutationRule(s, c.negate())
            longer = prefix + (rule,)
            needed = set(cert.results) | cert.own.premises
            for r in cert.results.values():
                needed |= r.premises
            ensure_leaves(needed)
            new_cur = {}
            for cid, r in sorted(cert.results.items()):
                d = clauses[cid]
                pr = [cur[cid]]
                if r.outcome.name == "RUP":
                    target = normalize_clause(list(c) + list(reduct_clause(s, d)))
                    pr.append(b.chain(prefix, cur, r.premises, target))
                new_cur[cid] = b.add("INTRO", pr, MutationClause(longer, d))
            own = cert.own
            if own.outcome.name == "TRIVIALIZED":
                sid = b.add("TAUT", (), MutationClause(longer, c))
            elif own.outcome.name == "ENTAILED":
                sid = b.add("INTRO", (), MutationClause(longer, c))
            else:
                target = normalize_clause(list(c) + list(reduct_clause(s, c)))
                star = b.chain(prefix, cur, own.premises, target)
                sid = b.add("INTRO", (star,), MutationClause(longer, c))
            new_cur[rec.clause_id] = sid
            prefix = longer
        for cid in rec.delta_ids:
            new_cur.pop(cid, None)
        cur = new_cur
        active.add(rec.clause_id)
        active -= set(rec.delta_ids)
        last = sid
        if len(c) == 0:
            while prefix:
                prefix = prefix[:-1]
                sid = b.add("ELIM", (sid, sid), MutationClause(prefix, Clause()))
            last = sid
            break
    return MutationProof(b.steps, last)


# -- text format -------------------------------------------------------------


def _fmt_rule(r: MutationRule) -> str:
    return "( " + format_witness(r.effect) + " : " + " ".join(map(str, (*r.trigger, 0))) + " )"


def serialize_mutation_proof(proof: MutationProof) -> str:
    """One step per line; a prefix already printed is referenced as ``^<step>``."""
    seen: dict[tuple, int] = {}
    lines = []
    for st in proof.steps:
        toks = [str(st.id), st.rule, *map(str, st.premises), "0"]
        if st.rule == "RES":
            toks.append(str(st.pivot))
        pre = st.conclusion.prefix
        parts: list[str] = []
        if pre:
            for k in range(len(pre), 0, -1):
                if pre[:k] in seen:
                    parts.append(f"^{seen[pre[:k]]}")
                    parts += [_fmt_rule(r) for r in pre[k:]]
                    break
            else:
                parts = [_fmt_rule(r) for r in pre]
        seen.setdefault(pre, st.id)
        toks += ["|", *parts, "|", *map(str, st.conclusion.clause), "0"]
        lines.append(" ".join(toks))
    if proof.conclusion is not None:
        lines.append(f"conclusion {proof.conclusion}")
    return "".join(l + "\n" for l in lines)


def _ints(toks: list[str], where: str) -> list[int]:
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise ParseError(f"{where}: expected integers in {' '.join(toks)!r}") from None


def _parse_prefix(toks: list[str], prefixes: dict[int, tuple], where: str) -> tuple:
    out: tuple = ()
    pos = 0
    if toks and toks[0].startswith("^"):
        ref = _ints([toks[0][1:]], where)[0]
        if ref not in prefixes:
            raise ParseError(f"{where}: prefix reference to unknown step {ref}")
        out = prefixes[ref]
        pos = 1
    while pos < len(toks):
        if toks[pos] != "(" or pos + 1 >= len(toks) or toks[pos + 1] != "s":
            raise ParseError(f"{where}: malformed prefix group")
        try:
            close = toks.index(")", pos)
            colon = toks.index(":", pos)
        except ValueError:
            raise ParseError(f"{where}: unterminated prefix group") from None
        if not pos < colon < close:
            raise ParseError(f"{where}: malformed prefix group")
        wit = _ints(toks[pos + 2:colon], where)
        if wit.count(0) != 2 or wit[-1] != 0:
            raise ParseError(f"{where}: witness needs two zero-terminated sections")
        z = wit.index(0)
        trig = _ints(toks[colon + 1:close], where)
        if not trig or trig[-1] != 0 or 0 in trig[:-1]:
            raise ParseError(f"{where}: trigger must be zero-terminated")
        try:
            effect = parse_witness(wit[:z], wit[z + 1:-1], where)
            out = out + (MutationRule(effect, Cube(trig[:-1])),)
        except ValueError as e:
            raise ParseError(f"{where}: {e}") from None
        pos = close + 1
    return out


def parse_mutation_proof(text: str) -> MutationProof:
    proof = MutationProof()
    prefixes: dict[int, tuple] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        where = f"line {lineno}"
        if not s or s[0] == "c" and (len(s) == 1 or s[1].isspace()):
            continue
        toks = s.split()
        if toks[0] == "conclusion":
            if len(toks) != 2:
                raise ParseError(f"{where}: malformed conclusion line")
            proof.conclusion = _ints(toks[1:], where)[0]
            continue
        if toks.count("|") != 2:
            raise ParseError(f"{where}: expected two '|' separators")
        a = toks.index("|")
        bsep = toks.index("|", a + 1)
        head, pre, body = toks[:a], toks[a + 1:bsep], toks[bsep + 1:]
        if len(head) < 3:
            raise ParseError(f"{where}: missing id, rule or premise terminator")
        sid = _ints(head[:1], where)[0]
        rule = head[1]
        if rule not in RULES:
            raise ParseError(f"{where}: unknown rule {rule!r}")
        rest = _ints(head[2:], where)
        if 0 not in rest:
            raise ParseError(f"{where}: premise list is not zero-terminated")
        z = rest.index(0)
        premises, extra = rest[:z], rest[z + 1:]
        pivot = None
        if rule == "RES":
            if len(extra) != 1:
                raise ParseError(f"{where}: RES needs exactly one pivot")
            pivot = extra[0]
        elif extra:
            raise ParseError(f"{where}: unexpected tokens after premises")
        lits = _ints(body, where)
        if not lits or lits[-1] != 0 or 0 in lits[:-1]:
            raise ParseError(f"{where}: clause must be zero-terminated")
        c = normalize_clause(lits[:-1])
        if c is TAUTOLOGY:
            raise ParseError(f"{where}: tautological clause")
        prefix = _parse_prefix(pre, prefixes, where)
        prefixes[sid] = prefix
        proof.steps.append(MutationStep(sid, rule, tuple(premises), MutationClause(prefix, c), pivot))
    return proof
