"""Acceptance run: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines are printed in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import contextlib
import functools
import io
import random
import sys
import time

import pytest

from wsrproof.checker import check_backward, check_forward
from wsrproof.cli import main as cli_main
from wsrproof.fixtures import core_example, lemma_example, rup_refutation
from wsrproof.formula import BOT, TOP, Clause, ClauseDb, all_models, evaluate
from wsrproof.mutation import (
    MutationClause,
    MutationRule,
    eval_mutation_clause,
    parse_mutation_proof,
    serialize_mutation_proof,
    translate_proof,
    verify_proof,
)
from wsrproof.phpgen import php_formula, php_pr_proof, php_wsr_proof
from wsrproof.proofio import Intro, parse_wsr_proof, serialize_dimacs, serialize_proof
from wsrproof.propagation import is_rup
from wsrproof.redundancy import check_sr, check_wsr
from wsrproof.substitution import TRIVIALIZED, Substitution, apply_to_model, reduct_clause, reduct_formula, trivializes

from helpers import (
    ACCEPTANCE_LINES,
    naive_check,
    random_clause,
    random_formula,
    random_substitution,
    random_unsat,
    random_wsr_refutation,
)


def criterion(num, title):
    """Record a PASS line with the returned detail, or a FAIL line with the error."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as e:
                msg = str(e).splitlines()[0] if str(e) else type(e).__name__
                ACCEPTANCE_LINES.append(f"FAIL {num} {title}: {msg}")
                raise
            ACCEPTANCE_LINES.append(f"PASS {num} {title}: {detail}")

        return run

    return wrap


def cli(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli_main([str(a) for a in argv])
    return code, out.getvalue()


@criterion(1, "pigeonhole WSR proofs n=1..15")
def test_criterion_1_php_wsr(tmp_path):
    t0 = time.perf_counter()
    counts = {}
    for n in range(1, 16):
        code, out = cli("gen-php", n, "--proof", "wsr", "-o", tmp_path)
        assert code == 0, out
        counts[n] = len(parse_wsr_proof((tmp_path / f"php{n}.wsr").read_text()))
        code, out = cli("check", tmp_path / f"php{n}.cnf", tmp_path / f"php{n}.wsr")
        assert code == 0 and out.splitlines()[-1] == "s VERIFIED", f"n={n}: {out}"
        assert counts[n] == n * (n - 1), f"n={n}: {counts[n]} instructions"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    return f"all VERIFIED, counts n(n-1) exactly, {elapsed:.2f}s total"


@criterion(2, "PR vs WSR proof size")
def test_criterion_2_pr_vs_wsr(tmp_path):
    ratios = []
    for n in range(3, 13):
        for kind in ("pr", "wsr"):
            code, out = cli("gen-php", n, "--proof", kind, "-o", tmp_path)
            assert code == 0, out
        pr = len(parse_wsr_proof((tmp_path / f"php{n}.pr").read_text()))
        wsr = len(parse_wsr_proof((tmp_path / f"php{n}.wsr").read_text()))
        assert pr == (n + 1) * n * (n - 1) // 3, f"n={n}: {pr} PR instructions"
        ratios.append(pr / wsr)
    assert all(a < b for a, b in zip(ratios, ratios[1:])), ratios
    return f"ratio rises {ratios[0]:.2f} -> {ratios[-1]:.2f}; PR counts (n+1)n(n-1)/3"


@criterion(3, "core example cores 18/19")
def test_criterion_3_core_example():
    ex = core_example()
    wsr = check_backward(ex.formula, ex.proof, "wsr")
    fix = check_backward(ex.formula, ex.proof, "sr-fixpoint")
    assert wsr.ok and fix.ok
    assert set(wsr.core) == set(ex.marked + ex.delta) and len(wsr.core) == 18, wsr.core
    assert set(fix.core) == set(ex.formula) and len(fix.core) == 19, fix.core
    md = ClauseDb(ex.marked + ex.delta)
    assert not check_sr(md, ex.clause, ex.witness).ok
    assert check_sr(ClauseDb(ex.formula), ex.clause, ex.witness).ok
    delta_ids = [md.find(d) for d in ex.delta]
    assert check_wsr(md, ex.clause, ex.witness, delta_ids).ok
    return "wsr core = M+Delta (18), sr-fixpoint core = M+Delta+Gamma (19), SR/WSR verdicts as expected"


@criterion(4, "lemma example wsr vs sr")
def test_criterion_4_lemma_example(tmp_path):
    ex = lemma_example()
    cnf, prf = tmp_path / "f.cnf", tmp_path / "f.wsr"
    cnf.write_text(serialize_dimacs(ex.formula))
    prf.write_text(serialize_proof(ex.proof))
    assert len(ex.proof) == 3
    code, out = cli("check", cnf, prf, "--mode", "wsr")
    assert code == 0 and "s VERIFIED" in out, out
    code, out = cli("check", cnf, prf, "--mode", "sr")
    assert code == 1 and "s NOT VERIFIED" in out, out
    res = check_forward(ex.formula, ex.proof, "sr")
    assert res.failed_index == 2 and res.failed_clause == ex.lemmas[1]
    assert res.failed_target == ex.sr_failure, res.failed_target
    return f"wsr VERIFIED, sr NOT VERIFIED at the last step; not RUP: {list(res.failed_target)}"


@criterion(5, "identity witness equals RUP")
def test_criterion_5_identity_witness():
    rng = random.Random(5)
    agree = 0
    for _ in range(1000):
        n = rng.randint(1, 10)
        f = random_formula(rng, n, rng.randint(0, 20), 3)
        c = random_clause(rng, n, 3)
        db = ClauseDb(f)
        assert is_rup(db, c)[0] == check_wsr(db, c, Substitution.identity()).ok, (f, c)
        agree += 1
    return f"{agree}/1000 instances agree"


@criterion(6, "reduct lemma claims")
def test_criterion_6_reduct_semantics():
    rng = random.Random(6)
    checks = 0
    for _ in range(500):
        n = rng.randint(1, 6)
        s = random_substitution(rng, n)
        c = random_clause(rng, n)
        f = random_formula(rng, n, rng.randint(0, 6))
        red = reduct_clause(s, c)
        redf = list(reduct_formula(s, f))
        models = list(all_models(range(1, n + 1)))
        # (i) trivialization is exactly validity under composition
        assert trivializes(s, c) == all(evaluate(apply_to_model(i, s), c) for i in models)
        for i in models:
            j = apply_to_model(i, s)
            # (ii) the reduct evaluates like the clause after composition
            if red is not TRIVIALIZED:
                assert evaluate(j, c) == evaluate(i, red)
            # (iii) likewise for formulas
            assert evaluate(j, f) == evaluate(i, redf)
            checks += 1
    return f"500 instances, {checks} model checks, zero violations"


def _acceptances(formula, proof, mode):
    res = check_forward(formula, proof, mode, keep_certificates=True)
    assert res.ok, (mode, res.message)
    # replay to recover the formula in force at each witnessed step
    db = ClauseDb(formula)
    for rec in res.records:
        if rec.clause_id is None:
            for cid in rec.delta_ids:
                db.deactivate(cid)
            continue
        ins = rec.instruction
        if not ins.witness.is_identity():
            yield dict(db.active()), ins.clause, ins.witness, rec.delta_ids if mode == "wsr" else ()
        db.add(ins.clause)
        for cid in rec.delta_ids:
            db.deactivate(cid)


def _universe(clauses, s):
    vs = {abs(l) for c in clauses for l in c}
    return sorted(vs | s.domain() | s.image_vars())


@criterion(7, "mutation-form soundness of acceptances")
def test_criterion_7_oracle():
    cases = [
        ("lemma", lemma_example().formula, lemma_example().proof, "wsr"),
        ("core", core_example().formula, core_example().proof, "wsr"),
        ("core/sr", core_example().formula, core_example().proof, "sr"),
    ]
    for n in range(2, 5):
        cases.append((f"php{n}", php_formula(n), php_wsr_proof(n), "wsr"))
        cases.append((f"php{n}/pr", php_formula(n), php_pr_proof(n), "pr"))
        cases.append((f"php{n}/pr-as-sr", php_formula(n), php_pr_proof(n), "sr"))
    rng = random.Random(7)
    for k in range(30):
        f, proof = random_wsr_refutation(rng, rng.randint(3, 6), rng.randint(6, 14))
        cases.append((f"random{k}", f, proof, "wsr"))
    total = 0
    for name, formula, proof, mode in cases:
        for db, c, s, delta in _acceptances(formula, proof, mode):
            f = list(db.values())
            kept = [d for cid, d in db.items() if cid not in delta] + [c]
            universe = _universe(f + [c], s)
            assert len(universe) <= 12, (name, len(universe))
            rule = MutationRule(s, c.negate())
            goals = [MutationClause((rule,), d) for d in kept]
            for i in all_models(universe):
                if evaluate(i, f):
                    for g in goals:
                        assert eval_mutation_clause(i, g), (name, c, g)
            total += 1
    return f"{total} acceptances over {len(cases)} fixture runs, zero violations"


def _first_violation(proof, formula):
    rep = verify_proof(parse_mutation_proof(serialize_mutation_proof(proof)), formula)
    return rep.violation


@criterion(8, "mutation pipeline")
def test_criterion_8_mutation(tmp_path):
    empty = MutationClause((), Clause())
    for n in range(1, 7):
        cli("gen-php", n, "-o", tmp_path)
        cnf, prf, mut = tmp_path / f"php{n}.cnf", tmp_path / f"php{n}.wsr", tmp_path / f"php{n}.mut"
        code, out = cli("translate", cnf, prf, "-o", mut)
        assert code == 0, out
        code, out = cli("verify-mut", cnf, mut)
        assert code == 0 and "c conclusion []" in out, (n, out)
        mp = parse_mutation_proof(mut.read_text())
        assert verify_proof(mp, php_formula(n)).conclusion == empty
    rng = random.Random(8)
    for k in range(100):
        f = random_unsat(rng, rng.randint(2, 7), rng.randint(4, 18))
        proof = [Intro(c) for c in rup_refutation(f)]
        mp = translate_proof(f, check_forward(f, proof, keep_certificates=True))
        rep = verify_proof(parse_mutation_proof(serialize_mutation_proof(mp)), f)
        assert rep.ok and rep.conclusion == empty, (k, rep.violation)

    # side-condition mutations on the translated core example
    ex = core_example()
    base = translate_proof(ex.formula, check_forward(ex.formula, ex.proof, keep_certificates=True))
    assert verify_proof(base, ex.formula).ok
    seen = {}

    def mutated(pick, change):
        mp = translate_proof(ex.formula, check_forward(ex.formula, ex.proof, keep_certificates=True))
        step = next(s for s in mp.steps if pick(s))
        change(step)
        return step.id, _first_violation(mp, ex.formula)

    def drop_rule(s):
        s.conclusion = MutationClause(s.conclusion.prefix[:-1], s.conclusion.clause)

    sid, v = mutated(lambda s: s.rule == "RES" and s.conclusion.prefix, drop_rule)
    assert v is not None and v.step == sid and v.code == "prefix-mismatch", v
    seen["prefix mismatch"] = v.code

    def drop_star(s):
        s.premises = s.premises[:1]

    sid, v = mutated(lambda s: s.rule == "INTRO" and len(s.premises) == 2, drop_star)
    assert v is not None and v.step == sid and v.code == "missing-star-premise", v
    seen["missing star"] = v.code

    def identity_effect(s):
        r = s.conclusion.prefix[-1]
        s.conclusion = MutationClause(s.conclusion.prefix[:-1] + (MutationRule(Substitution.identity(), r.trigger),), s.conclusion.clause)

    sid, v = mutated(lambda s: s.rule == "TAUT", identity_effect)
    assert v is not None and v.step == sid and v.code == "taut-not-trivializing", v
    seen["non-trivializing TAUT"] = v.code
    return "pi_1..pi_6 and 100 random RUP proofs verify to the empty clause; rejected: " + ", ".join(
        f"{k} ({c})" for k, c in seen.items()
    )


def _fixture_proofs():
    out = [("lemma", lemma_example().formula, lemma_example().proof), ("core", core_example().formula, core_example().proof)]
    for n in (3, 4, 5):
        out.append((f"php{n}", php_formula(n), php_wsr_proof(n)))
    return out


def _mutant(rng, formula, proof):
    """Corrupt one witness mapping or remove one modulo lemma.

    Returns the mutant and its kind, or ``None`` if the drawn mutation does not apply.
    """
    witnessed = [k for k, i in enumerate(proof) if isinstance(i, Intro) and not i.is_rup]
    k = rng.choice(witnessed)
    ins = proof[k]
    proof = list(proof)
    if ins.modulo and rng.random() < 0.4:
        drop = rng.randrange(len(ins.modulo))
        lemma = ins.modulo[drop]
        if rng.random() < 0.5:
            proof[k] = Intro(ins.clause, ins.witness, ins.modulo[:drop] + ins.modulo[drop + 1:])
            return proof, "modulo"
        # remove the instruction that introduced the lemma, keeping it in the modulo set
        intro = next((j for j in range(k) if isinstance(proof[j], Intro) and proof[j].clause == lemma), None)
        if intro is None:
            return None
        del proof[intro]
        return proof, "lemma"
    m = dict(ins.witness.items())
    v = rng.choice(sorted(m))
    nv = max(num_vars_of(formula), max(abs(l) for l in ins.clause))
    if rng.random() < 0.3:
        del m[v]
    else:
        options = [TOP, BOT] + [w for w in range(1, nv + 1) if w != v] + [-w for w in range(1, nv + 1)]
        options = [a for a in options if a != m[v]]
        m[v] = rng.choice(options)
    proof[k] = Intro(ins.clause, Substitution(m), ins.modulo)
    return proof, "witness"


def num_vars_of(formula):
    return max((abs(l) for c in formula for l in c), default=0)


@criterion(9, "robustness to corrupted witnesses and lemmas")
def test_criterion_9_robustness():
    rng = random.Random(9)
    fixtures = _fixture_proofs()
    for name, f, proof in fixtures:
        assert check_forward(f, proof).ok and naive_check(f, proof), name
    trials = still_valid = 0
    kinds = {"witness": 0, "modulo": 0, "lemma": 0}
    while trials < 100:
        name, f, proof = rng.choice(fixtures)
        m = _mutant(rng, f, proof)
        if m is None:
            continue
        mutant, what = m
        verdict = check_forward(f, mutant).ok
        reference = naive_check(f, mutant)
        # the checker must agree with the definitional checker on every mutant
        assert verdict == reference, (name, what, verdict)
        if reference:
            still_valid += 1
            assert still_valid < 1000, "mutations rarely break the proofs"
            continue
        trials += 1
        kinds[what] += 1
        assert not verdict, (name, what)
    mix = ", ".join(f"{v} {k}" for k, v in kinds.items())
    return f"100 invalid mutants ({mix}) all NOT VERIFIED, zero false accepts; {still_valid} still-valid mutants skipped"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
