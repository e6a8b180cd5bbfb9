"""Command-line interface: ``wsrproof <command> ...``.

Exit status is 0 when the input verifies, 1 when it does not and 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import phpgen
from .checker import MODES, Strategy, check_backward, check_forward
from .mutation import parse_mutation_proof, serialize_mutation_proof, translate_proof, verify_proof
from .proofio import ParseError, parse_dimacs, parse_dpr_proof, parse_wsr_proof, serialize_dimacs, serialize_proof

log = logging.getLogger("wsrproof")

VERIFIED, NOT_VERIFIED, INPUT_ERROR = 0, 1, 2


def _read(path: str) -> str:
    return Path(path).read_text()


def _load(args):
    cnf = parse_dimacs(_read(args.cnf))
    text = _read(args.proof)
    proof = parse_dpr_proof(text) if getattr(args, "assume_dsr", False) else parse_wsr_proof(text)
    return cnf, proof


def _verdict(ok: bool) -> int:
    print("s VERIFIED" if ok else "s NOT VERIFIED")
    return VERIFIED if ok else NOT_VERIFIED


def _report_failure(index, message, clause=None, target=None) -> None:
    where = "" if index is None else f"instruction {index}: "
    print(f"c {where}{message}")
    if clause is not None:
        print(f"c offending clause {' '.join(map(str, clause))} 0")
    if target is not None:
        print(f"c not RUP: {' '.join(map(str, target))} 0")


def cmd_check(args) -> int:
    cnf, proof = _load(args)
    if args.backward:
        res = check_backward(cnf.clauses, proof, Strategy(args.strategy))
        for w in res.warnings:
            print(f"c warning: {w}")
        if not res.ok:
            _report_failure(res.failed_index, res.message)
        stats = res.stats
        ok = res.ok
    else:
        res = check_forward(cnf.clauses, proof, args.mode, jobs=args.jobs)
        for w in res.warnings:
            print(f"c warning: {w}")
        if not res.ok:
            _report_failure(res.failed_index, res.message, res.failed_clause, res.failed_target)
        elif not res.refutation:
            print("c all instructions valid; the empty clause is not derived")
        stats = res.stats
        ok = res.ok
    if args.stats:
        for line in stats.lines():
            print(line)
    return _verdict(ok)


def cmd_trim(args) -> int:
    cnf, proof = _load(args)
    res = check_backward(cnf.clauses, proof, Strategy(args.strategy))
    if not res.ok:
        _report_failure(res.failed_index, res.message)
        return _verdict(False)
    Path(args.output).write_text(serialize_proof(res.trimmed))
    if args.core:
        Path(args.core).write_text(serialize_dimacs(res.core, cnf.num_vars))
    print(f"c core {len(res.core)} of {len(cnf.clauses)} clauses, trimmed proof {len(res.trimmed)} of {len(proof)} instructions")
    return _verdict(True)


def cmd_core(args) -> int:
    cnf, proof = _load(args)
    res = check_backward(cnf.clauses, proof, Strategy(args.strategy))
    if not res.ok:
        _report_failure(res.failed_index, res.message)
        return _verdict(False)
    Path(args.output).write_text(serialize_dimacs(res.core, cnf.num_vars))
    print(f"c core {len(res.core)} of {len(cnf.clauses)} clauses")
    return _verdict(True)


def cmd_gen_php(args) -> int:
    n = args.n
    if n < 1 or (args.proof == "pr" and n < 2):
        print("c need n >= 1 (n >= 2 for pr proofs)", file=sys.stderr)
        return INPUT_ERROR
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    formula = phpgen.php_formula(n)
    proof = phpgen.php_wsr_proof(n) if args.proof == "wsr" else phpgen.php_pr_proof(n)
    cnf_path = out / f"php{n}.cnf"
    proof_path = out / f"php{n}.{args.proof}"
    cnf_path.write_text(serialize_dimacs(formula, phpgen.num_vars(n)))
    proof_path.write_text(serialize_proof(proof))
    print(f"c wrote {cnf_path} ({len(formula)} clauses) and {proof_path} ({len(proof)} instructions)")
    return 0


def cmd_translate(args) -> int:
    cnf, proof = _load(args)
    res = check_forward(cnf.clauses, proof, "wsr", keep_certificates=True)
    if not res.ok:
        _report_failure(res.failed_index, res.message, res.failed_clause, res.failed_target)
        return _verdict(False)
    mp = translate_proof(cnf.clauses, res)
    Path(args.output).write_text(serialize_mutation_proof(mp))
    print(f"c mutation proof with {len(mp.steps)} steps")
    return _verdict(True)


def cmd_verify_mut(args) -> int:
    cnf = parse_dimacs(_read(args.cnf))
    mp = parse_mutation_proof(_read(args.mutproof))
    rep = verify_proof(mp, cnf.clauses)
    if rep.ok:
        print(f"c conclusion {rep.conclusion!r}")
    else:
        print(f"c {rep.violation}")
    return _verdict(rep.ok)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wsrproof", description="Check and transform WSR clausal proofs.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp):
        sp.add_argument("cnf")
        sp.add_argument("proof")
        sp.add_argument("--assume-dsr", action="store_true", help="read a DSR/DPR-style proof (witness after the repeated first literal)")

    def strategy(sp):
        sp.add_argument("--strategy", choices=[s.value for s in Strategy], default="wsr")

    sp = sub.add_parser("check", help="verify a proof")
    inputs(sp)
    sp.add_argument("--backward", action="store_true", help="check backwards with marking")
    strategy(sp)
    sp.add_argument("--mode", choices=MODES, default="wsr", help="redundancy notion accepted for witnessed steps")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--jobs", type=int, default=1, help="threads for per-clause checks (forward only)")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("trim", help="write a trimmed proof (and optionally the core)")
    inputs(sp)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--core")
    strategy(sp)
    sp.set_defaults(func=cmd_trim)

    sp = sub.add_parser("core", help="write the unsatisfiable core found by backward checking")
    inputs(sp)
    sp.add_argument("-o", "--output", required=True)
    strategy(sp)
    sp.set_defaults(func=cmd_core)

    sp = sub.add_parser("gen-php", help="write a pigeonhole formula and its proof")
    sp.add_argument("n", type=int)
    sp.add_argument("--proof", choices=("wsr", "pr"), default="wsr")
    sp.add_argument("-o", "--output", default=".")
    sp.set_defaults(func=cmd_gen_php)

    sp = sub.add_parser("translate", help="translate a proof into a mutation proof")
    inputs(sp)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("verify-mut", help="verify a mutation proof")
    sp.add_argument("cnf")
    sp.add_argument("mutproof")
    sp.set_defaults(func=cmd_verify_mut)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ParseError, OSError) as e:
        print(f"c error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
