"""Text formats: DIMACS CNF and the line-based WSR proof format.

Proof lines (tokens separated by whitespace, ``c`` lines are comments)::

    d <lit>* 0                          delete a clause
    <lit>* 0 [s <lit>* 0 (<lit> <lit>)* 0] (m <lit>* 0)*

The optional ``s`` block is the witness: literals before the first ``0``
map their variable to true (positive) or false (negative); the pairs after
it map the first literal to the second.  Each ``m`` block names one clause
of the modulo set.  A line without a witness is a RUP step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import BOT, TOP, Clause, normalize_clause, TAUTOLOGY
from .substitution import Substitution


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Delete:
    clause: Clause


@dataclass(frozen=True)
class Intro:
    clause: Clause
    witness: Substitution = Substitution.identity()
    modulo: tuple[Clause, ...] = ()

    @property
    def is_rup(self) -> bool:
        return self.witness.is_identity()


Instruction = Delete | Intro


@dataclass
class Cnf:
    num_vars: int
    clauses: list[Clause]


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] == "c" and (len(s) == 1 or s[1].isspace()):
            continue
        yield lineno, s


def _clause(lits: Sequence[int], where: str) -> Clause:
    c = normalize_clause(lits)
    if c is TAUTOLOGY:
        raise ParseError(f"{where}: tautological clause {list(lits)}")
    return c


def _int(tok: str, where: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{where}: expected an integer, got {tok!r}") from None


def parse_dimacs(text: str) -> Cnf:
    header = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for lineno, s in _tokens(text):
        where = f"line {lineno}"
        if s.startswith("p"):
            parts = s.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"{where}: malformed header {s!r}")
            header = (_int(parts[2], where), _int(parts[3], where))
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"{where}: negative counts in header")
            continue
        if s.startswith("%"):
            break
        if header is None:
            raise ParseError(f"{where}: clause before header")
        for tok in s.split():
            lit = _int(tok, where)
            if lit == 0:
                clauses.append(_clause(pending, where))
                pending = []
            elif abs(lit) > header[0]:
                raise ParseError(f"{where}: literal {lit} out of range")
            else:
                pending.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        raise ParseError("truncated clause at end of input")
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], clauses)


def serialize_dimacs(clauses: Iterable[Sequence[int]], num_vars: int | None = None) -> str:
    clauses = list(clauses)
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [" ".join(map(str, (*c, 0))) for c in clauses]
    return "\n".join(lines) + "\n"


serialize_core = serialize_dimacs


def _read_until_zero(toks: list[str], pos: int, where: str) -> tuple[list[int], int]:
    out = []
    while pos < len(toks):
        lit = _int(toks[pos], where)
        pos += 1
        if lit == 0:
            return out, pos
        out.append(lit)
    raise ParseError(f"{where}: missing terminating 0")


def parse_witness(consts: Sequence[int], pairs: Sequence[int], where: str = "witness") -> Substitution:
    if len(pairs) % 2:
        raise ParseError(f"{where}: odd number of literals in the pair section")
    mapping: dict[int, object] = {}
    for l in consts:
        if abs(l) in mapping:
            raise ParseError(f"{where}: variable {abs(l)} mapped twice")
        mapping[abs(l)] = TOP if l > 0 else BOT
    for a, b in zip(pairs[::2], pairs[1::2]):
        if abs(a) in mapping:
            raise ParseError(f"{where}: variable {abs(a)} mapped twice")
        mapping[abs(a)] = b if a > 0 else -b
    return Substitution(mapping)


def parse_instruction(line: str, where: str = "proof") -> Instruction:
    toks = line.split()
    if toks[0] == "d":
        lits, pos = _read_until_zero(toks, 1, where)
        if pos != len(toks):
            raise ParseError(f"{where}: trailing tokens after deletion")
        return Delete(_clause(lits, where))
    lits, pos = _read_until_zero(toks, 0, where)
    clause = _clause(lits, where)
    witness = Substitution.identity()
    modulo = []
    if pos < len(toks) and toks[pos] == "s":
        consts, pos = _read_until_zero(toks, pos + 1, where)
        pairs, pos = _read_until_zero(toks, pos, where)
        try:
            witness = parse_witness(consts, pairs, where)
        except ValueError as e:
            raise ParseError(str(e)) from None
    while pos < len(toks):
        if toks[pos] != "m":
            raise ParseError(f"{where}: unexpected token {toks[pos]!r}")
        mlits, pos = _read_until_zero(toks, pos + 1, where)
        modulo.append(_clause(mlits, where))
    return Intro(clause, witness, tuple(modulo))


def parse_wsr_proof(text: str) -> list[Instruction]:
    return [parse_instruction(s, f"line {lineno}") for lineno, s in _tokens(text)]


def parse_dpr_proof(text: str) -> list[Instruction]:
    """Read a DPR-style proof: the witness cube starts at the repeated first literal."""
    out: list[Instruction] = []
    for lineno, s in _tokens(text):
        where = f"line {lineno}"
        toks = s.split()
        if toks[0] == "d":
            lits, _ = _read_until_zero(toks, 1, where)
            out.append(Delete(_clause(lits, where)))
            continue
        lits, _ = _read_until_zero(toks, 0, where)
        if lits and lits[0] in lits[1:]:
            k = lits.index(lits[0], 1)
            clause = _clause(lits[:k], where)
            try:
                witness = parse_witness(lits[k:], [], where)
            except ValueError as e:
                raise ParseError(str(e)) from None
            out.append(Intro(clause, witness))
        else:
            out.append(Intro(_clause(lits, where)))
    return out


def format_witness(s: Substitution) -> str:
    consts, pairs = [], []
    for v, a in s.items():
        if a is TOP:
            consts.append(v)
        elif a is BOT:
            consts.append(-v)
        else:
            pairs += [v, a]
    return " ".join(map(str, ["s", *consts, 0, *pairs, 0]))


def format_instruction(ins: Instruction) -> str:
    if isinstance(ins, Delete):
        return " ".join(map(str, ["d", *ins.clause, 0]))
    parts = [" ".join(map(str, (*ins.clause, 0)))]
    if not ins.witness.is_identity():
        parts.append(format_witness(ins.witness))
    for m in ins.modulo:
        parts.append(" ".join(map(str, ("m", *m, 0))))
    return " ".join(parts)


def serialize_proof(proof: Iterable[Instruction]) -> str:
    lines = [format_instruction(i) for i in proof]
    return "".join(l + "\n" for l in lines)


serialize_trimmed = serialize_proof
