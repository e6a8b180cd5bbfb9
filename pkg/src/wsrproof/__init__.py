"""Checking, trimming and translating clausal proofs with substitution witnesses."""

from .checker import BackwardResult, CheckResult, Strategy, check_backward, check_forward, emit_trimmed, extract_core
from .formula import BOT, TOP, Assignment, Clause, ClauseDb, Cube, evaluate, normalize_clause
from .mutation import (
    MutationClause,
    MutationProof,
    MutationRule,
    MutationStep,
    translate_proof,
    verify_proof,
    verify_step,
)
from .proofio import Delete, Intro, parse_dimacs, parse_wsr_proof, serialize_dimacs, serialize_proof
from .propagation import is_rup, propagate
from .redundancy import check_pr, check_rat, check_sr, check_wsr
from .substitution import Substitution, compose, reduct_clause, reduct_formula, trivializes

__all__ = [
    "Assignment", "BOT", "BackwardResult", "CheckResult", "Clause", "ClauseDb", "Cube", "Delete", "Intro",
    "MutationClause", "MutationProof", "MutationRule", "MutationStep", "Strategy", "Substitution", "TOP",
    "check_backward", "check_forward", "check_pr", "check_rat", "check_sr", "check_wsr", "compose",
    "emit_trimmed", "evaluate", "extract_core", "is_rup", "normalize_clause", "parse_dimacs",
    "parse_wsr_proof", "propagate", "reduct_clause", "reduct_formula", "serialize_dimacs",
    "serialize_proof", "translate_proof", "trivializes", "verify_proof", "verify_step",
]
