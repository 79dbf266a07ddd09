"""Checked converse chains: expressions, rules, chains, builders, LP conversion."""

from .chain import ChainError, ProofChain, from_json, from_transcript, replay, to_json, to_transcript, verify_chain
from .expression import RULES, EntropyExpression, ProofStep, StepError, apply_step

__all__ = [
    "RULES",
    "ChainError",
    "EntropyExpression",
    "ProofChain",
    "ProofStep",
    "StepError",
    "apply_step",
    "from_json",
    "from_transcript",
    "replay",
    "to_json",
    "to_transcript",
    "verify_chain",
]
