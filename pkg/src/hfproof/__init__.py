"""Hereditarily finite set calculus: model, syntax, proof kernel, coding and synthesis."""

from hfproof.calculus import Derivation, check
from hfproof.coding import dec_fm, enc_fm, quote_fm
from hfproof.grammar import parse_fm, parse_tm
from hfproof.hf_model import HfSet, ack_index, eats, empty, from_ack_index, member, ordinal, pair
from hfproof.semantics import eval_fm, eval_tm
from hfproof.synthesis import prove_ground_atom, prove_strict_sigma

__all__ = [
    "Derivation",
    "HfSet",
    "ack_index",
    "check",
    "dec_fm",
    "eats",
    "empty",
    "enc_fm",
    "eval_fm",
    "eval_tm",
    "from_ack_index",
    "member",
    "ordinal",
    "pair",
    "parse_fm",
    "parse_tm",
    "prove_ground_atom",
    "prove_strict_sigma",
    "quote_fm",
]
