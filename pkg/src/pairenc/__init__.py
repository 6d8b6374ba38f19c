"""Pair-encoding compression laboratory: BPE, EvenOdd, exact solvers and bounds."""

__version__ = "0.1.0"

from .bounds import (PackingCertificate, check_certificate, fk,
                     packing_from_merges, pk, pk_bruteforce)
from .bpe import BpeTrace, bpe_train, bpe_utility
from .evenodd import evenodd, sparsify, top_k_pairs
from .exact import SearchBudget, oms_opt, ope_opt, replay
from .text import (Alphabet, MergeRule, MergeSequence, PartialSequence,
                   PartialStep, Text, apply, apply_partial, apply_rule,
                   apply_sequence, decode, freq, replaceable_count, utility)

__all__ = [
    "Alphabet", "BpeTrace", "MergeRule", "MergeSequence", "PackingCertificate",
    "PartialSequence", "PartialStep", "SearchBudget", "Text", "apply",
    "apply_partial", "apply_rule", "apply_sequence", "bpe_train", "bpe_utility",
    "check_certificate", "decode", "evenodd", "fk", "freq", "oms_opt", "ope_opt",
    "packing_from_merges", "pk", "pk_bruteforce", "replaceable_count", "replay",
    "sparsify", "top_k_pairs", "utility",
]
