"""Exact weighted model counting for two-variable logic with counting
quantifiers, with an optional essential-DAG constraint on a binary relation."""
from .census import essential_bounded, essential_by_indegree, essential_filtered, essential_total
from .cells import SymmetricWeights
from .logic import Vocabulary, parse_sentence, to_text
from .oracle import EssentialDagSpec, brute_wfomc
from .pipeline import count

__all__ = [
    "EssentialDagSpec", "SymmetricWeights", "Vocabulary", "brute_wfomc", "count", "essential_bounded",
    "essential_by_indegree", "essential_filtered", "essential_total", "parse_sentence", "to_text",
]
