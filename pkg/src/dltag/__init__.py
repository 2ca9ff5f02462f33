"""Lexicalized tree-adjoining grammar for discourse."""
from .features import FeatureStructure, Relation, classify, compatible, realizable
from .grammar import Grammar, candidate_trees, dump_grammar, load_grammar, seed_grammar

__version__ = "0.1.0"
