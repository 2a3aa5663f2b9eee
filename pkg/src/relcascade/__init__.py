"""Relation-first cascade extraction of (head, relation, tail) triples from text."""

__version__ = "0.1.0"
