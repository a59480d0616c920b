"""Hyperedge replacement grammars and their weak Greibach normal form."""
from .errors import CapExceeded, EmptyLanguage, GrammarError, GraphError, HRGError, NotIsolatedNodeBounded, ParseError
from .grammar import Grammar, Production, SententialForm, apply, default_delta, is_delta_derivation, mu
from .hrgfile import parse_grammar, serialize
from .hypergraph import CanonicalCode, Edge, Hypergraph, LabelTable, canonical_code, esize, handle, isize, replace, validate
from .normalize import Config, PipelineReport, normalize
from .oracle import EnumerationBounds, enumerate_language, is_wgnf, languages_equal

__all__ = [
    "CanonicalCode", "CapExceeded", "Config", "Edge", "EmptyLanguage", "EnumerationBounds", "Grammar",
    "GrammarError", "GraphError", "HRGError", "Hypergraph", "LabelTable", "NotIsolatedNodeBounded",
    "ParseError", "PipelineReport", "Production", "SententialForm", "apply", "canonical_code",
    "default_delta", "enumerate_language", "esize", "handle", "is_delta_derivation", "is_wgnf", "isize",
    "languages_equal", "mu", "normalize", "parse_grammar", "replace", "serialize", "validate",
]
