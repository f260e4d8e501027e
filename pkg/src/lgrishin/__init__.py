"""Derivability engine for the Lambek-Grishin calculus and a SAT reduction into it."""

from .core import (
    Atom, Compound, ConnectiveCensus, Leaf, Node, Op, ParseError, Polarity,
    PolarityError, Sequent, census, parse_formula, parse_sequent, parse_structure,
    render, sequent_length,
)
from .calculus import (
    CheckReport, Derivation, RuleLabel, apply_forward, backward_steps, canonical,
    check, display_closure,
)

__version__ = "0.1.0"
