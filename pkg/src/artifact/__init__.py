"""Workbench for truly concurrent process algebra."""

from .syntax import ParseError, Signature, parse_term, render_term
from .rewrite import normalize, prove_equal, is_basic
from .sos import build_lts, derive_steps, DataEnv
from .equivalence import KERNEL, step_bisim
from .structures import PES, PetriNet, structurize_pes, structurize_pn, term_to_pes

__version__ = "0.1.0"
