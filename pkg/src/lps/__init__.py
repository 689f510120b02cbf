"""Logic-based production systems: parsing, the operational cycle, and model-theoretic checks."""

from importlib import resources

from .cycle import AgentState, run_cycle
from .environment import ArbitrationPolicy, Trace, arbitrate, make_agents, run_system
from .errors import LPSError
from .fol import Model, eval_truth, query
from .frame import build_et_program, et_model, frame_check, frame_equivalence, run_model
from .parser import parse_atom, parse_choice_script, parse_event_script, parse_program, parse_term
from .sorts import SortDecl, Universe, herbrand_universe, make_universe
from .state import EventSet, State, apply_transition, check_integrity, compute_deltas
from .strat import minimal_model, perfect_model, weakly_perfect_model
from .terms import Atom, Fn, Var, unify
from .verify import check_run

__all__ = [
    "AgentState", "ArbitrationPolicy", "Atom", "EventSet", "Fn", "LPSError", "Model", "SortDecl",
    "State", "Trace", "Universe", "Var", "apply_transition", "arbitrate", "build_et_program",
    "check_integrity", "check_run", "compute_deltas", "corpus_text", "et_model", "eval_truth",
    "frame_check", "frame_equivalence", "herbrand_universe", "make_agents", "make_universe",
    "minimal_model", "parse_atom", "parse_choice_script", "parse_event_script", "parse_program",
    "parse_term", "perfect_model", "query", "run_cycle", "run_model", "run_system", "unify",
    "weakly_perfect_model",
]


def corpus_text(name: str) -> str:
    """Source of a bundled example file, e.g. ``corpus_text("dining.lps")``."""
    return resources.files(__package__).joinpath("corpus", name).read_text()
