"""Quasi-stationary distributions, resurrected chains and their entropies."""

from .canonical import CanonicalStationary, build_pi, entropy_canonical, extract_qsd
from .chain import StateSpace, ValidatedChain, from_arrays, random_chain, validate
from .chainfile import dump_chain, load_chain, parse_chain_text
from .errors import (
    ChainError,
    ChainFileError,
    ConsistencyError,
    InvalidChain,
    InvalidChi,
    NoConvergence,
    PathTooShort,
    ZeroProbabilityTransition,
)
from .qsd import QsdResult, compute_qsd, exit_law, survival_law
from .representations import (
    EntropyReport,
    build_absorbed_rep,
    build_killed_rep,
    entropy_absorbed,
    entropy_balance,
    entropy_killed,
    entropy_report,
    entropy_walk,
    two_stringing,
)
from .resurrection import ResurrectedChain, deresurrect, entropy_resurrected, resurrect
from .simulate import (
    RngConfig,
    SimulationTrace,
    empirical_stats,
    reconstruct_stationary,
    sample_resurrected_path,
    segment_absorbed,
    segment_killed,
    smb_entropy_estimate,
)

__version__ = "0.1.0"
