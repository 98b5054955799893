"""Simulator and analysis library for a three-user MDI-QKD protocol.

Three users send phase-encoded coherent pulses to an untrusted measurement
unit that mixes them through a fixed rotation and watches three threshold
detectors; announced click patterns plus basis reconciliation yield
pairwise keys. The package provides the optics kernel, the sifting rules,
exact curve enumeration, and a reproducible Monte Carlo executor, plus a
CLI emitting CSV/JSON for plotting.
"""

from .analytics import (
    ScenarioStats,
    SweepPoint,
    match_curve,
    mismatch_curve,
    overall_curve,
    pair_stats,
    scenario_stats,
    two_user_baseline,
    user_discard_probability,
)
from .encoding import (
    ALL_TRIPLETS,
    MATCH_TRIPLETS,
    MISMATCH_TRIPLETS,
    USER_NAMES,
    USERS,
    Basis,
    BasesTriplet,
    ChannelParams,
    EncodingChoice,
    TripletClass,
    classify_triplet,
    phase_of,
    prepare_pulses,
)
from .mcsim import (
    RoundRecord,
    SessionConfig,
    SessionStats,
    UndefinedStatisticError,
    empirical_ber,
    run_round,
    run_session,
)
from .optics import (
    InterferenceUnit,
    basis_fidelity,
    build_interference_unit,
    click_probability,
    coherent_overlap,
    make_coherent_amplitude,
    pattern_probability,
    transform_modes,
)
from .sifting import (
    ADMISSIBLE_TYPES,
    PAIR_NAMES,
    PAIRS,
    PROTOCOL_TABLE,
    SiftingOutcome,
    TableRow,
    TYPE_PATTERNS,
    admissible,
    classify_pattern,
    expected_type,
    sift,
)

__version__ = "0.1.0"
