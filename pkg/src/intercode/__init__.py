"""Deterministic simulation lab for interactive coding over adversarial
feedback and erasure channels."""
from .attacks import AttackReport, attack_adaptive_third, attack_binary_sixth, attack_erasure_half, attack_fixed_quarter
from .channel import (
    ERASED,
    REWIND,
    NoiseLedger,
    ReplayAdversary,
    budget_for,
    builtin_adversaries,
    parse_rate,
    transmit_erasure,
    transmit_feedback,
)
from .codes import FOUR_ARY_BOOK, NOT_FOUND, Codebook, decode_block, encode_block, find_code
from .engine import SimulationResult, SimulationTrace
from .erasure import simulate_binary_erasure_6of10, simulate_binary_erasure_third, simulate_erasure_6ary
from .errors import ConfigurationError, ProtocolViolation, SimulationError, UsageError
from .feedback import (
    classify_messages,
    simulate_adaptive_binary,
    simulate_adaptive_ternary,
    simulate_fixed_binary,
    simulate_fixed_ternary,
)
from .protocol import (
    NoiselessProtocol,
    ProtocolFamily,
    identity_exchange,
    pad_no_double_zero,
    pad_parity_slots,
    run_noiseless,
    seeded_random,
)
from .schemes import SCHEMES, get_scheme
from .verify import SearchOutcome, exhaustive_adversary_search, monitor, sampled_adversary_search

__version__ = "0.1.0"
