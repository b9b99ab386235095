"""Unconditionally secure multi-party protocols on cycle topologies.

No one-way functions anywhere: secrecy comes from random masking over a
constructible ring and from the shape of the secure-channel graph.  The
package pairs each protocol with a deterministic simulator (seeded,
replayable transcripts) and an exhaustive enumeration harness that
checks the hiding claims as exact distribution equalities.
"""

from .analysis import (
    CoalitionReport,
    SecrecyReport,
    SecrecySpec,
    TransmissionStats,
    coalition_closure,
    secrecy_enumeration_check,
    standard_suite,
    transmission_stats,
)
from .arithmetic import (
    BitwiseOutcome,
    CompareOutcome,
    EQUAL,
    GREATER,
    LESS,
    NEGATIVE,
    POSITIVE,
    example_f1,
    example_f2,
    millionaires_bitwise,
    millionaires_compare,
    secure_product,
    secure_rating,
    secure_sum,
    sum_of_powers,
    symmetric_from_power_sums,
)
from .commitment import (
    CommitSplit,
    CommitmentLedger,
    commit2_dummy,
    commit3,
    commit_k,
    decommit2_dummy,
    decommit3,
    decommit_k,
    ot_dummy,
    split_value,
)
from .engine import (
    Message,
    Protocol,
    ScriptedSource,
    Transcript,
    View,
    eavesdropper_view,
    extract_view,
    merge_views,
    run,
)
from .errors import (
    BudgetExceeded,
    CheatDetected,
    DummyRandomnessError,
    PhaseError,
    ProtocolError,
    ReplayError,
    RingError,
    TopologyError,
)
from .poker import (
    DealConfig,
    DealResult,
    deal_deck,
    dummy_deal_two_players,
    dummy_dealer_fixed_hands,
    expected_circles,
    knuth_shuffle,
    protocol1_distribute,
    protocol2_random3,
    protocol2_random_k,
)
from .ring import RingSpec, integers, mod_ring
from .sharing import (
    ShareVector,
    distribute_shares_subroutine,
    reconstruct,
    share_secret_kk,
)
from .topology import (
    ChannelGraph,
    Party,
    build_cycle,
    dummy_triangle,
    validate_topology,
)

__version__ = "0.1.0"
