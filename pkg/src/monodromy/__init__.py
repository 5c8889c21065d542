"""Monodromy solving for affine-linear parametric polynomial systems.

Typical use::

    from monodromy import cyclic_family, make_flower, monodromy_solve, StopCriterion
    F = cyclic_family(5)
    G = make_flower(3, 2, F, np.random.default_rng(0))
    vertex, points = monodromy_solve(G, StopCriterion.known_count(70))
"""

from .families import (
    FamilySpec,
    crn_small,
    cyclic_family,
    dense_family,
    katsura_family,
    nash_family,
    parse_family,
    sparse_family,
)
from .graph import (
    HomotopyEdge,
    HomotopyGraph,
    MonodromyResult,
    PointArray,
    SolutionCountExceeded,
    StopCriterion,
    Strategy,
    augment_least_connected,
    dynamic_monodromy_solve,
    make_complete_graph,
    make_flower,
    monodromy_solve,
    potential_e,
    potential_lower_bound,
    select_edge,
    track_edge,
)
from .polysys import (
    Homotopy,
    ParametricSystem,
    SeedingError,
    SquareSystem,
    Term,
    build_homotopy,
    create_seed_pair,
    square_system,
)
from .seeding import rng_stream
from .stats import (
    coupon_collector_expected,
    expected_betti,
    simulate_naive_strategy,
    simulate_transitivity,
    transitivity_probability,
    transitivity_table,
)
from .tracker import TrackOptions, TrackOutcome, TrackStatus, newton_refine, track_path

__version__ = "0.1.0"
