"""Gauge integration built on effective covering lemmas.

Exact tags live in Q(sqrt 2); radii are rational lower bounds; function
values are binary64.
"""

from .core import (
    UNIT,
    ConstantGauge,
    FunctionGauge,
    Gauge,
    Interval,
    Piece,
    RealFn,
    Run,
    TaggedPartition,
    is_fine,
    mesh,
    min_gauge,
    riemann_sum,
    split_gauge,
    uniform_partition,
)
from .cousin import (
    DEFAULT_STRATEGY,
    IRRATIONAL_FIRST,
    MIDPOINT_FIRST,
    Subcover,
    TagStrategy,
    cover_to_partition,
    fine_partition,
    finite_subcover,
    verify_cover,
)
from .errors import GaugeError, ParseError
from .exact import SQRT2, Tag, parse_tag
from .expr import parse_expr
from .fan import (
    BinSeq,
    CantorFunctional,
    cover_transfer,
    cover_transfer_inv,
    theta,
    verify_scf,
    xi_map,
    zeta_map,
)
from .funcs import (
    abs_kappa_partial,
    builtin,
    builtin_modulus,
    enumerate_rational,
    kappa_eval,
    kappa_modulus,
    poly,
    rational_index,
    step,
)
from .integrator import (
    DivergenceReport,
    IntegralResult,
    additivity_check,
    cauchy_gap,
    gauge_integrate,
    hake_limit,
    riemann_integrate,
)
from .lindelof import (
    BaireGauge,
    BaireSeq,
    FiniteTree,
    baire_enumeration,
    countable_subcover_reals,
    find_cover_index,
    wellfounded_via_xi,
)

__version__ = "0.1.0"
