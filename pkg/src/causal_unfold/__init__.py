"""Causal unfoldings of models with parallel causes.

Equivalence families, event structures with an equivalence, extremal
realisations, the unfolding ``er`` with its counit, the collapse to general
event structures, and the constructions (hiding, stable families, products,
pullbacks) built on them.
"""

from .caps import Caps, caps_override, get_caps, set_caps
from .constructions import (
    AxReport,
    Span,
    check_ax,
    factor_partial_map,
    hide,
    is_stable_ef,
    pr,
    product_ef,
    pseudo_pullback_edc,
    pseudo_pullback_ef,
    pullback_edc,
    pullback_ef,
    restrict_to_ax,
    unamb,
)
from .errors import (
    AxiomsFailed,
    ConfigExplosion,
    EventStructureError,
    KindMismatch,
    NotEquivClosed,
    NotStable,
    SearchExplosion,
)
from .events import PairEvent
from .realisations import (
    Realisation,
    RealisationMap,
    coarsen_to_extremal,
    enumerate_extremals,
    enumerate_prime_extremals,
    enumerate_realisations,
    extremal_order,
    is_extremal,
    is_extremal_by_definition,
    is_realisation,
)
from .serialize import ParseError, dumps, load, loads
from .structures import (
    Category,
    Ese,
    EquivFamily,
    GeneralES,
    PrimeES,
    StructureMap,
    compose,
    configurations,
    configurations_ese,
    identity_map,
    irreducibles,
    is_isomorphism,
    is_replete,
    map_equiv,
    validate_map,
    validate_structure,
)
from .unfolding import (
    causal_unfolding,
    check_structural_axioms,
    col,
    er,
    fam,
    factor_through_counit,
    rebuild_iso,
    unit,
    unit_iso_ese,
)

__version__ = "0.1.0"
