"""Exact decision procedures for comparative risk aversion and single-crossing aggregation."""

from .core import (
    Alternatives,
    FamilyInstance,
    FunctionFamily,
    Lottery,
    ParamFunction,
    ParamInstance,
    ParamUtilityTable,
    Poset,
    UtilityPair,
    UtilityTable,
    expected_value,
    parse_instance,
    transitive_closure,
)
from .crossing import (
    CrossingVerdict,
    check_family_sc,
    check_mixture_sc,
    check_mixture_sc_grid,
    check_single_crossing,
    check_srm,
    srm_ratio_form,
)
from .equivalence import (
    InstanceGenParams,
    check_prop_a,
    check_prop_b,
    check_proposition,
    differences_family,
    gen_positive_instance,
    gen_random_instance,
)
from .risk_order import (
    PLTransform,
    RiskOrderVerdict,
    apply_transform,
    build_transform,
    check_compression,
    check_lra_definition,
    check_lra_grid,
    check_lra_pratt,
    check_ordinal_equivalence,
)

__version__ = "0.1.0"
