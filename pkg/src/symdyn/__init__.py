"""Allow modules to be imported from top-level."""

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.cylinders import (
    CoverSpec,
    CylinderUnion,
    PartitionSpec,
    block_partition,
    code_partition,
    refines,
    symbol_partition,
    trivial_cover,
)
from symdyn.entropy import (
    block_entropy,
    block_frequencies,
    count_low_entropy_words,
    cover_entropy,
    markov_entropy,
    min_subcover_count,
    partition_entropy_under_markov,
    sft_entropy,
)
from symdyn.errors import (
    ArgumentError,
    ConfigError,
    GoodPointNotFoundError,
    InvalidCoverError,
    InvalidPartitionError,
    InvalidSubshiftError,
    PreconditionError,
    ResolutionTooCoarseError,
    ResourceCapError,
    SymdynError,
)
from symdyn.families import (
    BohrSpec,
    IntegerWindowSet,
    SequenceSpec,
    bohr_membership,
    classify_window,
    difference_set,
    ip_set,
    rotation_recurrence,
    sip_set,
    weyl_average,
)
from symdyn.measures import (
    FrequencyMeasure,
    InvariantMeasure,
    MarkovMeasure,
    PeriodicMeasure,
    bernoulli,
    markov_chain,
    parry_measure,
    uniform_markov,
)
from symdyn.mixing import (
    classify_sft,
    matrix_coefficient,
    n_set,
    poincare_return_masses,
    upe_witness,
)
from symdyn.recurrence import minimal_subsystem, wandering_profile
from symdyn.subshifts import (
    SFT,
    FullShift,
    Sturmian,
    Substitution,
    golden_mean,
    language,
    morse,
    orbit_segment,
)
from symdyn.towers import (
    TowerDescription,
    good_fiber_fraction,
    kr_two_heights,
    nest_tower,
    return_times,
    uniformity_defect,
)
from symdyn.variational import (
    attain_cover_entropy,
    empirical_measure,
    evaluate_h_check,
    find_good_point,
    universal_rohlin,
)

__all__ = [
    "ArgumentError",
    "BohrSpec",
    "Caps",
    "ConfigError",
    "CoverSpec",
    "CylinderUnion",
    "DEFAULT_CAPS",
    "FrequencyMeasure",
    "FullShift",
    "GoodPointNotFoundError",
    "IntegerWindowSet",
    "InvalidCoverError",
    "InvalidPartitionError",
    "InvalidSubshiftError",
    "InvariantMeasure",
    "MarkovMeasure",
    "PartitionSpec",
    "PeriodicMeasure",
    "PreconditionError",
    "ResolutionTooCoarseError",
    "ResourceCapError",
    "SFT",
    "SequenceSpec",
    "Sturmian",
    "Substitution",
    "SymdynError",
    "TowerDescription",
    "attain_cover_entropy",
    "bernoulli",
    "block_entropy",
    "block_frequencies",
    "block_partition",
    "bohr_membership",
    "classify_sft",
    "classify_window",
    "code_partition",
    "count_low_entropy_words",
    "cover_entropy",
    "difference_set",
    "empirical_measure",
    "evaluate_h_check",
    "find_good_point",
    "golden_mean",
    "good_fiber_fraction",
    "ip_set",
    "kr_two_heights",
    "language",
    "markov_chain",
    "markov_entropy",
    "matrix_coefficient",
    "min_subcover_count",
    "minimal_subsystem",
    "morse",
    "n_set",
    "nest_tower",
    "orbit_segment",
    "parry_measure",
    "partition_entropy_under_markov",
    "poincare_return_masses",
    "refines",
    "return_times",
    "rotation_recurrence",
    "sft_entropy",
    "sip_set",
    "symbol_partition",
    "trivial_cover",
    "uniform_markov",
    "uniformity_defect",
    "universal_rohlin",
    "upe_witness",
    "wandering_profile",
    "weyl_average",
]
