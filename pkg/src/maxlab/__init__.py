"""maxlab: exact computations with modified maximal operators on finite
rational metric measure spaces, plus a reproduction harness and service."""

from .constants import (
    ConstantEstimate,
    AnalyticBound,
    RatioResult,
    analytic_upper,
    ascent_search,
    average_on_set,
    delta_scan,
    ratio,
    strong_ratio,
    upper_for_space,
    weak_ratio,
    with_upper,
)
from .constructions import (
    FamilyParams,
    basic_s,
    basic_t,
    build_space,
    family_lemma6,
    family_lemma6p,
    family_lemma7,
    family_lemma7p,
    first_generation,
    glue,
    glue_parts,
    lemma1_modify,
    second_generation,
    segment_preset_lemma2,
    segment_preset_lemma3,
    segment_type,
    single_point,
)
from .maximal import (
    BallPair,
    MaximalValues,
    TestFunction,
    Witness,
    ball_at,
    ball_table,
    critical_radii,
    m_centered,
    m_centered_oracle,
    m_noncentered,
    m_noncentered_oracle,
    witness_balls,
)
from .rationals import INF, format_rational, parse_p, parse_rational
from .spaces import (
    MetricMeasureSpace,
    PointId,
    ValidationReport,
    diameter,
    make_space,
    scale_measure,
    scale_metric,
    total_measure,
    validate_metric,
)

__version__ = "0.1.0"
