"""Fat-tail statistics for project cost overruns."""
from .dataset import (
    GamesRecord,
    GamesTable,
    OverrunSample,
    derive_unit_costs,
    load_bundled,
    load_games_csv,
    load_sample_csv,
    overrun_ratios,
    validate,
)
from .distfit import (
    GpdFit,
    LognormalFit,
    ParetoFit,
    XminResult,
    fit_gpd,
    fit_lognormal,
    fit_pareto_hill,
    fit_truncated_lognormal,
    ks_distance,
    lognormal_kurtosis,
    select_xmin,
    tail_probability,
)
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateSampleError,
    EmptySampleError,
    EmptyTailError,
    FatcostError,
    NumericalError,
)
from .model_select import VuongResult, vuong_test
from .stats_core import SummaryStats, TestResult, log_trend, rank_sum, summary, wilcoxon_signed_rank
from .tail_risk import (
    MeanEstimate,
    classify_randomness,
    evaluate_heuristics,
    plug_in_mean,
    rcf_uplift,
    shadow_mean_dual,
    spliced_mean,
)
from .tail_sim import SimDistribution, SimulationTrace, mean_dispersion, record_exceedance, running_mean_experiment

__version__ = "0.1.0"
