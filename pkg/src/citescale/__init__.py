"""Heavy-tailed citation analytics: tail laws, inequality measures, and
impact-index scaling.

Core objects:

* :class:`ParetoModel` and the bare-exponent helpers in :mod:`citescale.pareto`
  give the density, tail cumulatives, gintropy, and Gini index of the
  power-law-tailed citation distribution.
* :class:`RiskFamily` generalises the tail law to any cumulative risk shape
  and solves the impact-index equation for it.
* :mod:`citescale.empirical` computes the same quantities from raw citation
  counts, :mod:`citescale.fitting` recovers the shape exponent per record,
  and :mod:`citescale.scaling` aggregates cohorts into the scaling plane.
* :mod:`citescale.cohort` reads, writes, filters, and synthesises cohorts.

Figure rendering (:mod:`citescale.figures`) and the batch pipeline
(:mod:`citescale.cli`) import matplotlib and are deliberately not pulled in
here; import them explicitly when needed.
"""

from .errors import (BracketError, CitescaleError, CohortValidationError,
                     DegenerateRecordError, EmptyCohortError, QuadratureError,
                     TooFewPointsError, ZeroCitationsError)
from .pareto import (B_MAX, ParetoModel, gini_closed_form, gini_numeric,
                     hirsch_bound_factor, max_gintropy)
from .risk import (FAMILY_NAMES, RiskFamily, exponential_family,
                   family_by_name, general_hirsch_solve,
                   general_scaling_curve, kappa, lambda_of,
                   tsallis_pareto_family)
from .empirical import (CitationRecord, LorenzCurve, empirical_gintropy,
                        empirical_tail, gini_lorenz, gini_pairwise, h_index,
                        lorenz_curve)
from .fitting import (CollapseHistogram, FitConfig, FitResult,
                      RejectionReason, collapse_coordinates, fit, fit_cohort,
                      fit_loss)
from .cohort import (FILTER_PRESETS, CohortFile, SummaryRow, SynthSpec,
                     filter_cohort, generate_synthetic, load_cohort,
                     read_summary_csv, save_cohort, write_summary_csv)
from .scaling import (E_BOUND, BinConfig, CohortSummary, ScalingPoint,
                      bound_check, bound_violation_report, build_summary_rows,
                      impscale_curve, pareto_hirsch_solve, point_from_counts,
                      summarize_cohort, two_h_trend)
from .verify import CHECK_NAMES, CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "B_MAX", "BinConfig", "BracketError", "CHECK_NAMES", "CheckResult",
    "CitationRecord", "CitescaleError", "CohortFile", "CohortSummary",
    "CohortValidationError", "CollapseHistogram", "DegenerateRecordError",
    "E_BOUND", "EmptyCohortError", "FAMILY_NAMES", "FILTER_PRESETS",
    "FitConfig", "FitResult", "LorenzCurve", "ParetoModel", "QuadratureError",
    "RejectionReason", "RiskFamily", "ScalingPoint", "SummaryRow", "SynthSpec",
    "TooFewPointsError", "ZeroCitationsError", "bound_check",
    "bound_violation_report", "build_summary_rows", "collapse_coordinates",
    "empirical_gintropy", "empirical_tail", "exponential_family",
    "family_by_name", "filter_cohort", "fit", "fit_cohort", "fit_loss",
    "general_hirsch_solve", "general_scaling_curve", "generate_synthetic",
    "gini_closed_form", "gini_lorenz", "gini_numeric", "gini_pairwise",
    "h_index", "hirsch_bound_factor", "impscale_curve", "kappa", "lambda_of",
    "load_cohort", "lorenz_curve", "max_gintropy", "pareto_hirsch_solve",
    "point_from_counts", "read_summary_csv", "run_checks", "save_cohort",
    "summarize_cohort", "tsallis_pareto_family", "two_h_trend",
    "write_summary_csv", "__version__",
]
