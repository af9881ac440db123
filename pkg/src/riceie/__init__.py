"""Rice Ie-function: six evaluation routes, closed-form bounds, validation CLI."""

from .bounds import Bracket, ErrorRecord, bracket, error_record, lower_bound, upper_bound
from .errors import ConvergenceError, DomainError, RiceIeError
from .ie import (
    AbParams,
    EvalPoint,
    Method,
    MethodResult,
    ab_params,
    evaluate,
    ie_auto,
    ie_eq1,
    ie_eq2,
    ie_lemma1,
    ie_marcum_eq5,
    ie_marcum_eq6,
    ie_series_eq3,
    ie_series_eq4,
)
from .marcum import marcum_q1, marcum_q_half, marcum_q_m

__version__ = "0.1.0"

__all__ = [
    "AbParams", "Bracket", "ConvergenceError", "DomainError", "ErrorRecord", "EvalPoint",
    "Method", "MethodResult", "RiceIeError", "ab_params", "bracket", "error_record",
    "evaluate", "ie_auto", "ie_eq1", "ie_eq2", "ie_lemma1", "ie_marcum_eq5",
    "ie_marcum_eq6", "ie_series_eq3", "ie_series_eq4", "lower_bound", "marcum_q1",
    "marcum_q_half", "marcum_q_m", "upper_bound",
]
