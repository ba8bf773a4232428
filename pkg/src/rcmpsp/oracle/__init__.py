"""Independent feasibility checker and exhaustive reference solver."""
from .brute import OracleLimitExceeded, OracleLimits, brute_force_solve, estimate_space
from .timeindexed import TimeIndexedSchedule, from_time_indexed, to_time_indexed
from .validator import Violation, prune, tags_of, validate_schedule

__all__ = ["OracleLimitExceeded", "OracleLimits", "TimeIndexedSchedule", "Violation",
           "brute_force_solve", "estimate_space", "from_time_indexed", "prune", "tags_of", "to_time_indexed",
           "validate_schedule"]
