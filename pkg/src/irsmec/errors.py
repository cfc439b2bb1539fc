"""Exception types shared across the package."""


class DimensionError(ValueError):
    """An array argument has the wrong shape."""


class DomainError(ValueError):
    """A scalar or array argument lies outside its mathematical domain."""


class ConfigError(ValueError):
    """A configuration value violates an invariant."""


class InfeasibleError(RuntimeError):
    """A convex subproblem has an empty feasible set.

    Carries a small report so callers can see which rate constraint failed
    and how close the best attempt came.
    """

    def __init__(self, subproblem, user, max_rate_bits, message=None):
        self.subproblem = subproblem      # "power_freq" | "beamforming" | "irs_phase"
        self.user = user                  # index of the most violated user
        self.max_rate_bits = max_rate_bits  # best achievable rate for that user (bits/s)
        if message is None:
            message = (f"{subproblem}: rate constraint infeasible for user {user} "
                       f"(max achievable {max_rate_bits:.6g} bits/s)")
        super().__init__(message)
