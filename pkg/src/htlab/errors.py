"""Exception types shared across htlab."""


class HTLabError(Exception):
    pass


class InvalidLaw(HTLabError, ValueError):
    """Distribution parameters outside their domain."""


class RegimeError(HTLabError, ValueError):
    """Parameters violate a theorem's validity window or a threshold ordering."""


class Unsupported(HTLabError, ValueError):
    """Exponent combination a routine does not handle."""


class NotPairable(HTLabError, ValueError):
    """Sparse part fails the preconditions of the compaction transform."""


class OracleScopeError(HTLabError, ValueError):
    """Instance too large for brute-force evaluation."""


class OracleRejected(HTLabError, RuntimeError):
    """Restart basins of the oracle did not agree."""


class ConfigError(HTLabError, ValueError):
    pass


class TrialTimeout(HTLabError, RuntimeError):
    pass
