class ConfigError(ValueError):
    """Malformed configuration input (unknown symbols, bad keys, bad file)."""


class PreconditionError(Exception):
    """The inputs are well formed but outside an operation's hypotheses."""
