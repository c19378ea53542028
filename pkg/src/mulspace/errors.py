class ValidationError(ValueError):
    """Bad input caught before any computation.

    ``field`` names the offending parameter so the CLI can report it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class QuadratureError(RuntimeError):
    """A discretized integral failed its own error estimate."""
