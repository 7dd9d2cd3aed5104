"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError (and argparse usage
problems) exit 1, FileFormatError and other data problems exit 2,
NumericalAbort exits 3.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration. Collects every violated field at once."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class OverExclusionError(ConfigError):
    """An exclusion rule would leave an empty residual set."""


class FileFormatError(ValueError):
    """Unreadable or malformed input file, pointing at the offending line."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        if line is None:
            super().__init__(f"{path}: {message}")
        else:
            super().__init__(f"{path}:{line}: {message}")


class NumericalAbort(RuntimeError):
    """Optimization produced a non-finite value."""

    def __init__(self, iteration, vertex, message):
        self.iteration = iteration
        self.vertex = vertex
        super().__init__(message)
