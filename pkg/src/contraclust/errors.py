"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand shapes do not satisfy an operation's contract."""


class DomainError(ValueError):
    """Input value outside an operation's mathematical domain (e.g. log of <= 0)."""


class DegenerateInputError(ValueError):
    """Structurally valid input that the operation cannot handle (e.g. zero-norm row)."""


class ParameterError(ValueError):
    """Invalid hyperparameter or configuration value."""


class ContractError(RuntimeError):
    """A documented API contract was violated (simplex precondition, double backward, ...)."""


class FormatError(ValueError):
    """Malformed on-disk artifact (bad magic, truncation, version mismatch)."""


class GeometryError(RuntimeError):
    """Dataset generator could not satisfy its geometric constraints."""


class ConfigError(ValueError):
    """One or more run-config violations; message lists all of them."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in self.problems))
