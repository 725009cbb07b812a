"""Exception taxonomy shared across the package.

The split matters for the CLI exit codes: validation problems, resource
ceilings, and unmet theorem hypotheses are reported differently.
"""


class ValidationError(ValueError):
    """Input violates a structural requirement (bad field, bad design, ...)."""


class CeilingError(ValueError):
    """Requested computation exceeds a documented size ceiling."""


class HypothesisUnmetError(ValueError):
    """Inputs fall below the size threshold a theorem requires."""
