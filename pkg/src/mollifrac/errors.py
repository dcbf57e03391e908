"""Exception types shared across the package."""


class MollifracError(Exception):
    """Base class for all package errors."""


class OnJumpSet(MollifracError):
    """Point evaluation requested within tolerance of a jump geometry."""


class DimensionMismatch(MollifracError):
    """Field / domain / kernel dimensions disagree."""


class UnknownCatalogEntry(MollifracError):
    """Requested catalog field name does not exist."""


class UnsupportedDimension(MollifracError):
    """Dimension outside the supported range for the operation."""


class ResolutionTooCoarse(MollifracError):
    """Layer-resolving grid cannot be built within the node budget."""


class LayerUnresolved(MollifracError):
    """Sampled field does not resolve the mollification layer."""


class QClampError(MollifracError):
    """Exponent q outside (1, inf) where the energy requires q > 1."""


class MultipleJumpsInWindow(MollifracError):
    """1D profile oracle requires a single isolated jump near the domain."""


class EpsilonTooLarge(MollifracError):
    """Localization scale too large for the jump-set separation."""


class PhiMassNotOne(MollifracError):
    """Mean-correction bump does not have unit discrete mass on the grid."""


class DegenerateFit(MollifracError):
    """Slope fit impossible (all abscissae equal or too few points)."""


class InvalidConfig(MollifracError):
    """Experiment configuration failed validation.

    Carries the offending field name for CLI diagnostics.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
