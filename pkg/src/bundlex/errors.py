"""Exception hierarchy for bundlex."""


class BundleError(Exception):
    pass


class DimensionMismatch(BundleError, ValueError):
    pass


class SingularMatrix(BundleError, ValueError):
    pass


class TranscendentalWord(BundleError):
    """Raised when a polynomial expansion meets an over-shear factor."""


class NoKnownFlow(BundleError):
    pass


class NonDiagonalizable(BundleError):
    pass


class CollarOverlap(BundleError, ValueError):
    pass


class HoleOutsideDomain(BundleError, ValueError):
    pass


class BranchCutCrossing(BundleError, ValueError):
    pass


class NotTimeOneMap(BundleError):
    pass


class SpecFormatError(BundleError, ValueError):
    pass
