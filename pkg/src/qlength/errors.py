"""Exception types raised by the qlength package.

Every error carries a short machine-readable ``code`` that the command line
front end writes to stderr.
"""


class QuantumLengthError(ValueError):
    code = "error"


class UnnormalizedDensity(QuantumLengthError):
    code = "unnormalized_density"


class NegativeRadicand(QuantumLengthError):
    code = "negative_radicand"


class InvalidIndex(QuantumLengthError):
    code = "invalid_index"


class OverlappingSegments(QuantumLengthError):
    code = "overlapping_segments"


class OddElectronCount(QuantumLengthError):
    code = "odd_electron_count"


class EmptyFilling(QuantumLengthError):
    code = "empty_filling"


class IndivisibleSegmentation(QuantumLengthError):
    code = "indivisible_segmentation"


class NoConvergence(QuantumLengthError):
    code = "no_convergence"


class ExcessiveOverlap(QuantumLengthError):
    code = "excessive_overlap"


class EmptySubsystem(QuantumLengthError):
    code = "empty_subsystem"


class MaxSubdivisionsExceeded(QuantumLengthError):
    code = "max_subdivisions_exceeded"


class DuplicateLevelForFermions(QuantumLengthError):
    code = "duplicate_level_for_fermions"


class NoSignChange(QuantumLengthError):
    code = "no_sign_change"
