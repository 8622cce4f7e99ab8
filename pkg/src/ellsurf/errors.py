"""Exception hierarchy.

Errors are grouped by how the CLI should exit: bad input (2), numerical
failure that may be retried at higher precision (3), or a violated internal
invariant (4).
"""


class EllsurfError(Exception):
    exit_code = 4


class InputError(EllsurfError):
    exit_code = 2


class NumericError(EllsurfError):
    exit_code = 3


class InternalError(EllsurfError):
    exit_code = 4


# --- exact / combinatorial layer ---

class NotSL2(InputError):
    """Matrix determinant is not 1."""


class NotQuasiUnipotent(InputError):
    """Trace outside {-2,...,2}; cannot be an elliptic-fibre monodromy."""


class NotKodaira(InputError):
    """SL2(Z) class is not one of the fibre types (wrong orientation)."""


class NotI1(InputError):
    """Matrix is not a nodal-fibre (I1) monodromy."""


class IndexOutOfRange(InputError):
    pass


class NotSubgroup(InputError):
    pass


class DependentInput(InputError):
    pass


class NotLefschetzInput(InputError):
    pass


class EulerNot12Multiple(InputError):
    pass


class SpanFailure(InternalError):
    """Word enumeration failed to span the full homology rank."""


class InternalInconsistency(InternalError):
    pass


# --- pencil / operator layer ---

class ParseError(InputError):
    pass


class NotHomogeneousDegree3(InputError):
    pass


class NoZeroSection(InputError):
    """[0:1:0] does not lie on every fibre."""


class DegeneratePencil(InputError):
    pass


class IsotrivialError(InputError):
    """Fibrewise periods satisfy a first order equation; out of scope."""


class SingularReduction(InternalError):
    pass


# --- numeric layer ---

class NotSquarefree(InputError):
    pass


class StepTooClose(NumericError):
    pass


class LatticeRecoveryFailure(NumericError):
    pass


class ProportionalVanishingCycles(NumericError):
    pass


class NonRationalWronskian(NumericError):
    pass


class ExponentRecoveryFailure(NumericError):
    pass


class FormSingularOnPath(NumericError):
    pass


class SingularChangeOfBasis(InternalError):
    pass


class TrivNotInNS(NumericError):
    """Trivial lattice not inside the recovered Neron-Severi lattice."""


class IndefiniteMWGram(NumericError):
    """Height pairing not positive definite; NS heuristic likely failed."""
