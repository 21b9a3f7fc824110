from typing import Optional


class SchemeWalkError(Exception):
    pass

class InputError(SchemeWalkError):
    pass

class SerializationError(InputError):
    pass

class VertexCapExceeded(InputError):
    pass

class IntegerOverflowError(InputError):
    pass

class SchemeAxiomError(SchemeWalkError):
    pass

class NotCommutativeError(SchemeWalkError):
    pass

class EigenspaceSeparationError(SchemeWalkError):
    pass

class FusionAxiomError(SchemeWalkError):
    pass

class NormalizationError(SchemeWalkError):
    pass

class TridiagonalityError(SchemeWalkError):
    def __init__(self, message: str, *, stratum: int, leakage: float):
        super().__init__(message)
        self.stratum = stratum
        self.leakage = leakage

class MomentOverflowError(SchemeWalkError):
    def __init__(self, message: str, *, moments: list[int], overflow_at: Optional[int] = None):
        super().__init__(message)
        self.moments = moments
        self.overflow_at = overflow_at
