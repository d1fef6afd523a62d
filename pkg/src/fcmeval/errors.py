"""Exception hierarchy. Every domain failure derives from FcmEvalError so the
CLI can map it to a single exit code."""


class FcmEvalError(Exception):
    """Base class for all domain errors raised by this package."""


# -- data model ---------------------------------------------------------------

class UnrecognizedDirection(FcmEvalError):
    def __init__(self, raw: str):
        super().__init__(f"unrecognized direction token: {raw!r}")
        self.raw = raw


class EmptyPhrase(FcmEvalError):
    pass


class UnknownPassage(FcmEvalError):
    pass


# -- extraction ----------------------------------------------------------------

class ParseFailure(FcmEvalError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        detail = "; ".join(f"at {pos}: {msg}" for pos, msg in self.diagnostics)
        super().__init__(f"strict parse failed: {detail}")


class EndpointError(FcmEvalError):
    pass


class MalformedScore(FcmEvalError):
    pass


# -- edge metrics --------------------------------------------------------------

class PassageMismatch(FcmEvalError):
    pass


# -- tournaments ---------------------------------------------------------------

class SelfRating(FcmEvalError):
    pass


class UnknownAnnotation(FcmEvalError):
    pass


class MixedPassages(FcmEvalError):
    pass


class EmptyLeaderboard(FcmEvalError):
    pass


class NoEligibleRater(FcmEvalError):
    pass


# -- analysis ------------------------------------------------------------------

class ItemMismatch(FcmEvalError):
    pass


class DegenerateRanking(FcmEvalError):
    pass


class InsufficientData(FcmEvalError):
    pass


class AlignmentError(FcmEvalError):
    pass


class GoldMismatch(FcmEvalError):
    pass


# -- storage -------------------------------------------------------------------

class SchemaMismatch(FcmEvalError):
    pass


class ValidationError(FcmEvalError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class StorageError(FcmEvalError):
    pass


# -- service -------------------------------------------------------------------

class InvalidSession(FcmEvalError):
    pass


class UnknownRater(FcmEvalError):
    pass


class UnknownPair(FcmEvalError):
    pass


class AlreadyJudged(FcmEvalError):
    pass
