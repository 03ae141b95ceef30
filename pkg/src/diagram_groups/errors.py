"""Exception hierarchy shared by every module of the package."""


class DiagramError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "DiagramError"

    def __init__(self, detail=""):
        super().__init__(detail)
        self.detail = detail


def _make(name, doc):
    return type(name, (DiagramError,), {"code": name, "__doc__": doc})


InvalidWord = _make("InvalidWord", "Empty word or a letter outside the generators.")
InvalidPresentation = _make("InvalidPresentation", "Malformed semigroup presentation.")
UnknownRelation = _make("UnknownRelation", "Relation pair not in the presentation.")
AttachMismatch = _make("AttachMismatch", "Cell cannot be attached at the requested offset.")
ConcatMismatch = _make("ConcatMismatch", "bot(u) differs from top(v).")
TopMismatch = _make("TopMismatch", "Diagrams do not share the required boundary word.")
NotReduced = _make("NotReduced", "A reduced diagram was required.")
NotThin = _make("NotThin", "A thin diagram was required.")
InvalidCube = _make("InvalidCube", "Base/thin pair does not describe a normalized cube.")
NotAVertex = _make("NotAVertex", "Diagram is not a vertex of the given cube.")
TooManyPrefixes = _make("TooManyPrefixes", "Order-ideal count exceeds the enumeration cap.")
BallTooLarge = _make("BallTooLarge", "Ball enumeration exceeded its vertex cap.")
InsufficientBall = _make("InsufficientBall", "Ambient ball does not cover the window neighbourhood.")
PointOutsideWindow = _make("PointOutsideWindow", "Point does not lie in any cube of the window.")
NotSpherical = _make("NotSpherical", "Group elements must be reduced spherical diagrams.")
InvariantViolation = _make("InvariantViolation", "Internal consistency check failed.")
ShapeMismatch = _make("ShapeMismatch", "Conjugate does not have the expected four-cell shape.")
CounterexampleFailure = _make("CounterexampleFailure", "Computed displacement differs from 2+2/(n+1).")
ClosureTooLarge = _make("ClosureTooLarge", "Conjugate closure exceeded its size cap.")
