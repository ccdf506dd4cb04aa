"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to: 4 for input
that cannot be parsed, 5 for input outside the supported fragment or over a
resource cap.
"""


class HammerError(Exception):
    exit_code = 5


class ParseError(HammerError):
    exit_code = 4

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}" if line else message)


class ArityMismatch(ParseError):
    pass


class NonLinear(ParseError):
    pass


class UnsupportedFragment(HammerError):
    pass


class UnsupportedAtom(UnsupportedFragment):
    pass


class NonPositiveConjecture(UnsupportedFragment):
    pass


class NotHorn(UnsupportedFragment):
    pass


class NotComplementary(HammerError):
    pass


class MalformedBorders(HammerError):
    pass


class NotStratified(HammerError):
    pass


class GoalPresent(HammerError):
    pass


class UnsupportedFormat(HammerError):
    exit_code = 3


class CombinatorialLimit(HammerError):
    pass


class SizeLimit(HammerError):
    pass


class ResourceLimit(HammerError):
    pass


class TooLarge(HammerError):
    pass
