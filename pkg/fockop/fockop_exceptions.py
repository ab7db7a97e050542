class SymbolSyntaxError(Exception):
    """
    Raised by the symbol and operator-expression parsers. Carries the offending text and the
    zero based column so the message can be rendered with a caret under the error.
    """

    def __init__(self, message: str, text: str = '', position: int = 0):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(self.annotated())

    def annotated(self) -> str:
        if not self.text:
            return self.message
        return f'{self.message} at column {self.position + 1}\n  {self.text}\n  {" " * self.position}^'


class DimensionMismatchError(Exception):
    pass


class PreconditionError(Exception):
    pass


class DegenerateSampleError(Exception):
    pass


class InvariantViolation(Exception):
    pass
