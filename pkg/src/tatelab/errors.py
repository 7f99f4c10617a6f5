class TatelabError(Exception):
    """Base error; ``code`` is the stable machine-readable error tag."""

    code = "ERROR"

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}")


class ParseError(TatelabError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__("PARSE_ERROR", f"{message} at position {position}")


def fail(code: str, message: str = "") -> TatelabError:
    return TatelabError(code, message)
