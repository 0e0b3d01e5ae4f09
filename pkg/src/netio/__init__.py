import logging

logger = logging.getLogger("rideshare.netio")

# TNTP markers
END_OF_METADATA = "<END OF METADATA>"
COMMENT_CHAR = "~"


class NetworkParseError(ValueError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NetworkValidationError(ValueError):
    pass


class UnknownFlowClassError(KeyError):
    pass


class NegativeFlowError(ValueError):
    pass
