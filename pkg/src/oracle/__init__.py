import logging

logger = logging.getLogger("rideshare.oracle")

# MSA iteration cap
MAX_MSA_ITERATIONS = 3000


class RouteBudgetError(RuntimeError):
    def __init__(self, message: str, estimate: int):
        super().__init__(f"{message} (estimated {estimate} routes)")
        self.estimate = estimate


class EmptyRouteSetError(ValueError):
    pass


class OracleSizeError(ValueError):
    pass
