import logging

logger = logging.getLogger("rideshare.matchgen")

DEFAULT_CAPACITY = 2
DEFAULT_MAX_PASSENGERS = 2
DEFAULT_DETOUR_FACTOR = 1.5

# slack on the detour comparison so exact-limit itineraries survive float rounding
DETOUR_TOLERANCE = 1e-9


class InfeasibleSequenceError(ValueError):
    pass


class UnreachableLevelError(ValueError):
    pass
