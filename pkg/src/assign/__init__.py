import logging

logger = logging.getLogger("rideshare.assign")

# pools and option flows at or below this are treated as empty
FLOW_TOL = 1e-9
# relative slack used by the invariant checks
INVARIANT_TOL = 1e-9

COST_REFRESH_GROUP = "group"
COST_REFRESH_PASS = "pass"


class DisconnectedODError(ValueError):
    pass


class InvariantViolation(AssertionError):
    pass
