import logging

logger = logging.getLogger("rideshare.bush")

# link flow below this counts as unused
FLOW_EPS = 1e-8
# a non-bush link must beat the label by more than this to count as improving
COST_EPS = 1e-9

VEHICLE_GROUP = "vehicle"
TRANSIT_GROUP = "transit"


class UnreachableNodeError(ValueError):
    def __init__(self, node, root=None):
        msg = f"node {node} is unreachable" + (f" from root {root}" if root is not None else "")
        super().__init__(msg)
        self.node = node


class StaleLabelsError(RuntimeError):
    pass
