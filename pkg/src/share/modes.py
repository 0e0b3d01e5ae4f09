from enum import Enum


class Mode(str, Enum):
    DA = "DA"  # drive alone
    RD = "RD"  # ridesharing driver
    RP = "RP"  # ridesharing passenger
    PT = "PT"  # public transport


ALL_MODES = [
    Mode.DA,
    Mode.RD,
    Mode.RP,
    Mode.PT,
]

# column index of each mode in (od, mode) arrays
MODE_INDEX = {mode: i for i, mode in enumerate(ALL_MODES)}

# modes left when no matching sequence exists (ridesharing disabled)
BASELINE_MODES = [Mode.DA, Mode.PT]


class CostLayer(str, Enum):
    """Per-link cost layers. RD splits by whether a passenger is on board."""
    DA = "DA"
    RD_EMPTY = "RD_EMPTY"
    RD_SHARED = "RD_SHARED"
    RP = "RP"
    PT = "PT"


ALL_LAYERS = [
    CostLayer.DA,
    CostLayer.RD_EMPTY,
    CostLayer.RD_SHARED,
    CostLayer.RP,
    CostLayer.PT,
]

# layers routed on the road (vehicle) bush; PT has its own
VEHICLE_LAYERS = [CostLayer.DA, CostLayer.RD_EMPTY, CostLayer.RD_SHARED, CostLayer.RP]
