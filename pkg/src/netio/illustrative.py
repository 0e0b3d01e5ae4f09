"""
The 16-node diamond-chain test network and its fixed modal demands.

Nodes 1..16 form five diamonds a-{b,c}-d: 1-{2,3}-4, 4-{5,6}-7, 7-{8,9}-10,
10-{11,12}-13, 13-{14,15}-16. Every diamond holds a-b, a-c, b-d, c-d and the
cross link b-c, all bidirectional.
"""
from typing import Dict, List, Tuple

from src.netio.models import DemandTable, Link, ModeCoefficients, ModeCostParams, Network
from src.share.modes import Mode

DIAMONDS: List[Tuple[int, int, int, int]] = [
    (1, 2, 3, 4),
    (4, 5, 6, 7),
    (7, 8, 9, 10),
    (10, 11, 12, 13),
    (13, 14, 15, 16),
]

FREE_FLOW_TIME = 5.0
LENGTH = 5.0
CAPACITY = 10000.0

DRIVER_OD = (1, 16)
PASSENGER_ODS = [(4, 10), (7, 13)]


def undirected_links() -> List[Tuple[int, int]]:
    pairs = []
    for a, b, c, d in DIAMONDS:
        pairs += [(a, b), (a, c), (b, d), (c, d), (b, c)]
    return pairs


def illustrative_network() -> Network:
    links = []
    for i, j in undirected_links():
        for tail, head in ((i, j), (j, i)):
            links.append(Link(tail=tail, head=head, capacity=CAPACITY, length=LENGTH,
                              free_flow_time=FREE_FLOW_TIME, bpr_alpha=0.15, bpr_beta=4.0))
    return Network(nodes=list(range(1, 17)), links=links)


def illustrative_demands() -> Dict[Mode, DemandTable]:
    return {
        Mode.DA: DemandTable(),
        Mode.RD: DemandTable(demands={DRIVER_OD: 40000.0}),
        Mode.RP: DemandTable(demands={od: 20000.0 for od in PASSENGER_ODS}),
        Mode.PT: DemandTable(),
    }


def illustrative_params() -> ModeCostParams:
    """DA and empty RD cost t+20, RD with a passenger and RP cost t+10, PT costs t+15."""
    return ModeCostParams(
        DA=ModeCoefficients(alpha=1.0, fixed=20.0),
        RD=ModeCoefficients(alpha=1.0, fixed=20.0, fixed_shared=10.0),
        RP=ModeCoefficients(alpha=1.0, fixed=10.0),
        PT=ModeCoefficients(alpha=1.0, fixed=15.0),
    )
