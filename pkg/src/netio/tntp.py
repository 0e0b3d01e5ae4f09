"""
Readers and writers for the TNTP `_net.tntp` / `_trips.tntp` text formats.
"""
import io
import re
from typing import Dict, List, TextIO, Tuple, Union

from pydantic import ValidationError

from src.netio import COMMENT_CHAR, END_OF_METADATA, NetworkParseError, NetworkValidationError, logger
from src.netio.models import DemandTable, Link, Network

NET_COLUMNS = ["init_node", "term_node", "capacity", "length", "free_flow_time", "B", "power", "speed", "toll", "type"]

_METADATA_RE = re.compile(r"<([^>]+)>\s*(.*)")
_TRIP_PAIR_RE = re.compile(r"(\d+)\s*:\s*([-+0-9.eE]+)")


def _as_stream(text: Union[str, TextIO]) -> TextIO:
    return io.StringIO(text) if isinstance(text, str) else text


def _read_metadata(lines: List[str]) -> Tuple[Dict[str, str], int]:
    """Collects `<KEY> value` headers. Returns (metadata, index of the first body line)."""
    metadata = {}
    has_marker = any(line.strip().upper().startswith(END_OF_METADATA) for line in lines)
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not has_marker:
            return metadata, 0
        if line.upper().startswith(END_OF_METADATA):
            return metadata, i + 1
        match = _METADATA_RE.match(line)
        if match:
            metadata[match.group(1).strip().upper()] = match.group(2).strip()
    return metadata, len(lines)


def _strip_line(raw: str) -> str:
    line = raw.split(COMMENT_CHAR, 1)[0].strip()
    return line.rstrip(";").strip()


def parse_tntp_network(text: Union[str, TextIO]) -> Network:
    lines = _as_stream(text).read().splitlines()
    metadata, start = _read_metadata(lines)

    links = []
    for offset, raw in enumerate(lines[start:]):
        line_number = start + offset + 1
        line = _strip_line(raw)
        if not line:
            continue
        fields = line.split()
        if len(fields) < 5:
            raise NetworkParseError(f"expected at least 5 columns, got {len(fields)}", line_number)
        try:
            values = [float(v) for v in fields[:10]]
        except ValueError:
            raise NetworkParseError(f"non-numeric value in row: {line!r}", line_number)
        values += [0.0] * (10 - len(values))
        row = dict(zip(NET_COLUMNS, values))
        if row["capacity"] <= 0:
            raise NetworkValidationError(f"line {line_number}: zero or negative capacity on link ({int(row['init_node'])},{int(row['term_node'])})")
        try:
            links.append(Link(
                tail=int(row["init_node"]),
                head=int(row["term_node"]),
                capacity=row["capacity"],
                length=row["length"],
                free_flow_time=row["free_flow_time"],
                bpr_alpha=row["B"] if len(fields) > 5 else 0.15,
                bpr_beta=row["power"] if len(fields) > 6 else 4.0,
                speed=row["speed"],
                toll=row["toll"],
                link_type=int(row["type"]),
            ))
        except ValidationError as e:
            raise NetworkValidationError(f"line {line_number}: {e}")

    nodes = set()
    for link in links:
        nodes.add(link.tail)
        nodes.add(link.head)
    declared = metadata.get("NUMBER OF NODES")
    if declared:
        nodes.update(range(1, int(float(declared)) + 1))
    network = Network(nodes=sorted(nodes), links=links)
    logger.debug(f"Parsed network: {network.num_nodes} nodes, {network.num_links} links")
    return network


def parse_tntp_trips(text: Union[str, TextIO]) -> DemandTable:
    lines = _as_stream(text).read().splitlines()
    _, start = _read_metadata(lines)

    demands: Dict[Tuple[int, int], float] = {}
    origin = None
    dropped_intra = 0.0
    for offset, raw in enumerate(lines[start:]):
        line_number = start + offset + 1
        line = raw.split(COMMENT_CHAR, 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("origin"):
            parts = line.split()
            if len(parts) < 2:
                raise NetworkParseError("Origin line without a node id", line_number)
            origin = int(parts[1])
            continue
        pairs = _TRIP_PAIR_RE.findall(line)
        if not pairs:
            raise NetworkParseError(f"expected 'dest : flow' pairs, got {line!r}", line_number)
        if origin is None:
            raise NetworkParseError("destination entries before any Origin line", line_number)
        for dest, flow in pairs:
            q = float(flow)
            if q < 0:
                raise NetworkValidationError(f"line {line_number}: negative demand {q} for ({origin},{dest})")
            if q == 0:
                continue
            if int(dest) == origin:
                dropped_intra += q
                continue
            od = (origin, int(dest))
            demands[od] = demands.get(od, 0.0) + q

    if dropped_intra > 0:
        logger.warning(f"Dropped {dropped_intra} intra-zonal trips")
    return DemandTable(demands=demands)


def format_tntp_network(network: Network) -> str:
    out = io.StringIO()
    out.write(f"<NUMBER OF ZONES> {len(network.origins | network.destinations)}\n")
    out.write(f"<NUMBER OF NODES> {network.num_nodes}\n")
    out.write("<FIRST THRU NODE> 1\n")
    out.write(f"<NUMBER OF LINKS> {network.num_links}\n")
    out.write(f"{END_OF_METADATA}\n\n")
    out.write("~\t" + "\t".join(NET_COLUMNS) + "\t;\n")
    for link in network.links:
        row = [link.tail, link.head, repr(link.capacity), repr(link.length), repr(link.free_flow_time),
               repr(link.bpr_alpha), repr(link.bpr_beta), repr(link.speed), repr(link.toll), link.link_type]
        out.write("\t" + "\t".join(str(v) for v in row) + "\t;\n")
    return out.getvalue()


def format_tntp_trips(table: DemandTable) -> str:
    out = io.StringIO()
    out.write(f"<NUMBER OF ZONES> {len({o for o, _ in table.ods} | {d for _, d in table.ods})}\n")
    out.write(f"<TOTAL OD FLOW> {table.total()}\n")
    out.write(f"{END_OF_METADATA}\n\n")
    by_origin: Dict[int, List[Tuple[int, float]]] = {}
    for (o, d) in table.ods:
        by_origin.setdefault(o, []).append((d, table.demands[(o, d)]))
    for o in sorted(by_origin):
        out.write(f"Origin {o}\n")
        out.write("".join(f"    {d} : {q!r};" for d, q in by_origin[o]) + "\n\n")
    return out.getvalue()


def read_network(path: str) -> Network:
    with open(path) as f:
        return parse_tntp_network(f)


def read_trips(path: str) -> DemandTable:
    with open(path) as f:
        return parse_tntp_trips(f)
