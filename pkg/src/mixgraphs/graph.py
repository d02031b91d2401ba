"""Mixing-graph DAGs: model, exact simulation, metrics and serialization.

A mixing graph has sources (in 0, out 1), mixers (in 2, out 2) and sinks
(in 1, out 0); a mixer outputs the exact average of its two inputs on
both out-edges.  Graphs are input-independent objects: no concentration
is ever stored in a graph file, only wiring.  Depth counts mixer nodes
on an input-to-output path, so a depth-1 graph has no mixer-to-mixer
edges.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .config import Configuration
from .dyadic import Dyadic, format_dyadic, mid
from .errors import GraphFormatError

__all__ = [
    "NodeKind",
    "MixingGraph",
    "MixStep",
    "GraphMetrics",
    "simulate",
    "sequence_to_graph",
    "metrics",
    "serialize",
    "deserialize",
    "to_dot",
]


class NodeKind(enum.Enum):
    SOURCE = "source"
    MIXER = "mixer"
    SINK = "sink"


@dataclass(frozen=True)
class MixStep:
    """One mixing operation on a pair of concentration values."""

    a: Dyadic
    b: Dyadic

    @property
    def result(self) -> Dyadic:
        return mid(self.a, self.b)

    def render(self) -> str:
        return f"mix {format_dyadic(self.a)} {format_dyadic(self.b)} -> {format_dyadic(self.result)}"


MixingSequence = tuple[MixStep, ...]


@dataclass(frozen=True)
class MixingGraph:
    """Immutable DAG: nodes as (id, kind), edges as (from, to).

    input_order lists the source ids in the order input droplets are
    assigned; a Configuration input is assigned sorted ascending.
    """

    nodes: tuple[tuple[int, NodeKind], ...]
    edges: tuple[tuple[int, int], ...]
    input_order: tuple[int, ...]

    def kind_of(self) -> dict[int, NodeKind]:
        return dict(self.nodes)

    def sources(self) -> list[int]:
        return [i for i, k in self.nodes if k is NodeKind.SOURCE]

    def sinks(self) -> list[int]:
        return [i for i, k in self.nodes if k is NodeKind.SINK]

    def mixers(self) -> list[int]:
        return [i for i, k in self.nodes if k is NodeKind.MIXER]

    def validate(self) -> None:
        """Check degrees, acyclicity and source/sink balance."""
        kinds = self.kind_of()
        if len(kinds) != len(self.nodes):
            raise GraphFormatError("duplicate node id")
        indeg = {i: 0 for i in kinds}
        outdeg = {i: 0 for i in kinds}
        for u, v in self.edges:
            if u not in kinds:
                raise GraphFormatError("edge from unknown node", node=u)
            if v not in kinds:
                raise GraphFormatError("edge to unknown node", node=v)
            outdeg[u] += 1
            indeg[v] += 1
        expected = {
            NodeKind.SOURCE: (0, 1),
            NodeKind.MIXER: (2, 2),
            NodeKind.SINK: (1, 0),
        }
        for i, kind in self.nodes:
            want_in, want_out = expected[kind]
            if indeg[i] != want_in:
                raise GraphFormatError(
                    f"{kind.value} has in-degree {indeg[i]}, expected {want_in}", node=i
                )
            if outdeg[i] != want_out:
                raise GraphFormatError(
                    f"{kind.value} has out-degree {outdeg[i]}, expected {want_out}",
                    node=i,
                )
        if len(self.sources()) != len(self.sinks()):
            raise GraphFormatError("source and sink counts differ")
        if set(self.input_order) != set(self.sources()) or len(self.input_order) != len(
            self.sources()
        ):
            raise GraphFormatError("input_order is not a permutation of the sources")
        if self._topo_order() is None:
            raise GraphFormatError("graph contains a cycle")

    def _topo_order(self) -> list[int] | None:
        indeg = {i: 0 for i, _ in self.nodes}
        succs: dict[int, list[int]] = {i: [] for i, _ in self.nodes}
        for u, v in self.edges:
            succs[u].append(v)
            indeg[v] += 1
        ready = sorted(i for i, d in indeg.items() if d == 0)
        order = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            for nxt in succs[node]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        return order if len(order) == len(self.nodes) else None


def _input_values(G: MixingGraph, I) -> list[Dyadic]:
    if isinstance(I, Configuration):
        return sorted(I.droplets())
    values = [v if isinstance(v, Dyadic) else Dyadic(v) for v in I]
    return values


def simulate(G: MixingGraph, I) -> tuple[Configuration, dict[int, Dyadic]]:
    """Propagate an input assignment through the graph exactly.

    I is a Configuration (assigned to input_order sorted ascending) or an
    ordered value list matching input_order.  Returns the multiset at the
    sinks and the value produced at every node.
    """
    G.validate()
    values = _input_values(G, I)
    sources = G.input_order
    if len(values) != len(sources):
        raise ValueError(f"expected {len(sources)} input droplets, got {len(values)}")
    kinds = G.kind_of()
    preds: dict[int, list[int]] = {i: [] for i in kinds}
    for u, v in G.edges:
        preds[v].append(u)
    node_value: dict[int, Dyadic] = {}
    for src, val in zip(sources, values):
        node_value[src] = val
    for node in G._topo_order():
        kind = kinds[node]
        if kind is NodeKind.SOURCE:
            continue
        ins = [node_value[p] for p in preds[node]]
        node_value[node] = ins[0] if kind is NodeKind.SINK else mid(ins[0], ins[1])
    outputs = Configuration.from_values(node_value[s] for s in G.sinks())
    return outputs, node_value


@dataclass(frozen=True)
class GraphMetrics:
    """Depth (max mixers on a path), mixer count, max precision under an input."""

    depth: int
    mixers: int
    max_precision: int


def metrics(G: MixingGraph, I) -> GraphMetrics:
    _, node_value = simulate(G, I)
    kinds = G.kind_of()
    depth_to: dict[int, int] = {}
    for node in G._topo_order():
        incoming = [depth_to[u] for u, v in G.edges if v == node]
        base = max(incoming, default=0)
        depth_to[node] = base + (1 if kinds[node] is NodeKind.MIXER else 0)
    depth = max(depth_to.values(), default=0)
    max_prec = max((v.exp for v in node_value.values()), default=0)
    return GraphMetrics(depth=depth, mixers=len(G.mixers()), max_precision=max_prec)


def sequence_to_graph(I, seq: Sequence[MixStep]) -> MixingGraph:
    """Build the DAG realized by running a mixing sequence on input I.

    A pool of open droplet terminals (value, producing node) is kept;
    each step consumes the two lowest-indexed terminals carrying its two
    values, so the construction is deterministic for a fixed input order.
    Leftover terminals are wired to sinks.
    """
    if isinstance(I, Configuration):
        input_values = sorted(I.droplets())
    else:
        input_values = [v if isinstance(v, Dyadic) else Dyadic(v) for v in I]
    nodes: list[tuple[int, NodeKind]] = []
    edges: list[tuple[int, int]] = []
    next_id = 0
    terminals: list[tuple[Dyadic, int]] = []  # (value, producer node id)
    for v in input_values:
        nodes.append((next_id, NodeKind.SOURCE))
        terminals.append((v, next_id))
        next_id += 1
    input_order = tuple(range(len(input_values)))

    def take(value: Dyadic, step_index: int) -> int:
        for idx, (v, producer) in enumerate(terminals):
            if v == value:
                del terminals[idx]
                return producer
        raise ValueError(
            f"step {step_index}: value {format_dyadic(value)} not present in droplet pool"
        )

    for index, step in enumerate(seq):
        pa = take(step.a, index)
        pb = take(step.b, index)
        mixer = next_id
        next_id += 1
        nodes.append((mixer, NodeKind.MIXER))
        edges.append((pa, mixer))
        edges.append((pb, mixer))
        out = step.result
        terminals.append((out, mixer))
        terminals.append((out, mixer))
    for _value, producer in terminals:
        sink = next_id
        next_id += 1
        nodes.append((sink, NodeKind.SINK))
        edges.append((producer, sink))
    return MixingGraph(tuple(nodes), tuple(edges), input_order)


# -- serialization -------------------------------------------------------


def serialize(G: MixingGraph) -> str:
    """Byte-stable JSON rendering; concentrations are never stored."""
    obj = {
        "nodes": [{"id": i, "kind": k.value} for i, k in G.nodes],
        "edges": [[u, v] for u, v in G.edges],
        "input_order": list(G.input_order),
    }
    return json.dumps(obj, indent=2) + "\n"


def deserialize(text: str) -> MixingGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}")
    if not isinstance(obj, dict):
        raise GraphFormatError("top-level JSON value must be an object")
    for field in ("nodes", "edges", "input_order"):
        if field not in obj:
            raise GraphFormatError(f"missing field {field!r}")
    nodes = []
    for entry in obj["nodes"]:
        if not isinstance(entry, dict) or "id" not in entry or "kind" not in entry:
            raise GraphFormatError(f"bad node entry {entry!r}")
        try:
            kind = NodeKind(entry["kind"])
        except ValueError:
            raise GraphFormatError(f"unknown node kind {entry['kind']!r}")
        if not isinstance(entry["id"], int):
            raise GraphFormatError(f"node id must be an integer, got {entry['id']!r}")
        nodes.append((entry["id"], kind))
    edges = []
    for entry in obj["edges"]:
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(x, int) for x in entry)
        ):
            raise GraphFormatError(f"bad edge entry {entry!r}")
        edges.append((entry[0], entry[1]))
    order = obj["input_order"]
    if not isinstance(order, list) or not all(isinstance(x, int) for x in order):
        raise GraphFormatError("input_order must be a list of node ids")
    G = MixingGraph(tuple(nodes), tuple(edges), tuple(order))
    G.validate()
    return G


def to_dot(G: MixingGraph, node_values: Mapping[int, Dyadic] | None = None) -> str:
    """GraphViz rendering; mixers are labeled with their concentrations."""
    lines = ["digraph mixing {", "  rankdir=TB;"]
    shape = {NodeKind.SOURCE: "invtriangle", NodeKind.MIXER: "circle", NodeKind.SINK: "triangle"}
    for i, kind in G.nodes:
        if node_values is not None and i in node_values:
            label = format_dyadic(node_values[i])
        else:
            label = kind.value if kind is not NodeKind.MIXER else f"m{i}"
        lines.append(f'  n{i} [shape={shape[kind]}, label="{label}"];')
    for u, v in G.edges:
        lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
