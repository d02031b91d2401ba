"""Brute-force ground truth for small instances.

reachable_bfs explores the full configuration space under mixing with a
precision cap.  The trick making it fast and exact: rescale everything
into the frame where the cap becomes "values are integers"; a mix is
then representable iff the two values have the same parity, so the cap
is enforced by construction rather than by checking.

mixable_bruteforce answers perfect mixability soundly and completely for
integral configurations: one extra bit of precision is known sufficient,
and every prefix of a capped witness stays within the cap, so a failed
capped search is a proof.

min_depth_search enumerates waste-free mixing graphs up to a given depth
(exponential; tiny instances only), and depth1_decide solves the
depth-one special case by backtracking over pairings.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass

from .config import Configuration, stats
from .dyadic import Dyadic
from .graph import MixingGraph, MixStep, MixingSequence, NodeKind

__all__ = [
    "OracleStatus",
    "OracleVerdict",
    "reachable_bfs",
    "mixable_bruteforce",
    "MinDepthResult",
    "min_depth_search",
    "Depth1Matching",
    "depth1_decide",
    "DEFAULT_MAX_STATES",
]

DEFAULT_MAX_STATES = 10**7


class OracleStatus(enum.Enum):
    REACHABLE = "Reachable"
    UNREACHABLE_WITHIN_BOUND = "UnreachableWithinBound"
    UNREACHABLE_PROVEN = "UnreachableProven"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class OracleVerdict:
    """Search outcome.  UNREACHABLE_PROVEN is only emitted when the bound
    is known sufficient: a cardinality/volume mismatch, or the perfect-
    mixability query with an extra bit of precision."""

    status: OracleStatus
    witness: MixingSequence | None = None
    states_explored: int = 0


def _frame(C: Configuration, shift: int) -> tuple[int, ...]:
    return tuple(sorted(v.scale2(shift).as_integer() for v in C.droplets()))


def reachable_bfs(
    I: Configuration,
    T: Configuration,
    extra_bits: int = 1,
    max_states: int = DEFAULT_MAX_STATES,
) -> OracleVerdict:
    """Shortest-witness BFS from I to T over the exact mixing semantics.

    States holding any value of precision above max(prec(I), prec(T)) +
    extra_bits are pruned.  Deterministic: FIFO expansion over sorted
    successor pairs.
    """
    if I.n != T.n or I.total() != T.total():
        return OracleVerdict(OracleStatus.UNREACHABLE_PROVEN)
    cap = max(v.exp for v in list(I.values()) + list(T.values())) + extra_bits
    start = _frame(I, cap)
    goal = _frame(T, cap)
    if start == goal:
        return OracleVerdict(OracleStatus.REACHABLE, witness=(), states_explored=1)
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, int]]] = {}
    seen = {start}
    queue = deque([start])
    explored = 0

    def witness_from(state) -> MixingSequence:
        steps = []
        while state != start:
            state, (x, y) = parent[state]
            steps.append(MixStep(Dyadic(x, cap), Dyadic(y, cap)))
        steps.reverse()
        return tuple(steps)

    while queue:
        state = queue.popleft()
        explored += 1
        values = sorted(set(state))
        counts = Counter(state)
        for i, x in enumerate(values):
            for y in values[i + 1 :]:
                if (x + y) % 2 != 0:
                    continue  # the mix result would exceed the precision cap
                z = (x + y) // 2
                nxt = Counter(counts)
                nxt[x] -= 1
                nxt[y] -= 1
                nxt[z] += 2
                succ = tuple(sorted(nxt.elements()))
                if succ in seen:
                    continue
                parent[succ] = (state, (x, y))
                if succ == goal:
                    return OracleVerdict(
                        OracleStatus.REACHABLE,
                        witness=witness_from(succ),
                        states_explored=explored,
                    )
                if len(seen) >= max_states:
                    return OracleVerdict(
                        OracleStatus.BUDGET_EXCEEDED, states_explored=explored
                    )
                seen.add(succ)
                queue.append(succ)
    return OracleVerdict(OracleStatus.UNREACHABLE_WITHIN_BOUND, states_explored=explored)


def mixable_bruteforce(
    C_int: Configuration, max_states: int = DEFAULT_MAX_STATES
) -> bool:
    """Sound and complete perfect-mixability decision for integral inputs.

    One extra bit suffices for any perfect-mixing witness, and prefixes
    of such a witness never leave the capped space, so the capped BFS
    failing to reach the perfect mixture is a proof of unmixability.
    """
    st = stats(C_int)
    if st.mu is None or not st.mu.is_integer or not C_int.is_integral:
        return False
    target = Configuration([(st.mu, st.n)])
    verdict = reachable_bfs(C_int, target, extra_bits=1, max_states=max_states)
    if verdict.status is OracleStatus.BUDGET_EXCEEDED:
        raise RuntimeError(
            f"state budget {max_states} exhausted; result would be inconclusive"
        )
    return verdict.status is OracleStatus.REACHABLE


# -- bounded-depth exhaustive graph search --------------------------------


@dataclass(frozen=True)
class MinDepthResult:
    """graph is None with conclusive=True when exhaustion proved absence."""

    graph: MixingGraph | None
    conclusive: bool
    states_explored: int


def min_depth_search(
    I: Configuration,
    T: Configuration,
    max_depth: int,
    max_states: int = DEFAULT_MAX_STATES,
) -> MinDepthResult:
    """Exhaustive search for a waste-free mixing graph of depth <= max_depth.

    Droplets carry (value, depth); a mixer consumes two droplets at depth
    max(d1, d2) + 1 <= max_depth.  Every droplet must end in T (waste-
    free), so the goal test is exact multiset equality of values.
    Exponential: documented for tiny instances only.
    """
    if I.n != T.n or I.total() != T.total():
        return MinDepthResult(graph=None, conclusive=True, states_explored=0)
    shift = max(v.exp for v in list(I.values()) + list(T.values())) + max_depth
    start = tuple(sorted((v.scale2(shift).as_integer(), 0) for v in I.droplets()))
    goal_values = tuple(sorted(v.scale2(shift).as_integer() for v in T.droplets()))

    def values_of(state) -> tuple[int, ...]:
        return tuple(sorted(v for v, _ in state))

    if values_of(start) == goal_values:
        return MinDepthResult(
            graph=_rebuild_graph(I, []), conclusive=True, states_explored=1
        )

    parent: dict[tuple, tuple[tuple, tuple]] = {}
    seen = {start}
    queue = deque([start])
    explored = 0
    while queue:
        state = queue.popleft()
        explored += 1
        droplets = sorted(set(state))
        counts = Counter(state)
        for i, (xv, xd) in enumerate(droplets):
            for yv, yd in droplets[i:]:
                if (xv, xd) == (yv, yd) and counts[(xv, xd)] < 2:
                    continue
                if xv == yv:
                    continue  # mixing equal values is a no-op; skip
                level = max(xd, yd) + 1
                if level > max_depth:
                    continue
                z = Dyadic(xv + yv, 1)
                if z.exp > 0:
                    continue  # non-integral in frame: unreachable precision
                nxt = Counter(counts)
                nxt[(xv, xd)] -= 1
                nxt[(yv, yd)] -= 1
                nxt[(z.as_integer(), level)] += 2
                succ = tuple(sorted(nxt.elements()))
                if succ in seen:
                    continue
                parent[succ] = (state, ((xv, xd), (yv, yd), level))
                if values_of(succ) == goal_values:
                    steps = []
                    cur = succ
                    while cur != start:
                        cur, move = parent[cur]
                        steps.append(move)
                    steps.reverse()
                    graph = _rebuild_graph(I, steps, shift)
                    return MinDepthResult(
                        graph=graph, conclusive=True, states_explored=explored
                    )
                if len(seen) >= max_states:
                    return MinDepthResult(
                        graph=None, conclusive=False, states_explored=explored
                    )
                seen.add(succ)
                queue.append(succ)
    return MinDepthResult(graph=None, conclusive=True, states_explored=explored)


def _rebuild_graph(I: Configuration, steps, shift: int = 0) -> MixingGraph:
    """Reconstruct the graph with explicit droplet identities so the
    reported depth matches the layer bookkeeping of the search."""
    nodes: list[tuple[int, NodeKind]] = []
    edges: list[tuple[int, int]] = []
    next_id = 0
    pool: list[tuple[tuple[int, int], int]] = []  # ((value, depth), producer)
    for v in sorted(I.droplets()):
        nodes.append((next_id, NodeKind.SOURCE))
        pool.append(((v.scale2(shift).as_integer(), 0), next_id))
        next_id += 1
    order = tuple(range(len(nodes)))

    def take(key) -> int:
        for idx, (k, producer) in enumerate(pool):
            if k == key:
                del pool[idx]
                return producer
        raise AssertionError(f"droplet {key} missing from pool")

    for (xk, yk, level) in steps:
        pa, pb = take(xk), take(yk)
        mixer = next_id
        next_id += 1
        nodes.append((mixer, NodeKind.MIXER))
        edges.append((pa, mixer))
        edges.append((pb, mixer))
        zv = (xk[0] + yk[0]) // 2
        pool.append(((zv, level), mixer))
        pool.append(((zv, level), mixer))
    for _key, producer in pool:
        nodes.append((next_id, NodeKind.SINK))
        edges.append((producer, next_id))
        next_id += 1
    return MixingGraph(tuple(nodes), tuple(edges), order)


# -- depth-1 matcher -------------------------------------------------------


@dataclass(frozen=True)
class Depth1Matching:
    """A realization of T from I by one layer of mixers plus wires."""

    pairs: tuple[tuple[Dyadic, Dyadic], ...]
    wires: tuple[Dyadic, ...]


def depth1_decide(I: Configuration, T: Configuration) -> Depth1Matching | None:
    """Backtracking search for a depth-<=1 realization of T from I.

    Each mixed pair must place both copies of its average in T; unpaired
    droplets pass through on wires and must appear in T directly.
    """
    if I.n != T.n or I.total() != T.total():
        return None
    source = Counter(I.as_pairs()) if hasattr(I, "as_pairs") else None
    inp = Counter({v: f for v, f in I.entries})
    out = Counter({v: f for v, f in T.entries})
    pairs: list[tuple[Dyadic, Dyadic]] = []
    wires: list[Dyadic] = []

    def backtrack() -> bool:
        remaining = [v for v in sorted(inp) if inp[v] > 0]
        if not remaining:
            return all(c == 0 for c in out.values())
        x = remaining[0]
        # option 1: pass x through a wire
        if out[x] >= 1:
            inp[x] -= 1
            out[x] -= 1
            wires.append(x)
            if backtrack():
                return True
            wires.pop()
            inp[x] += 1
            out[x] += 1
        # option 2: mix x with some partner
        for y in remaining:
            if y == x and inp[x] < 2:
                continue
            z = (x + y).scale2(-1)
            if out[z] < 2:
                continue
            inp[x] -= 1
            inp[y] -= 1
            out[z] -= 2
            pairs.append((x, y))
            if backtrack():
                return True
            pairs.pop()
            inp[x] += 1
            inp[y] += 1
            out[z] += 2
        return False

    if backtrack():
        return Depth1Matching(pairs=tuple(pairs), wires=tuple(wires))
    return None
