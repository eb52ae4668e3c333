"""Two application families encoded as counting problems.

Supply chains: activate routes under a budget; objective 1 counts unit-flow
shipment patterns over the activated subgraph (conservation at intermediate
hubs, net flow one from supplier to demander), objective 2 is the exact
route-distance cost, scored post-hoc on witnesses.

Road networks: strengthen road segments under a budget; each seasonal
objective is the probability that source and target stay connected within a
hop limit when random events disable unstrengthened segments.  Connectivity
is unrolled layer by layer; event probabilities enter as factored weights
over the event/regime variables.
"""

from __future__ import annotations

import math
import random
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .engine import count_models
from .model import (
    Card,
    Clause,
    Formula,
    Frontier,
    FrontierEntry,
    SmooProblem,
    UnweightedObjective,
    VariableSpace,
    WeightFactor,
    WeightedObjective,
    compact_formula,
    lit,
    prune_nondominated,
    restrict_formula,
)

MAX_EDGES = 24
MAX_REACH_INDEGREE = 12


@dataclass(frozen=True)
class NetworkSpec:
    """Directed graph with distances and the two designated terminals."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    distances: tuple[Fraction, ...]
    source: int
    target: int
    hop_limit: int | None = None
    budget_fraction: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(
            self, "distances", tuple(Fraction(d) for d in self.distances)
        )
        if self.source == self.target:
            raise ValueError("source and target must differ")
        for u, v in self.edges:
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError("edge endpoint outside node range")
        if len(self.distances) != len(self.edges):
            raise ValueError("one distance per edge required")
        if any(d < 0 for d in self.distances):
            raise ValueError("distances must be nonnegative")
        if self.hop_limit is not None and self.hop_limit < 1:
            raise ValueError("hop limit must be >= 1 when present")


@dataclass(frozen=True)
class EventModel:
    """Binary disruption events with regime-correlated seasonal likelihoods.

    ``prob[season][i]`` is a table over the parent-regime assignment bits
    giving P(event i occurs | parents); ``regime_prob[r]`` is P(Z_r = 1).
    """

    affected: tuple[tuple[int, ...], ...]
    regime_prob: tuple[Fraction, ...]
    parents: tuple[tuple[int, ...], ...]
    prob: dict[str, tuple[tuple[Fraction, ...], ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "affected", tuple(tuple(a) for a in self.affected))
        object.__setattr__(
            self, "regime_prob", tuple(Fraction(p) for p in self.regime_prob)
        )
        object.__setattr__(self, "parents", tuple(tuple(p) for p in self.parents))
        if len(self.parents) != self.k:
            raise ValueError("one parent list per event required")
        for ps in self.parents:
            if len(ps) > 2:
                raise ValueError("events take one or two regime parents")
            for r in ps:
                if not 0 <= r < self.r:
                    raise ValueError("parent references unknown regime")
        for p in self.regime_prob:
            if not 0 <= p <= 1:
                raise ValueError("regime probabilities must lie in [0, 1]")
        for season, tables in self.prob.items():
            if len(tables) != self.k:
                raise ValueError(f"season {season}: one table per event required")
            for i, tbl in enumerate(tables):
                if len(tbl) != 1 << len(self.parents[i]):
                    raise ValueError("table size must be 2^len(parents)")
                if any(not 0 <= Fraction(v) <= 1 for v in tbl):
                    raise ValueError("event probabilities must lie in [0, 1]")

    @property
    def k(self) -> int:
        return len(self.affected)

    @property
    def r(self) -> int:
        return len(self.regime_prob)

    @property
    def seasons(self) -> tuple[str, ...]:
        return tuple(self.prob)


def _at_least(
    lits: Sequence[int], bound: int, clauses: list, cards: list
) -> None:
    if bound <= 0:
        return
    if bound > len(lits):
        clauses.append(())
        return
    cards.append(Card(tuple(lits), bound))


def _flow_balance(
    in_lits: Sequence[int],
    out_lits: Sequence[int],
    surplus: int,
    clauses: list,
    cards: list,
) -> None:
    """Cardinality pair enforcing sum(out) - sum(in) == surplus."""
    # sum(out) + sum(not in) >= |in| + surplus   <=>  out - in >= surplus
    _at_least(
        tuple(out_lits) + tuple(-l for l in in_lits),
        len(in_lits) + surplus,
        clauses,
        cards,
    )
    # sum(in) + sum(not out) >= |out| - surplus  <=>  out - in <= surplus
    _at_least(
        tuple(in_lits) + tuple(-l for l in out_lits),
        len(out_lits) - surplus,
        clauses,
        cards,
    )


def _budget_constraints(
    spec: NetworkSpec, space: VariableSpace
) -> Formula:
    if spec.budget_fraction is None:
        return Formula(space)
    m = len(spec.edges)
    allowed = math.floor(Fraction(spec.budget_fraction) * m)
    clauses: list = []
    cards: list = []
    # at most `allowed` of x  <=>  at least m - allowed of not-x
    _at_least(tuple(-lit(e) for e in range(m)), m - allowed, clauses, cards)
    return Formula(space, tuple(clauses), (), tuple(cards))


def encode_supply_chain(
    spec: NetworkSpec,
) -> tuple[SmooProblem, tuple[Fraction, ...]]:
    """Unit-flow flexibility count plus the route-cost vector.

    Decision ``x_e`` activates route ``e``; latent ``f_e`` ships one unit
    through it.  Valid shipments use active routes only, conserve flow at
    intermediate hubs, and move exactly one net unit from supplier to
    demander.  The cost objective is deterministic and linear, so it is
    returned as a vector for exact post-hoc scoring instead of a counting
    encoding.
    """
    if spec.hop_limit is not None:
        raise ValueError("supply-chain encoding does not use a hop limit")
    m = len(spec.edges)
    if m > MAX_EDGES:
        raise ValueError(f"supply encoding supports up to {MAX_EDGES} edges")
    space = VariableSpace(m, (m,))
    fvar = lambda e: m + e
    clauses: list[Clause] = []
    cards: list[Card] = []
    for e in range(m):
        clauses.append((-lit(fvar(e)), lit(e)))  # shipping needs activation
    for v in range(spec.n_nodes):
        in_l = [lit(fvar(e)) for e, (a, b) in enumerate(spec.edges) if b == v]
        out_l = [lit(fvar(e)) for e, (a, b) in enumerate(spec.edges) if a == v]
        if v == spec.source:
            _flow_balance(in_l, out_l, 1, clauses, cards)  # out - in == 1
        elif v == spec.target:
            _flow_balance(in_l, out_l, -1, clauses, cards)  # in - out == 1
        else:
            _flow_balance(in_l, out_l, 0, clauses, cards)
    objective = UnweightedObjective(
        0, Formula(space, tuple(clauses), (), tuple(cards))
    )
    problem = SmooProblem(space, (objective,), _budget_constraints(spec, space))
    return problem, spec.distances


def shipment_is_valid(spec: NetworkSpec, active: int, flow: int) -> bool:
    """Independent combinatorial check of one shipment pattern (bitmasks)."""
    if flow & ~active:
        return False
    for v in range(spec.n_nodes):
        inc = sum(1 for e, (a, b) in enumerate(spec.edges) if b == v and (flow >> e) & 1)
        out = sum(1 for e, (a, b) in enumerate(spec.edges) if a == v and (flow >> e) & 1)
        if v == spec.source:
            if out - inc != 1:
                return False
        elif v == spec.target:
            if inc - out != 1:
                return False
        elif inc != out:
            return False
    return True


def count_shipments_brute(spec: NetworkSpec, active: int) -> int:
    """Brute-force flexibility count over all edge subsets."""
    m = len(spec.edges)
    return sum(
        1 for flow in range(1 << m) if shipment_is_valid(spec, active, flow)
    )


def _reach_layout(spec: NetworkSpec, events: EventModel):
    """Variable offsets inside one seasonal latent block."""
    K, R = events.k, events.r
    m = len(spec.edges)
    n_nodes = spec.n_nodes
    T = spec.hop_limit
    size = K + R + m + n_nodes * (T + 1)
    return K, R, m, n_nodes, T, size


def encode_road_network(
    spec: NetworkSpec, events: EventModel, weight_scale: int = 1000
) -> SmooProblem:
    """Two seasonal connectivity-probability objectives (weighted counts).

    Each objective's latent block holds the event indicators, the regime
    variables, per-edge operational indicators, and the hop-unrolled
    reachability variables (a segment stays reachable once reached, so each
    layer keeps the previous one as a disjunct).  Probabilities become
    factored weights after integer discretization by ``weight_scale``.
    """
    if spec.hop_limit is None:
        raise ValueError("road encoding needs a hop limit")
    for a in events.affected:
        for e in a:
            if not 0 <= e < len(spec.edges):
                raise ValueError(f"event affects unknown edge {e}")
    seasons = events.seasons
    if len(seasons) < 2:
        raise ValueError("need at least two seasonal distributions")
    K, R, m, n_nodes, T, size = _reach_layout(spec, events)
    n_obj = len(seasons)
    space = VariableSpace(m, tuple(size for _ in range(n_obj)))

    objectives = []
    for i, season in enumerate(seasons):
        base = space.block_start(i)
        svar = lambda j: base + j
        zvar = lambda r: base + K + r
        uvar = lambda e: base + K + R + e
        rvar = lambda v, t: base + K + R + m + t * n_nodes + v
        clauses: list[Clause] = []
        # operational logic: u_e <-> x_e or AND_{i: e in E_i} not s_i
        for e in range(m):
            evs = [j for j in range(K) if e in events.affected[j]]
            for j in evs:
                clauses.append((-lit(uvar(e)), lit(e), -lit(svar(j))))
            clauses.append((-lit(e), lit(uvar(e))))
            clauses.append(tuple(lit(svar(j)) for j in evs) + (lit(uvar(e)),))
        # base layer
        for v in range(n_nodes):
            clauses.append(
                (lit(rvar(v, 0)),)
                if v == spec.source
                else (-lit(rvar(v, 0)),)
            )
        # unrolling with persistence
        for t in range(1, T + 1):
            for v in range(n_nodes):
                in_edges = [
                    e for e, (a, b) in enumerate(spec.edges) if b == v
                ]
                if len(in_edges) > MAX_REACH_INDEGREE:
                    raise ValueError(
                        f"in-degree {len(in_edges)} exceeds the unrolling "
                        f"limit {MAX_REACH_INDEGREE}"
                    )
                r_now = lit(rvar(v, t))
                r_prev = lit(rvar(v, t - 1))
                clauses.append((-r_prev, r_now))
                terms = []
                for e in in_edges:
                    u = spec.edges[e][0]
                    terms.append((lit(rvar(u, t - 1)), lit(uvar(e))))
                    clauses.append(
                        (-lit(rvar(u, t - 1)), -lit(uvar(e)), r_now)
                    )
                # forward direction, distributed over one pick per term
                for picks in _product_picks(terms):
                    clauses.append((-r_now, r_prev) + tuple(picks))
        clauses.append((lit(rvar(spec.target, T)),))
        hard = Formula(space, tuple(clauses))
        factors = []
        for r in range(R):
            p = events.regime_prob[r]
            factors.append(WeightFactor((zvar(r),), (1 - p, p)))
        for j in range(K):
            ps = events.parents[j]
            tbl = events.prob[season][j]
            scope = (svar(j),) + tuple(zvar(r) for r in ps)
            values = []
            for idx in range(1 << len(scope)):
                s_bit = idx & 1
                parent_bits = idx >> 1
                p = Fraction(tbl[parent_bits])
                values.append(p if s_bit else 1 - p)
            factors.append(WeightFactor(scope, tuple(values)))
        upper = _max_joint_weight(factors)
        objectives.append(
            WeightedObjective(
                i,
                hard,
                tuple(factors),
                Fraction(0),
                upper if upper > 0 else Fraction(1),
                scope_limit=max(16, K + R),
            )
        )
    problem = SmooProblem(
        space, tuple(objectives), _budget_constraints(spec, space)
    )
    return discretize_weights(problem, weight_scale)


def _product_picks(terms):
    if not terms:
        yield ()
        return
    head, *rest = terms
    for tail in _product_picks(rest):
        for choice in head:
            yield (choice,) + tail


def _max_joint_weight(factors: Sequence[WeightFactor]) -> Fraction:
    scope = sorted({v for f in factors for v in f.scope})
    best = Fraction(0)
    for pattern in range(1 << len(scope)):
        bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
        w = Fraction(1)
        for f in factors:
            w *= f.value(bits_of)
        best = max(best, w)
    return best


def event_distribution_total(events: EventModel, season: str) -> Fraction:
    """Sum of the factored joint over all (Z, s): must be exactly 1."""
    K, R = events.k, events.r
    total = Fraction(0)
    for zbits in range(1 << R):
        pz = Fraction(1)
        for r in range(R):
            p = events.regime_prob[r]
            pz *= p if (zbits >> r) & 1 else 1 - p
        for sbits in range(1 << K):
            ps = pz
            for j in range(K):
                parent_bits = 0
                for pos, r in enumerate(events.parents[j]):
                    parent_bits |= ((zbits >> r) & 1) << pos
                p = events.prob[season][j][parent_bits]
                ps *= p if (sbits >> j) & 1 else 1 - p
            total += ps
    return total


def discretize_weights(problem: SmooProblem, scale: int = 1000) -> SmooProblem:
    """Integer weight tables: each entry becomes round(entry * scale).

    Bounds are recomputed by an exact scan: the upper bound is the largest
    support weight; the lower bound is the smallest full-space weight when
    the support is total, and zero otherwise (a positive lower bound is
    unsound for partial support).  A support weight that rounds to zero is
    flagged with a warning because the target-factor parameter selection
    then becomes unavailable.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    if not problem.is_weighted:
        raise ValueError("only weighted problems carry weight tables")
    space = problem.space
    n = space.decision_count
    objectives = []
    for obj in problem.objectives:
        factors = tuple(
            WeightFactor(
                f.scope,
                tuple(Fraction(round(v * scale)) for v in f.table),
            )
            for f in obj.factors
        )
        scope = sorted({v for f in factors for v in f.scope})
        block = list(space.block_range(obj.index))
        rest = [v for v in block if v not in set(scope)]
        support_weights = []
        full_weights = []
        total_support = True
        check_vars = n + len(rest)
        from .engine import PROJ_LIMIT

        for pattern in range(1 << len(scope)):
            bits_of = {v: (pattern >> p) & 1 for p, v in enumerate(scope)}
            w = Fraction(1)
            for f in factors:
                w *= f.value(bits_of)
            full_weights.append(w)
            scoped = restrict_formula(obj.hard_formula, bits_of)
            compacted, _ = compact_formula(scoped, list(range(n)) + rest)
            if count_models(compacted, []) == 1:
                support_weights.append(w)
            if total_support:
                if check_vars > PROJ_LIMIT:
                    # Too large to verify totality; a zero lower bound is
                    # always sound, so treat the support as partial.
                    total_support = False
                elif count_models(compacted, range(check_vars)) != 1 << check_vars:
                    total_support = False
        if not support_weights:
            raise ValueError(
                f"objective {obj.index}: empty support after discretization"
            )
        upper = max(support_weights)
        lower = min(full_weights) if total_support else Fraction(0)
        if min(support_weights) == 0:
            warnings.warn(
                f"objective {obj.index}: a support weight discretized to 0; "
                f"the target-factor path needs positive lower bounds",
                stacklevel=2,
            )
        if upper <= lower:
            raise ValueError(
                f"objective {obj.index}: constant weights after discretization"
            )
        objectives.append(
            WeightedObjective(
                obj.index, obj.hard_formula, factors, lower, upper,
                scope_limit=obj.scope_limit,
            )
        )
    return SmooProblem(space, tuple(objectives), problem.decision_constraints)


def attach_costs(
    frontier: Frontier, costs: Sequence[Fraction]
) -> Frontier:
    """Score the deterministic route cost onto supply-chain witnesses.

    Entries become ``(x, (flexibility level, -cost))`` and are re-pruned in
    the combined space.
    """
    entries = []
    for e in frontier:
        cost = sum(
            (Fraction(c) for c, bit in zip(costs, e.x) if bit), Fraction(0)
        )
        entries.append(FrontierEntry(e.x, (e.p[0], -cost)))
    return prune_nondominated(entries)


# ---------------------------------------------------------------------------
# Network / event-model JSON schema (see SCHEMA.md)

NETWORK_FORMAT = "paretocount-network"
NETWORK_VERSION = 1


def _frac(s) -> Fraction:
    return Fraction(s)


def network_to_obj(spec: NetworkSpec, events: EventModel | None = None) -> dict:
    obj = {
        "format": NETWORK_FORMAT,
        "version": NETWORK_VERSION,
        "nodes": spec.n_nodes,
        "edges": [list(e) for e in spec.edges],
        "distances": [f"{d.numerator}/{d.denominator}" for d in spec.distances],
        "source": spec.source,
        "target": spec.target,
        "hop_limit": spec.hop_limit,
        "budget_fraction": (
            None
            if spec.budget_fraction is None
            else f"{Fraction(spec.budget_fraction).numerator}/"
            f"{Fraction(spec.budget_fraction).denominator}"
        ),
        "events": None,
    }
    if events is not None:
        obj["events"] = {
            "affected": [list(a) for a in events.affected],
            "regime_prob": [
                f"{p.numerator}/{p.denominator}" for p in events.regime_prob
            ],
            "parents": [list(p) for p in events.parents],
            "prob": {
                season: [
                    [f"{p.numerator}/{p.denominator}" for p in tbl]
                    for tbl in tables
                ]
                for season, tables in events.prob.items()
            },
        }
    return obj


def obj_to_network(obj: dict) -> tuple[NetworkSpec, EventModel | None]:
    if obj.get("format") != NETWORK_FORMAT:
        raise ValueError(f"not a {NETWORK_FORMAT} file")
    if obj.get("version") != NETWORK_VERSION:
        raise ValueError(f"unsupported version {obj.get('version')}")
    spec = NetworkSpec(
        int(obj["nodes"]),
        tuple((int(u), int(v)) for u, v in obj["edges"]),
        tuple(_frac(d) for d in obj["distances"]),
        int(obj["source"]),
        int(obj["target"]),
        hop_limit=obj.get("hop_limit"),
        budget_fraction=(
            None
            if obj.get("budget_fraction") is None
            else _frac(obj["budget_fraction"])
        ),
    )
    events = None
    ev = obj.get("events")
    if ev is not None:
        events = EventModel(
            tuple(tuple(int(e) for e in a) for a in ev["affected"]),
            tuple(_frac(p) for p in ev["regime_prob"]),
            tuple(tuple(int(r) for r in p) for p in ev["parents"]),
            {
                season: tuple(
                    tuple(_frac(p) for p in tbl) for tbl in tables
                )
                for season, tables in ev["prob"].items()
            },
        )
    return spec, events


def save_network(path, spec: NetworkSpec, events: EventModel | None = None) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_obj(spec, events), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_network(path) -> tuple[NetworkSpec, EventModel | None]:
    import json

    with open(path, encoding="utf-8") as fh:
        return obj_to_network(json.load(fh))


# ---------------------------------------------------------------------------
# Instance generation


def load_tsplib(path) -> NetworkSpec:
    """Node-coordinate TSPLIB file to a complete digraph with Euclidean
    distances."""
    coords: list[tuple[float, float]] = []
    in_section = False
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.upper() == "EOF":
                if line.upper() == "EOF":
                    break
                continue
            if line.upper().startswith("NODE_COORD_SECTION"):
                in_section = True
                continue
            if in_section:
                parts = line.split()
                if len(parts) < 3:
                    raise ValueError(f"malformed coordinate line: {line!r}")
                coords.append((float(parts[1]), float(parts[2])))
    if len(coords) < 2:
        raise ValueError("need at least two nodes")
    edges = []
    distances = []
    for a in range(len(coords)):
        for b in range(len(coords)):
            if a == b:
                continue
            dx = coords[a][0] - coords[b][0]
            dy = coords[a][1] - coords[b][1]
            edges.append((a, b))
            distances.append(Fraction(str(round(math.hypot(dx, dy), 9))))
    return NetworkSpec(
        n_nodes=len(coords),
        edges=tuple(edges),
        distances=tuple(distances),
        source=0,
        target=len(coords) - 1,
    )


def generate_random_instance(
    family: str, seed: int = 0, **params
) -> tuple[NetworkSpec, EventModel | None]:
    """Deterministic desk-scale instance generator.

    ``supply``: near-planar digraph with Euclidean distances (params:
    ``n_nodes``, ``extra_edges``, ``budget_fraction``).

    ``road``: grid-shaped road network with ``k_events`` events following
    hub / contiguous / random affected-edge patterns, ``r_regimes`` regime
    variables, and two seasonal distributions (params also: ``rows``,
    ``cols``, ``hop_limit``, ``budget_fraction``, ``denominator``).
    """
    rng = random.Random(seed)
    if family == "supply":
        n_nodes = params.get("n_nodes", 5)
        if not 3 <= n_nodes <= 12:
            raise ValueError("supply family supports 3..12 nodes")
        pts = [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n_nodes)]
        edges: list[tuple[int, int]] = []
        for a in range(n_nodes):
            near = sorted(
                (b for b in range(n_nodes) if b != a),
                key=lambda b: math.dist(pts[a], pts[b]),
            )[:2]
            for b in near:
                if (a, b) not in edges:
                    edges.append((a, b))
        for _ in range(params.get("extra_edges", n_nodes // 2)):
            a, b = rng.sample(range(n_nodes), 2)
            if (a, b) not in edges:
                edges.append((a, b))
        edges.sort()
        if len(edges) > MAX_EDGES:
            raise ValueError("generated instance exceeds the edge limit")
        dists = tuple(
            Fraction(str(round(math.dist(pts[a], pts[b]), 6)))
            for a, b in edges
        )
        src, tgt = rng.sample(range(n_nodes), 2)
        spec = NetworkSpec(
            n_nodes,
            tuple(edges),
            dists,
            src,
            tgt,
            budget_fraction=params.get("budget_fraction"),
        )
        return spec, None
    if family == "road":
        rows = params.get("rows", 2)
        cols = params.get("cols", 2)
        if rows * cols > 9:
            raise ValueError("road family supports up to 9 nodes")
        n_nodes = rows * cols
        node = lambda r, c: r * cols + c
        edges = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    edges.append((node(r, c), node(r, c + 1)))
                    edges.append((node(r, c + 1), node(r, c)))
                if r + 1 < rows:
                    edges.append((node(r, c), node(r + 1, c)))
                    edges.append((node(r + 1, c), node(r, c)))
        m = len(edges)
        dists = tuple(Fraction(1) for _ in edges)
        K = params.get("k_events", 2)
        R = params.get("r_regimes", 1)
        den = params.get("denominator", 10)
        affected = []
        for j in range(K):
            pattern = rng.choice(["hub", "contiguous", "random"])
            if pattern == "hub":
                hub = rng.randrange(n_nodes)
                aff = tuple(
                    e for e, (a, b) in enumerate(edges) if a == hub or b == hub
                )
            elif pattern == "contiguous":
                start = rng.randrange(m)
                width = rng.randint(1, max(1, m // 3))
                aff = tuple(sorted((start + i) % m for i in range(width)))
            else:
                width = rng.randint(1, max(1, m // 2))
                aff = tuple(sorted(rng.sample(range(m), width)))
            affected.append(aff)
        regime_prob = tuple(
            Fraction(rng.randint(1, den - 1), den) for _ in range(R)
        )
        parents = tuple(
            tuple(sorted(rng.sample(range(R), rng.randint(1, min(2, R)))))
            for _ in range(K)
        )
        prob = {}
        for season in ("summer", "winter"):
            tables = []
            for j in range(K):
                tables.append(
                    tuple(
                        Fraction(rng.randint(1, den - 1), den)
                        for _ in range(1 << len(parents[j]))
                    )
                )
            prob[season] = tuple(tables)
        events = EventModel(tuple(affected), regime_prob, parents, prob)
        spec = NetworkSpec(
            n_nodes,
            tuple(edges),
            dists,
            source=0,
            target=n_nodes - 1,
            hop_limit=params.get("hop_limit", rows + cols),
            budget_fraction=params.get("budget_fraction", Fraction(1, 4)),
        )
        return spec, events
    raise ValueError(f"unknown family {family!r}")


def bfs_reachable(
    spec: NetworkSpec, operational: Sequence[bool], hops: int
) -> bool:
    """Independent reachability oracle: BFS within a hop budget."""
    frontier = {spec.source}
    seen = {spec.source}
    for _ in range(hops):
        nxt = set()
        for e, (a, b) in enumerate(spec.edges):
            if operational[e] and a in frontier and b not in seen:
                nxt.add(b)
        seen |= nxt
        frontier = nxt
        if spec.target in seen:
            return True
    return spec.target in seen
