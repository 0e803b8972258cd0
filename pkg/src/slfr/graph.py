"""Constraint graphs on encoding coefficients.

One component per non-sent message index A: a bipartite graph whose
vertices are the per-subset constants c_T and the demand-free decoding
factors bt_S, and whose edge (bt_{{k} union T}, c_T) carries the encoding
coefficient (k, T) with a sign exponent.  Cycles are feasibility
constraints on the encoding coefficients; spanning trees identify the
coefficients free to vary.  When several components share a coefficient,
a greedy pass over a priority score picks a free set that spans every
component simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .codec import EncodingCoefficients, coefficient_domain, phi_sign
from .combinat import complement, diff, index_set, inter, subsets, union
from .field import FieldSpec
from .scheme import SchemeParams


class InconsistentConstraints(RuntimeError):
    """Cross-component cycle relations for one coefficient disagree, or the
    greedy free set fails to span a component.  Must not occur for well-formed
    inputs; raised rather than resolved so the claim stays testable."""


class ZeroCoefficient(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    k: int
    T: tuple
    S: tuple
    phi: int

    @property
    def coeff_id(self) -> tuple:
        return (self.k, self.T)

    @property
    def b_vertex(self) -> tuple:
        return ("b", self.S)

    @property
    def c_vertex(self) -> tuple:
        return ("c", self.T)


@dataclass(frozen=True)
class Component:
    A: tuple
    leaders: tuple
    c_keys: tuple
    b_keys: tuple
    edges: tuple
    adjacency: dict = dc_field(compare=False, repr=False)

    @property
    def root(self) -> tuple:
        return ("b", self.A)

    @property
    def vertices(self) -> list:
        return [("c", t) for t in self.c_keys] + [("b", s) for s in self.b_keys]


@dataclass(frozen=True)
class ConstraintGraph:
    K: int
    t: int
    leaders: tuple
    components: tuple

    def component_for(self, A) -> Component:
        A = tuple(A)
        for comp in self.components:
            if comp.A == A:
                return comp
        raise KeyError(f"no component for {A}")

    def coefficient_ids(self) -> list:
        seen = {}
        for comp in self.components:
            for e in comp.edges:
                seen[e.coeff_id] = True
        return sorted(seen)


def _build_component(A, leaders, t: int) -> Component:
    ground = union(A, leaders)
    c_keys = tuple(subsets(ground, t))
    b_keys = tuple(subsets(ground, t + 1))
    edges = []
    adjacency = {("c", key): [] for key in c_keys}
    adjacency.update({("b", key): [] for key in b_keys})
    for t_set in c_keys:
        for k in diff(ground, t_set):
            e = Edge(k, t_set, index_set(t_set + (k,)), phi_sign(A, k, t_set, leaders))
            edges.append(e)
            adjacency[e.c_vertex].append(e)
            adjacency[e.b_vertex].append(e)
    return Component(tuple(A), tuple(leaders), c_keys, b_keys, tuple(edges), adjacency)


def build_graph(params: SchemeParams, leaders) -> ConstraintGraph:
    """One component per reconstructable message index; empty when every
    message meets the leader set (K - r < t + 1)."""
    leaders = index_set(leaders)
    if any(not 1 <= k <= params.K for k in leaders):
        raise ValueError(f"leaders {leaders} outside [1, {params.K}]")
    non_leaders = complement(params.K, leaders)
    if len(non_leaders) < params.t + 1:
        return ConstraintGraph(params.K, params.t, leaders, ())
    components = tuple(
        _build_component(A, leaders, params.t) for A in subsets(non_leaders, params.t + 1)
    )
    return ConstraintGraph(params.K, params.t, leaders, components)


def _other(edge: Edge, vertex) -> tuple:
    return edge.c_vertex if vertex == edge.b_vertex else edge.b_vertex


def spanning_tree(component: Component, root=None):
    """BFS spanning tree in deterministic edge order; returns (tree, non_tree)."""
    root = component.root if root is None else root
    visited = {root}
    tree = []
    queue = [root]
    in_tree = set()
    while queue:
        v = queue.pop(0)
        for e in component.adjacency[v]:
            w = _other(e, v)
            if w not in visited:
                visited.add(w)
                tree.append(e)
                in_tree.add(e)
                queue.append(w)
    non_tree = tuple(e for e in component.edges if e not in in_tree)
    return tuple(tree), non_tree


def forest_path(component: Component, edges, start, goal):
    """Path between two vertices using only `edges`; list of (edge, direction)
    with direction +1 when traversed from the bt-side to the c-side."""
    allowed = set(edges)
    parent = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            break
        for e in component.adjacency[v]:
            if e not in allowed:
                continue
            w = _other(e, v)
            if w not in parent:
                parent[w] = (v, e)
                queue.append(w)
    if goal not in parent:
        raise InconsistentConstraints(f"no path {start} -> {goal} in the given forest")
    path = []
    v = goal
    while parent[v] is not None:
        u, e = parent[v]
        direction = 1 if v == e.c_vertex else -1  # u -> v traversal
        path.append((e, direction))
        v = u
    path.reverse()
    return path


@dataclass(frozen=True)
class Monomial:
    """A signed Laurent monomial over coefficient ids: (-1)^sign * prod id^e."""

    sign: int
    powers: tuple  # sorted ((k, T), exponent) pairs, exponents nonzero

    @classmethod
    def make(cls, sign: int, powers: dict) -> "Monomial":
        items = tuple(sorted((key, e) for key, e in powers.items() if e != 0))
        return cls(sign % 2, items)

    def evaluate(self, spec: FieldSpec, alpha) -> int:
        acc = spec.sign(self.sign)
        for key, e in self.powers:
            acc = spec.mul(acc, spec.pow(alpha[key], e))
        return acc

    def substitute(self, solved: dict) -> "Monomial":
        """Replace every id that has a solved form by that form."""
        sign = self.sign
        powers = {}
        for key, e in self.powers:
            rep = solved.get(key)
            if rep is None:
                powers[key] = powers.get(key, 0) + e
                continue
            sign += rep.sign * e
            for key2, e2 in rep.powers:
                powers[key2] = powers.get(key2, 0) + e2 * e
        return Monomial.make(sign, powers)


@dataclass(frozen=True)
class CycleRelation:
    """Solved form of one cycle constraint: target = (-1)^sign * prod id^e."""

    target: tuple
    rhs: Monomial

    def evaluate_rhs(self, spec: FieldSpec, alpha) -> int:
        return self.rhs.evaluate(spec, alpha)

    def holds(self, spec: FieldSpec, alpha) -> bool:
        return alpha[self.target] == self.evaluate_rhs(spec, alpha)

    def as_identity(self) -> Monomial:
        powers = dict(self.rhs.powers)
        powers[self.target] = powers.get(self.target, 0) - 1
        return Monomial.make(self.rhs.sign, powers)

    def to_json(self) -> dict:
        return {
            "target": _id_str(self.target),
            "sign": -1 if self.rhs.sign else 1,
            "factors": {_id_str(key): e for key, e in self.rhs.powers},
        }


def _id_str(coeff_id) -> str:
    k, t_set = coeff_id
    return f"k={k}|T={','.join(map(str, t_set))}"


def extract_cycle_constraint(component: Component, edge: Edge, forest_edges) -> CycleRelation:
    """Close the unique forest path between the edge's endpoints and solve the
    resulting cycle for the edge's coefficient."""
    if edge in set(forest_edges):
        raise ValueError(f"{edge} is a forest edge; only non-tree edges close cycles")
    path = forest_path(component, forest_edges, edge.b_vertex, edge.c_vertex)
    sign = edge.phi
    powers = {}
    for e, direction in path:
        sign += e.phi
        powers[e.coeff_id] = powers.get(e.coeff_id, 0) + direction
    return CycleRelation(edge.coeff_id, Monomial.make(sign, powers))


@dataclass(frozen=True)
class CoefficientStatus:
    """Greedy outcome: priority scores, the free set, one solved relation per
    constrained coefficient (in free ids only), and per-component spanning
    forests.  A forest is mostly free edges; when a vertex is reachable only
    through coefficients constrained elsewhere, those edges are kept as
    bridges (listed in `bridges`) so the forest still spans."""

    scores: dict
    free: tuple
    constrained: dict  # id -> CycleRelation, rhs over free ids
    forests: dict      # component A -> tuple of edges (free + bridges)
    bridges: dict      # component A -> tuple of bridge edges

    def to_json(self) -> dict:
        return {
            "scores": {_id_str(key): s for key, s in sorted(self.scores.items())},
            "free": [_id_str(key) for key in self.free],
            "constrained": {
                _id_str(key): rel.to_json() for key, rel in sorted(self.constrained.items())
            },
        }


def priority_score(coeff_id, leaders) -> int:
    k, t_set = coeff_id
    return (1 if k in leaders else 0) + 2 * len(inter(t_set, leaders))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, v):
        self.parent.setdefault(v, v)
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def greedy_free_coefficients(graph: ConstraintGraph, tie_break=None) -> CoefficientStatus:
    """Mark coefficients free in decreasing priority; a coefficient stays free
    only if none of its edges closes a cycle with earlier free edges in any
    component.

    The free edges usually span every component.  When they do not (possible
    at leader count 1 with larger cache parameters, where both edges at a
    vertex get constrained through other components), the forest is completed
    with deterministic bridge edges.  Every non-forest edge then yields one
    raw cycle relation; the relations are solved for the constrained
    coefficients by symbolic substitution until each references free ids
    only, and every leftover relation must reduce to an identity.  A genuine
    conflict anywhere raises InconsistentConstraints."""
    leaders = graph.leaders
    id_edges = {}
    for ci, comp in enumerate(graph.components):
        for e in comp.edges:
            id_edges.setdefault(e.coeff_id, []).append((ci, e))
    key = tie_break if tie_break is not None else (lambda coeff_id: coeff_id)
    ordered = sorted(id_edges, key=lambda cid: (-priority_score(cid, leaders), key(cid)))

    finders = [_UnionFind() for _ in graph.components]
    free = []
    free_set = set()
    forests = {comp.A: [] for comp in graph.components}
    for cid in ordered:
        placements = id_edges[cid]
        closes = any(
            finders[ci].find(e.b_vertex) == finders[ci].find(e.c_vertex)
            for ci, e in placements
        )
        if closes:
            continue
        free.append(cid)
        free_set.add(cid)
        for ci, e in placements:
            finders[ci].union(e.b_vertex, e.c_vertex)
            forests[graph.components[ci].A].append(e)

    bridges = {comp.A: [] for comp in graph.components}
    for ci, comp in enumerate(graph.components):
        for e in comp.edges:
            if e.coeff_id in free_set:
                continue
            if finders[ci].find(e.b_vertex) != finders[ci].find(e.c_vertex):
                finders[ci].union(e.b_vertex, e.c_vertex)
                forests[comp.A].append(e)
                bridges[comp.A].append(e)

    raw = []
    for comp in graph.components:
        forest = forests[comp.A]
        in_forest = set(forest)
        for e in comp.edges:
            if e not in in_forest:
                raw.append(extract_cycle_constraint(comp, e, forest))

    # Solve the raw cycle relations for the constrained coefficients.  Two
    # fully substituted forms for the same target must agree syntactically;
    # when they do not, their ratio is a genuine extra constraint among ids
    # the priority pass had believed free (happens at leader count 1 with
    # t >= 2), so the most recently freed id in the ratio is demoted and the
    # resolution restarts with one more constrained coefficient.
    while True:
        constrained_ids = set(id_edges) - free_set
        conflict = _resolve_relations(raw, constrained_ids)
        if conflict is None:
            break
        demoted = _demote_candidate(conflict, free)
        free.remove(demoted)
        free_set.remove(demoted)

    solved = _resolve_relations(raw, set(id_edges) - free_set, collect=True)
    constrained = {cid: CycleRelation(cid, form) for cid, form in solved.items()}
    scores = {cid: priority_score(cid, leaders) for cid in id_edges}
    return CoefficientStatus(
        scores,
        tuple(free),
        constrained,
        {a: tuple(es) for a, es in forests.items()},
        {a: tuple(es) for a, es in bridges.items()},
    )


def _resolve_relations(raw, constrained_ids, collect=False):
    """Triangularize the cycle identities over the constrained ids.

    Each raw relation becomes an identity monomial that must equal one.  An
    identity with a single unsolved constrained id of unit exponent solves
    that id; a fully substituted identity must be trivial, otherwise it is
    an extra constraint among the supposedly free ids — returned as a ratio
    monomial (or raised when `collect`).  Returns the solved map when
    `collect`, else None when everything is consistent."""
    solved = {}
    pending = [rel.as_identity() for rel in raw]
    while pending:
        progress = False
        deferred = []
        for ident in pending:
            reduced = ident.substitute(solved)
            unknowns = [
                (cid, e) for cid, e in reduced.powers
                if cid in constrained_ids and cid not in solved
            ]
            if not unknowns:
                if reduced.powers or reduced.sign:
                    if collect:
                        raise InconsistentConstraints(
                            f"cycle relation does not reduce to an identity: {reduced}"
                        )
                    return reduced
                progress = True
                continue
            if len(unknowns) == 1 and abs(unknowns[0][1]) == 1:
                cid, e = unknowns[0]
                solved[cid] = Monomial.make(
                    reduced.sign, {c: -p * e for c, p in reduced.powers if c != cid}
                )
                progress = True
                continue
            deferred.append(ident)
        if deferred and not progress:
            raise InconsistentConstraints(
                f"cannot triangularize {len(deferred)} cycle relations"
            )
        pending = deferred
    missing = constrained_ids - set(solved)
    if missing:
        raise InconsistentConstraints(f"no solved relation for {sorted(missing)}")
    return solved if collect else None


def _demote_candidate(ratio: Monomial, free_order):
    """Pick the id to demote for an extra constraint: the most recently freed
    id appearing in the ratio with unit exponent (so it solves monomially)."""
    powers = dict(ratio.powers)
    for cid in reversed(free_order):
        if abs(powers.get(cid, 0)) == 1:
            return cid
    raise InconsistentConstraints(f"extra constraint {ratio} has no unit-exponent id to solve for")


def propagate_values(component: Component, alpha, spec: FieldSpec, root_value: int | None = None):
    """Assign a value to every vertex by first-visit BFS from the root.

    Edge semantics: c = (-1)^phi * alpha * bt.  With a feasible assignment
    the result is independent of traversal order."""
    root_value = spec.minus_one if root_value is None else root_value
    b_values = {component.A: root_value}
    c_values = {}
    visited = {component.root}
    queue = [component.root]
    while queue:
        v = queue.pop(0)
        for e in component.adjacency[v]:
            a = alpha[e.coeff_id]
            if a == 0:
                raise ZeroCoefficient(f"coefficient {e.coeff_id} is zero")
            w = _other(e, v)
            if w in visited:
                continue
            visited.add(w)
            signed = spec.mul(spec.sign(e.phi), a)
            if w == e.c_vertex:
                c_values[e.T] = spec.mul(signed, b_values[e.S])
            else:
                b_values[e.S] = spec.div(c_values[e.T], signed)
            queue.append(w)
    return b_values, c_values


def random_feasible_alpha(params: SchemeParams, leaders, rng,
                          status: CoefficientStatus | None = None) -> EncodingCoefficients:
    """Random nonzero values on the free coefficients, constrained ones derived
    from their cycle relations; feasible by construction."""
    spec = params.field
    leaders = index_set(leaders)
    domain = coefficient_domain(params.K, params.t)
    alpha = {}
    non_leaders = complement(params.K, leaders)
    if len(non_leaders) < params.t + 1:
        for cid in domain:  # no reconstruction, hence no constraints
            alpha[cid] = 1 + rng.randrange(spec.q - 1)
        return EncodingCoefficients(spec, params.K, params.t, alpha)
    if status is None:
        status = greedy_free_coefficients(build_graph(params, leaders))
    for cid in status.free:
        alpha[cid] = 1 + rng.randrange(spec.q - 1)
    for cid, rel in status.constrained.items():
        alpha[cid] = rel.evaluate_rhs(spec, alpha)
    for cid in domain:
        if cid not in alpha:  # unreachable for K - r >= t + 1; keep total anyway
            alpha[cid] = 1 + rng.randrange(spec.q - 1)
    return EncodingCoefficients(spec, params.K, params.t, alpha)


def component_dot(component: Component, tree_edges=None) -> str:
    """Render one component for graphviz: c-vertices as boxes, bt-vertices as
    ellipses, tree edges solid, the rest dashed."""
    tree = set(tree_edges) if tree_edges is not None else set(spanning_tree(component)[0])
    lines = [f"graph component_{'_'.join(map(str, component.A))} {{"]
    for t_set in component.c_keys:
        name = f"c|{','.join(map(str, t_set))}"
        lines.append(f'  "{name}" [shape=box, label="c_{{{",".join(map(str, t_set))}}}"];')
    for s_set in component.b_keys:
        name = f"b|{','.join(map(str, s_set))}"
        lines.append(f'  "{name}" [shape=ellipse, label="bt_{{{",".join(map(str, s_set))}}}"];')
    for e in component.edges:
        sign = "-" if e.phi % 2 else "+"
        label = f"{sign}a_{{{e.k},{{{','.join(map(str, e.T))}}}}}"
        style = "solid" if e in tree else "dashed"
        bname = f"b|{','.join(map(str, e.S))}"
        cname = f"c|{','.join(map(str, e.T))}"
        lines.append(f'  "{bname}" -- "{cname}" [style={style}, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
