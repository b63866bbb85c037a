"""Polygon-valued piecewise affine functions on finite metric graphs.

Edge lengths are in valuation units.  A function is given by its polygon
values at the vertices and is affine along each edge.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .numerics import format_rational, to_fraction
from .polygon import Polygon

VERTEX_KINDS = ("interior", "marked-Z", "infinity")


class SkeletonError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str = "interior"
    genus: int = 0
    irr: int | None = None
    exponents: tuple | None = None
    r_annotation: Fraction | None = None
    on_gamma: bool = True
    puncture: bool = False

    def __post_init__(self):
        if self.kind not in VERTEX_KINDS:
            raise SkeletonError(f"vertex {self.id}: unknown kind {self.kind!r}")
        if self.genus < 0:
            raise SkeletonError(f"vertex {self.id}: negative genus")
        if self.irr is not None and (self.irr < 0 or int(self.irr) != self.irr):
            raise SkeletonError(f"vertex {self.id}: irregularity must be a nonnegative integer")
        if self.r_annotation is not None:
            object.__setattr__(self, "r_annotation", to_fraction(self.r_annotation))

    @property
    def in_z(self) -> bool:
        return self.kind != "interior"


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "length", to_fraction(self.length))
        if self.length <= 0:
            raise SkeletonError(f"edge {self.u}-{self.v}: length must be positive")

    def other(self, x: str) -> str:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise SkeletonError(f"edge {self.u}-{self.v} is not incident to {x}")


class SkeletonGraph:
    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge], genus: int = 0, rank: int = 1):
        self.vertices = {}
        for v in vertices:
            if v.id in self.vertices:
                raise SkeletonError(f"duplicate vertex {v.id}")
            self.vertices[v.id] = v
        self.edges = list(edges)
        self.genus = genus
        self.rank = rank
        if genus < 0 or rank < 1:
            raise SkeletonError("need genus >= 0 and rank >= 1")
        self.adjacency = {vid: [] for vid in self.vertices}
        for e in self.edges:
            for end in (e.u, e.v):
                if end not in self.vertices:
                    raise SkeletonError(f"edge {e.u}-{e.v} refers to unknown vertex {end}")
            if e.u == e.v:
                raise SkeletonError(f"loop at {e.u}")
            self.adjacency[e.u].append(e)
            self.adjacency[e.v].append(e)
        if not self._connected():
            raise SkeletonError("skeleton is not connected")
        for v in self.vertices.values():
            if v.in_z and not v.puncture and len(self.adjacency[v.id]) != 1:
                raise SkeletonError(f"marked vertex {v.id} must have valence 1 (or be declared a puncture)")

    def _connected(self) -> bool:
        if not self.vertices:
            return True
        start = next(iter(self.vertices))
        seen = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            for e in self.adjacency[x]:
                y = e.other(x)
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return len(seen) == len(self.vertices)

    @property
    def z_vertices(self) -> list:
        return [v for v in self.vertices.values() if v.in_z]

    @property
    def interior_vertices(self) -> list:
        return [v for v in self.vertices.values() if not v.in_z]

    def valence(self, vid: str) -> int:
        return len(self.adjacency[vid])

    def valence_gamma(self, vid: str) -> int:
        """Valence inside the skeleton: edges to on-skeleton or marked vertices."""
        count = 0
        for e in self.adjacency[vid]:
            w = self.vertices[e.other(vid)]
            if w.on_gamma or w.in_z:
                count += 1
        return count


class PolygonFunction:
    def __init__(self, graph: SkeletonGraph, values: Mapping[str, Polygon]):
        self.graph = graph
        self.values = dict(values)
        missing = set(graph.vertices) - set(self.values)
        if missing:
            raise SkeletonError(f"no polygon value at {sorted(missing)}")
        extra = set(self.values) - set(graph.vertices)
        if extra:
            raise SkeletonError(f"values given at unknown vertices {sorted(extra)}")
        for vid, P in self.values.items():
            if P.n != graph.rank:
                raise SkeletonError(f"value at {vid} has width {P.n}, expected rank {graph.rank}")

    def __getitem__(self, vid: str) -> Polygon:
        return self.values[vid]

    def at_edge_point(self, edge: Edge, start: str, distance) -> Polygon:
        """Affine interpolation at the given distance from ``start`` along ``edge``."""
        t = to_fraction(distance) / edge.length
        a, b = self.values[start], self.values[edge.other(start)]
        return a + (b - a).scale(t)


def _edge_of(G: SkeletonGraph, vertex: str, edge) -> Edge:
    if isinstance(edge, int):
        edge = G.edges[edge]
    elif isinstance(edge, str):
        matches = [e for e in G.adjacency.get(vertex, []) if e.other(vertex) == edge]
        if not matches:
            raise SkeletonError(f"no edge from {vertex} to {edge}")
        edge = matches[0]
    if edge not in G.adjacency.get(vertex, []):
        raise SkeletonError(f"edge {edge.u}-{edge.v} is not incident to {vertex}")
    return edge


def branch_derivative(F: PolygonFunction, vertex: str, edge) -> Polygon:
    """Derivative of F at ``vertex`` along ``edge``, pointing away from the vertex.

    ``edge`` may be an Edge, an edge index, or the id of the neighbouring vertex.
    """
    e = _edge_of(F.graph, vertex, edge)
    far = e.other(vertex)
    return (F[far] - F[vertex]).scale(1 / e.length)


def laplacian(F: PolygonFunction) -> dict:
    G = F.graph
    out = {}
    for vid in G.vertices:
        total = Polygon.zero(G.rank)
        for e in G.adjacency[vid]:
            total = total + branch_derivative(F, vid, e)
        out[vid] = total
    return out


def euler_characteristic(G: SkeletonGraph) -> int:
    return 2 - 2 * G.genus - len(G.z_vertices)


def global_index(G: SkeletonGraph, F: PolygonFunction | None = None) -> int:
    """n chi(U) - sum of irregularities (the meromorphic index)."""
    return G.rank * euler_characteristic(G) - sum(v.irr or 0 for v in G.z_vertices)


def laplacian_index(G: SkeletonGraph, F: PolygonFunction) -> Fraction:
    """n chi(U) minus the total Laplacian of h over points of U."""
    lap = laplacian(F)
    return G.rank * euler_characteristic(G) - sum(lap[v.id].total_height for v in G.interior_vertices)


def virtual_local_index(G: SkeletonGraph, F: PolygonFunction, vertex: str) -> Fraction:
    v = G.vertices[vertex]
    if v.in_z:
        raise SkeletonError(f"{vertex} is a marked point, not a point of U")
    dh = laplacian(F)[vertex].total_height
    if not v.on_gamma:
        return -dh
    return G.rank * (2 - 2 * v.genus - G.valence_gamma(vertex)) - dh


def genus_sum_report(G: SkeletonGraph) -> dict:
    """Compare sum over skeleton points of (2 - 2g(C_x) - val) with chi(U)."""
    lhs = sum(2 - 2 * v.genus - G.valence_gamma(v.id) for v in G.interior_vertices if v.on_gamma)
    rhs = euler_characteristic(G)
    return {"holds": lhs == rhs, "vertex_sum": lhs, "euler_characteristic": rhs}


def pendant_report(G: SkeletonGraph, F: PolygonFunction) -> list:
    """Marked points whose inward derivative height differs from -Irr."""
    bad = []
    for z in G.z_vertices:
        total = sum((branch_derivative(F, z.id, e).total_height for e in G.adjacency[z.id]), Fraction(0))
        if total != -(z.irr or 0):
            bad.append(f"{z.id}: inward derivative height {format_rational(total)} but Irr = {z.irr or 0}")
    return bad


def certify_exponents(vertex: Vertex) -> str:
    """'non-liouville' when every exponent is an exact rational, else 'cannot certify'."""
    if vertex.exponents is None:
        return "no exponents"
    for e in vertex.exponents:
        if isinstance(e, bool) or isinstance(e, float):
            return "cannot certify"
        if isinstance(e, (int, Fraction)):
            continue
        try:
            to_fraction(e)
        except (TypeError, ValueError, ZeroDivisionError):
            return "cannot certify"
    return "non-liouville"


def _gamma_depths(G: SkeletonGraph) -> dict:
    depth = {}
    todo = deque()
    for v in G.vertices.values():
        if v.on_gamma or v.in_z:
            depth[v.id] = 0
            todo.append(v.id)
    while todo:
        x = todo.popleft()
        for e in G.adjacency[x]:
            y = e.other(x)
            if y not in depth:
                depth[y] = depth[x] + 1
                todo.append(y)
    return depth


def check_inequalities(G: SkeletonGraph, F: PolygonFunction) -> list:
    """List every violated inequality; an empty list means pass."""
    violations = []
    for v in G.interior_vertices:
        chi = virtual_local_index(G, F, v.id)
        if v.r_annotation is not None and v.r_annotation not in F[v.id].slopes and chi != 0:
            violations.append(
                f"{v.id}: no slope equals {format_rational(v.r_annotation)} but chi = {format_rational(chi)} != 0"
            )
        if v.on_gamma and chi > 0:
            violations.append(f"{v.id}: chi = {format_rational(chi)} > 0 on the skeleton")
    depth = _gamma_depths(G)
    for e in G.edges:
        a, b = e.u, e.v
        if depth.get(a, 0) == depth.get(b, 0):
            continue
        near, far = (a, b) if depth[a] < depth[b] else (b, a)
        if G.vertices[far].on_gamma:
            continue
        d = branch_derivative(F, near, e)
        if any(h > 0 for h in d.heights):
            violations.append(f"{near}->{far}: derivative {d} away from the skeleton is not <= 0")
    return violations


@dataclass
class IndexReport:
    global_index: int
    laplacian_index: Fraction
    local_indices: dict
    genus_sum: dict
    pendant_violations: list
    inequality_violations: list
    exponent_status: dict = field(default_factory=dict)

    @property
    def local_sum(self) -> Fraction:
        return sum(self.local_indices.values(), Fraction(0))

    @property
    def violations(self) -> list:
        out = list(self.pendant_violations) + list(self.inequality_violations)
        if self.laplacian_index != self.global_index:
            out.append(
                f"Laplacian index {format_rational(self.laplacian_index)} != global index {self.global_index}"
            )
        if self.genus_sum["holds"] and self.local_sum != self.global_index:
            out.append(f"sum of local indices {format_rational(self.local_sum)} != global index {self.global_index}")
        return out

    @property
    def passed(self) -> bool:
        return not self.violations


def index_report(G: SkeletonGraph, F: PolygonFunction) -> IndexReport:
    return IndexReport(
        global_index=global_index(G, F),
        laplacian_index=laplacian_index(G, F),
        local_indices={v.id: virtual_local_index(G, F, v.id) for v in G.interior_vertices},
        genus_sum=genus_sum_report(G),
        pendant_violations=pendant_report(G, F),
        inequality_violations=check_inequalities(G, F),
        exponent_status={v.id: certify_exponents(v) for v in G.z_vertices if v.exponents is not None},
    )


# -- JSON -------------------------------------------------------------------


def _exponent(e):
    if isinstance(e, (int, str)) and not isinstance(e, bool):
        try:
            return to_fraction(e)
        except (ValueError, ZeroDivisionError):
            return e
    return e


def skeleton_from_dict(data: Mapping):
    try:
        rank = int(data["rank"])
        vertices = []
        for raw in data["vertices"]:
            exps = raw.get("exponents")
            vertices.append(
                Vertex(
                    id=str(raw["id"]),
                    kind=raw.get("kind", "interior"),
                    genus=int(raw.get("genus", 0)),
                    irr=raw.get("irr"),
                    exponents=None if exps is None else tuple(_exponent(e) for e in exps),
                    r_annotation=raw.get("r_annotation"),
                    on_gamma=bool(raw.get("on_gamma", True)),
                    puncture=bool(raw.get("puncture", False)),
                )
            )
        edges = [Edge(str(e["from"]), str(e["to"]), e["length"]) for e in data["edges"]]
        G = SkeletonGraph(vertices, edges, genus=int(data.get("genus", 0)), rank=rank)
        values = {str(k): Polygon(tuple(to_fraction(h) for h in hs)) for k, hs in data["polygon_values"].items()}
    except (KeyError, TypeError) as exc:
        raise SkeletonError(f"malformed skeleton description: {exc!r}") from exc
    return G, PolygonFunction(G, values)


def load_skeleton(path):
    with open(path) as fh:
        return skeleton_from_dict(json.load(fh))


def skeleton_to_dict(G: SkeletonGraph, F: PolygonFunction) -> dict:
    verts = []
    for v in G.vertices.values():
        d = {"id": v.id, "kind": v.kind, "genus": v.genus}
        if v.irr is not None:
            d["irr"] = v.irr
        if v.exponents is not None:
            d["exponents"] = [format_rational(e) if isinstance(e, (int, Fraction)) else e for e in v.exponents]
        if v.r_annotation is not None:
            d["r_annotation"] = format_rational(v.r_annotation)
        if not v.on_gamma:
            d["on_gamma"] = False
        verts.append(d)
    return {
        "genus": G.genus,
        "rank": G.rank,
        "vertices": verts,
        "edges": [{"from": e.u, "to": e.v, "length": format_rational(e.length)} for e in G.edges],
        "polygon_values": {vid: [format_rational(h) for h in F[vid].heights] for vid in G.vertices},
    }


# -- lifting problem ----------------------------------------------------------


@dataclass
class LiftingConfig:
    p: int
    n: int
    b: tuple
    levels: dict  # point id -> filtration level i
    root: str
    infinity: str | None
    edges: list
    s1: dict

    @classmethod
    def from_dict(cls, data: Mapping) -> "LiftingConfig":
        try:
            tree = data["tree"]
            return cls(
                p=int(data["p"]),
                n=int(data["n"]),
                b=tuple(int(x) for x in data["b"]),
                levels={str(pt["id"]): int(pt["level"]) for pt in data["points"]},
                root=str(tree["root"]),
                infinity=None if tree.get("infinity") is None else str(tree["infinity"]),
                edges=[Edge(str(e["from"]), str(e["to"]), e["length"]) for e in tree["edges"]],
                s1={str(k): to_fraction(v) for k, v in data["s1_values"].items()},
            )
        except (KeyError, TypeError) as exc:
            raise SkeletonError(f"malformed lifting config: {exc!r}") from exc

    def count_z(self, i: int) -> int:
        return sum(1 for lvl in self.levels.values() if lvl <= i)

    def adjacency(self) -> dict:
        adj: dict = {}
        for e in self.edges:
            adj.setdefault(e.u, []).append(e)
            adj.setdefault(e.v, []).append(e)
        return adj

    def rooted_tree(self):
        """Parent map and children lists of the tree without the infinity branch."""
        adj = self.adjacency()
        parent = {self.root: None}
        order = [self.root]
        todo = deque([self.root])
        while todo:
            x = todo.popleft()
            for e in adj.get(x, []):
                y = e.other(x)
                if y == self.infinity or y in parent:
                    continue
                parent[y] = (x, e)
                order.append(y)
                todo.append(y)
        return parent, order

    def dominated(self) -> dict:
        parent, order = self.rooted_tree()
        count = {x: (1 if x in self.levels else 0) for x in order}
        for x in reversed(order):
            if parent[x] is not None:
                count[parent[x][0]] += count[x]
        return count


def _genus_rh1(cfg: LiftingConfig, i: int) -> Fraction:
    p = cfg.p
    total = 2 * p ** i - sum((p ** i - p ** (j - 1)) * (cfg.count_z(j) - cfg.count_z(j - 1)) for j in range(1, i + 1))
    return Fraction(2 - total, 2)


def _genus_rh2(cfg: LiftingConfig, i: int) -> Fraction:
    # Riemann-Hurwitz in characteristic p: each jump b_j contributes (p^j - p^(j-1)) (b_j + 1)
    p = cfg.p
    total = 2 * p ** i - sum((p ** j - p ** (j - 1)) * (cfg.b[j - 1] + 1) for j in range(1, i + 1))
    return Fraction(2 - total, 2)


def check_structure(cfg: LiftingConfig) -> list:
    out = []
    if cfg.p < 2 or any(cfg.p % q == 0 for q in range(2, int(cfg.p ** 0.5) + 1)):
        out.append(f"p = {cfg.p} is not prime")
    if len(cfg.b) != cfg.n:
        out.append(f"expected {cfg.n} conductors, got {len(cfg.b)}")
    for pid, lvl in cfg.levels.items():
        if not 1 <= lvl <= cfg.n:
            out.append(f"point {pid} has level {lvl} outside 1..{cfg.n}")
    nodes = {cfg.root} | {x for e in cfg.edges for x in (e.u, e.v)}
    if len(cfg.edges) != len(nodes) - 1:
        out.append("the tree has a cycle or is disconnected")
    parent, order = cfg.rooted_tree()
    reach = set(order) | ({cfg.infinity} if cfg.infinity else set())
    if reach != nodes:
        out.append(f"vertices {sorted(nodes - reach)} are not reachable from {cfg.root}")
    has_child = {parent[y][0] for y in order if parent[y] is not None}
    leaves = {x for x in order if x != cfg.root and x not in has_child}
    if leaves != set(cfg.levels):
        out.append(f"leaves {sorted(leaves)} differ from the ramification points {sorted(cfg.levels)}")
    missing = nodes - set(cfg.s1)
    if missing:
        out.append(f"no s_1 value at {sorted(missing)}")
    return out


def check_conductor_chain(cfg: LiftingConfig) -> list:
    out = []
    prev = 0
    for j, bj in enumerate(cfg.b, start=1):
        if bj < cfg.p * prev:
            out.append(f"b_{j} = {bj} < p * b_{j - 1} = {cfg.p * prev}")
        prev = bj
    return out


def check_riemann_hurwitz(cfg: LiftingConfig) -> list:
    out = []
    for i in range(1, min(cfg.n, len(cfg.b)) + 1):
        zi = cfg.count_z(i)
        if zi != cfg.b[i - 1] + 1:
            out.append(f"#Z_{i} = {zi} but b_{i} + 1 = {cfg.b[i - 1] + 1}")
        g1, g2 = _genus_rh1(cfg, i), _genus_rh2(cfg, i)
        if g1 != g2:
            out.append(f"g(Y_{i}) = {format_rational(g1)} from ramification points but {format_rational(g2)} from conductors")
    return out


def _infinity_path(cfg: LiftingConfig) -> list:
    if cfg.infinity is None:
        return [cfg.root]
    return [cfg.root, cfg.infinity]


def check_gamma_infinity(cfg: LiftingConfig) -> list:
    return [
        f"s_1({x}) = {format_rational(cfg.s1[x])} != 0 on the path to infinity"
        for x in _infinity_path(cfg)
        if x in cfg.s1 and cfg.s1[x] != 0
    ]


def pendant_constant(cfg: LiftingConfig, level: int) -> Fraction:
    return cfg.n - level + 1 + Fraction(1, cfg.p - 1)


def check_pendant_values(cfg: LiftingConfig) -> list:
    out = []
    parent, _ = cfg.rooted_tree()
    for pid, lvl in cfg.levels.items():
        c = pendant_constant(cfg, lvl)
        ends = [pid] + ([parent[pid][0]] if parent.get(pid) else [])
        for x in ends:
            if x in cfg.s1 and cfg.s1[x] != c:
                out.append(f"pendant edge at {pid}: s_1({x}) = {format_rational(cfg.s1[x])}, expected {format_rational(c)}")
    return out


def check_inward_slopes(cfg: LiftingConfig) -> list:
    """Along each edge, the derivative of s_1 pointing toward the root is 1 - l."""
    out = []
    parent, order = cfg.rooted_tree()
    dom = cfg.dominated()
    for x in order:
        if parent[x] is None:
            continue
        up, e = parent[x]
        if x not in cfg.s1 or up not in cfg.s1:
            continue
        d = (cfg.s1[up] - cfg.s1[x]) / e.length
        want = 1 - dom[x]
        if d != want:
            out.append(f"{x}->{up}: derivative {format_rational(d)}, expected 1 - {dom[x]} = {want}")
    return out


def lifting_local_indices(cfg: LiftingConfig) -> dict:
    """chi_x for the rank-one connection at the interior vertices of the tree.

    Valences are taken in the tree spanned by the root and the ramification
    points; the branch to infinity carries s_1 = 0 and adds only its
    derivative to the Laplacian.
    """
    adj = cfg.adjacency()
    parent, order = cfg.rooted_tree()
    out = {}
    for x in order:
        if x in cfg.levels:
            continue
        lap = Fraction(0)
        val = 0
        for e in adj.get(x, []):
            y = e.other(x)
            if y in cfg.s1 and x in cfg.s1:
                lap += (cfg.s1[y] - cfg.s1[x]) / e.length
            if y != cfg.infinity:
                val += 1
        out[x] = (2 - val) - lap
    return out


def check_measure(cfg: LiftingConfig) -> list:
    out = []
    chi = lifting_local_indices(cfg)
    target = 1 - cfg.b[-1] if cfg.b else 1
    for x, c in chi.items():
        want = target if x == cfg.root else 0
        if c != want:
            out.append(f"chi_{x} = {format_rational(c)}, expected {format_rational(want)}")
    return out


LIFTING_CHECKS = (
    ("structure", check_structure),
    ("conductor_chain", check_conductor_chain),
    ("riemann_hurwitz", check_riemann_hurwitz),
    ("gamma_infinity", check_gamma_infinity),
    ("pendant_values", check_pendant_values),
    ("inward_slopes", check_inward_slopes),
    ("measure", check_measure),
)


TREE_CHECKS = ("gamma_infinity", "pendant_values", "inward_slopes", "measure")


@dataclass
class LiftingReport:
    results: dict  # check name -> list of failure messages

    @property
    def failed(self) -> list:
        return [k for k, v in self.results.items() if v]

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def violations(self) -> list:
        return [f"{k}: {m}" for k, msgs in self.results.items() for m in msgs]


def validate_lifting(config) -> LiftingReport:
    cfg = config if isinstance(config, LiftingConfig) else LiftingConfig.from_dict(config)
    results = {}
    tree_ok = True
    for name, fn in LIFTING_CHECKS:
        if name in TREE_CHECKS and not tree_ok:
            results[name] = ["not evaluated: the tree is malformed"]
            continue
        results[name] = fn(cfg)
        if name == "structure":
            tree_ok = not results[name]
    return LiftingReport(results)
