"""Weighted Satake-Tits diagrams, the descent rewrite, and classification.

A weighted diagram is a Dynkin diagram of type A/B/C/D/E7 whose vertices
are colored white or black, possibly carrying a Galois arrow pairing on
white vertices, with one distinguished (circled) white vertex defining the
grading.  The descent step attaches the lowest-root vertex of the affine
extension, deletes the circled vertex together with everything it touches
through chains of black vertices (including the empty chain, i.e. direct
white neighbors), and circles the new vertex.  Iterating until the diagram
empties computes the rank; the last nonempty diagram determines the 1-type.

Classification matches a diagram against the thirteen parametric families
of regular graded simple Lie algebras; the supported families are the ones
whose descent data feed the rest of the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple


class DiagramError(ValueError):
    pass


Edge = FrozenSet[int]


class WeightedSatakeDiagram:
    """Immutable-by-convention colored Dynkin diagram with a circled vertex."""

    __slots__ = ("colors", "bonds", "arrows", "circled")

    def __init__(self, colors: Dict[int, str],
                 bonds: Dict[Edge, Tuple[int, Optional[int]]],
                 arrows: Dict[int, int], circled: Optional[int]):
        self.colors = dict(colors)
        self.bonds = dict(bonds)
        self.arrows = dict(arrows)
        self.circled = circled

    # -- basic structure ---------------------------------------------------

    @property
    def vertices(self) -> List[int]:
        return sorted(self.colors)

    def is_empty(self) -> bool:
        return not self.colors

    def neighbors(self, v: int) -> List[int]:
        out = []
        for e in self.bonds:
            if v in e:
                (w,) = e - {v}
                out.append(w)
        return sorted(out)

    def component(self, v: int) -> Set[int]:
        seen = {v}
        stack = [v]
        while stack:
            for w in self.neighbors(stack.pop()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def restricted(self, keep: Set[int]) -> "WeightedSatakeDiagram":
        colors = {v: c for v, c in self.colors.items() if v in keep}
        bonds = {e: b for e, b in self.bonds.items() if e <= keep}
        arrows = {v: w for v, w in self.arrows.items() if v in keep and w in keep}
        circled = self.circled if self.circled in keep else None
        return WeightedSatakeDiagram(colors, bonds, arrows, circled)

    def validate(self, require_connected: bool = True) -> None:
        if not self.colors:
            raise DiagramError("empty diagram")
        for v, c in self.colors.items():
            if c not in ("w", "b"):
                raise DiagramError(f"vertex {v}: color must be 'w' or 'b'")
        for e, (bond, toward) in self.bonds.items():
            if not e <= set(self.colors):
                raise DiagramError(f"bond {sorted(e)} references unknown vertex")
            if bond == 3:
                raise DiagramError("triple bond: G2 diagrams are excluded")
            if bond not in (1, 2):
                raise DiagramError(f"bond multiplicity {bond} unsupported")
            if bond == 2 and toward not in e:
                raise DiagramError(f"double bond {sorted(e)} needs a 'toward' endpoint")
            if bond == 1 and toward is not None:
                raise DiagramError("simple bonds carry no direction")
        for v, w in self.arrows.items():
            if self.arrows.get(w) != v or v == w:
                raise DiagramError("Galois arrows must form an involutive pairing")
            if self.colors.get(v) != "w" or self.colors.get(w) != "w":
                raise DiagramError("Galois arrows may only join white vertices")
        if self.circled is None:
            raise DiagramError("no circled vertex")
        if self.colors.get(self.circled) != "w":
            raise DiagramError("circled vertex must be white")
        if self.circled in self.arrows:
            raise DiagramError("circled vertex must be fixed by the Galois pairing")
        # acyclic with the right edge count, i.e. a forest
        if len(self.bonds) >= len(self.colors):
            raise DiagramError("diagram contains a cycle")
        if require_connected and self.component(next(iter(self.colors))) != set(self.colors):
            raise DiagramError("diagram is not connected")

    def to_json(self) -> Dict[str, object]:
        return {
            "vertices": self.vertices,
            "colors": {str(v): c for v, c in sorted(self.colors.items())},
            "bonds": sorted(
                [sorted(e) + [b] + ([t] if t is not None else [])
                 for e, (b, t) in self.bonds.items()]),
            "arrows": sorted(sorted(pair) for pair in
                             {frozenset((v, w)) for v, w in self.arrows.items()}),
            "circled": self.circled,
        }


def parse_diagram(data) -> WeightedSatakeDiagram:
    """Build and validate a diagram from JSON text or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DiagramError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DiagramError("diagram JSON must be an object")
    try:
        n = int(data["n"])
        colors_in = list(data["colors"])
        bonds_in = list(data.get("bonds", []))
        arrows_in = list(data.get("arrows", []))
        circled = int(data["circled"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramError(f"malformed diagram JSON: {exc}") from exc
    if len(colors_in) != n:
        raise DiagramError(f"expected {n} colors, got {len(colors_in)}")
    colors = {}
    for i, c in enumerate(colors_in, start=1):
        c = {"w": "w", "white": "w", "b": "b", "black": "b"}.get(c)
        if c is None:
            raise DiagramError(f"vertex {i}: bad color {colors_in[i-1]!r}")
        colors[i] = c
    bonds: Dict[Edge, Tuple[int, Optional[int]]] = {}
    for item in bonds_in:
        if not isinstance(item, (list, tuple)) or len(item) not in (3, 4):
            raise DiagramError(f"bad bond entry {item!r}")
        i, j, bond = int(item[0]), int(item[1]), int(item[2])
        toward = int(item[3]) if len(item) == 4 else None
        if bond == 2 and toward is None:
            raise DiagramError(f"double bond [{i},{j}] is missing its direction")
        bonds[frozenset((i, j))] = (bond, toward)
    arrows: Dict[int, int] = {}
    for pair in arrows_in:
        i, j = int(pair[0]), int(pair[1])
        arrows[i] = j
        arrows[j] = i
    diag = WeightedSatakeDiagram(colors, bonds, arrows, circled)
    diag.validate(require_connected=True)
    shape = analyze_shape(diag)  # rejects non-Dynkin and excluded types
    declared = data.get("type")
    if declared is not None:
        want = str(declared).upper()
        if want not in (shape.kind, shape.kind[0]):
            raise DiagramError(f"declared type {declared!r} but shape is {shape.kind}")
    return diag


# ---------------------------------------------------------------------------
# Shape analysis
# ---------------------------------------------------------------------------


@dataclass
class Shape:
    """Underlying Dynkin type of a connected diagram plus a canonical frame.

    kind "A": path = the vertex path (single vertex allowed).
    kind "B": path from the simple end to the short (double-bonded) end.
    kind "C": path with the long end last (double bond points inward).
    kind "D": arms = paths from the fork outward, longest arm last.
    kind "E7": arms from the fork outward ordered by length (1, 2, 3).
    """

    kind: str
    path: List[int] = field(default_factory=list)
    arms: List[List[int]] = field(default_factory=list)
    fork: Optional[int] = None


def analyze_shape(diag: WeightedSatakeDiagram) -> Shape:
    verts = diag.vertices
    deg = {v: len(diag.neighbors(v)) for v in verts}
    if any(d > 3 for d in deg.values()):
        raise DiagramError("vertex of degree > 3: not a Dynkin diagram")
    forks = [v for v in verts if deg[v] == 3]
    doubles = [e for e, (b, _) in diag.bonds.items() if b == 2]
    if len(forks) == 0:
        return _analyze_path(diag, verts, deg, doubles)
    if len(forks) > 1:
        raise DiagramError("more than one branch vertex: not a Dynkin diagram")
    if doubles:
        raise DiagramError("branch vertex with a double bond: not a Dynkin diagram")
    fork = forks[0]
    arms = []
    for start in diag.neighbors(fork):
        arm = [start]
        prev = fork
        while True:
            nxt = [w for w in diag.neighbors(arm[-1]) if w != prev]
            if not nxt:
                break
            prev = arm[-1]
            arm.append(nxt[0])
        arms.append(arm)
    arms.sort(key=len)
    lengths = tuple(len(a) for a in arms)
    if lengths[0] == 1 and lengths[1] == 1:
        return Shape("D", arms=arms, fork=fork)
    if lengths == (1, 2, 3):
        return Shape("E7", arms=arms, fork=fork)
    if lengths == (1, 2, 2):
        raise DiagramError("type E6 is excluded")
    if lengths == (1, 2, 4):
        raise DiagramError("type E8 is excluded")
    raise DiagramError(f"branch arm lengths {lengths}: not a supported Dynkin diagram")


def _analyze_path(diag, verts, deg, doubles) -> Shape:
    if len(verts) == 1:
        return Shape("A", path=list(verts))
    ends = [v for v in verts if deg[v] == 1]
    if len(ends) != 2:
        raise DiagramError("path shape expected")
    path = [ends[0]]
    prev = None
    while len(path) < len(verts):
        nxt = [w for w in diag.neighbors(path[-1]) if w != prev]
        prev = path[-1]
        path.append(nxt[0])
    if not doubles:
        return Shape("A", path=path)
    if len(doubles) > 1:
        raise DiagramError("several double bonds: not a Dynkin diagram")
    (e,) = doubles
    if e != frozenset(path[-2:]) and e != frozenset(path[:2]):
        raise DiagramError("interior double bond: type F4 is excluded")
    if len(path) == 2:
        # B2 = C2: frame it as C with the long root last
        bond, toward = diag.bonds[e]
        (other,) = e - {toward}
        return Shape("C", path=[toward, other])
    if e == frozenset(path[:2]):
        path.reverse()  # put the double bond at the tail of the frame
    bond, toward = diag.bonds[e]
    if toward == path[-1]:
        return Shape("B", path=path)  # short root at the end
    return Shape("C", path=path)  # long end last


# ---------------------------------------------------------------------------
# Descent
# ---------------------------------------------------------------------------


def _affine_vertex_id(diag: WeightedSatakeDiagram) -> int:
    return max(diag.colors) + 1


def affine_extend(diag: WeightedSatakeDiagram) -> Tuple[WeightedSatakeDiagram, int]:
    """Attach the white lowest-root vertex per the underlying affine extension."""
    shape = analyze_shape(diag)
    omega = _affine_vertex_id(diag)
    colors = dict(diag.colors)
    bonds = dict(diag.bonds)
    colors[omega] = "w"
    if shape.kind == "A":
        if len(shape.path) == 1:
            bonds[frozenset((omega, shape.path[0]))] = (1, None)
        else:
            bonds[frozenset((omega, shape.path[0]))] = (1, None)
            bonds[frozenset((omega, shape.path[-1]))] = (1, None)
    elif shape.kind == "B":
        # fork at the second vertex from the simple end
        bonds[frozenset((omega, shape.path[1]))] = (1, None)
    elif shape.kind == "C":
        # long lowest root, double bond pointing into the path
        short_end = shape.path[0]
        bonds[frozenset((omega, short_end))] = (2, short_end)
    elif shape.kind == "D":
        # second fork at the neighbor of the long-arm end
        long_arm = shape.arms[-1]
        attach = long_arm[-2] if len(long_arm) >= 2 else shape.fork
        bonds[frozenset((omega, attach))] = (1, None)
    elif shape.kind == "E7":
        # lowest root hangs off the end of the length-2 arm
        bonds[frozenset((omega, shape.arms[1][-1]))] = (1, None)
    else:  # pragma: no cover
        raise DiagramError(f"affine extension undefined for {shape.kind}")
    return WeightedSatakeDiagram(colors, bonds, dict(diag.arrows), diag.circled), omega


def descend_once(diag: WeightedSatakeDiagram) -> WeightedSatakeDiagram:
    """One descent step; the result may be disconnected or empty."""
    if diag.is_empty():
        raise DiagramError("cannot descend the empty diagram")
    ext, omega = affine_extend(diag)
    # delete the circled vertex, all black chains out of it, and the white
    # vertices those chains reach (a chain may be empty)
    removed = {ext.circled}
    stack = [ext.circled]
    while stack:
        for w in ext.neighbors(stack.pop()):
            if w in removed:
                continue
            removed.add(w)
            if ext.colors[w] == "b":
                stack.append(w)
    keep = set(ext.colors) - removed
    result = ext.restricted(keep)
    result.circled = omega if omega in keep else None
    return result


def iterate_descent(diag: WeightedSatakeDiagram):
    """Iterate descent to exhaustion.

    Returns (rank, last_nonempty, trace) where trace lists the successive
    diagrams (component-restricted, as used for the next step).
    """
    current = diag
    trace = [current]
    rank = 0
    while not current.is_empty():
        nxt = descend_once(current)
        rank += 1
        if nxt.circled is None or nxt.is_empty():
            return rank, current, trace
        nxt = nxt.restricted(nxt.component(nxt.circled))
        trace.append(nxt)
        current = nxt
    raise DiagramError("descent started from an empty diagram")


def one_type_of(last: WeightedSatakeDiagram) -> Tuple[str, Optional[int]]:
    """Read the 1-type off a terminal (rank-1) diagram.

    The two possibilities: A_{2d-1} with the middle vertex circled and d-1
    black vertices on each side -> ("A", d); the two-vertex double-bond
    diagram with the circled vertex long -> ("B", None).
    """
    shape = analyze_shape(last)
    verts = last.vertices
    if shape.kind == "A":
        n = len(verts)
        if n % 2 == 0:
            raise DiagramError("terminal A diagram of even size")
        pos = shape.path.index(last.circled)
        if pos != n // 2:
            raise DiagramError("terminal A diagram not circled in the middle")
        delta = (n + 1) // 2
        sides = shape.path[:pos] + shape.path[pos + 1:]
        if any(last.colors[v] != "b" for v in sides):
            raise DiagramError("terminal A diagram must be black off the circle")
        return ("A", delta)
    if shape.kind in ("B", "C") and len(verts) == 2:
        other = next(v for v in verts if v != last.circled)
        if last.colors[other] == "b":
            return ("B", None)
    raise DiagramError("diagram is not a terminal rank-1 diagram")


# ---------------------------------------------------------------------------
# Classification against the parametric families
# ---------------------------------------------------------------------------

SE_INDEX = {0: 1, 1: 4, 2: 2, 3: 4, 4: 1}


@dataclass(frozen=True)
class GradedProfile:
    family: str                 # row tag "(1)".."(13)"
    params: Dict[str, int]
    rank: int                   # k + 1
    ell: int
    d: int
    e: int
    kappa: int
    grading_type: str           # "I", "II", "III"
    one_type: Tuple[str, Optional[int]]

    @property
    def k(self) -> int:
        return self.rank - 1

    @property
    def m_const(self) -> Fraction:
        return Fraction(self.ell) + Fraction(self.k * self.d, 2)

    @property
    def dim_v_plus(self) -> int:
        dim = self.rank * self.m_const
        if dim.denominator != 1:
            raise DiagramError("non-integral dim V+: inconsistent profile")
        return int(dim)

    def open_g_orbits(self) -> int:
        k = self.k
        if self.grading_type == "I":
            return 1
        if self.grading_type == "III":
            return 3 if k == 0 else 4
        # type II
        if self.e == 2:
            return 1 if k % 2 == 0 else 2
        if self.e == 1:
            if k == 0:
                return 1
            if k == 1:
                return 4
            return 2 if k % 2 == 0 else 5
        if self.e == 3:
            return 4
        raise DiagramError(f"type II with e={self.e} has no orbit count")

    def open_p_orbits(self) -> int:
        if self.grading_type == "I":
            return 1
        if self.grading_type == "III":
            return 3 ** (self.k + 1)
        return SE_INDEX[self.e] ** self.k

    def to_json(self) -> Dict[str, object]:
        return {
            "family": self.family,
            "params": dict(self.params),
            "rank": self.rank,
            "ell": self.ell,
            "d": self.d,
            "e": self.e,
            "kappa": self.kappa,
            "m_const": [self.m_const.numerator, self.m_const.denominator],
            "dim_v_plus": self.dim_v_plus,
            "type": self.grading_type,
            "one_type": list(self.one_type),
            "open_g_orbits": self.open_g_orbits(),
            "open_p_orbits": self.open_p_orbits(),
        }


def _profile(family, params, rank, ell, d, e, gtype,
             one_type=("A", 1)) -> GradedProfile:
    kappa = one_type[1] if one_type[0] == "A" else 2
    return GradedProfile(family, params, rank, ell, d, e, kappa, gtype, one_type)


def _match_family(diag: WeightedSatakeDiagram) -> GradedProfile:
    shape = analyze_shape(diag)
    colors = diag.colors
    white = {v for v, c in colors.items() if c == "w"}
    black = set(colors) - white
    n = len(colors)

    if shape.kind == "A":
        if black:
            # the division-algebra variants of the matrix family interleave
            # black blocks; they are recognized but not supported
            raise DiagramError(
                "A-type diagram with black vertices: division-algebra "
                "family is out of scope (only the split case is supported)")
        if n % 2 == 0:
            raise DiagramError("A-type diagram of even size matches no family")
        mid = shape.path[n // 2]
        if diag.circled != mid:
            raise DiagramError("A-type diagram must be circled at the middle vertex")
        half = (n + 1) // 2
        if not diag.arrows:
            return _profile("(1)", {"k_plus_1": half, "delta": 1},
                            rank=half, ell=1, d=2, e=0, gtype="I")
        pairing_ok = all(diag.arrows.get(shape.path[i]) == shape.path[n - 1 - i]
                         for i in range(n // 2))
        if not pairing_ok:
            raise DiagramError("A-type arrows must pair vertices symmetrically")
        return _profile("(2)", {"n": half}, rank=half, ell=1, d=2, e=2, gtype="II")

    if shape.kind == "B":
        if diag.arrows:
            raise DiagramError("B-type diagram with arrows matches no family")
        if diag.circled != shape.path[0]:
            raise DiagramError("B-type diagram must be circled at the simple end")
        short_end = shape.path[-1]
        if any(colors[v] != "w" for v in shape.path[:-1]):
            raise DiagramError("B-type interior vertices must be white")
        if colors[short_end] == "w":
            return _profile("(3)", {"n": n}, rank=2, ell=1, d=2 * n - 3, e=1, gtype="II")
        return _profile("(4)", {"n": n}, rank=2, ell=1, d=2 * n - 3, e=3, gtype="II")

    if shape.kind == "C":
        if black or diag.arrows:
            raise DiagramError("C-type diagram must be all white without arrows")
        if diag.circled != shape.path[-1]:
            raise DiagramError("C-type diagram must be circled at the long end")
        return _profile("(6)", {"n": n}, rank=n, ell=1, d=1, e=1, gtype="II")

    if shape.kind == "D":
        tips = [shape.arms[0][0], shape.arms[1][0]]
        long_arm = shape.arms[2]
        tail_end = long_arm[-1]
        if len(long_arm) == 1:
            # D4: all arms are tips; frame the circled one as the tail
            ends = [a[0] for a in shape.arms]
            if diag.circled in ends:
                tail_end = diag.circled
                tips = [v for v in ends if v != tail_end]
        others = set(colors) - set(tips)
        if any(colors[v] != "w" for v in others):
            raise DiagramError("D-type diagram: only fork tips may be black")
        circ = diag.circled
        tip_arrow = (len(diag.arrows) == 2
                     and diag.arrows.get(tips[0]) == tips[1])
        if circ == tail_end:
            if all(colors[t] == "w" for t in tips) and not diag.arrows:
                return _profile("(8)", {"m": n}, rank=2, ell=1, d=2 * n - 4, e=0, gtype="I")
            if all(colors[t] == "w" for t in tips) and tip_arrow:
                return _profile("(9)", {"m": n}, rank=2, ell=1, d=2 * n - 4, e=2, gtype="II")
            if all(colors[t] == "b" for t in tips) and not diag.arrows:
                return _profile("(10)", {"m": n}, rank=2, ell=1, d=2 * n - 4, e=4, gtype="I")
            raise DiagramError("D-type tail-circled diagram matches no family")
        if circ in tips:
            if black or diag.arrows:
                raise DiagramError("fork-tip-circled D diagram must be all white")
            if n % 2 or n // 2 < 3:
                raise DiagramError(
                    "fork-tip-circled D diagram needs even size >= 6")
            return _profile("(11)", {"n": n // 2}, rank=n // 2, ell=1, d=4, e=0, gtype="I")
        raise DiagramError("D-type diagram circled at an interior vertex")

    if shape.kind == "E7":
        if black or diag.arrows:
            raise DiagramError("E7 diagram must be split (all white, no arrows)")
        if diag.circled != shape.arms[2][-1]:
            raise DiagramError("E7 diagram must be circled at the long-arm end")
        return _profile("(13)", {}, rank=3, ell=1, d=8, e=0, gtype="I")

    raise DiagramError(f"shape {shape.kind} matches no supported family")


def classify_profile(diag: WeightedSatakeDiagram) -> GradedProfile:
    """Match against the parametric families and cross-check by descent."""
    profile = _match_family(diag)
    rank, last, _ = iterate_descent(diag)
    if rank != profile.rank:
        raise DiagramError(
            f"descent rank {rank} contradicts family rank {profile.rank}")
    ot = one_type_of(last)
    if ot != profile.one_type:
        raise DiagramError(
            f"descent 1-type {ot} contradicts family 1-type {profile.one_type}")
    return profile


# ---------------------------------------------------------------------------
# Family constructors (used by tests and the command-line census)
# ---------------------------------------------------------------------------


def make_family_diagram(row: str, n: int) -> WeightedSatakeDiagram:
    """Standard diagram for a supported family row at parameter n."""
    def path_bonds(m):
        return {frozenset((i, i + 1)): (1, None) for i in range(1, m)}

    if row == "(1)":
        size = 2 * n - 1
        return WeightedSatakeDiagram({i: "w" for i in range(1, size + 1)},
                                     path_bonds(size), {}, n)
    if row == "(2)":
        size = 2 * n - 1
        arrows = {}
        for i in range(1, n):
            arrows[i] = size + 1 - i
            arrows[size + 1 - i] = i
        return WeightedSatakeDiagram({i: "w" for i in range(1, size + 1)},
                                     path_bonds(size), arrows, n)
    if row in ("(3)", "(4)"):
        bonds = path_bonds(n)
        bonds[frozenset((n - 1, n))] = (2, n)  # short root at the end
        colors = {i: "w" for i in range(1, n + 1)}
        if row == "(4)":
            colors[n] = "b"
        return WeightedSatakeDiagram(colors, bonds, {}, 1)
    if row == "(6)":
        bonds = path_bonds(n)
        if n >= 2:
            bonds[frozenset((n - 1, n))] = (2, n - 1)  # long root at the end
        return WeightedSatakeDiagram({i: "w" for i in range(1, n + 1)},
                                     bonds, {}, n)
    if row in ("(8)", "(9)", "(10)", "(11)"):
        m = 2 * n if row == "(11)" else n
        # tail 1..m-2, fork at m-2, tips m-1 and m
        bonds = path_bonds(m - 2)
        bonds[frozenset((m - 2, m - 1))] = (1, None)
        bonds[frozenset((m - 2, m))] = (1, None)
        colors = {i: "w" for i in range(1, m + 1)}
        arrows = {}
        if row == "(9)":
            arrows = {m - 1: m, m: m - 1}
        if row == "(10)":
            colors[m - 1] = colors[m] = "b"
        circled = m if row == "(11)" else 1
        return WeightedSatakeDiagram(colors, bonds, arrows, circled)
    if row == "(13)":
        # fork vertex 4; arms: [2], [3,1], [5,6,7]
        bonds = {frozenset(e): (1, None) for e in
                 [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)]}
        return WeightedSatakeDiagram({i: "w" for i in range(1, 8)}, bonds, {}, 7)
    raise DiagramError(f"no constructor for family row {row}")


def table1_catalog() -> List[Dict[str, object]]:
    """Summary of the thirteen families with support status."""
    rows = [
        ("(1)", "sl(2(k+1),D), V+ = M(k+1,D)", "delta=1 only", True),
        ("(2)", "su(2n,E,H), V+ = Herm(n,E)", "E/F unramified", True),
        ("(3)", "o(q_{n+1,n}), V+ = F^{2n-1}", "", True),
        ("(4)", "o(q_{n+2,n-1}), V+ = F^{2n-1}", "", True),
        ("(5)", "o(q_{4,1}), V+ = F^3", "1-type B", False),
        ("(6)", "sp(2n,F), V+ = Sym(n,F)", "", True),
        ("(7)", "u(2n,H), V+ = Herm(n,H)", "1-type B", False),
        ("(8)", "o(q_{m,m}), V+ = F^{2m-2}", "", True),
        ("(9)", "o(q_{m+1,m-1}), V+ = F^{2m-2}", "", True),
        ("(10)", "o(q_{m+2,m-2}), V+ = F^{2m-2}", "", True),
        ("(11)", "o(q_{2n,2n}), V+ = Skew(2n,F)", "n >= 3", True),
        ("(12)", "u(2n,H,K), V+ = Skew-Herm(n,H)", "quaternionic", False),
        ("(13)", "split E7, V+ = Herm(3,O_split)", "", True),
    ]
    out = []
    for tag, model, note, supported in rows:
        entry = {"row": tag, "model": model, "supported": supported}
        if note:
            entry["note"] = note
        if supported:
            n0 = {"(1)": 2, "(2)": 2, "(3)": 3, "(4)": 3, "(6)": 2,
                  "(8)": 4, "(9)": 4, "(10)": 4, "(11)": 3, "(13)": 7}[tag]
            prof = classify_profile(make_family_diagram(tag, n0))
            entry["example"] = prof.to_json()
        out.append(entry)
    return out
