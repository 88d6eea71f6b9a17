"""Decorated block graphs modelling Morse foliations of 3-manifolds.

An :class:`Assembly` is a table of foliated pieces (:class:`Block`), the
gluings between them, the singularity table and a leaf census.  Every value
is treated as immutable: helpers return new assemblies and never mutate.

Blocks expose *tangential interfaces* (closed or holed surfaces that are
leaves of the foliation) and *spots* (transverse discs).  Interfaces joined
through spot gluings merge into one boundary surface, see :func:`surfaces`.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterator

from .errors import InvalidAssembly


class BlockKind(str, Enum):
    CENTER_BALL = "center_ball"
    REEB = "reeb_solid_torus"
    MORSE = "morse_solid_torus"
    BAND = "product_band"
    BALL = "ball_with_spots"
    BUBBLE = "bubble"
    TRIVIAL_BUBBLE = "trivial_bubble"
    TRUNCATED_BUBBLE = "truncated_bubble"
    CHART = "double_cone_chart"
    TRUNCATED_REEB = "truncated_reeb"
    TRUNCATED_MORSE = "truncated_morse"


class GluingKind(str, Enum):
    TANGENT = "tangent"
    SPOT_TRANSVERSE = "spot_transverse"
    CONNECTED_SUM = "connected_sum"


class Direction(str, Enum):
    INWARD = "inward"
    OUTWARD = "outward"

    def opposite(self) -> "Direction":
        return Direction.OUTWARD if self is Direction.INWARD else Direction.INWARD


SHAPES = (
    "sphere", "torus", "genus", "pseudo_torus", "double_cone",
    "pseudo_disc_leaf", "plane", "disc", "annulus", "generic", "point",
)
_ALWAYS_SC = {"sphere", "plane", "disc", "point"}
_NEVER_SC = {"torus", "genus", "annulus", "pseudo_torus", "pseudo_disc_leaf"}

CENTER_INDICES = (0, 3)
CONIC_INDICES = (1, 2)

# Block parameters whose values are ids of other objects.
REF_PARAMS = ("within", "mutual_with", "conic", "designated_in", "designated_out")

_INTERFACES = {
    BlockKind.CENTER_BALL: ("bd",),
    BlockKind.REEB: ("bd",),
    BlockKind.MORSE: ("bd",),
    BlockKind.BAND: ("in", "out"),
    BlockKind.BALL: ("bd",),
    BlockKind.BUBBLE: ("bd",),
    BlockKind.TRIVIAL_BUBBLE: ("bd",),
    BlockKind.TRUNCATED_BUBBLE: ("bd",),
    BlockKind.CHART: (),
    BlockKind.TRUNCATED_REEB: ("bd",),
    BlockKind.TRUNCATED_MORSE: ("bd",),
}

TORUS_KINDS = (BlockKind.REEB, BlockKind.MORSE,
               BlockKind.TRUNCATED_REEB, BlockKind.TRUNCATED_MORSE)


def natural_key(ident: str) -> tuple:
    """Sort key ordering ``b2`` before ``b10``."""
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", ident))


def shape_for_genus(genus: int) -> str:
    return {0: "sphere", 1: "torus"}.get(genus, "genus")


@dataclass(frozen=True)
class Singularity:
    id: str
    index: int
    host: str
    leaf: str | None = None

    @property
    def is_center(self) -> bool:
        return self.index in CENTER_INDICES

    @property
    def is_conic(self) -> bool:
        return self.index in CONIC_INDICES


@dataclass(frozen=True)
class Spot:
    id: str
    owner: str
    direction: Direction
    interface: str | None = "bd"  # None: a site on an interior leaf
    associated_singularity: str | None = None
    boundary_holonomy_trivial: bool = True


@dataclass(frozen=True)
class LeafDescriptor:
    id: str
    owner: str
    shape: str
    compact: bool
    simply_connected: bool
    singularities: tuple[str, ...] = ()
    genus: int = 0


@dataclass(frozen=True)
class Block:
    id: str
    kind: BlockKind
    genus: int = 0
    spots: tuple[Spot, ...] = ()
    singularities: tuple[str, ...] = ()
    inner: "Assembly | None" = None
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def interfaces(self) -> tuple[str, ...]:
        if self.embedded:
            return ()
        return _INTERFACES[self.kind]

    @property
    def embedded(self) -> bool:
        """Embedded blocks sit inside another block and have no glued boundary."""
        return self.kind in (BlockKind.CHART, BlockKind.TRUNCATED_BUBBLE) or "within" in self.params

    @property
    def discs(self) -> tuple[Spot, ...]:
        """Spots on the tangent boundary; interior sites (bubble attachments) excluded."""
        return tuple(s for s in self.spots if s.interface is not None)

    def interface_genus(self, iface: str) -> int:
        if self.kind in TORUS_KINDS:
            return 1
        if self.kind is BlockKind.BAND:
            return self.genus
        return 0

    def spot(self, spot_id: str) -> Spot:
        for s in self.spots:
            if s.id == spot_id:
                return s
        raise KeyError(spot_id)


@dataclass(frozen=True)
class Gluing:
    id: str
    kind: GluingKind
    ends: tuple[str, str]  # "block.interface" or "block.spot"
    genus: int | None = None
    singularity: str | None = None
    via: str | None = None  # spot_transverse: "disc" or "annulus"
    compact: bool = True


@dataclass(frozen=True)
class Assembly:
    name: str
    ambient: str
    blocks: dict[str, Block] = field(default_factory=dict)
    gluings: dict[str, Gluing] = field(default_factory=dict)
    singularities: dict[str, Singularity] = field(default_factory=dict)
    leaves: dict[str, LeafDescriptor] = field(default_factory=dict)

    def evolve(self, **changes) -> "Assembly":
        return replace(self, **changes)

    # -- lookups ------------------------------------------------------
    def spot_index(self) -> dict[str, Spot]:
        return {s.id: s for b in self.blocks.values() for s in b.spots}

    def spot_gluing(self) -> dict[str, Gluing]:
        """Map spot id to the gluing it participates in (first one wins)."""
        out: dict[str, Gluing] = {}
        for g in self.gluings.values():
            if g.kind is GluingKind.TANGENT:
                continue
            for end in g.ends:
                out.setdefault(end.split(".", 1)[1], g)
        return out

    def partner(self, spot_id: str) -> str | None:
        g = self.spot_gluing().get(spot_id)
        if g is None:
            return None
        a, b = (e.split(".", 1)[1] for e in g.ends)
        return b if a == spot_id else a

    def walk(self, path: tuple[str, ...] = ()) -> Iterator[tuple[tuple[str, ...], "Assembly"]]:
        """Yield ``(path, assembly)`` for this assembly and every nested bubble interior."""
        yield path, self
        for bid in sorted(self.blocks, key=natural_key):
            inner = self.blocks[bid].inner
            if inner is not None:
                yield from inner.walk(path + (bid,))

    def locate(self, ident: str) -> tuple[str, ...] | None:
        """Path of the nested assembly whose tables contain ``ident``."""
        for path, sub in self.walk():
            if (ident in sub.blocks or ident in sub.gluings or ident in sub.singularities
                    or ident in sub.leaves or ident in sub.spot_index()):
                return path
        return None

    def at(self, path: tuple[str, ...]) -> "Assembly":
        sub = self
        for bid in path:
            sub = sub.blocks[bid].inner
        return sub

    def with_at(self, path: tuple[str, ...], new_sub: "Assembly") -> "Assembly":
        if not path:
            return new_sub
        head, rest = path[0], path[1:]
        block = self.blocks[head]
        new_inner = block.inner.with_at(rest, new_sub)
        blocks = dict(self.blocks)
        blocks[head] = replace(block, inner=new_inner)
        return self.evolve(blocks=blocks)

    def all_ids(self) -> set[str]:
        ids: set[str] = set()
        for _, sub in self.walk():
            ids.update(sub.blocks, sub.gluings, sub.singularities, sub.leaves, sub.spot_index())
        return ids

    def all_singularities(self) -> dict[str, Singularity]:
        out: dict[str, Singularity] = {}
        for _, sub in self.walk():
            out.update(sub.singularities)
        return out

    def counts(self) -> Counter:
        """Number of singularities per Morse index, nested interiors included."""
        return Counter(s.index for s in self.all_singularities().values())

    def center_count(self) -> int:
        c = self.counts()
        return c[0] + c[3]

    def conic_count(self) -> int:
        c = self.counts()
        return c[1] + c[2]


def fresh_id(taken: set[str], prefix: str) -> str:
    n = 1
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def split_end(end: str) -> tuple[str, str]:
    block, port = end.split(".", 1)
    return block, port


# ---------------------------------------------------------------------------
# boundary surfaces


@dataclass(frozen=True)
class Surface:
    ports: tuple[str, ...]
    euler: int
    holes: int
    absorbed: bool

    @property
    def closed(self) -> bool:
        return self.holes == 0

    @property
    def genus(self) -> int | None:
        if (2 - self.euler) % 2:
            return None
        return (2 - self.euler) // 2

    def __contains__(self, port: str) -> bool:
        return port in self.ports


def surfaces(a: Assembly) -> list[Surface]:
    """Merge tangential interfaces of ``a`` into boundary surfaces.

    Spot gluings join the interfaces carrying their spots: a transverse
    gluing fills two holes with an annulus (Euler characteristic unchanged),
    a connected sum takes the connected sum of the two surfaces (-2).  A
    surface connected-summed into an interior leaf is absorbed by that leaf.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: str, y: str) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry, key=natural_key)] = min(rx, ry, key=natural_key)

    euler: dict[str, int] = {}
    for b in a.blocks.values():
        for iface in b.interfaces:
            port = f"{b.id}.{iface}"
            parent[port] = port
            euler[port] = 2 - 2 * b.interface_genus(iface)

    spots = a.spot_index()
    glued = a.spot_gluing()
    holes: Counter = Counter()
    cs_minus: Counter = Counter()
    absorbed: set[str] = set()
    for s in spots.values():
        if s.interface is None or f"{s.owner}.{s.interface}" not in parent:
            continue
        port = f"{s.owner}.{s.interface}"
        g = glued.get(s.id)
        if g is None:
            if s.associated_singularity is not None or a.blocks[s.owner].kind in (BlockKind.BALL, BlockKind.TRUNCATED_REEB, BlockKind.TRUNCATED_MORSE):
                euler[port] -= 1
                holes[port] += 1
            continue
        if g.kind is GluingKind.SPOT_TRANSVERSE:
            euler[port] -= 1
            holes[port] += 1
    for g in a.gluings.values():
        if g.kind is GluingKind.TANGENT:
            continue
        ports = []
        for end in g.ends:
            bid, sid = split_end(end)
            s = spots.get(sid)
            if s is None:
                continue
            port = f"{s.owner}.{s.interface}" if s.interface is not None else None
            ports.append(port if port in parent else None)
        if len(ports) != 2:
            continue
        p, q = ports
        if g.kind is GluingKind.SPOT_TRANSVERSE:
            if p and q:
                union(p, q)
                holes[p] -= 1
                holes[q] -= 1
        else:
            if p and q:
                union(p, q)
                cs_minus[p] += 2
            elif p or q:
                absorbed.add(p or q)

    groups: dict[str, list[str]] = {}
    for port in parent:
        groups.setdefault(find(port), []).append(port)
    out = []
    for root in sorted(groups, key=natural_key):
        members = sorted(groups[root], key=natural_key)
        out.append(Surface(
            ports=tuple(members),
            euler=sum(euler[p] - cs_minus[p] for p in members),
            holes=sum(max(holes[p], 0) for p in members),
            absorbed=any(p in absorbed for p in members),
        ))
    return out


def surface_of(a: Assembly, port: str) -> Surface | None:
    for s in surfaces(a):
        if port in s:
            return s
    return None


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.code} [{self.where}] {self.detail}".rstrip()


def index_sum(a: Assembly) -> int:
    """Signed count of singularities, each contributing ``(-1)**index``."""
    return sum((-1) ** s.index for s in a.all_singularities().values())


def _check_unique(a: Assembly, report: list[Violation]) -> None:
    seen: Counter = Counter()
    for _, sub in a.walk():
        for table in (sub.blocks, sub.gluings, sub.singularities, sub.leaves):
            seen.update(list(table))
        seen.update(s.id for b in sub.blocks.values() for s in b.spots)
    for ident, n in sorted(seen.items()):
        if n > 1:
            report.append(Violation("duplicate id", ident, f"occurs {n} times"))


def _validate_level(a: Assembly, report: list[Violation], prefix: str) -> None:
    def add(code: str, where: str, detail: str = "") -> None:
        report.append(Violation(code, prefix + where, detail))

    sings = a.singularities
    spots = a.spot_index()
    hosted: Counter = Counter()

    for s in sings.values():
        if s.index not in (0, 1, 2, 3):
            add("bad index", s.id, str(s.index))
        if s.host not in a.blocks and s.host not in a.gluings:
            add("dangling host", s.id, s.host)
        if s.leaf is not None and s.leaf not in a.leaves:
            add("dangling leaf", s.id, s.leaf)

    for b in a.blocks.values():
        for sid in b.singularities:
            hosted[sid] += 1
            if sid not in sings:
                add("dangling singularity", b.id, sid)
            elif sings[sid].host != b.id:
                add("host mismatch", sid, f"{sings[sid].host} != {b.id}")
        for sp in b.spots:
            if sp.owner != b.id:
                add("spot owner", sp.id, f"{sp.owner} != {b.id}")
            if sp.interface is not None and sp.interface not in _INTERFACES[b.kind]:
                add("bad interface", sp.id, str(sp.interface))
            if sp.associated_singularity is not None:
                t = sings.get(sp.associated_singularity) or _lookup_outer(a, sp.associated_singularity)
                if t is None:
                    add("dangling singularity", sp.id, sp.associated_singularity)
                elif not t.is_conic:
                    add("spot singularity not conic", sp.id, sp.associated_singularity)
        _validate_block(a, b, add)

    for g in a.gluings.values():
        if g.singularity is not None:
            hosted[g.singularity] += 1
            s = sings.get(g.singularity)
            if s is None:
                add("dangling singularity", g.id, g.singularity)
            elif s.host != g.id:
                add("host mismatch", g.singularity, f"{s.host} != {g.id}")
        _validate_gluing(a, g, spots, add)

    for sid, s in sings.items():
        if hosted[sid] == 0:
            add("unhosted singularity", sid)
        elif hosted[sid] > 1:
            add("multiply hosted singularity", sid)

    for leaf in a.leaves.values():
        if leaf.shape not in SHAPES:
            add("bad shape", leaf.id, leaf.shape)
        if leaf.owner not in a.blocks and leaf.owner not in a.gluings:
            add("dangling owner", leaf.id, leaf.owner)
        for sid in leaf.singularities:
            if sid not in sings:
                add("dangling singularity", leaf.id, sid)
            elif sings[sid].leaf != leaf.id:
                add("leaf mismatch", sid, f"{sings[sid].leaf} != {leaf.id}")
        if leaf.shape in ("pseudo_torus", "double_cone", "pseudo_disc_leaf") and not leaf.singularities:
            add("singular shape without singularity", leaf.id, leaf.shape)
        if leaf.shape in _ALWAYS_SC and not leaf.simply_connected:
            add("shape inconsistency", leaf.id, f"{leaf.shape} must be simply connected")
        if leaf.shape in _NEVER_SC and leaf.simply_connected:
            add("shape inconsistency", leaf.id, f"{leaf.shape} is not simply connected")
    for s in sings.values():
        if s.leaf is not None and s.leaf in a.leaves and s.id not in a.leaves[s.leaf].singularities:
            add("leaf mismatch", s.id, f"not listed on {s.leaf}")

    if a.ambient == "S3":
        _validate_closed(a, spots, add)
        if a.blocks and not _connected(a):
            add("disconnected", a.name, "block graph is not connected")
        total = index_sum(a)
        if total != 0:
            add("index sum", a.name, f"index sum = {total} != 0")

    for b in a.blocks.values():
        if b.inner is not None:
            _validate_level(b.inner, report, prefix + b.id + "/")


_OUTER_STACK: list[Assembly] = []


def _lookup_outer(a: Assembly, sid: str) -> Singularity | None:
    for outer in reversed(_OUTER_STACK):
        if sid in outer.singularities:
            return outer.singularities[sid]
    return None


def _validate_block(a: Assembly, b: Block, add) -> None:
    sings = [a.singularities[s] for s in b.singularities if s in a.singularities]
    centers = [s for s in sings if s.is_center]
    conics = [s for s in sings if s.is_conic]
    k = b.kind
    if k is BlockKind.CENTER_BALL or k is BlockKind.TRIVIAL_BUBBLE:
        if len(centers) != 1 or conics:
            add("block contents", b.id, f"{k.value} hosts exactly one center")
    elif k in (BlockKind.MORSE, BlockKind.TRUNCATED_MORSE):
        if len(centers) != 1 or len(conics) != 1:
            add("block contents", b.id, "Morse component hosts one center and one conic")
    elif k in (BlockKind.REEB, BlockKind.TRUNCATED_REEB, BlockKind.BAND):
        if sings:
            add("block contents", b.id, f"{k.value} hosts no singularity")
    elif k is BlockKind.BALL:
        if centers:
            add("block contents", b.id, "ball with spots hosts no center")
        transverse = [s for s in b.spots if s.interface is not None]
        if len(transverse) >= 2:
            for sp in transverse:
                if sp.associated_singularity is None:
                    add("spot without singularity", sp.id, "perfect disc needs a conic")
                if not sp.boundary_holonomy_trivial:
                    add("non-trivial holonomy", sp.id)
    elif k is BlockKind.TRUNCATED_BUBBLE:
        if centers:
            add("block contents", b.id, "truncated bubble hosts no center")
        assoc = [sp.associated_singularity for sp in b.spots]
        if len(b.spots) < 2:
            add("truncated bubble spots", b.id, "needs at least two spots")
        if None in assoc or len(set(assoc)) != len(assoc):
            add("truncated bubble spots", b.id, "associated singularities must be pairwise distinct")
        dirs = {sp.direction for sp in b.spots}
        if len(dirs) < 2:
            add("truncated bubble spots", b.id, "needs an inward and an outward spot")
    elif k is BlockKind.BUBBLE:
        if b.inner is None:
            add("bubble interior", b.id, "missing interior")
        elif not (b.params.get("special") or b.params.get("mutual_with")) and not b.inner.all_singularities():
            add("bubble interior", b.id, "interior must be non-trivial")
        if b.params.get("mutual_with") and b.params["mutual_with"] not in a.blocks:
            add("dangling reference", b.id, str(b.params["mutual_with"]))
    elif k is BlockKind.CHART:
        conic = b.params.get("conic")
        t = a.singularities.get(conic) if conic else None
        if t is None or not t.is_conic:
            add("chart singularity", b.id, f"{conic!r} is not a conic singularity")
        if "cone" not in b.params:
            add("chart level", b.id, "missing cone level")
        if sings:
            add("block contents", b.id, "charts reference, never host, singularities")
    if k is not BlockKind.BUBBLE and b.inner is not None:
        add("block contents", b.id, "only bubbles carry interiors")
    if b.embedded:
        w = b.params.get("within")
        if w is None or (w not in a.blocks and w not in a.gluings):
            add("dangling reference", b.id, f"within={w!r}")
    for key in ("designated_in", "designated_out"):
        if key in b.params and b.params[key] not in {s.id for s in b.spots}:
            add("dangling reference", b.id, f"{key}={b.params[key]}")


def _validate_gluing(a: Assembly, g: Gluing, spots: dict[str, Spot], add) -> None:
    ends = []
    for end in g.ends:
        if "." not in end:
            add("bad endpoint", g.id, end)
            return
        bid, port = split_end(end)
        if bid not in a.blocks:
            add("dangling reference", g.id, end)
            return
        ends.append((a.blocks[bid], port))
    (b1, p1), (b2, p2) = ends
    if g.kind is GluingKind.TANGENT:
        for b, p in ends:
            if p not in b.interfaces:
                add("bad endpoint", g.id, f"{b.id}.{p} is not a tangential interface")
                return
        s1, s2 = surface_of(a, f"{b1.id}.{p1}"), surface_of(a, f"{b2.id}.{p2}")
        if s1 is None or s2 is None:
            return
        if s1 is s2 or s1.ports == s2.ports:
            add("self gluing", g.id, "tangent gluing joins a surface to itself")
        if s1.genus != s2.genus:
            add("genus mismatch", g.id, f"{s1.genus} != {s2.genus}")
        if g.genus is not None and g.genus != s1.genus:
            add("genus mismatch", g.id, f"declared {g.genus}, surfaces have {s1.genus}")
        if g.singularity is not None:
            add("gluing contents", g.id, "tangent gluings host no singularity")
        return
    sp = []
    for b, p in ends:
        if p not in spots or spots[p].owner != b.id:
            add("bad endpoint", g.id, f"{b.id}.{p} is not a spot")
            return
        sp.append(spots[p])
    if sp[0].direction == sp[1].direction:
        add("orientation", g.id, "joined spots must have opposite directions")
    if g.kind is GluingKind.CONNECTED_SUM:
        if g.singularity is None:
            add("gluing contents", g.id, "connected sum hosts one conic singularity")
        elif g.singularity in a.singularities and not a.singularities[g.singularity].is_conic:
            add("gluing contents", g.id, "connected-sum singularity must be conic")
    else:
        if g.singularity is not None:
            add("gluing contents", g.id, "transverse gluings host no singularity")
        if g.via not in ("disc", "annulus"):
            add("gluing contents", g.id, f"via={g.via!r}")


def _validate_closed(a: Assembly, spots: dict[str, Spot], add) -> None:
    used: Counter = Counter()
    for g in a.gluings.values():
        for end in g.ends:
            used[end] += 1
    for end, n in used.items():
        if n > 1:
            add("multiply glued", end, f"{n} gluings")
    for sp in spots.values():
        if used[f"{sp.owner}.{sp.id}"] == 0:
            add("open spot", sp.id)
    tangent_ends: Counter = Counter()
    for g in a.gluings.values():
        if g.kind is GluingKind.TANGENT:
            for end in g.ends:
                s = surface_of(a, end)
                if s is not None:
                    tangent_ends[s.ports] += 1
    for s in surfaces(a):
        if s.holes:
            add("open interface", s.ports[0], f"{s.holes} unfilled hole(s)")
        if s.absorbed:
            if tangent_ends[s.ports]:
                add("open interface", s.ports[0], "absorbed surface is also tangent-glued")
            continue
        if tangent_ends[s.ports] == 0:
            add("open interface", s.ports[0], "boundary surface not glued")
        elif tangent_ends[s.ports] > 1:
            add("multiply glued", s.ports[0], "boundary surface glued more than once")
        if s.genus is None:
            add("genus mismatch", s.ports[0], f"odd Euler characteristic {s.euler}")


def _connected(a: Assembly) -> bool:
    ids = list(a.blocks)
    parent = {b: b for b in ids}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def link(x, y):
        if x in parent and y in parent:
            parent[find(x)] = find(y)

    for g in a.gluings.values():
        b1, b2 = (split_end(e)[0] for e in g.ends)
        link(b1, b2)
    gl_owner = {g.id: split_end(g.ends[0])[0] for g in a.gluings.values()}
    for b in a.blocks.values():
        w = b.params.get("within")
        if w is not None:
            link(b.id, gl_owner.get(w, w))
    return len({find(b) for b in ids}) <= 1


def validate(a: Assembly) -> list[Violation]:
    """Every invariant violation of ``a``; empty iff ``a`` is valid."""
    report: list[Violation] = []
    _check_unique(a, report)
    _OUTER_STACK.clear()
    # nested interiors may reference singularities of enclosing levels
    for _, sub in a.walk():
        _OUTER_STACK.append(sub)
    try:
        _validate_level(a, report, "")
    finally:
        _OUTER_STACK.clear()
    return report


def is_open(report: list[Violation]) -> bool:
    return any(v.code in ("open interface", "open spot") for v in report)


def require_valid(a: Assembly) -> None:
    report = validate(a)
    if report:
        raise InvalidAssembly(report)


# ---------------------------------------------------------------------------
# leaf census


def tangent_leaf(a: Assembly, g: Gluing) -> LeafDescriptor:
    s = surface_of(a, g.ends[0])
    genus = s.genus if s is not None and s.genus is not None else (g.genus or 0)
    if not g.compact:
        return LeafDescriptor(f"L.{g.id}", g.id, "generic", False, False, (), genus)
    return LeafDescriptor(f"L.{g.id}", g.id, shape_for_genus(genus), True, genus == 0, (), genus)


def leaves(a: Assembly) -> list[LeafDescriptor]:
    """Declared leaves of every level plus one compact leaf per tangent gluing."""
    report = validate(a)
    if report:
        raise InvalidAssembly(report)
    return leaf_census(a)


def leaf_census(a: Assembly) -> list[LeafDescriptor]:
    out: list[LeafDescriptor] = []
    for _, sub in a.walk():
        out.extend(sub.leaves[k] for k in sorted(sub.leaves, key=natural_key))
        owners = {lf.owner for lf in sub.leaves.values()}
        for bid in sorted(sub.blocks, key=natural_key):
            # blocks declared without a leaf table get their standard families
            if bid not in owners and sub.blocks[bid].kind is BlockKind.BAND:
                out.extend(standard_leaves(sub.blocks[bid], sub.singularities))
        for gid in sorted(sub.gluings, key=natural_key):
            g = sub.gluings[gid]
            if g.kind is GluingKind.TANGENT:
                out.append(tangent_leaf(sub, g))
    return out


def conic_ids(a: Assembly, leaf: LeafDescriptor) -> list[str]:
    sings = a.all_singularities()
    return [s for s in leaf.singularities if s in sings and sings[s].is_conic]


# ---------------------------------------------------------------------------
# standard leaf families


def standard_leaves(b: Block, sings: dict[str, Singularity]) -> list[LeafDescriptor]:
    """Leaf families of a block in its standard foliation.

    Leaf ids are ``L.<block>.<family>``; the singular leaf of a hosted
    singularity is named after the singularity.
    """
    pre = f"L.{b.id}."
    centers = [s for s in b.singularities if s in sings and sings[s].is_center]
    conics = [s for s in b.singularities if s in sings and sings[s].is_conic]
    k = b.kind
    out: list[LeafDescriptor] = []
    if k in (BlockKind.CENTER_BALL, BlockKind.TRIVIAL_BUBBLE):
        out.append(LeafDescriptor(pre + "spheres", b.id, "sphere", True, True))
    elif k in (BlockKind.REEB, BlockKind.TRUNCATED_REEB):
        out.append(LeafDescriptor(pre + "planes", b.id, "plane", False, True))
    elif k in (BlockKind.MORSE, BlockKind.TRUNCATED_MORSE):
        out.append(LeafDescriptor(pre + "spheres", b.id, "sphere", True, True))
        out.append(LeafDescriptor(pre + "tori", b.id, "torus", True, False, genus=1))
        for s in conics:
            out.append(LeafDescriptor(pre + s, b.id, "pseudo_torus", True, False, (s,), 1))
        conics = []
    elif k is BlockKind.BAND:
        out.append(LeafDescriptor(pre + "sheets", b.id, shape_for_genus(b.genus), True,
                                  b.genus == 0, genus=b.genus))
    elif k is BlockKind.BALL:
        if len(b.discs) >= 2:
            out.append(LeafDescriptor(pre + "sheets", b.id, "annulus", False, False))
            out.extend(LeafDescriptor(pre + s, b.id, "generic", False, False, (s,)) for s in conics)
            conics = []
        else:
            out.append(LeafDescriptor(pre + "discs", b.id, "disc", True, True))
    elif k is BlockKind.TRUNCATED_BUBBLE:
        out.extend(LeafDescriptor(pre + s, b.id, "disc", True, True, (s,)) for s in conics)
        conics = []
    for c in centers:
        out.append(LeafDescriptor(pre + c, b.id, "point", True, True, (c,)))
    for s in conics:
        out.append(LeafDescriptor(pre + s, b.id, "generic", True, False, (s,)))
    return out


def main_leaf_flags(a: Assembly, spot: Spot) -> tuple[bool, bool]:
    """(compact, simply connected) of the leaf through a spot site."""
    b = a.blocks[spot.owner]
    if spot.interface is not None:
        if b.kind is BlockKind.BALL and len(b.discs) >= 2:
            return False, False
        return True, b.interface_genus(spot.interface) == 0
    fams = [lf for lf in standard_leaves(b, {}) if not lf.singularities]
    if not fams:
        return True, True
    return fams[0].compact, fams[0].simply_connected


def sum_leaf(a: Assembly, gid: str, s1: Spot, s2: Spot, conic: str) -> LeafDescriptor:
    c1, sc1 = main_leaf_flags(a, s1)
    c2, sc2 = main_leaf_flags(a, s2)
    compact, sc = c1 and c2, sc1 and sc2
    shape = "sphere" if compact and sc else "generic"
    return LeafDescriptor(f"L.{gid}", gid, shape, compact, sc, (conic,))
