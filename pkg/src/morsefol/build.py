"""Mutable helper for assembling blocks, spots and gluings by hand.

Generators and tests describe an assembly imperatively and call
:meth:`Builder.finish`, which also fills in the standard leaf table.
"""

from __future__ import annotations

from dataclasses import replace

from .model import (
    Assembly, Block, BlockKind, Direction, Gluing, GluingKind, LeafDescriptor,
    Singularity, Spot, standard_leaves, sum_leaf,
)


class IdPool:
    """Counters shared by a builder and the builders of its bubble interiors."""

    def __init__(self, taken: set[str] | None = None):
        self.taken: set[str] = set(taken or ())

    def fresh(self, prefix: str) -> str:
        n = 1
        while f"{prefix}{n}" in self.taken:
            n += 1
        ident = f"{prefix}{n}"
        self.taken.add(ident)
        return ident


class Builder:
    def __init__(self, name: str, ambient: str = "S3", pool: IdPool | None = None):
        self.name = name
        self.ambient = ambient
        self.pool = pool or IdPool()
        self.blocks: dict[str, Block] = {}
        self.gluings: dict[str, Gluing] = {}
        self.sings: dict[str, Singularity] = {}
        self.extra_leaves: list[LeafDescriptor] = []

    def sub(self, name: str, ambient: str = "ball") -> "Builder":
        return Builder(name, ambient, self.pool)

    # -- blocks and singularities ---------------------------------------
    def block(self, kind: BlockKind, genus: int = 0, inner: Assembly | None = None, **params) -> str:
        bid = self.pool.fresh("b")
        self.blocks[bid] = Block(bid, kind, genus, inner=inner, params=dict(params))
        return bid

    def set_params(self, bid: str, **params) -> None:
        b = self.blocks[bid]
        self.blocks[bid] = replace(b, params={**b.params, **params})

    def sing(self, index: int, host: str) -> str:
        sid = self.pool.fresh("s")
        self.sings[sid] = Singularity(sid, index, host)
        if host in self.blocks:
            b = self.blocks[host]
            self.blocks[host] = replace(b, singularities=b.singularities + (sid,))
        return sid

    def set_index(self, sid: str, index: int) -> None:
        self.sings[sid] = replace(self.sings[sid], index=index)

    def spot(self, owner: str, direction: Direction, interface: str | None = "bd",
             assoc: str | None = None) -> str:
        pid = self.pool.fresh("p")
        b = self.blocks[owner]
        sp = Spot(pid, owner, direction, interface, assoc)
        self.blocks[owner] = replace(b, spots=b.spots + (sp,))
        return pid

    def update_spot(self, pid: str, **changes) -> None:
        for bid, b in self.blocks.items():
            if any(s.id == pid for s in b.spots):
                spots = tuple(replace(s, **changes) if s.id == pid else s for s in b.spots)
                self.blocks[bid] = replace(b, spots=spots)
                return
        raise KeyError(pid)

    def get_spot(self, pid: str) -> Spot:
        for b in self.blocks.values():
            for s in b.spots:
                if s.id == pid:
                    return s
        raise KeyError(pid)

    # -- gluings --------------------------------------------------------
    def tangent(self, end1: str, end2: str, genus: int, compact: bool = True) -> str:
        gid = self.pool.fresh("g")
        self.gluings[gid] = Gluing(gid, GluingKind.TANGENT, (end1, end2), genus=genus, compact=compact)
        return gid

    def transverse(self, p1: str, p2: str, via: str = "annulus") -> str:
        gid = self.pool.fresh("g")
        s1, s2 = self.get_spot(p1), self.get_spot(p2)
        self.gluings[gid] = Gluing(gid, GluingKind.SPOT_TRANSVERSE,
                                   (f"{s1.owner}.{p1}", f"{s2.owner}.{p2}"), via=via)
        return gid

    def csum(self, p1: str, p2: str, index: int) -> tuple[str, str]:
        """Connected sum at two spot sites; returns (gluing id, new conic id)."""
        gid = self.pool.fresh("g")
        s1, s2 = self.get_spot(p1), self.get_spot(p2)
        self.gluings[gid] = Gluing(gid, GluingKind.CONNECTED_SUM,
                                   (f"{s1.owner}.{p1}", f"{s2.owner}.{p2}"))
        sid = self.sing(index, gid)
        self.gluings[gid] = replace(self.gluings[gid], singularity=sid)
        return gid, sid

    def attach(self, owner: str, index: int, kind: BlockKind = BlockKind.TRIVIAL_BUBBLE,
               inner: Assembly | None = None, center_index: int | None = None) -> tuple[str, str]:
        """Hang a (trivial) bubble on an interior leaf of ``owner``; returns (bubble, conic)."""
        host_spot = self.spot(owner, Direction.OUTWARD, None)
        w = self.block(kind, inner=inner)
        if kind is BlockKind.TRIVIAL_BUBBLE:
            self.sing(center_index if center_index is not None else (0 if index == 1 else 3), w)
        wspot = self.spot(w, Direction.INWARD)
        _, s = self.csum(host_spot, wspot, index)
        return w, s

    # -- output ---------------------------------------------------------
    def finish(self, leaves: bool = True) -> Assembly:
        a = Assembly(self.name, self.ambient, dict(self.blocks), dict(self.gluings), dict(self.sings), {})
        if not leaves:
            return a
        table: dict[str, LeafDescriptor] = {}
        for b in a.blocks.values():
            if b.kind in (BlockKind.BUBBLE, BlockKind.CHART):
                continue
            for lf in standard_leaves(b, a.singularities):
                table[lf.id] = lf
        spots = a.spot_index()
        for g in a.gluings.values():
            if g.kind is GluingKind.CONNECTED_SUM:
                p1, p2 = (e.split(".", 1)[1] for e in g.ends)
                lf = sum_leaf(a, g.id, spots[p1], spots[p2], g.singularity)
                table[lf.id] = lf
        for lf in self.extra_leaves:
            table[lf.id] = lf
        sings = dict(a.singularities)
        for lf in table.values():
            for sid in lf.singularities:
                sings[sid] = replace(sings[sid], leaf=lf.id)
        return a.evolve(singularities=sings, leaves=table)
