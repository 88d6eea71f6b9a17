"""The rewriting calculus: Morse modifications, sums and eliminations.

Every rewrite is a pure function ``(assembly, ...) -> (assembly, RewriteStep)``.
Refusals raise the exceptions of :mod:`morsefol.errors`; the input is never
modified.  Steps carry enough arguments to be replayed by :func:`apply_step`.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .errors import (
    CannotComplete, DuplicateId, InvalidAssembly, InvalidLevel, InvalidSite,
    NotATrivialPair, NotClosed, NothingToSplit, OrientationMismatch,
)
from .iso import structure_hash
from .model import (
    Assembly, Block, BlockKind, Direction, Gluing, GluingKind, LeafDescriptor,
    Singularity, conic_ids, fresh_id, is_open, natural_key, split_end,
    standard_leaves, sum_leaf, validate,
)


@dataclass(frozen=True)
class RewriteStep:
    op_name: str
    args: dict[str, Any] = field(default_factory=dict)
    site: tuple[str, ...] = ()
    consumed: tuple[str, ...] = ()
    produced: tuple[str, ...] = ()
    singularity_delta: dict[int, int] = field(default_factory=dict)
    substeps: tuple["RewriteStep", ...] = ()
    touched: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "op": self.op_name,
            "args": self.args,
            "site": list(self.site),
            "consumed": list(self.consumed),
            "produced": list(self.produced),
            "delta": {str(k): v for k, v in sorted(self.singularity_delta.items())},
            "touched": list(self.touched),
            "substeps": [s.to_json() for s in self.substeps],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RewriteStep":
        return cls(
            d["op"], dict(d.get("args", {})), tuple(d.get("site", ())),
            tuple(d.get("consumed", ())), tuple(d.get("produced", ())),
            {int(k): v for k, v in d.get("delta", {}).items()},
            tuple(cls.from_json(s) for s in d.get("substeps", ())),
            tuple(d.get("touched", ())),
        )


def _delta(before: Assembly, after: Assembly) -> dict[int, int]:
    b, a = before.counts(), after.counts()
    return {i: a[i] - b[i] for i in range(4) if a[i] != b[i]}


def _step(op: str, args: dict, before: Assembly, after: Assembly, site=(),
          substeps=(), touched=()) -> RewriteStep:
    ids_b, ids_a = before.all_ids(), after.all_ids()
    return RewriteStep(
        op, args, tuple(site),
        tuple(sorted(ids_b - ids_a, key=natural_key)),
        tuple(sorted(ids_a - ids_b, key=natural_key)),
        _delta(before, after), tuple(substeps), tuple(touched),
    )


def _conceptual(op: str, **args) -> RewriteStep:
    """A modification that changes no table entry (recorded for the trace only)."""
    return RewriteStep(op, dict(args))


def _find(a: Assembly, ident: str, kinds: tuple[BlockKind, ...] | None = None) -> tuple[tuple[str, ...], Block]:
    path = a.locate(ident)
    if path is None or ident not in a.at(path).blocks:
        raise InvalidSite(f"{ident!r} is not a block")
    b = a.at(path).blocks[ident]
    if kinds is not None and b.kind not in kinds:
        raise InvalidSite(f"{ident} is a {b.kind.value}, expected {'/'.join(k.value for k in kinds)}")
    return path, b


# ---------------------------------------------------------------------------
# removal with cascade


def remove(sub: Assembly, blocks: set[str] = frozenset(), gluings: set[str] = frozenset(),
           spots: set[str] = frozenset()) -> Assembly:
    """Delete blocks and gluings of one level together with everything that depends on them."""
    blocks, gluings, spots = set(blocks), set(gluings), set(spots)
    sings: set[str] = set()
    while True:
        n = (len(blocks), len(gluings), len(sings))
        sings |= {s.id for s in sub.singularities.values() if s.host in blocks or s.host in gluings}
        for g in sub.gluings.values():
            if any(split_end(e)[0] in blocks for e in g.ends):
                gluings.add(g.id)
        for b in sub.blocks.values():
            if b.params.get("within") in blocks | gluings or b.params.get("conic") in sings:
                blocks.add(b.id)
        if (len(blocks), len(gluings), len(sings)) == n:
            break
    removed_leaves = {lf.id for lf in sub.leaves.values() if lf.owner in blocks or lf.owner in gluings}
    # free sites whose only purpose was a removed gluing disappear too
    for gid in gluings:
        g = sub.gluings[gid]
        if g.kind is GluingKind.TANGENT:
            continue
        for e in g.ends:
            bid, pid = split_end(e)
            if bid not in blocks:
                sp = sub.blocks[bid].spot(pid)
                if sp.interface is None or sp.associated_singularity is None:
                    spots.add(pid)
    new_blocks = {}
    for bid, b in sub.blocks.items():
        if bid in blocks:
            continue
        new_blocks[bid] = replace(
            b,
            spots=tuple(
                (replace(s, associated_singularity=None) if s.associated_singularity in sings else s)
                for s in b.spots if s.id not in spots
            ),
            singularities=tuple(s for s in b.singularities if s not in sings),
        )
    new_leaves = {}
    for lid, lf in sub.leaves.items():
        if lid in removed_leaves:
            continue
        new_leaves[lid] = replace(lf, singularities=tuple(s for s in lf.singularities if s not in sings))
    new_sings = {}
    for sid, s in sub.singularities.items():
        if sid in sings:
            continue
        new_sings[sid] = replace(s, leaf=None) if s.leaf in removed_leaves else s
    return sub.evolve(
        blocks=new_blocks,
        gluings={k: v for k, v in sub.gluings.items() if k not in gluings},
        singularities=new_sings,
        leaves=new_leaves,
    )


def _put_block(sub: Assembly, b: Block) -> Assembly:
    blocks = dict(sub.blocks)
    blocks[b.id] = b
    return sub.evolve(blocks=blocks)


def _add_marker(sub: Assembly, target: str, marker: str) -> Assembly:
    if target in sub.gluings:
        target = split_end(sub.gluings[target].ends[0])[0]
    if target not in sub.blocks:
        return sub
    b = sub.blocks[target]
    filled = tuple(sorted(b.params.get("filled", ()) + (marker,)))
    return _put_block(sub, replace(b, params={**b.params, "filled": filled}))


def _content_marker(sub: Assembly, b: Block, conics: Sequence[Singularity]) -> str:
    inner = structure_hash(b.inner) if b.inner is not None else "empty"
    text = f"{b.kind.value}|{sorted(s.index for s in conics)}|{inner}"
    return hashlib.sha1(text.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Morse modifications


def _modify(a: Assembly, site: str, level: float, op: str) -> tuple[Assembly, RewriteStep]:
    path, chart = _find(a, site, (BlockKind.CHART,))
    cone = float(chart.params.get("cone", 0.0))
    level = float(level)
    if op == "morse_mod_A" and not level < cone:
        raise InvalidLevel(f"level {level} is not on the disc-pair side of cone {cone}")
    if op == "morse_mod_B" and not level > cone:
        raise InvalidLevel(f"level {level} is not on the cylinder side of cone {cone}")
    sub = _put_block(a.at(path), replace(chart, params={**chart.params, "cone": level}))
    out = a.with_at(path, sub)
    return out, _step(op, {"site": site, "level": level}, a, out, site=(site,))


def morse_mod_A(a: Assembly, site: str, level: float) -> tuple[Assembly, RewriteStep]:
    """Merge the disc pair at ``level`` into the cone (level below the current cone)."""
    return _modify(a, site, level, "morse_mod_A")


def morse_mod_B(a: Assembly, site: str, level: float) -> tuple[Assembly, RewriteStep]:
    """Pinch the cylinder at ``level`` into the cone (level above the current cone)."""
    return _modify(a, site, level, "morse_mod_B")


# ---------------------------------------------------------------------------
# leaf splitting and connected sums


def split_singular_leaf(a: Assembly, leaf: str) -> tuple[Assembly, RewriteStep]:
    path = a.locate(leaf)
    if path is None or leaf not in a.at(path).leaves:
        raise InvalidSite(f"{leaf!r} is not a leaf")
    sub = a.at(path)
    lf = sub.leaves[leaf]
    conics = conic_ids(a, lf)
    if len(conics) <= 1:
        raise NothingToSplit(f"{leaf} carries {len(conics)} conic singularity")
    others = [s for s in lf.singularities if s not in conics]
    taken = a.all_ids()
    leaves = {k: v for k, v in sub.leaves.items() if k != leaf}
    sings = dict(sub.singularities)
    substeps = []
    for k, sid in enumerate(conics, start=1):
        nid = f"{leaf}.{k}"
        if nid in taken:
            nid = fresh_id(taken, f"{leaf}.x")
        taken.add(nid)
        carried = (sid,) + (tuple(others) if k == 1 else ())
        leaves[nid] = replace(lf, id=nid, singularities=carried)
        for c in carried:
            sings[c] = replace(sings[c], leaf=nid)
        if k > 1:
            # a small modification pushes this cone off the shared level
            substeps.append(_conceptual("morse_mod_A", around=sid, leaf=leaf))
    out = a.with_at(path, sub.evolve(leaves=leaves, singularities=sings))
    return out, _step("split_singular_leaf", {"leaf": leaf}, a, out, site=(leaf,), substeps=substeps)


def connected_sum(a1: Assembly, a2: Assembly, spot1: str, spot2: str,
                  new_conic: int) -> tuple[Assembly, RewriteStep]:
    """Sum two foliations at free disc sites; the sum point is a new conic singularity.

    Passing the same assembly twice sums two sites of one assembly.
    """
    if new_conic not in (1, 2):
        raise InvalidSite(f"connected-sum singularity must have index 1 or 2, got {new_conic}")
    same = a1 is a2
    if not same:
        clash = a1.all_ids() & a2.all_ids()
        if clash:
            raise DuplicateId(f"ids shared by both assemblies: {sorted(clash, key=natural_key)[:5]}")
    sp = []
    for a, pid in ((a1, spot1), (a2, spot2)):
        path = a.locate(pid)
        if path is None or pid not in a.at(path).spot_index():
            raise InvalidSite(f"{pid!r} is not a spot")
        if path:
            raise InvalidSite(f"{pid} lies inside the bubble interior {path[-1]}")
        s = a.spot_index()[pid]
        if s.associated_singularity is not None or a.partner(pid) is not None:
            raise InvalidSite(f"{pid} is not a free trivially foliated site")
        sp.append(s)
    if sp[0].direction == sp[1].direction:
        raise OrientationMismatch(f"{spot1} and {spot2} are both {sp[0].direction.value}")
    if same:
        merged = a1
    else:
        merged = Assembly(
            f"{a1.name}#{a2.name}", a1.ambient,
            {**a1.blocks, **a2.blocks}, {**a1.gluings, **a2.gluings},
            {**a1.singularities, **a2.singularities}, {**a1.leaves, **a2.leaves},
        )
    taken = merged.all_ids()
    gid = fresh_id(taken, "g")
    sid = fresh_id(taken, "s")
    lf = sum_leaf(merged, gid, sp[0], sp[1], sid)
    out = merged.evolve(
        gluings={**merged.gluings, gid: Gluing(gid, GluingKind.CONNECTED_SUM,
                                               (f"{sp[0].owner}.{spot1}", f"{sp[1].owner}.{spot2}"),
                                               singularity=sid)},
        singularities={**merged.singularities, sid: Singularity(sid, new_conic, gid, lf.id)},
        leaves={**merged.leaves, lf.id: lf},
    )
    base = Assembly("", a1.ambient, {**a1.blocks, **a2.blocks}, {**a1.gluings, **a2.gluings},
                    {**a1.singularities, **a2.singularities}, {**a1.leaves, **a2.leaves})
    return out, _step("connected_sum", {"spot1": spot1, "spot2": spot2, "index": new_conic},
                      base, out, site=(spot1, spot2))


# ---------------------------------------------------------------------------
# eliminations


def _trivial_pair_site(sub: Assembly, c: str, s: str) -> tuple[Block, Gluing]:
    sc = sub.singularities.get(c)
    ss = sub.singularities.get(s)
    if sc is None or ss is None or not sc.is_center or not ss.is_conic:
        raise NotATrivialPair(f"({c}, {s}) is not a center/conic pair")
    tb = sub.blocks.get(sc.host)
    if tb is None or tb.kind is not BlockKind.TRIVIAL_BUBBLE:
        raise NotATrivialPair(f"{c} is not the center of a trivial bubble")
    g = sub.gluings.get(ss.host)
    if g is None or g.kind is not GluingKind.CONNECTED_SUM:
        raise NotATrivialPair(f"{s} is not a connected-sum singularity")
    if not any(split_end(e)[0] == tb.id for e in g.ends):
        raise NotATrivialPair(f"{s} does not lie on the boundary sphere of {tb.id}")
    return tb, g


def eliminate_trivial_pair(a: Assembly, pair: Sequence[str]) -> tuple[Assembly, RewriteStep]:
    """Replace a trivial bubble and its boundary cone by parallel discs."""
    c, s = pair
    path = a.locate(c)
    if path is None:
        raise NotATrivialPair(f"unknown singularity {c!r}")
    sub = a.at(path)
    tb, g = _trivial_pair_site(sub, c, s)
    host = [split_end(e)[0] for e in g.ends if split_end(e)[0] != tb.id]
    out = a.with_at(path, remove(sub, {tb.id}, {g.id}))
    return out, _step("eliminate_trivial_pair", {"pair": [c, s]}, a, out,
                      site=(c, s, tb.id, g.id), touched=tuple(host))


def _attachment(sub: Assembly, b: Block) -> Gluing | None:
    for sp in b.spots:
        g = sub.spot_gluing().get(sp.id)
        if g is not None and g.kind is GluingKind.CONNECTED_SUM:
            return g
    return None


def eliminate_bubble(a: Assembly, bubble: str) -> tuple[Assembly, RewriteStep]:
    """Fill the bubble with concentric spheres around a new center, then cancel the pair."""
    path, b = _find(a, bubble)
    if b.kind is not BlockKind.BUBBLE:
        raise InvalidSite(f"{bubble} is a {b.kind.value}; only bubbles are eliminated here")
    sub = a.at(path)
    g = _attachment(sub, b)
    partner = b.params.get("mutual_with")
    drop = {partner} if partner in sub.blocks else set()
    if g is not None and g.singularity in sub.singularities:
        s = sub.singularities[g.singularity]
        host = [split_end(e)[0] for e in g.ends if split_end(e)[0] != b.id][0]
        marker = _content_marker(sub, b, [s])
        filled = remove(sub, drop)
        c = fresh_id(a.all_ids(), "s")
        tb = Block(b.id, BlockKind.TRIVIAL_BUBBLE, spots=b.spots, singularities=(c,))
        leaves = {k: v for k, v in filled.leaves.items() if v.owner != b.id}
        for lf in standard_leaves(tb, {c: Singularity(c, 0, b.id)}):
            leaves[lf.id] = lf
        filled = _put_block(filled, tb)
        cleaf = f"L.{b.id}.{c}"
        filled = filled.evolve(
            singularities={**filled.singularities,
                           c: Singularity(c, 0 if s.index == 1 else 3, b.id, cleaf)},
            leaves=leaves,
        )
        filled = _add_marker(filled, host, marker)
        mid = a.with_at(path, filled)
        fill = _step("fill_with_center", {"bubble": bubble}, a, mid, site=(bubble,))
        out, pair = eliminate_trivial_pair(mid, (c, s.id))
        return out, _step("eliminate_bubble", {"bubble": bubble}, a, out, site=(bubble,),
                          substeps=(fill, pair), touched=pair.touched)
    # embedded bubble: no attaching gluing, its cones are hosted on the block itself
    within = b.params.get("within")
    conics = [sub.singularities[x] for x in b.singularities if x in sub.singularities]
    marker = _content_marker(sub, b, conics)
    c = fresh_id(a.all_ids(), "s")
    first = conics[0].index if conics else 1
    filled_block = replace(b, singularities=b.singularities + (c,), inner=None)
    filled = _put_block(sub, filled_block).evolve(
        singularities={**sub.singularities, c: Singularity(c, 0 if first == 1 else 3, b.id)})
    mid = a.with_at(path, filled)
    fill = _step("fill_with_center", {"bubble": bubble}, a, mid, site=(bubble,))
    done = remove(filled, {b.id} | drop)
    if within is not None:
        done = _add_marker(done, within, marker)
    out = a.with_at(path, done)
    cancel = _step("remove_filled_bubble", {"bubble": bubble}, mid, out, site=(bubble, c))
    touched = (within,) if within is not None else ()
    return out, _step("eliminate_bubble", {"bubble": bubble}, a, out, site=(bubble,),
                      substeps=(fill, cancel), touched=touched)


def _designated_pair(sub: Assembly, tb: Block) -> tuple[str, str, str]:
    spots = {s.id: s for s in tb.spots}
    glued = sub.spot_gluing()

    def annulus(i: str, o: str) -> str | None:
        g = glued.get(i)
        if g is None or g.kind is not GluingKind.SPOT_TRANSVERSE or g.via != "annulus":
            return None
        return g.id if {split_end(e)[1] for e in g.ends} == {i, o} else None

    di, do = tb.params.get("designated_in"), tb.params.get("designated_out")
    if di in spots and do in spots:
        gid = annulus(di, do)
        if gid is None:
            raise InvalidSite(f"designated discs {di}, {do} of {tb.id} are not joined by an annulus")
        return di, do, gid
    ins = sorted((s for s in spots.values() if s.direction is Direction.INWARD), key=lambda s: natural_key(s.id))
    outs = sorted((s for s in spots.values() if s.direction is Direction.OUTWARD), key=lambda s: natural_key(s.id))
    for i in ins:
        for o in outs:
            gid = annulus(i.id, o.id)
            if gid is not None:
                return i.id, o.id, gid
    raise InvalidSite(f"{tb.id} has no inward/outward disc pair joined by an annulus")


def corrective_movement(a: Assembly, tb: str) -> tuple[Assembly, RewriteStep]:
    """Fit the designated inward and outward discs together into a special bubble."""
    path, b = _find(a, tb, (BlockKind.TRUNCATED_BUBBLE,))
    sub = a.at(path)
    i, o, gid = _designated_pair(sub, b)
    s1 = b.spot(i).associated_singularity
    s2 = b.spot(o).associated_singularity
    sub = remove(sub, gluings={gid})
    b = sub.blocks[tb]
    params = {k: v for k, v in b.params.items() if k not in ("designated_in", "designated_out")}
    params["special"] = True
    inner = Assembly(f"{tb}.inner", "ball")
    new_b = replace(b, kind=BlockKind.BUBBLE, spots=tuple(s for s in b.spots if s.id not in (i, o)),
                    inner=inner, params=params)
    leaf_id = f"L.{tb}.special"
    leaves = {k: v for k, v in sub.leaves.items()
              if not (v.owner == tb and set(v.singularities) & {s1, s2})}
    leaves[leaf_id] = LeafDescriptor(leaf_id, tb, "sphere", True, True, (s1, s2))
    sings = dict(sub.singularities)
    for x in (s1, s2):
        sings[x] = replace(sings[x], leaf=leaf_id)
    sub = _put_block(sub, new_b).evolve(leaves=leaves, singularities=sings)
    out = a.with_at(path, sub)
    return out, _step("corrective_movement", {"tb": tb}, a, out, site=(tb, i, o))


def eliminate_truncated_bubble(a: Assembly, tb: str) -> tuple[Assembly, RewriteStep]:
    """Turn the truncated bubble into two mutually nested bubbles and eliminate them."""
    path, b = _find(a, tb, (BlockKind.TRUNCATED_BUBBLE,))
    sub = a.at(path)
    substeps = [_conceptual("morse_mod_around", spot=sp.id, around=sp.associated_singularity)
                for sp in sorted(b.spots, key=lambda s: natural_key(s.id))]
    ins = [sp.associated_singularity for sp in b.spots if sp.direction is Direction.INWARD]
    w2 = fresh_id(a.all_ids(), "b")
    spot_gluings = {g.id for g in sub.gluings.values() if g.kind is not GluingKind.TANGENT
                    and any(split_end(e)[0] == tb for e in g.ends)}
    sub = remove(sub, gluings=spot_gluings, spots={sp.id for sp in b.spots})
    b = sub.blocks[tb]
    within = b.params.get("within")
    host1 = tuple(x for x in b.singularities if x in ins)
    host2 = tuple(x for x in b.singularities if x not in ins)
    W1 = Block(tb, BlockKind.BUBBLE, spots=(), singularities=host1,
               inner=Assembly(f"{tb}.inner", "ball"), params={"within": within, "mutual_with": w2})
    W2 = Block(w2, BlockKind.BUBBLE, spots=(), singularities=host2,
               inner=Assembly(f"{w2}.inner", "ball"), params={"within": within, "mutual_with": tb})
    sings = dict(sub.singularities)
    leaves = {k: v for k, v in sub.leaves.items() if v.owner != tb}
    for blk in (W1, W2):
        for x in blk.singularities:
            lid = f"L.{blk.id}.{x}"
            leaves[lid] = LeafDescriptor(lid, blk.id, "sphere", True, True, (x,))
            sings[x] = replace(sings[x], host=blk.id, leaf=lid)
    sub = _put_block(_put_block(sub, W1), W2).evolve(singularities=sings, leaves=leaves)
    mid = a.with_at(path, sub)
    substeps.append(_step("create_mutual_bubbles", {"tb": tb}, a, mid, site=(tb,)))
    out, elim = eliminate_bubble(mid, tb)
    substeps.append(elim)
    return out, _step("eliminate_truncated_bubble", {"tb": tb}, a, out, site=(tb,),
                      substeps=substeps, touched=elim.touched)


def complete_truncated_component(a: Assembly, comp: str) -> tuple[Assembly, RewriteStep]:
    """Glue the removed ball back: a capped truncated component becomes a full one."""
    path, b = _find(a, comp, (BlockKind.TRUNCATED_REEB, BlockKind.TRUNCATED_MORSE))
    sub = a.at(path)
    if len(b.spots) != 1:
        raise CannotComplete(f"{comp} has {len(b.spots)} spots")
    g = sub.spot_gluing().get(b.spots[0].id)
    if g is None:
        raise CannotComplete(f"spot {b.spots[0].id} of {comp} is open")
    if g.kind is not GluingKind.SPOT_TRANSVERSE:
        raise CannotComplete(f"spot {b.spots[0].id} of {comp} is used by a {g.kind.value} gluing")
    cap_id = [split_end(e)[0] for e in g.ends if split_end(e)[0] != comp]
    cap = sub.blocks.get(cap_id[0]) if cap_id else None
    if cap is None or cap.kind is not BlockKind.BALL or len(cap.spots) != 1 or cap.singularities:
        raise CannotComplete(f"{comp} is not capped by a trivially foliated ball")
    gluings = {}
    for gid, gl in sub.gluings.items():
        if gl.kind is GluingKind.TANGENT:
            gl = replace(gl, ends=tuple(f"{comp}.bd" if e == f"{cap.id}.bd" else e for e in gl.ends))
        gluings[gid] = gl
    sub = remove(sub.evolve(gluings=gluings), {cap.id}, {g.id}, {b.spots[0].id})
    full = BlockKind.REEB if b.kind is BlockKind.TRUNCATED_REEB else BlockKind.MORSE
    sub = _put_block(sub, replace(sub.blocks[comp], kind=full))
    out = a.with_at(path, sub)
    return out, _step("complete_truncated_component", {"comp": comp}, a, out, site=(comp, cap.id))


# ---------------------------------------------------------------------------
# normalization and replay


def _require_closed(a: Assembly) -> None:
    report = validate(a)
    if is_open(report):
        raise NotClosed(report)
    if report:
        raise InvalidAssembly(report)


def split_all(a: Assembly) -> tuple[Assembly, list[RewriteStep]]:
    steps = []
    while True:
        sings = a.all_singularities()
        target = None
        for _, sub in a.walk():
            for lid in sorted(sub.leaves, key=natural_key):
                lf = sub.leaves[lid]
                if sum(1 for s in lf.singularities if s in sings and sings[s].is_conic) > 1:
                    target = lid
                    break
            if target:
                break
        if target is None:
            return a, steps
        a, st = split_singular_leaf(a, target)
        steps.append(st)


def eliminate_all_trivial_pairs(a: Assembly) -> tuple[Assembly, list[RewriteStep]]:
    from .detect import find_trivial_pairs

    steps = []
    while True:
        pairs = find_trivial_pairs(a)
        if not pairs:
            return a, steps
        a, st = eliminate_trivial_pair(a, pairs[0])
        steps.append(st)


def normalize(a: Assembly, order: Sequence[str] | str | None = None) -> tuple[Assembly, list[RewriteStep]]:
    """Split, then remove trivial pairs, bubbles and truncated bubbles.

    ``order`` is ``None``/``"innermost"`` for innermost-first by id, or an
    explicit sequence of bubble ids tried first (ids already gone are skipped).
    """
    from .detect import find_bubbles, find_truncated_bubbles

    _require_closed(a)
    a, steps = split_all(a)
    a, more = eliminate_all_trivial_pairs(a)
    steps += more
    explicit = [] if order in (None, "innermost", "innermost_then_id") else list(order)
    while True:
        present = find_bubbles(a)
        if not present:
            break
        pick = next((x for x in explicit if x in present), present[0])
        a, st = eliminate_bubble(a, pick)
        steps.append(st)
    while True:
        tbs = find_truncated_bubbles(a, strict=False)
        if not tbs:
            break
        a, st = eliminate_truncated_bubble(a, tbs[0])
        steps.append(st)
    a, more = eliminate_all_trivial_pairs(a)
    steps += more
    return a, steps


OPS = {
    "morse_mod_A": lambda a, x: morse_mod_A(a, x["site"], x["level"]),
    "morse_mod_B": lambda a, x: morse_mod_B(a, x["site"], x["level"]),
    "split_singular_leaf": lambda a, x: split_singular_leaf(a, x["leaf"]),
    "connected_sum": lambda a, x: connected_sum(a, a, x["spot1"], x["spot2"], x["index"]),
    "eliminate_trivial_pair": lambda a, x: eliminate_trivial_pair(a, tuple(x["pair"])),
    "eliminate_bubble": lambda a, x: eliminate_bubble(a, x["bubble"]),
    "corrective_movement": lambda a, x: corrective_movement(a, x["tb"]),
    "eliminate_truncated_bubble": lambda a, x: eliminate_truncated_bubble(a, x["tb"]),
    "complete_truncated_component": lambda a, x: complete_truncated_component(a, x["comp"]),
}


def apply_step(a: Assembly, step: RewriteStep) -> Assembly:
    try:
        op = OPS[step.op_name]
    except KeyError:
        raise InvalidSite(f"unknown rewrite {step.op_name!r}") from None
    return op(a, step.args)[0]


def replay(a: Assembly, steps: Sequence[RewriteStep]) -> Assembly:
    for st in steps:
        a = apply_step(a, st)
    return a


def elimination_count(steps: Sequence[RewriteStep]) -> int:
    return sum(1 for s in steps if s.op_name.startswith("eliminate"))


def count_delta(before: Assembly, after: Assembly) -> Counter:
    b, a = before.counts(), after.counts()
    return Counter({"centers": (a[0] + a[3]) - (b[0] + b[3]), "conic": (a[1] + a[2]) - (b[1] + b[2])})
