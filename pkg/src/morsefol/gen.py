"""Seeded generators for the example families and random closed assemblies."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from itertools import product

from .build import Builder, IdPool
from .detect import ExpansionEvent, expansion_schedule, make_state
from .errors import InvalidSpec
from .model import Assembly, BlockKind, Direction, GluingKind, LeafDescriptor, natural_key

FAMILIES = ("two_centers", "simply_connected_chain", "double_pretzel",
            "no_compact_leaf_variant", "morse_pair", "random")

IN, OUT = Direction.INWARD, Direction.OUTWARD


@dataclass(frozen=True)
class GenSpec:
    family: str
    seed: int = 0
    k: int = 0
    size: int = 0
    bubble_depth: int = 0
    pants_count: int = 0
    trivial_bubbles: int = 0  # extra trivial bubbles on component blocks
    extra_band: bool = False

    def check(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}")
        for name in ("k", "size", "bubble_depth", "pants_count", "trivial_bubbles"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise InvalidSpec(f"{name} must be a non-negative integer, got {v!r}")
        if not isinstance(self.seed, int):
            raise InvalidSpec(f"seed must be an integer, got {self.seed!r}")


def generate(spec: GenSpec) -> Assembly:
    spec.check()
    if spec.family == "random":
        return generate_random(spec)
    build = {
        "two_centers": lambda: _two_centers(spec.family, 0),
        "simply_connected_chain": lambda: _two_centers(spec.family, spec.k),
        "double_pretzel": lambda: _double_pretzel(spec.family, compact=True),
        "no_compact_leaf_variant": lambda: _double_pretzel(spec.family, compact=False),
        "morse_pair": lambda: _morse_pair(spec.family),
    }[spec.family]
    bld, hosts, gid = build()
    if spec.extra_band:
        _insert_band(bld, gid)
    for i in range(spec.trivial_bubbles):
        bld.attach(hosts[i % len(hosts)], 1 if i % 2 == 0 else 2)
    return bld.finish()


# ---------------------------------------------------------------------------
# example families


def _two_centers(name: str, k: int):
    bld = Builder(name)
    b1 = bld.block(BlockKind.CENTER_BALL)
    b2 = bld.block(BlockKind.CENTER_BALL)
    bld.sing(0, b1)
    bld.sing(3, b2)
    gid = bld.tangent(f"{b1}.bd", f"{b2}.bd", 0)
    for i in range(k):
        # pairs (0,1) and (3,2), alternately on both balls
        bld.attach(b1 if i % 2 == 0 else b2, 1 if i % 2 == 0 else 2)
    return bld, [b1, b2], gid


def _torus_pair(bld: Builder, kind: BlockKind, conic: int, morse_idx: tuple[int, int] | None):
    t1 = bld.block(kind)
    t2 = bld.block(kind)
    if morse_idx:
        for t in (t1, t2):
            bld.sing(morse_idx[0], t)
            bld.sing(morse_idx[1], t)
    p1 = bld.spot(t1, OUT)
    p2 = bld.spot(t2, IN)
    bld.csum(p1, p2, conic)
    return t1, t2


def _double_pretzel(name: str, compact: bool):
    bld = Builder(name)
    r1, r2 = _torus_pair(bld, BlockKind.REEB, 1, None)
    r3, r4 = _torus_pair(bld, BlockKind.REEB, 2, None)
    gid = bld.tangent(f"{r1}.bd", f"{r3}.bd", 2, compact=compact)
    return bld, [r1, r2, r3, r4], gid


def _morse_pair(name: str):
    bld = Builder(name)
    m1, m2 = _torus_pair(bld, BlockKind.MORSE, 1, (0, 1))
    m3, m4 = _torus_pair(bld, BlockKind.MORSE, 2, (3, 2))
    gid = bld.tangent(f"{m1}.bd", f"{m3}.bd", 2)
    return bld, [m1, m2, m3, m4], gid


def _insert_band(bld: Builder, gid: str) -> str:
    g = bld.gluings.pop(gid)
    band = bld.block(BlockKind.BAND, genus=g.genus)
    bld.tangent(g.ends[0], f"{band}.in", g.genus, g.compact)
    bld.tangent(f"{band}.out", g.ends[1], g.genus, g.compact)
    return band


# ---------------------------------------------------------------------------
# pants attachments and their conic bookkeeping


def pants_conics(status: tuple[tuple, tuple], sD: str, choice: int, fresh, existing: list[str]):
    """Associated conics of the two new spots of an attached pair of pants.

    ``status`` holds one entry per new spot: ``("old", conic)`` when captured
    by a spot already on the ball, ``("mutual",)`` when the two new spots
    capture each other, ``("free",)`` otherwise.  Returns the two conics and
    the list of conics that had to be created.  ``choice`` selects between the
    admissible options (reused conic, or the variant of the both-free case).
    """
    (k1, *r1), (k2, *r2) = status
    if k1 == "old" and k2 == "old":
        return r1[0], r2[0], []
    if k1 == "mutual":
        return sD, sD, []
    if k1 == "old" or k2 == "old":
        old = r1[0] if k1 == "old" else r2[0]
        reuse = existing[choice % len(existing)]
        return (old, reuse, []) if k1 == "old" else (reuse, old, [])
    # both free: one new conic, either shared or paired with an old one
    new = fresh()
    variant = choice % (1 + 2 * len(existing))
    if variant == 0:
        return new, new, [new]
    old = existing[(variant - 1) // 2]
    return (old, new, [new]) if variant % 2 else (new, old, [new])


def pants_choice_count(status, existing: int) -> int:
    kinds = (status[0][0], status[1][0])
    if kinds == ("old", "old") or kinds[0] == "mutual":
        return 1
    if "old" in kinds:
        return existing
    return 1 + 2 * existing


def _event_status(ev: ExpansionEvent, sub: Assembly, conic_of: dict[str, str]):
    pants = sub.blocks[ev.pants]
    new_spots = [sp.id for sp in pants.spots if ev.after.classification(sp.id) is not None]
    q0 = [sp.id for sp in pants.spots if sp.id not in new_spots][0]
    old_ids = {c.spot for c in ev.before.spots}
    status = []
    for q in new_spots:
        c = ev.after.classification(q)
        if c.status == "captured" and c.capture_partner in old_ids:
            status.append(("old", conic_of[c.capture_partner]))
        elif c.status == "captured":
            status.append(("mutual",))
        else:
            status.append(("free",))
    return q0, new_spots, tuple(status)


def build_cluster(bld: Builder, rng: random.Random, genus: int, pants: int) -> tuple[str, list[str]]:
    """A trivially foliated ball with ``pants`` solid pairs of pants attached.

    Leftover spots are paired by annuli; the boundary surface has the given
    genus.  Returns the root ball and the conics it hosts.
    """
    n0 = 2 * genus - pants
    if n0 < 2:
        raise InvalidSpec(f"cluster of genus {genus} cannot carry {pants} pants")
    before, gluings_before = set(bld.blocks), set(bld.gluings)
    root = bld.block(BlockKind.BALL)
    open_spots = [bld.spot(root, IN) for _ in range(n0)]
    discs = []
    for _ in range(pants):
        site = open_spots.pop(rng.randrange(len(open_spots)))
        pb = bld.block(BlockKind.BALL)
        q = [bld.spot(pb, IN) for _ in range(3)]
        discs.append((site, q[0]))
        open_spots += q[1:]
    rng.shuffle(open_spots)
    pairs = [(open_spots[i], open_spots[i + 1]) for i in range(0, len(open_spots), 2)]
    for site, q0 in discs:
        d = rng.choice((IN, OUT))
        bld.update_spot(site, direction=d)
        bld.update_spot(q0, direction=d.opposite())
        bld.transverse(site, q0, "disc")
    for x, y in pairs:
        d = rng.choice((IN, OUT))
        bld.update_spot(x, direction=d)
        bld.update_spot(y, direction=d.opposite())
        bld.transverse(x, y, "annulus")
    # conics: every root spot starts with its own, pants follow the expansion
    conic_of: dict[str, str] = {}
    root_conics = []
    for sp in bld.blocks[root].spots:
        s = bld.sing(1, root)
        root_conics.append(s)
        conic_of[sp.id] = s
    mine = {root} | {p for p in bld.blocks if p not in before}
    sub = Assembly("tmp", "fragment", {k: v for k, v in bld.blocks.items() if k in mine},
                   {k: g for k, g in bld.gluings.items() if k not in gluings_before})
    events: list[ExpansionEvent] = []
    expansion_schedule(sub, (), check=False, events=events)
    for ev in events:
        assert ev.state == root, "pants must be absorbed by the root ball"
        q0, new_spots, status = _event_status(ev, sub, conic_of)
        along = ev.along
        conic_of[q0] = conic_of[along]
        member_spots = [sp.id for m in ev.before.members for sp in sub.blocks[m].spots]
        existing = sorted({conic_of[p] for p in member_spots if p in conic_of}, key=natural_key)
        choice = rng.randrange(pants_choice_count(status, len(existing)))
        c1, c2, _ = pants_conics(status, conic_of[along], choice,
                                 lambda pb=ev.pants: bld.sing(1, pb), existing)
        conic_of[new_spots[0]] = c1
        conic_of[new_spots[1]] = c2
    for pid, s in conic_of.items():
        bld.update_spot(pid, associated_singularity=s)
    return root, root_conics


def merge_conics(bld: Builder, keep: str, gone: str) -> None:
    for b in list(bld.blocks.values()):
        for sp in b.spots:
            if sp.associated_singularity == gone:
                bld.update_spot(sp.id, associated_singularity=keep)
    host = bld.sings.pop(gone).host
    b = bld.blocks[host]
    bld.blocks[host] = replace(b, singularities=tuple(s for s in b.singularities if s != gone))


def pants_attachments(max_spots: int = 4):
    """Every generator-constructible pants attachment to a ball with at most ``max_spots`` spots.

    Yields ``(assembly, state, along)`` where ``state`` is the ball before the
    attachment along spot ``along``.
    """
    for n in range(1, max_spots + 1):
        for old_pattern in _old_patterns(n - 1):
            for q_pattern in _q_patterns(old_pattern):
                for shared in (False, True):
                    base = _attachment_case(n, old_pattern, q_pattern, shared, None)
                    if base is None:
                        continue
                    count = base[3]
                    for choice in range(count):
                        a, state, along, _ = _attachment_case(n, old_pattern, q_pattern, shared, choice)
                        yield a, state, along


def _old_patterns(m: int):
    """Status of the m other spots: 'out' (free, partner elsewhere) or pair index."""
    def rec(i, acc, open_pair):
        if i == m:
            if open_pair is None:
                yield tuple(acc)
            return
        yield from rec(i + 1, acc + ["out"], open_pair)
        if open_pair is None:
            yield from rec(i + 1, acc + [f"pair{i}"], i)
        else:
            yield from rec(i + 1, acc + [f"pair{open_pair}"], None)
    yield from rec(0, [], None)


def _q_patterns(old_pattern):
    free_old = [i for i, s in enumerate(old_pattern) if s == "out"]
    single = [("old", i) for i in free_old] + [("out",), ("child",)]
    pats = [(("mutual",), ("mutual",))]
    for x, y in product(single, single):
        if x[0] == y[0] == "old" and x[1] == y[1]:
            continue
        pats.append((x, y))
    return pats


def _attachment_case(n, old_pattern, q_pattern, shared, choice):
    bld = Builder("pants", "fragment")
    ball = bld.block(BlockKind.BALL)
    sink = bld.block(BlockKind.BALL)
    along = bld.spot(ball, OUT)
    old = [bld.spot(ball, IN) for _ in old_pattern]
    pants = bld.block(BlockKind.BALL)
    q0 = bld.spot(pants, IN)
    q = [bld.spot(pants, OUT), bld.spot(pants, OUT)]
    bld.transverse(along, q0, "disc")
    linked: dict[int, str] = {}
    for j, qp in enumerate(q_pattern):
        if qp[0] == "old":
            linked[qp[1]] = q[j]
            bld.transverse(old[qp[1]], q[j], "annulus")
        elif qp[0] == "out":
            bld.transverse(q[j], bld.spot(sink, IN), "annulus")
        elif qp[0] == "child":
            child = bld.block(BlockKind.BALL)
            c0 = bld.spot(child, IN)
            bld.spot(child, OUT)
            bld.spot(child, OUT)
            bld.transverse(q[j], c0, "disc")
    if q_pattern[0][0] == "mutual":
        bld.update_spot(q[1], direction=IN)
        bld.transverse(q[0], q[1], "annulus")
    done_pairs = set()
    for i, st in enumerate(old_pattern):
        if st == "out" and i not in linked:
            bld.transverse(old[i], bld.spot(sink, OUT), "annulus")
        elif st.startswith("pair") and st not in done_pairs:
            j = [k for k, s in enumerate(old_pattern) if s == st and k != i][0]
            bld.update_spot(old[j], direction=OUT)
            bld.transverse(old[i], old[j], "annulus")
            done_pairs.add(st)
    # conics of the ball
    conic_of = {}
    first = bld.sing(1, ball)
    for pid in [along] + old:
        conic_of[pid] = first if shared else (first if pid == along else bld.sing(2, ball))
    conic_of[q0] = conic_of[along]
    existing = sorted(set(conic_of.values()), key=natural_key)
    status = []
    for qp in q_pattern:
        status.append(("old", conic_of[old[qp[1]]]) if qp[0] == "old"
                      else ("mutual",) if qp[0] == "mutual" else ("free",))
    count = pants_choice_count(tuple(status), len(existing))
    if choice is None:
        return None, None, None, count
    c1, c2, _ = pants_conics(tuple(status), conic_of[along], choice,
                             lambda: bld.sing(1, pants), existing)
    conic_of[q[0]], conic_of[q[1]] = c1, c2
    for pid, s in conic_of.items():
        bld.update_spot(pid, associated_singularity=s)
    a = bld.finish(leaves=False)
    state = make_state(a, (ball,))
    return a, state, along, count


# ---------------------------------------------------------------------------
# random assemblies


def _chain(bld: Builder, rng: random.Random, genus: int) -> tuple[str, list[str]]:
    """Connected sum of ``genus`` solid tori; returns the first torus and the sum conics."""
    tori = []
    for _ in range(genus):
        kind = rng.choice((BlockKind.REEB, BlockKind.MORSE, BlockKind.TRUNCATED_REEB, BlockKind.TRUNCATED_MORSE))
        t = bld.block(kind)
        if kind in (BlockKind.MORSE, BlockKind.TRUNCATED_MORSE):
            pair = rng.choice(((0, 1), (3, 2)))
            bld.sing(pair[0], t)
            bld.sing(pair[1], t)
        if kind in (BlockKind.TRUNCATED_REEB, BlockKind.TRUNCATED_MORSE):
            cap = bld.block(BlockKind.BALL)
            d = rng.choice((IN, OUT))
            bld.transverse(bld.spot(t, d), bld.spot(cap, d.opposite()), "disc")
        tori.append(t)
    conics = []
    for t1, t2 in zip(tori, tori[1:]):
        _, s = bld.csum(bld.spot(t1, OUT), bld.spot(t2, IN), 1)
        conics.append(s)
    return tori[0], conics


def _side(bld: Builder, rng: random.Random, genus: int, pants: int, cluster: bool):
    if cluster:
        return build_cluster(bld, rng, genus, pants)
    return _chain(bld, rng, genus)[0], []


def _inner(bld: Builder, rng: random.Random, depth: int, sigma: int, force_nested: bool) -> Assembly:
    sub = bld.sub("interior")
    ball = sub.block(BlockKind.CENTER_BALL)
    sub.sing(0 if sigma == 1 else 3, ball)
    options = ["trivial", "morse"] + (["nested"] if depth > 1 else [])
    pick = "nested" if force_nested and depth > 1 else rng.choice(options)
    if pick == "trivial":
        sub.attach(ball, rng.choice((1, 2)))
    elif pick == "morse":
        t = sub.block(BlockKind.MORSE)
        pair = rng.choice(((0, 1), (3, 2)))
        sub.sing(pair[0], t)
        sub.sing(pair[1], t)
    else:
        s2 = rng.choice((1, 2))
        inner = _inner(sub, rng, depth - 1, s2, force_nested)
        sub.attach(ball, s2, BlockKind.BUBBLE, inner)
    return sub.finish()


def _hosts(bld: Builder) -> list[str]:
    return [bid for bid, b in sorted(bld.blocks.items(), key=lambda kv: natural_key(kv[0]))
            if not b.embedded and b.kind not in (BlockKind.BUBBLE, BlockKind.TRIVIAL_BUBBLE)]


def generate_random(spec: GenSpec) -> Assembly:
    spec.check()
    rng = random.Random(spec.seed)
    pants = spec.pants_count
    genus = rng.randint(0, min(3, 1 + spec.size // 2))
    if pants:
        genus = max(genus, (pants + 3) // 2)
    bld = Builder(f"random-{spec.seed}")
    flex: list[str] = []
    root_conics: list[list[str]] = []
    if genus == 0:
        x = bld.block(BlockKind.CENTER_BALL)
        y = bld.block(BlockKind.CENTER_BALL)
        bld.sing(0, x)
        bld.sing(3, y)
    else:
        left_cluster = pants > 0 or rng.random() < 0.5
        right_cluster = rng.random() < 0.35
        # pants all go to the first cluster; its genus fixes n0 = 2g - p
        x, rc = _side(bld, rng, genus, pants, left_cluster)
        root_conics.append(rc)
        y, rc = _side(bld, rng, genus, 0, right_cluster)
        root_conics.append(rc)
        # conics of balls and of sums get their indices below; the rest is balanced already
        flex = [s for s, v in bld.sings.items()
                if v.host in bld.gluings or bld.blocks[v.host].kind is BlockKind.BALL]
    gid = bld.tangent(f"{x}.bd", f"{y}.bd", genus)
    if spec.extra_band or rng.random() < 0.2:
        _insert_band(bld, gid)
    if len(flex) % 2:
        rc = next(r for r in root_conics if len(r) >= 2)
        merge_conics(bld, rc[0], rc[1])
        flex.remove(rc[1])
    for i, s in enumerate(sorted(flex, key=natural_key)):
        bld.set_index(s, 1 if i % 2 == 0 else 2)

    shared: list[tuple[str, str]] = []
    need_bubble = spec.bubble_depth > 0
    for i in range(spec.size):
        kinds = ["trivial", "truncated", "chart", "shared"]
        if spec.bubble_depth > 0:
            kinds += ["bubble", "bubble"]
        pick = "bubble" if need_bubble else rng.choice(kinds)
        hosts = _hosts(bld)
        host = rng.choice(hosts)
        if pick == "trivial":
            bld.attach(host, rng.choice((1, 2)))
        elif pick == "bubble":
            sigma = rng.choice((1, 2))
            inner = _inner(bld, rng, spec.bubble_depth, sigma, need_bubble)
            bld.attach(host, sigma, BlockKind.BUBBLE, inner)
            need_bubble = False
        elif pick == "truncated":
            tb = bld.block(BlockKind.TRUNCATED_BUBBLE, within=host)
            for _ in range(rng.choice((1, 2))):
                s_in = bld.sing(1, tb)
                s_out = bld.sing(2, tb)
                bld.transverse(bld.spot(tb, IN, assoc=s_in), bld.spot(tb, OUT, assoc=s_out), "annulus")
        elif pick == "chart":
            conics = [s for s, v in sorted(bld.sings.items()) if v.index in (1, 2)]
            if conics:
                s = rng.choice(conics)
                bld.block(BlockKind.CHART, within=bld.sings[s].host, conic=s, cone=0.0)
        else:
            w1, s1 = bld.attach(host, 1)
            w2, s2 = bld.attach(host, 2)
            shared.append((s1, s2))
    a = bld.finish()
    return _share_leaves(a, shared)


def _share_leaves(a: Assembly, shared: list[tuple[str, str]]) -> Assembly:
    """Put pairs of cones on one common leaf."""
    if not shared:
        return a
    leaves = dict(a.leaves)
    sings = dict(a.singularities)
    for s1, s2 in shared:
        l1, l2 = sings[s1].leaf, sings[s2].leaf
        lf = leaves[l1]
        leaves[l1] = LeafDescriptor(lf.id, lf.owner, lf.shape, lf.compact, lf.simply_connected, (s1, s2), lf.genus)
        del leaves[l2]
        sings[s2] = replace(sings[s2], leaf=l1)
    return a.evolve(leaves=leaves, singularities=sings)


def core_gluing(a: Assembly) -> list[str]:
    return sorted((g.id for g in a.gluings.values() if g.kind is GluingKind.TANGENT), key=natural_key)


__all__ = ["GenSpec", "generate", "generate_random", "pants_attachments", "FAMILIES", "IdPool"]
