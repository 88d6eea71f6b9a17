"""Pattern detectors and the expansion of trivially foliated balls."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CannotExpand, InvalidSite, MultiSingularLeaf, NotNormalized, TrichotomyViolation
from .model import (
    Assembly, Block, BlockKind, GluingKind, conic_ids, leaf_census, natural_key,
    split_end, surfaces,
)


def _by_id(ids):
    return sorted(ids, key=natural_key)


# ---------------------------------------------------------------------------
# trivial pairs, bubbles, truncated bubbles


def find_trivial_pairs(a: Assembly) -> list[tuple[str, str]]:
    """(center, conic) of every trivial bubble hung on a leaf by a connected sum."""
    found = []
    for path, sub in a.walk():
        glued = sub.spot_gluing()
        for bid in _by_id(sub.blocks):
            b = sub.blocks[bid]
            if b.kind is not BlockKind.TRIVIAL_BUBBLE:
                continue
            centers = [s for s in b.singularities if s in sub.singularities and sub.singularities[s].is_center]
            for sp in b.spots:
                g = glued.get(sp.id)
                if g is not None and g.kind is GluingKind.CONNECTED_SUM and g.singularity and centers:
                    found.append((-len(path), centers[0], g.singularity))
                    break
    found.sort(key=lambda t: (t[0], natural_key(t[1])))
    return [(c, s) for _, c, s in found]


def find_bubbles(a: Assembly) -> list[str]:
    """Bubble blocks at every nesting depth, innermost first, then by id."""
    found = []
    for path, sub in a.walk():
        for bid, b in sub.blocks.items():
            if b.kind is BlockKind.BUBBLE:
                found.append((-len(path), natural_key(bid), bid))
    return [bid for *_, bid in sorted(found)]


def truncated_bubble_defects(sub: Assembly, b: Block) -> list[str]:
    defects = []
    assoc = [sp.associated_singularity for sp in b.spots]
    if None in assoc or len(set(assoc)) != len(assoc):
        defects.append("perfect discs must have pairwise distinct singularities")
    stray = [s for s in b.singularities if s in sub.singularities
             and sub.singularities[s].is_conic and s not in assoc]
    if stray:
        defects.append(f"conic points on the tangent boundary: {stray}")
    if b.inner is not None and any(x.kind is BlockKind.BUBBLE for _, s in b.inner.walk() for x in s.blocks.values()):
        defects.append("contains a bubble")
    if len({sp.direction for sp in b.spots}) < 2:
        defects.append("needs an inward and an outward disc")
    return defects


def find_truncated_bubbles(a: Assembly, strict: bool = True) -> list[str]:
    """Truncated bubbles; with ``strict`` only those meeting all three defining conditions."""
    found = []
    for path, sub in a.walk():
        for bid, b in sub.blocks.items():
            if b.kind is BlockKind.TRUNCATED_BUBBLE and not (strict and truncated_bubble_defects(sub, b)):
                found.append((-len(path), natural_key(bid), bid))
    return [bid for *_, bid in sorted(found)]


# ---------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class CycleWitness:
    kind: str  # "vanishing" | "anti_vanishing"
    base_leaf: str
    transition_parameter: str
    segment_flags: tuple[tuple[str, bool], ...]
    determined_singularity: str | None = None
    site: str | None = None
    generalized: bool = False
    implies: str | None = None

    @property
    def well_formed(self) -> bool:
        flags = [f for _, f in self.segment_flags]
        if len(flags) < 2:
            return False
        if self.kind == "vanishing":
            return not flags[0] and all(flags[1:])
        first_bad = flags.index(False) if False in flags else len(flags)
        return (flags[0] and first_bad < len(flags) and not any(flags[first_bad:])
                and self.determined_singularity is not None)


def equivalent(w1: CycleWitness, w2: CycleWitness) -> bool:
    """Anti-vanishing cycles are equivalent when they determine the same singularity."""
    return (w1.kind == w2.kind == "anti_vanishing"
            and w1.determined_singularity is not None
            and w1.determined_singularity == w2.determined_singularity)


def _attached(sub: Assembly, bid: str) -> list[Block]:
    """Bubbles (trivial or not) hung on interior leaves of ``bid``."""
    out = []
    glued = sub.spot_gluing()
    for sp in sub.blocks[bid].spots:
        if sp.interface is not None:
            continue
        g = glued.get(sp.id)
        if g is None:
            continue
        for e in g.ends:
            other = split_end(e)[0]
            if other != bid and sub.blocks[other].kind in (BlockKind.BUBBLE, BlockKind.TRIVIAL_BUBBLE):
                out.append(sub.blocks[other])
    return out


def _boundary_leaf(sub: Assembly, bid: str) -> str:
    port = f"{bid}.bd"
    for surf in surfaces(sub):
        if port in surf:
            for g in sorted(sub.gluings.values(), key=lambda g: natural_key(g.id)):
                if g.kind is GluingKind.TANGENT and any(e in surf for e in g.ends):
                    return f"L.{g.id}"
    return port


def find_vanishing_cycles(a: Assembly) -> list[CycleWitness]:
    out = []
    for path, sub in a.walk():
        for bid in _by_id(sub.blocks):
            b = sub.blocks[bid]
            if b.kind not in (BlockKind.REEB, BlockKind.TRUNCATED_REEB):
                continue
            base = _boundary_leaf(sub, bid)
            planes = f"L.{bid}.planes"
            out.append(CycleWitness(
                "vanishing", base, "t=0", ((base, False), (planes, True)), site=bid,
                generalized=bool(_attached(sub, bid)),
            ))
    return out


def find_anti_vanishing_cycles(a: Assembly) -> list[CycleWitness]:
    sings = a.all_singularities()
    for lf in leaf_census(a):
        if len(conic_ids(a, lf)) > 1:
            raise MultiSingularLeaf(f"leaf {lf.id} carries several conic singularities; split it first")
    out = []
    for path, sub in a.walk():
        for bid in _by_id(sub.blocks):
            b = sub.blocks[bid]
            if b.kind is BlockKind.BALL and len(b.discs) >= 2:
                for sp in b.discs:
                    s = sp.associated_singularity
                    inner = sings[s].leaf if s in sings and sings[s].leaf else f"L.{bid}.discs"
                    out.append(CycleWitness(
                        "anti_vanishing", inner, "t=1/2",
                        ((inner, True), (f"L.{bid}.sheets", False)), s, site=sp.id,
                    ))
        for lid in _by_id(sub.leaves):
            lf = sub.leaves[lid]
            if lf.shape == "pseudo_disc_leaf":
                det = lf.singularities[0] if lf.singularities else None
                out.append(CycleWitness(
                    "anti_vanishing", lid, "t=1/2", ((lid, True), (lf.owner, False)), det,
                    site=lf.owner, implies="truncated_morse",
                ))
    return out


# ---------------------------------------------------------------------------
# spots and expansion


@dataclass(frozen=True)
class SpotClassification:
    spot: str
    status: str  # "free" | "captured"
    capture_partner: str | None = None
    essential: bool | None = None


@dataclass(frozen=True)
class ExpansionState:
    ball: str
    members: tuple[str, ...]
    spots: tuple[SpotClassification, ...]
    free_count: int
    captured_count: int
    conic_ids: frozenset[str] = field(default_factory=frozenset)
    last_case: str | None = None
    path: tuple[str, ...] = ()

    def classification(self, spot: str) -> SpotClassification | None:
        for c in self.spots:
            if c.spot == spot:
                return c
        return None

    @property
    def captured_pairs(self) -> list[tuple[str, str]]:
        return sorted({tuple(sorted((c.spot, c.capture_partner), key=natural_key))
                       for c in self.spots if c.status == "captured"})


def _classify(sub: Assembly, members: tuple[str, ...], available: set[str] | None) -> list[SpotClassification]:
    glued = sub.spot_gluing()
    member_set = set(members)
    outer = []
    for bid in members:
        for sp in sub.blocks[bid].spots:
            if sp.interface is None:
                continue  # interior sites carry bubbles, not perfect discs
            g = glued.get(sp.id)
            if g is not None and g.kind is GluingKind.SPOT_TRANSVERSE and g.via == "disc":
                other = [split_end(e) for e in g.ends if split_end(e)[1] != sp.id][0]
                if other[0] in member_set:
                    continue  # absorbed disc between two members
            outer.append((sp, g))
    ids = {sp.id for sp, _ in outer}
    out = []
    for sp, g in sorted(outer, key=lambda t: natural_key(t[0].id)):
        partner = None
        if g is not None:
            partner = [split_end(e) for e in g.ends if split_end(e)[1] != sp.id]
            partner = partner[0] if partner else None
        if g is not None and g.kind is GluingKind.SPOT_TRANSVERSE and g.via == "annulus" \
                and partner is not None and partner[1] in ids:
            out.append(SpotClassification(sp.id, "captured", partner[1]))
            continue
        essential = False
        if g is not None and g.kind is GluingKind.SPOT_TRANSVERSE and g.via == "disc" and partner:
            pants = sub.blocks[partner[0]]
            essential = (pants.kind is BlockKind.BALL and len(pants.discs) == 3
                         and pants.id not in member_set
                         and (available is None or pants.id in available))
        out.append(SpotClassification(sp.id, "free", None, essential))
    return out


def classify_spots(a: Assembly, ball: str, members: tuple[str, ...] | None = None,
                   available: set[str] | None = None) -> list[SpotClassification]:
    """Free/captured status of the spots of a ball (or of a union of balls)."""
    path = a.locate(ball)
    if path is None or ball not in a.at(path).blocks or a.at(path).blocks[ball].kind is not BlockKind.BALL:
        raise InvalidSite(f"{ball!r} is not a ball with spots")
    return _classify(a.at(path), members or (ball,), available)


def make_state(sub: Assembly, members: tuple[str, ...], path: tuple[str, ...] = (),
               available: set[str] | None = None, last_case: str | None = None) -> ExpansionState:
    members = tuple(_by_id(members))
    cls = _classify(sub, members, available)
    conics = set()
    for bid in members:
        b = sub.blocks[bid]
        conics.update(s for s in b.singularities if s in sub.singularities and sub.singularities[s].is_conic)
        conics.update(sp.associated_singularity for sp in b.spots if sp.associated_singularity)
    free = sum(1 for c in cls if c.status == "free")
    return ExpansionState(members[0], members, tuple(cls), free, len(cls) - free,
                          frozenset(conics), last_case, path)


def trichotomy_case(before: ExpansionState, after: ExpansionState) -> str | None:
    df = after.free_count - before.free_count
    dc = len(after.conic_ids) - len(before.conic_ids)
    hits = [name for name, ok in (("free-1", df == -1), ("free-3", df == -3), ("conic+1", dc == 1)) if ok]
    return hits[0] if len(hits) == 1 else None


def expand_ball(a: Assembly, state: ExpansionState, along: str, available: set[str] | None = None,
                check: bool = True) -> tuple[Assembly, ExpansionState]:
    """Add the solid pair of pants glued along the essential free spot ``along``."""
    sub = a.at(state.path)
    cur = make_state(sub, state.members, state.path, available)
    c = cur.classification(along)
    if c is None or c.status != "free" or not c.essential:
        raise CannotExpand(f"{along} is not an essential free spot of {state.ball}")
    g = sub.spot_gluing()[along]
    pants = [split_end(e)[0] for e in g.ends if split_end(e)[1] != along][0]
    new = make_state(sub, cur.members + (pants,), state.path, available)
    case = trichotomy_case(cur, new)
    if case is None and check:
        raise TrichotomyViolation(
            f"expanding {state.ball} along {along}: free {cur.free_count}->{new.free_count}, "
            f"conic {len(cur.conic_ids)}->{len(new.conic_ids)}")
    return a, ExpansionState(new.ball, new.members, new.spots, new.free_count, new.captured_count,
                             new.conic_ids, case, state.path)


@dataclass(frozen=True)
class ExpansionEvent:
    state: str
    along: str
    pants: str
    before: ExpansionState
    after: ExpansionState


def expansion_schedule(sub: Assembly, path: tuple[str, ...] = (), check: bool = True,
                       events: list | None = None) -> list[ExpansionState]:
    """Expand every ball of one level until no pants can be added, then merge touching balls."""
    balls = [bid for bid in _by_id(sub.blocks)
             if sub.blocks[bid].kind is BlockKind.BALL and len(sub.blocks[bid].discs) >= 2]
    states: dict[str, tuple[str, ...]] = {b: (b,) for b in balls}
    while True:
        progressed = False
        while True:
            available = {r for r, m in states.items() if len(m) == 1}
            move = None
            for rep in _by_id(states):
                st = make_state(sub, states[rep], path, available - {rep})
                ess = [c.spot for c in st.spots if c.status == "free" and c.essential]
                if ess:
                    move = (rep, st, ess[0])
                    break
            if move is None:
                break
            rep, st, along = move
            _, new = expand_ball(sub, st, along, available - {rep}, check)
            pants = [m for m in new.members if m not in st.members][0]
            if events is not None:
                events.append(ExpansionEvent(rep, along, pants, st, new))
            del states[pants]
            states[rep] = new.members
            progressed = True
        owner = {m: rep for rep, ms in states.items() for m in ms}
        merged = False
        for g in sorted(sub.gluings.values(), key=lambda g: natural_key(g.id)):
            if g.kind is GluingKind.TANGENT:
                continue
            r1, r2 = (owner.get(split_end(e)[0]) for e in g.ends)
            if r1 and r2 and r1 != r2:
                keep, gone = sorted((r1, r2), key=natural_key)
                states[keep] = tuple(_by_id(states[keep] + states.pop(gone)))
                merged = True
                break
        if not merged and not progressed:
            break
    out = [make_state(sub, states[r], path) for r in _by_id(states)]
    covered = set().union(*(s.conic_ids for s in out)) if out else set()
    for sid in _by_id(sub.singularities):
        if sub.singularities[sid].is_conic and sid not in covered:
            out.append(ExpansionState(f"U({sid})", (), (), 0, 0, frozenset({sid}), None, path))
    return out


def is_normalized(a: Assembly) -> bool:
    if find_trivial_pairs(a) or find_bubbles(a) or find_truncated_bubbles(a, strict=False):
        return False
    return all(len(conic_ids(a, lf)) <= 1 for lf in leaf_census(a))


def completely_expand(a: Assembly, check: bool = True) -> tuple[Assembly, list[ExpansionState]]:
    if not is_normalized(a):
        raise NotNormalized("remove trivial pairs, bubbles and truncated bubbles first")
    return a, expansion_schedule(a, (), check)


# ---------------------------------------------------------------------------
# components


COMPONENT_KINDS = ("morse", "truncated_morse", "reeb", "truncated_reeb")
_EXPLICIT = {
    BlockKind.REEB: "reeb", BlockKind.MORSE: "morse",
    BlockKind.TRUNCATED_REEB: "truncated_reeb", BlockKind.TRUNCATED_MORSE: "truncated_morse",
}


@dataclass(frozen=True)
class Component:
    kind: str
    sites: tuple[str, ...]
    path: tuple[str, ...] = ()
    singular: bool = False
    generalized: bool = False
    pseudo: bool = False

    @property
    def family(self) -> str:
        return "morse" if "morse" in self.kind else "reeb"


def _pseudo_morse(sub: Assembly) -> list[str]:
    """Center balls whose tangent partner sphere is made of singular pieces."""
    if any(b.kind in (BlockKind.BUBBLE, BlockKind.TRIVIAL_BUBBLE) for b in sub.blocks.values()):
        return []
    surfs = surfaces(sub)
    where = {p: s for s in surfs for p in s.ports}
    hits = []
    for bid in _by_id(sub.blocks):
        b = sub.blocks[bid]
        if b.kind is not BlockKind.CENTER_BALL:
            continue
        seen, frontier = {bid}, [f"{bid}.bd"]
        partner_blocks = set()
        while frontier:
            port = frontier.pop()
            for g in sub.gluings.values():
                if g.kind is not GluingKind.TANGENT or port not in where:
                    continue
                if not any(where.get(e) is where[port] for e in g.ends):
                    continue
                for e in g.ends:
                    if where.get(e) is where[port]:
                        continue
                    for p in where[e].ports:
                        ob = split_end(p)[0]
                        if ob in seen:
                            continue
                        seen.add(ob)
                        if sub.blocks[ob].kind is BlockKind.BAND:
                            frontier.extend(f"{ob}.{i}" for i in sub.blocks[ob].interfaces if f"{ob}.{i}" != p)
                        else:
                            partner_blocks.add(ob)
        if partner_blocks and all(
                sub.blocks[x].kind is BlockKind.BALL and any(
                    s in sub.singularities and sub.singularities[s].is_conic for s in sub.blocks[x].singularities)
                for x in partner_blocks):
            hits.append(bid)
    return hits


def find_components(a: Assembly) -> list[Component]:
    out = []
    for path, sub in a.walk():
        for bid in _by_id(sub.blocks):
            b = sub.blocks[bid]
            kind = _EXPLICIT.get(b.kind)
            if kind is None:
                continue
            hung = _attached(sub, bid)
            out.append(Component(
                kind, (bid,), path,
                singular=any(h.kind is BlockKind.TRIVIAL_BUBBLE for h in hung),
                generalized=any(h.kind is BlockKind.BUBBLE for h in hung),
            ))
        for lid in _by_id(sub.leaves):
            if sub.leaves[lid].shape == "pseudo_disc_leaf":
                out.append(Component("truncated_morse", (sub.leaves[lid].owner,), path, pseudo=True))
        for bid in _pseudo_morse(sub):
            out.append(Component("morse", (bid,), path, pseudo=True))
        for st in expansion_schedule(sub, path, check=False):
            if st.captured_pairs:
                out.append(Component("truncated_reeb", st.members, path))
    return out
