import pytest

from morsefol import (
    CannotComplete, Direction, DuplicateId, GenSpec, InvalidLevel, InvalidSite, NotATrivialPair,
    NotClosed, NothingToSplit, OrientationMismatch, RewriteStep, complete_truncated_component,
    connected_sum, corrective_movement, eliminate_bubble, eliminate_trivial_pair,
    eliminate_truncated_bubble, find_bubbles, find_trivial_pairs, find_truncated_bubbles,
    generate, index_sum, morse_mod_A, morse_mod_B, normalize, replay, split_singular_leaf, validate,
)
from morsefol.build import Builder, IdPool
from morsefol.iso import isomorphic
from morsefol.model import Assembly, BlockKind, LeafDescriptor, leaf_census
from morsefol.rewrites import count_delta, elimination_count

from helpers import centers, conics, recount

IN, OUT = Direction.INWARD, Direction.OUTWARD


def two_centers_builder(name="tc", ambient="S3"):
    bld = Builder(name, ambient)
    b1, b2 = bld.block(BlockKind.CENTER_BALL), bld.block(BlockKind.CENTER_BALL)
    bld.sing(0, b1)
    bld.sing(3, b2)
    bld.tangent(f"{b1}.bd", f"{b2}.bd", 0)
    return bld, b1, b2


def with_chart(cone=0.0):
    bld, b1, _ = two_centers_builder()
    _, s = bld.attach(b1, 1)
    chart = bld.block(BlockKind.CHART, within=bld.sings[s].host, conic=s, cone=cone)
    return bld.finish(), chart


def with_truncated(pairs=1):
    bld, b1, _ = two_centers_builder()
    tb = bld.block(BlockKind.TRUNCATED_BUBBLE, within=b1)
    for _ in range(pairs):
        s_in, s_out = bld.sing(1, tb), bld.sing(2, tb)
        bld.transverse(bld.spot(tb, IN, assoc=s_in), bld.spot(tb, OUT, assoc=s_out), "annulus")
    return bld.finish(), tb


def mutual_pair():
    bld, b1, _ = two_centers_builder("mut")
    w1 = bld.block(BlockKind.BUBBLE, inner=Assembly("i", "ball"), within=b1)
    w2 = bld.block(BlockKind.BUBBLE, inner=Assembly("j", "ball"), within=b1)
    bld.set_params(w1, mutual_with=w2)
    bld.set_params(w2, mutual_with=w1)
    bld.sing(1, w1)
    bld.sing(2, w2)
    return bld.finish(), w1, w2


def check_step(before, after, step: RewriteStep):
    assert not set(step.consumed) & set(step.produced)
    diff = {i: recount(after)[i] - recount(before)[i] for i in range(4)}
    assert {i: step.singularity_delta.get(i, 0) for i in range(4)} == diff


# -- Morse modifications -------------------------------------------------------

def test_mod_A_moves_cone_down():
    a, chart = with_chart()
    b, step = morse_mod_A(a, chart, -0.5)
    blk = b.blocks[chart]
    assert blk.params["cone"] == -0.5
    assert blk.params["conic"] == a.blocks[chart].params["conic"]
    check_step(a, b, step)


def test_mod_B_moves_cone_up():
    a, chart = with_chart()
    b, _ = morse_mod_B(a, chart, 0.5)
    assert b.blocks[chart].params["cone"] == 0.5


def test_A_then_B_is_identity():
    a, chart = with_chart()
    b, _ = morse_mod_A(a, chart, -0.5)
    c, _ = morse_mod_B(b, chart, 0.0)
    assert isomorphic(a, c)


def test_B_then_A_is_identity():
    a, chart = with_chart()
    b, _ = morse_mod_B(a, chart, 0.75)
    c, _ = morse_mod_A(b, chart, 0.0)
    assert isomorphic(a, c)


def test_wrong_side_levels_are_rejected():
    a, chart = with_chart()
    with pytest.raises(InvalidLevel):
        morse_mod_B(a, chart, -0.5)
    with pytest.raises(InvalidLevel):
        morse_mod_A(a, chart, 0.5)


def test_mod_on_non_chart_is_rejected():
    a, _ = with_chart()
    with pytest.raises(InvalidSite):
        morse_mod_A(a, "b1", -1.0)


def test_hundred_alternations_keep_counts():
    a, chart = with_chart()
    start = recount(a)
    level = 0.0
    for i in range(100):
        level = level - 1.0 if i % 2 == 0 else level + 0.5
        a, _ = (morse_mod_A if i % 2 == 0 else morse_mod_B)(a, chart, level)
        assert recount(a) == start


# -- leaf splitting ------------------------------------------------------------

def shared_leaf(n):
    """A leaf carrying ``n`` cones of trivial bubbles on one sphere."""
    bld, b1, b2 = two_centers_builder()
    made = [bld.attach(b1 if i % 2 == 0 else b2, 1 if i % 2 == 0 else 2)[1] for i in range(n)]
    a = bld.finish()
    leaves = dict(a.leaves)
    sings = dict(a.singularities)
    keep = sings[made[0]].leaf
    lf = leaves[keep]
    leaves[keep] = LeafDescriptor(lf.id, lf.owner, lf.shape, lf.compact, lf.simply_connected, tuple(made), lf.genus)
    for s in made[1:]:
        del leaves[sings[s].leaf]
        sings[s] = type(sings[s])(s, sings[s].index, sings[s].host, keep)
    return a.evolve(leaves=leaves, singularities=sings), keep


def test_split_three_cones():
    a, leaf = shared_leaf(3)
    b, step = split_singular_leaf(a, leaf)
    assert recount(a) == recount(b)
    parts = [lf for lf in b.leaves.values() if lf.id.startswith(leaf + ".")]
    assert len(parts) == 3
    assert all(len(lf.singularities) == 1 for lf in parts)
    assert validate(b) == []
    assert step.op_name == "split_singular_leaf"


def test_split_single_cone_has_nothing_to_do():
    a, leaf = shared_leaf(1)
    with pytest.raises(NothingToSplit):
        split_singular_leaf(a, leaf)


def test_special_bubble_split_after_corrective_movement():
    a, tb = with_truncated()
    b, _ = corrective_movement(a, tb)
    special = b.leaves[f"L.{tb}.special"]
    assert len(special.singularities) == 2
    c, _ = split_singular_leaf(b, special.id)
    sings = c.all_singularities()
    for lf in leaf_census(c):
        assert sum(1 for s in lf.singularities if sings[s].is_conic) <= 1


# -- connected sums ------------------------------------------------------------

def torus(pool, kind, name, direction, sings=()):
    bld = Builder(name, "fragment", pool)
    t = bld.block(kind)
    for i in sings:
        bld.sing(i, t)
    p = bld.spot(t, direction)
    return bld.finish(), t, p


def test_reeb_sum_is_a_pretzel():
    pool = IdPool()
    a1, t1, p1 = torus(pool, BlockKind.REEB, "T1", OUT)
    a2, t2, p2 = torus(pool, BlockKind.REEB, "T2", IN)
    p, step = connected_sum(a1, a2, p1, p2, 1)
    assert count_delta(a1.evolve(singularities={**a1.singularities, **a2.singularities}), p) == \
        {"centers": 0, "conic": 1}
    assert conics(recount(p)) == 1 and centers(recount(p)) == 0
    assert step.singularity_delta == {1: 1}
    # boundary genus of the sum is 1 + 1
    from morsefol.model import surfaces
    closed = [s for s in surfaces(p) if s.genus is not None]
    assert max(s.genus for s in closed) == 2


def test_morse_sum_counts():
    pool = IdPool()
    a1, _, p1 = torus(pool, BlockKind.MORSE, "M1", OUT, (0, 1))
    a2, _, p2 = torus(pool, BlockKind.MORSE, "M2", IN, (0, 1))
    p, _ = connected_sum(a1, a2, p1, p2, 1)
    c = recount(p)
    # each Morse torus brings a center and a cone; the sum adds one more cone
    assert centers(c) == 2 and conics(c) == 3
    assert sum(1 for b in p.blocks.values() for s in b.singularities
               if p.singularities[s].is_conic) == 2


def test_sum_rejects_shared_ids():
    a1, _, p1 = torus(IdPool(), BlockKind.REEB, "T1", OUT)
    a2, _, p2 = torus(IdPool(), BlockKind.REEB, "T2", IN)
    with pytest.raises(DuplicateId):
        connected_sum(a1, a2, p1, p2, 1)


def test_sum_rejects_same_direction():
    pool = IdPool()
    a1, _, p1 = torus(pool, BlockKind.REEB, "T1", OUT)
    a2, _, p2 = torus(pool, BlockKind.REEB, "T2", OUT)
    with pytest.raises(OrientationMismatch):
        connected_sum(a1, a2, p1, p2, 2)


def test_sum_rejects_bad_index_and_missing_spot():
    pool = IdPool()
    a1, _, p1 = torus(pool, BlockKind.REEB, "T1", OUT)
    a2, _, p2 = torus(pool, BlockKind.REEB, "T2", IN)
    with pytest.raises(InvalidSite):
        connected_sum(a1, a2, p1, p2, 0)
    with pytest.raises(InvalidSite):
        connected_sum(a1, a2, "p99", p2, 1)


def test_sum_rejects_used_site():
    a = generate(GenSpec("morse_pair"))
    with pytest.raises(InvalidSite):
        connected_sum(a, a, "p1", "p2", 1)


# -- trivial pairs -------------------------------------------------------------

def test_trivial_pair_in_band():
    bld, b1, b2 = two_centers_builder()
    g = next(iter(bld.gluings))
    from morsefol.gen import _insert_band
    band = _insert_band(bld, g)
    _, s = bld.attach(band, 1)
    a = bld.finish()
    pairs = find_trivial_pairs(a)
    assert len(pairs) == 1 and pairs[0][1] == s
    b, step = eliminate_trivial_pair(a, pairs[0])
    assert count_delta(a, b) == {"centers": -1, "conic": -1}
    assert all(not blk.singularities for blk in b.blocks.values() if blk.kind is BlockKind.BAND)
    assert index_sum(b) == 0 and validate(b) == []
    check_step(a, b, step)


def test_chain_reduces_to_two_centers():
    a = generate(GenSpec("simply_connected_chain", k=3))
    b, steps = normalize(a)
    assert isomorphic(b, generate(GenSpec("two_centers")))
    assert centers(recount(a)) - centers(recount(b)) + conics(recount(a)) - conics(recount(b)) == 6
    assert elimination_count(steps) == 3


def test_morse_center_is_not_a_trivial_pair():
    a = generate(GenSpec("morse_pair"))
    assert find_trivial_pairs(a) == []
    with pytest.raises(NotATrivialPair):
        eliminate_trivial_pair(a, ("s1", "s2"))


# -- bubbles -------------------------------------------------------------------

def test_bubble_with_morse_interior():
    # odd index sum, so this lives outside S3
    bld, b1, _ = two_centers_builder("bub", ambient="other")
    inner = bld.sub("interior")
    t = inner.block(BlockKind.MORSE)
    inner.sing(0, t)
    inner.sing(1, t)
    w, _ = bld.attach(b1, 1, BlockKind.BUBBLE, inner.finish())
    a = bld.finish()
    b, step = eliminate_bubble(a, w)
    d = count_delta(a, b)
    assert d == {"centers": -1, "conic": -2}
    assert [s.op_name for s in step.substeps] == ["fill_with_center", "eliminate_trivial_pair"]
    check_step(a, b, step)


def test_trivial_bubble_is_not_a_bubble():
    a = generate(GenSpec("simply_connected_chain", k=1))
    tb = next(b.id for b in a.blocks.values() if b.kind is BlockKind.TRIVIAL_BUBBLE)
    with pytest.raises(InvalidSite):
        eliminate_bubble(a, tb)


def test_mutual_bubbles_depend_on_order():
    a, w1, w2 = mutual_pair()
    x, _ = eliminate_bubble(a, w1)
    y, _ = eliminate_bubble(a, w2)
    for out in (x, y):
        assert w1 not in out.blocks and w2 not in out.blocks
        assert validate(out) == []
    assert not isomorphic(x, y)


# -- truncated bubbles ---------------------------------------------------------

def test_corrective_movement_two_spots():
    a, tb = with_truncated()
    b, _ = corrective_movement(a, tb)
    blk = b.blocks[tb]
    assert blk.kind is BlockKind.BUBBLE and blk.params["special"]
    assert len(b.leaves[f"L.{tb}.special"].singularities) == 2
    assert recount(a) == recount(b)


def test_corrective_movement_four_spots_keeps_the_rest():
    a, tb = with_truncated(pairs=2)
    b, step = corrective_movement(a, tb)
    assert len(a.blocks[tb].spots) == 4
    assert len(b.blocks[tb].spots) == 2
    used = set(step.site[1:])
    assert used.isdisjoint(s.id for s in b.blocks[tb].spots)


def test_minimal_truncated_bubble_elimination():
    a, tb = with_truncated()
    b, step = eliminate_truncated_bubble(a, tb)
    assert count_delta(a, b) == {"centers": 0, "conic": -2}
    assert find_truncated_bubbles(b) == [] and find_bubbles(b) == []
    assert index_sum(b) == 0 and validate(b) == []
    assert "create_mutual_bubbles" in [s.op_name for s in step.substeps]


def test_two_truncated_bubbles_commute():
    bld, b1, b2 = two_centers_builder()
    tbs = []
    for host in (b1, b2):
        tb = bld.block(BlockKind.TRUNCATED_BUBBLE, within=host)
        s_in, s_out = bld.sing(1, tb), bld.sing(2, tb)
        bld.transverse(bld.spot(tb, IN, assoc=s_in), bld.spot(tb, OUT, assoc=s_out), "annulus")
        tbs.append(tb)
    a = bld.finish()
    x = eliminate_truncated_bubble(eliminate_truncated_bubble(a, tbs[0])[0], tbs[1])[0]
    y = eliminate_truncated_bubble(eliminate_truncated_bubble(a, tbs[1])[0], tbs[0])[0]
    assert isomorphic(x, y)


def test_one_spot_truncated_bubble_is_invalid():
    bld, b1, _ = two_centers_builder()
    tb = bld.block(BlockKind.TRUNCATED_BUBBLE, within=b1)
    s = bld.sing(1, tb)
    c = bld.block(BlockKind.BALL)
    bld.transverse(bld.spot(tb, IN, assoc=s), bld.spot(c, OUT), "disc")
    assert validate(bld.finish())


# -- truncated components ------------------------------------------------------

def capped(kind, via_sum=False):
    bld = Builder("cap")
    t = bld.block(kind)
    other = bld.block(BlockKind.REEB)
    if kind is BlockKind.TRUNCATED_MORSE:
        bld.sing(0, t)
        bld.sing(1, t)
    if via_sum:
        w = bld.block(BlockKind.TRIVIAL_BUBBLE)
        bld.sing(0, w)
        bld.csum(bld.spot(t, OUT), bld.spot(w, IN), 1)
    else:
        cap = bld.block(BlockKind.BALL)
        bld.transverse(bld.spot(t, OUT), bld.spot(cap, IN), "disc")
    bld.tangent(f"{t}.bd", f"{other}.bd", 1)
    return bld.finish(), t


def test_complete_truncated_reeb():
    a, t = capped(BlockKind.TRUNCATED_REEB)
    b, _ = complete_truncated_component(a, t)
    assert b.blocks[t].kind is BlockKind.REEB
    assert not b.blocks[t].spots
    assert validate(b) == []


def test_complete_truncated_morse():
    a, t = capped(BlockKind.TRUNCATED_MORSE)
    b, _ = complete_truncated_component(a, t)
    assert b.blocks[t].kind is BlockKind.MORSE
    assert recount(a) == recount(b)


def test_complete_rejects_connected_sum_spot():
    a, t = capped(BlockKind.TRUNCATED_REEB, via_sum=True)
    with pytest.raises(CannotComplete):
        complete_truncated_component(a, t)


# -- normalization -------------------------------------------------------------

def test_morse_pair_is_already_normal():
    a = generate(GenSpec("morse_pair"))
    b, steps = normalize(a)
    assert steps == [] and isomorphic(a, b)


def test_normalize_refuses_open_assembly():
    bld = Builder("r")
    bld.block(BlockKind.REEB)
    with pytest.raises(NotClosed):
        normalize(bld.finish())


def test_orders_agree_on_verdict_category():
    from morsefol import classify
    a = generate(GenSpec("random", seed=2, size=6, bubble_depth=2))
    bubbles = find_bubbles(a)
    assert bubbles
    x, _ = normalize(a)
    y, _ = normalize(a, list(reversed(bubbles)))
    assert classify(x).family == classify(y).family


def test_trace_replays():
    a = generate(GenSpec("random", seed=7, size=6, bubble_depth=2, pants_count=1))
    b, steps = normalize(a)
    assert isomorphic(replay(a, steps), b)
    again = [RewriteStep.from_json(s.to_json()) for s in steps]
    assert isomorphic(replay(a, again), b)


def test_inputs_are_not_mutated():
    a, tb = with_truncated()
    before = repr(a)
    eliminate_truncated_bubble(a, tb)
    corrective_movement(a, tb)
    assert repr(a) == before
