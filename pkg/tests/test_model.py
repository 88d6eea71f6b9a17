from collections import Counter
from itertools import product

import pytest

from morsefol import Direction, GenSpec, InvalidAssembly, generate, index_sum, leaves, validate
from morsefol.build import Builder
from morsefol.model import BlockKind, leaf_census

from helpers import recount


def codes(a):
    return {v.code for v in validate(a)}


def two_balls():
    bld = Builder("tc")
    b1, b2 = bld.block(BlockKind.CENTER_BALL), bld.block(BlockKind.CENTER_BALL)
    bld.sing(0, b1)
    bld.sing(3, b2)
    bld.tangent(f"{b1}.bd", f"{b2}.bd", 0)
    return bld.finish()


def test_two_center_balls_are_valid():
    assert validate(two_balls()) == []


def test_lonely_reeb_torus_has_open_interface():
    bld = Builder("r")
    bld.block(BlockKind.REEB)
    assert "open interface" in codes(bld.finish())


def test_single_center_breaks_index_sum():
    bld = Builder("one")
    b1, b2 = bld.block(BlockKind.CENTER_BALL), bld.block(BlockKind.CENTER_BALL)
    bld.sing(0, b1)
    bld.tangent(f"{b1}.bd", f"{b2}.bd", 0)
    a = bld.finish()
    assert index_sum(a) == 1
    assert "index sum" in codes(a)


def test_validate_is_idempotent_and_pure():
    a = generate(GenSpec("random", seed=11, size=5, bubble_depth=1))
    before = repr(a)
    assert validate(a) == validate(a)
    assert repr(a) == before


@pytest.mark.parametrize("family", ["two_centers", "double_pretzel", "morse_pair"])
def test_examples_have_zero_index_sum(family):
    a = generate(GenSpec(family))
    c = recount(a)
    assert c[0] - c[1] + c[2] - c[3] == 0 == index_sum(a)


def test_pretzel_conics_admit_a_zero_sum_assignment():
    a = generate(GenSpec("double_pretzel"))
    conics = sorted(s.id for s in a.singularities.values() if s.is_conic)
    assert len(conics) == 2
    ok = [idx for idx in product((1, 2), repeat=2) if sum((-1) ** i for i in idx) == 0]
    assert ok
    assert tuple(a.singularities[s].index for s in conics) in ok


def test_morse_torus_alone_sums_to_zero():
    bld = Builder("m", ambient="other")
    t = bld.block(BlockKind.MORSE)
    bld.sing(0, t)
    bld.sing(1, t)
    assert index_sum(bld.finish()) == 0


def test_two_centers_leaf_census():
    census = leaves(two_balls())
    shapes = Counter(lf.shape for lf in census)
    assert shapes["sphere"] == 3  # two sphere families and the glued sphere
    assert shapes["point"] == 2
    assert all(lf.compact and lf.simply_connected for lf in census)


def test_morse_torus_has_a_pseudo_torus():
    a = generate(GenSpec("morse_pair"))
    m = next(b for b in a.blocks.values() if b.kind is BlockKind.MORSE)
    own = [lf for lf in leaves(a) if lf.owner == m.id]
    assert [lf.shape for lf in own].count("pseudo_torus") == 1


def test_band_glued_to_itself_has_genus_two_leaves():
    bld = Builder("loop", ambient="other")
    band = bld.block(BlockKind.BAND, genus=2)
    bld.tangent(f"{band}.in", f"{band}.out", 2)
    a = bld.finish(leaves=False)
    assert validate(a) == []
    g2 = [lf for lf in leaves(a) if lf.genus == 2 and lf.shape == "genus"]
    assert len(g2) >= 2


def test_leaves_refuses_invalid_assembly():
    bld = Builder("r")
    bld.block(BlockKind.REEB)
    with pytest.raises(InvalidAssembly) as exc:
        leaves(bld.finish())
    assert any(v.code == "open interface" for v in exc.value.report)


def test_duplicate_hosting_is_reported():
    a = two_balls()
    s = next(iter(a.singularities))
    blocks = dict(a.blocks)
    other = next(b for b in blocks.values() if s not in b.singularities)
    blocks[other.id] = type(other)(**{**other.__dict__, "singularities": other.singularities + (s,)})
    assert codes(a.evolve(blocks=blocks)) & {"multiply hosted singularity", "host mismatch"}


def test_spot_direction_mismatch_is_reported():
    bld = Builder("o", ambient="other")
    t1, t2 = bld.block(BlockKind.REEB), bld.block(BlockKind.REEB)
    p1, p2 = bld.spot(t1, Direction.OUTWARD), bld.spot(t2, Direction.OUTWARD)
    bld.csum(p1, p2, 1)
    bld.tangent(f"{t1}.bd", f"{t2}.bd", 2)
    assert "orientation" in codes(bld.finish())


def test_genus_mismatch_is_reported():
    bld = Builder("gm", ambient="other")
    c = bld.block(BlockKind.CENTER_BALL)
    r = bld.block(BlockKind.REEB)
    bld.tangent(f"{c}.bd", f"{r}.bd", 0)
    assert "genus mismatch" in codes(bld.finish())


def test_every_singularity_has_one_host():
    a = generate(GenSpec("random", seed=4, size=6, bubble_depth=2))
    for _, sub in a.walk():
        hosted = Counter()
        for b in sub.blocks.values():
            hosted.update(b.singularities)
        for g in sub.gluings.values():
            if g.singularity:
                hosted[g.singularity] += 1
        assert set(hosted) == set(sub.singularities)
        assert set(hosted.values()) == {1} or not hosted


def test_leaf_shapes_are_consistent():
    a = generate(GenSpec("random", seed=9, size=6, bubble_depth=1, pants_count=1))
    for lf in leaf_census(a):
        if lf.shape in ("sphere", "plane", "disc", "point"):
            assert lf.simply_connected
        if lf.shape in ("torus", "genus", "annulus", "pseudo_torus"):
            assert not lf.simply_connected
        if lf.shape == "pseudo_torus":
            assert lf.singularities
