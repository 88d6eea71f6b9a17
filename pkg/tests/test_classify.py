from dataclasses import replace

import pytest

from morsefol import (
    GenSpec, NotClosed, UnsupportedAmbient, classify, generate, is_stable, verify_certificate,
)
from morsefol.build import Builder
from morsefol.detect import find_components
from morsefol.gen import _insert_band, _share_leaves
from morsefol.iso import isomorphic
from morsefol.model import BlockKind

from helpers import all_leaves, census_ids, centers, conics, recount


def reeb_s3():
    bld = Builder("reeb")
    r1, r2 = bld.block(BlockKind.REEB), bld.block(BlockKind.REEB)
    bld.tangent(f"{r1}.bd", f"{r2}.bd", 1)
    return bld


def morse_s3():
    bld = Builder("morse")
    m1, m2 = bld.block(BlockKind.MORSE), bld.block(BlockKind.MORSE)
    bld.sing(0, m1)
    bld.sing(1, m1)
    bld.sing(3, m2)
    bld.sing(2, m2)
    bld.tangent(f"{m1}.bd", f"{m2}.bd", 1)
    return bld


# -- classify ------------------------------------------------------------------

def test_two_centers_is_simply_connected():
    a = generate(GenSpec("two_centers"))
    cert = classify(a)
    assert cert.token == "all_simply_connected"
    assert cert.component is None
    assert isomorphic(cert.final_assembly, a)
    assert verify_certificate(a, cert)


def test_double_pretzel_is_reeb():
    a = generate(GenSpec("double_pretzel"))
    cert = classify(a)
    assert cert.family == "reeb"
    assert a.blocks[cert.component_sites[0]].kind is BlockKind.REEB
    assert verify_certificate(a, cert)


def test_no_compact_leaf_variant_is_reeb():
    a = generate(GenSpec("no_compact_leaf_variant"))
    assert not all(lf.compact for lf in all_leaves(a))
    assert classify(a).family == "reeb"


def test_morse_pair_counts():
    a = generate(GenSpec("morse_pair"))
    cert = classify(a)
    assert cert.verdict == "morse" and not cert.singular
    c = recount(cert.component)
    assert centers(c) == 2 and conics(c) == 2
    assert verify_certificate(a, cert)


def test_chain_trace_covers_every_pair():
    for k in range(5):
        a = generate(GenSpec("simply_connected_chain", k=k))
        cert = classify(a)
        assert cert.verdict == "all_simply_connected"
        assert len(cert.trace) >= k
        assert verify_certificate(a, cert)


def test_trivial_bubbles_on_component_make_it_singular():
    a = generate(GenSpec("morse_pair", trivial_bubbles=2))
    cert = classify(a)
    assert cert.token == "morse+singular"
    assert verify_certificate(a, cert)


def test_reeb_s3_is_reeb():
    assert classify(reeb_s3().finish()).verdict == "reeb"


def test_refuses_open_and_foreign_ambients():
    bld = Builder("open")
    bld.block(BlockKind.REEB)
    with pytest.raises(NotClosed):
        classify(bld.finish())
    with pytest.raises(UnsupportedAmbient):
        classify(generate(GenSpec("two_centers")).evolve(ambient="other"))


def test_deleted_step_breaks_certificate():
    a = generate(GenSpec("simply_connected_chain", k=2))
    cert = classify(a)
    assert cert.trace
    assert not verify_certificate(a, replace(cert, trace=cert.trace[1:]))


def test_component_on_band_breaks_certificate():
    a = generate(GenSpec("morse_pair", extra_band=True))
    cert = classify(a)
    band = next(b.id for b in a.blocks.values() if b.kind is BlockKind.BAND)
    assert verify_certificate(a, cert)
    assert not verify_certificate(a, replace(cert, component_sites=(band,)))


def test_wrong_verdict_breaks_certificate():
    a = generate(GenSpec("morse_pair"))
    cert = classify(a)
    assert not verify_certificate(a, replace(cert, verdict="reeb"))
    assert not verify_certificate(a, replace(cert, singular=True))


def test_component_is_redetected():
    for seed in range(30):
        a = generate(GenSpec("random", seed=seed, size=4, bubble_depth=seed % 2))
        cert = classify(a)
        if cert.verdict == "all_simply_connected":
            continue
        comps = find_components(cert.final_assembly)
        assert any(c.sites == cert.component_sites and c.kind == cert.verdict for c in comps)


# -- stability -----------------------------------------------------------------

def test_two_centers_is_stable():
    v = is_stable(generate(GenSpec("two_centers")))
    assert v.stable and v.witness is None and v.token == "stable"


def test_shared_leaf_is_unstable():
    bld = Builder("sh")
    b1, b2 = bld.block(BlockKind.CENTER_BALL), bld.block(BlockKind.CENTER_BALL)
    bld.sing(0, b1)
    bld.sing(3, b2)
    bld.tangent(f"{b1}.bd", f"{b2}.bd", 0)
    _, s1 = bld.attach(b1, 1)
    _, s2 = bld.attach(b1, 2)
    a = _share_leaves(bld.finish(), [(s1, s2)])
    v = is_stable(a)
    assert v.token == "unstable:multi_singular_leaf"
    assert set(v.witness.sites) <= census_ids(a)


def test_morse_torus_with_band_is_unstable():
    bld = morse_s3()
    _insert_band(bld, next(iter(bld.gluings)))
    a = bld.finish()
    v = is_stable(a)
    assert v.token == "unstable:band_of_leaves"
    assert a.blocks[v.witness.sites[0]].kind is BlockKind.BAND


def test_reeb_only_gets_torus_thickening():
    a = reeb_s3().finish()
    v = is_stable(a)
    assert v.token == "unstable:flat_torus_thickening"
    assert v.witness.sites[0] in a.blocks


def test_stable_implies_simply_connected_verdict():
    for seed in range(40):
        a = generate(GenSpec("random", seed=seed, size=3))
        if is_stable(a).stable:
            assert classify(a).verdict == "all_simply_connected"
