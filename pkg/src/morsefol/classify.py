"""Classification certificates and the stability decision."""

from __future__ import annotations

from dataclasses import dataclass

from .detect import (
    COMPONENT_KINDS, Component, find_bubbles, find_components, find_truncated_bubbles,
)
from .errors import FoliationError, InvalidAssembly, NotClosed, TheoremViolation, UnsupportedAmbient
from .iso import isomorphic
from .model import Assembly, BlockKind, conic_ids, is_open, leaf_census, natural_key, validate
from .rewrites import (
    RewriteStep, corrective_movement, eliminate_all_trivial_pairs, eliminate_bubble,
    eliminate_truncated_bubble, replay, split_all,
)

VERDICTS = ("all_simply_connected",) + COMPONENT_KINDS
_PRIORITY = {k: i for i, k in enumerate(COMPONENT_KINDS)}


@dataclass(frozen=True)
class Certificate:
    verdict: str
    singular: bool
    trace: tuple[RewriteStep, ...]
    component: Assembly | None
    component_kind: str | None
    component_sites: tuple[str, ...]
    component_path: tuple[str, ...]
    final_assembly: Assembly

    @property
    def token(self) -> str:
        return self.verdict + ("+singular" if self.singular else "")

    @property
    def family(self) -> str | None:
        if self.verdict == "all_simply_connected":
            return None
        return "morse" if "morse" in self.verdict else "reeb"


def check_classifiable(a: Assembly) -> None:
    if a.ambient != "S3":
        raise UnsupportedAmbient(f"ambient {a.ambient!r}; only S3 is classified")
    report = validate(a)
    if is_open(report):
        raise NotClosed(report)
    if report:
        raise InvalidAssembly(report)


def _component_bubbles(a: Assembly) -> set[str]:
    """Bubbles whose interior contains a Reeb or Morse component."""
    keep = set()
    for comp in find_components(a):
        keep.update(comp.path)
    return keep


def _pick(comps: list[Component]) -> Component:
    return min(comps, key=lambda c: (_PRIORITY[c.kind], len(c.path), [natural_key(s) for s in c.sites]))


def component_assembly(a: Assembly, comp: Component) -> Assembly:
    """The chosen blocks plus the same-kind blocks connected-summed to them, unglued."""
    sub = a.at(comp.path)
    chosen = set(comp.sites)
    kind = sub.blocks[comp.sites[0]].kind if comp.sites[0] in sub.blocks else None
    if len(comp.sites) == 1 and kind is not None:
        changed = True
        while changed:
            changed = False
            for g in sub.gluings.values():
                if g.kind.value != "connected_sum":
                    continue
                ends = {e.split(".", 1)[0] for e in g.ends}
                if ends & chosen and not ends <= chosen and all(
                        sub.blocks[x].kind is kind for x in ends):
                    chosen |= ends
                    changed = True
    blocks = {k: sub.blocks[k] for k in sub.blocks if k in chosen}
    sings = {k: v for k, v in sub.singularities.items() if v.host in chosen}
    leaves = {k: v for k, v in sub.leaves.items() if v.owner in chosen}
    return Assembly(f"{a.name}.component", "component", blocks, {}, sings, leaves)


def _singular(trace, comp: Component | None) -> bool:
    if comp is None:
        return False
    sites = set(comp.sites)

    def walk(steps):
        for st in steps:
            if st.op_name == "eliminate_trivial_pair" and sites & set(st.touched):
                return True
            if walk(st.substeps):
                return True
        return False

    return comp.singular or walk(trace)


def _finish(a: Assembly, final: Assembly, trace: list[RewriteStep]) -> Certificate:
    comps = find_components(final)
    if not comps:
        bad = [lf.id for lf in leaf_census(final) if not lf.simply_connected]
        if bad:
            raise TheoremViolation(f"non-simply-connected leaves {bad[:3]} but no component")
        return Certificate("all_simply_connected", False, tuple(trace), None, None, (), (), final)
    comp = _pick(comps)
    return Certificate(comp.kind, _singular(trace, comp), tuple(trace),
                       component_assembly(final, comp), comp.kind, comp.sites, comp.path, final)


def classify(a: Assembly) -> Certificate:
    """Reduce ``a`` and name a Reeb/Morse-type component, or certify simple connectivity."""
    check_classifiable(a)
    trace: list[RewriteStep] = []
    a0 = a
    a, steps = split_all(a)
    trace += steps
    a, steps = eliminate_all_trivial_pairs(a)
    trace += steps
    for tb in find_truncated_bubbles(a, strict=False):
        try:
            a, st = corrective_movement(a, tb)
        except FoliationError:
            continue
        trace.append(st)
    a, steps = split_all(a)
    trace += steps
    while True:
        keep = _component_bubbles(a)
        todo = [b for b in find_bubbles(a) if b not in keep]
        if not todo:
            break
        a, st = eliminate_bubble(a, todo[0])
        trace.append(st)
    while True:
        tbs = find_truncated_bubbles(a, strict=False)
        if not tbs:
            break
        a, st = eliminate_truncated_bubble(a, tbs[0])
        trace.append(st)
    a, steps = eliminate_all_trivial_pairs(a)
    trace += steps
    return _finish(a0, a, trace)


def verify_certificate(a: Assembly, cert: Certificate) -> bool:
    """Independent replay check of a certificate against its input assembly."""
    try:
        final = replay(a, cert.trace)
        if not isomorphic(final, cert.final_assembly):
            return False
        comps = find_components(final)
        if cert.verdict == "all_simply_connected":
            return not comps and all(lf.simply_connected for lf in leaf_census(final)) and not cert.singular
        if cert.verdict not in COMPONENT_KINDS or cert.component_kind != cert.verdict:
            return False
        match = [c for c in comps if c.kind == cert.component_kind
                 and c.sites == tuple(cert.component_sites) and c.path == tuple(cert.component_path)]
        if not match:
            return False
        if _singular(cert.trace, match[0]) != cert.singular:
            return False
        if cert.component is not None and not isomorphic(cert.component, component_assembly(final, match[0])):
            return False
        return True
    except FoliationError:
        return False
    except (KeyError, TypeError, ValueError):
        return False


# ---------------------------------------------------------------------------
# stability


@dataclass(frozen=True)
class Witness:
    kind: str  # multi_singular_leaf | band_of_leaves | flat_torus_thickening
    sites: tuple[str, ...]
    note: str = ""


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    witness: Witness | None = None

    @property
    def token(self) -> str:
        return "stable" if self.stable else f"unstable:{self.witness.kind}"


def is_stable(a: Assembly) -> StabilityVerdict:
    check_classifiable(a)
    census = leaf_census(a)
    for lf in census:
        if len(conic_ids(a, lf)) > 1:
            return StabilityVerdict(False, Witness(
                "multi_singular_leaf", (lf.id,), "a small modification separates the cones"))
    bad = [lf for lf in census if not (lf.compact and lf.simply_connected)]
    if not bad:
        return StabilityVerdict(True)
    for path, sub in a.walk():
        for bid in sorted(sub.blocks, key=natural_key):
            b = sub.blocks[bid]
            if b.kind is BlockKind.BAND and b.genus > 0:
                return StabilityVerdict(False, Witness(
                    "band_of_leaves", (bid,), "the band is approximated rel boundary by non-compact leaves"))
    try:
        cert = classify(a)
    except TheoremViolation:
        cert = None
    if cert is None or cert.family is None:
        return StabilityVerdict(False, Witness("band_of_leaves", (bad[0].id,), "non-compact leaf"))
    site = cert.component_sites[0]
    if cert.family == "morse":
        return StabilityVerdict(False, Witness(
            "band_of_leaves", (site,), "the toral leaves of the component form a band"))
    return StabilityVerdict(False, Witness(
        "flat_torus_thickening", (site,), "a flat toral leaf is thickened into a band"))
