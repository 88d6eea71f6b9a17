"""The line-based FOL text format, DOT export and certificate JSON."""

from __future__ import annotations

import json
import shlex
from dataclasses import replace

from .errors import ParseError
from .model import (
    Assembly, Block, BlockKind, Direction, Gluing, GluingKind, LeafDescriptor,
    Singularity, Spot, natural_key, split_end,
)

FORMAT_VERSION = 1


def _q(text: str) -> str:
    return shlex.quote(str(text))


def _bool(v: bool) -> str:
    return "true" if v else "false"


def _param_text(k: str, v) -> str:
    if isinstance(v, bool):
        return f"{k}={_bool(v)}"
    if isinstance(v, (tuple, list)):
        return f"{k}=" + _q(",".join(v)) if v else f"{k}=-"
    return f"{k}={_q(v)}"


def _level_lines(a: Assembly) -> list[str]:
    lines = []
    order = sorted(a.blocks, key=natural_key)
    for bid in order:
        b = a.blocks[bid]
        parts = ["block", bid, f"kind={b.kind.value}", f"genus={b.genus}"]
        if b.singularities:
            parts.append("sings=" + ",".join(b.singularities))
        parts += [_param_text(k, b.params[k]) for k in sorted(b.params)]
        lines.append(" ".join(parts))
    for bid in order:
        for sp in a.blocks[bid].spots:
            parts = ["spot", sp.id, f"owner={bid}", f"dir={sp.direction.value}",
                     f"iface={sp.interface if sp.interface is not None else '-'}"]
            if sp.associated_singularity:
                parts.append(f"assoc={sp.associated_singularity}")
            if not sp.boundary_holonomy_trivial:
                parts.append("holonomy=nontrivial")
            lines.append(" ".join(parts))
    for sid in sorted(a.singularities, key=natural_key):
        s = a.singularities[sid]
        parts = ["sing", sid, f"index={s.index}", f"host={s.host}"]
        if s.leaf:
            parts.append(f"leaf={_q(s.leaf)}")
        lines.append(" ".join(parts))
    for gid in sorted(a.gluings, key=natural_key):
        g = a.gluings[gid]
        parts = ["glue", gid, g.kind.value, g.ends[0], g.ends[1]]
        if g.kind is GluingKind.TANGENT:
            parts.append(f"genus={g.genus if g.genus is not None else '-'}")
            if not g.compact:
                parts.append("compact=false")
        elif g.kind is GluingKind.CONNECTED_SUM:
            parts.append(f"sing={g.singularity}")
        else:
            parts.append(f"via={g.via}")
        lines.append(" ".join(parts))
    for lid in sorted(a.leaves, key=natural_key):
        lf = a.leaves[lid]
        parts = ["leaf", _q(lid), f"owner={lf.owner}", f"shape={lf.shape}",
                 f"compact={_bool(lf.compact)}", f"sc={_bool(lf.simply_connected)}", f"genus={lf.genus}"]
        if lf.singularities:
            parts.append("sings=" + ",".join(lf.singularities))
        lines.append(" ".join(parts))
    for bid in order:
        inner = a.blocks[bid].inner
        if inner is not None:
            lines.append(f"begin inner {bid} name={_q(inner.name)} ambient={_q(inner.ambient)}")
            lines += ["  " + ln for ln in _level_lines(inner)]
            lines.append(f"end inner {bid}")
    return lines


def serialize(a: Assembly) -> str:
    head = [f"version {FORMAT_VERSION}", f"assembly {_q(a.name)} ambient={_q(a.ambient)}"]
    return "\n".join(head + _level_lines(a)) + "\n"


# ---------------------------------------------------------------------------
# parsing


_PARAM_FLOATS = {"cone"}
_PARAM_BOOLS = {"special"}
_PARAM_LISTS = {"filled"}


def _kv(tokens: list[str], line: int) -> dict[str, str]:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ParseError(line, f"expected key=value, got {t!r}")
        k, v = t.split("=", 1)
        if k in out:
            raise ParseError(line, f"repeated key {k!r}")
        out[k] = v
    return out


def _as_bool(v: str, line: int) -> bool:
    if v not in ("true", "false"):
        raise ParseError(line, f"expected true/false, got {v!r}")
    return v == "true"


def _as_int(v: str, line: int) -> int:
    try:
        return int(v)
    except ValueError:
        raise ParseError(line, f"expected an integer, got {v!r}") from None


def _ids(v: str | None) -> tuple[str, ...]:
    return tuple(x for x in (v or "").split(",") if x)


class _Level:
    def __init__(self, name: str, ambient: str, line: int):
        self.name, self.ambient, self.line = name, ambient, line
        self.blocks: dict[str, Block] = {}
        self.spots: list[tuple[Spot, int]] = []
        self.sings: dict[str, Singularity] = {}
        self.gluings: dict[str, Gluing] = {}
        self.leaves: dict[str, LeafDescriptor] = {}
        self.refs: list[tuple[int, str, str]] = []  # (line, what, id)
        self.inner: dict[str, Assembly] = {}

    def build(self) -> Assembly:
        blocks = dict(self.blocks)
        for sp, line in self.spots:
            if sp.owner not in blocks:
                raise ParseError(line, f"dangling reference: spot owner {sp.owner!r}")
            b = blocks[sp.owner]
            blocks[sp.owner] = replace(b, spots=b.spots + (sp,))
        for bid, inner in self.inner.items():
            blocks[bid] = replace(blocks[bid], inner=inner)
        a = Assembly(self.name, self.ambient, blocks, dict(self.gluings), dict(self.sings), dict(self.leaves))
        spot_ids = {sp.id for sp, _ in self.spots}
        for line, what, ident in self.refs:
            ok = {
                "block": ident in blocks,
                "host": ident in blocks or ident in self.gluings,
                "sing": ident in self.sings,
                "leaf": ident in self.leaves,
                "spot": ident in spot_ids,
            }[what]
            if not ok:
                raise ParseError(line, f"dangling reference: {what} {ident!r}")
        return a


def parse(text: str) -> Assembly:
    """Read an FOL document; structural errors raise :class:`ParseError` with the line."""
    stack: list[tuple[_Level, str | None]] = []
    seen: dict[str, int] = {}
    version_seen = False
    root: _Level | None = None

    def claim(ident: str, line: int) -> None:
        if ident in seen:
            raise ParseError(line, f"duplicate id {ident!r} (first declared on line {seen[ident]})")
        seen[ident] = line

    for no, raw in enumerate(text.splitlines(), start=1):
        try:
            tokens = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ParseError(no, f"cannot tokenize: {exc}") from None
        if not tokens:
            continue
        head, rest = tokens[0], tokens[1:]
        if not version_seen:
            if head != "version":
                raise ParseError(no, "missing header: expected 'version 1'")
            if len(rest) != 1 or rest[0] != str(FORMAT_VERSION):
                raise ParseError(no, f"version mismatch: {' '.join(rest)!r}, this reader handles {FORMAT_VERSION}")
            version_seen = True
            continue
        if root is None:
            if head != "assembly" or not rest:
                raise ParseError(no, "missing header: expected 'assembly NAME ambient=TAG'")
            kv = _kv(rest[1:], no)
            root = _Level(rest[0], kv.get("ambient", "S3"), no)
            stack.append((root, None))
            continue
        level = stack[-1][0]
        if head == "block":
            if not rest:
                raise ParseError(no, "block needs an id")
            bid, kv = rest[0], _kv(rest[1:], no)
            claim(bid, no)
            try:
                kind = BlockKind(kv.pop("kind"))
            except (KeyError, ValueError):
                raise ParseError(no, "block needs a known kind=") from None
            genus = _as_int(kv.pop("genus", "0"), no)
            sings = _ids(kv.pop("sings", None))
            for s in sings:
                level.refs.append((no, "sing", s))
            params = {}
            for k, v in kv.items():
                if k in _PARAM_FLOATS:
                    try:
                        params[k] = float(v)
                    except ValueError:
                        raise ParseError(no, f"{k} must be a number") from None
                elif k in _PARAM_BOOLS:
                    params[k] = _as_bool(v, no)
                elif k in _PARAM_LISTS:
                    params[k] = () if v == "-" else tuple(v.split(","))
                else:
                    params[k] = v
            level.blocks[bid] = Block(bid, kind, genus, (), sings, None, params)
        elif head == "spot":
            if not rest:
                raise ParseError(no, "spot needs an id")
            pid, kv = rest[0], _kv(rest[1:], no)
            claim(pid, no)
            try:
                direction = Direction(kv["dir"])
                owner = kv["owner"]
            except (KeyError, ValueError):
                raise ParseError(no, "spot needs owner= and dir=inward|outward") from None
            iface = kv.get("iface", "bd")
            assoc = kv.get("assoc")
            hol = kv.get("holonomy", "trivial")
            if hol not in ("trivial", "nontrivial"):
                raise ParseError(no, f"holonomy must be trivial or nontrivial, got {hol!r}")
            level.spots.append((Spot(pid, owner, direction, None if iface == "-" else iface,
                                     assoc, hol == "trivial"), no))
        elif head == "sing":
            if not rest:
                raise ParseError(no, "sing needs an id")
            sid, kv = rest[0], _kv(rest[1:], no)
            claim(sid, no)
            if "host" not in kv or "index" not in kv:
                raise ParseError(no, "sing needs index= and host=")
            level.sings[sid] = Singularity(sid, _as_int(kv["index"], no), kv["host"], kv.get("leaf"))
            level.refs.append((no, "host", kv["host"]))
            if kv.get("leaf"):
                level.refs.append((no, "leaf", kv["leaf"]))
        elif head == "glue":
            if len(rest) < 4:
                raise ParseError(no, "glue needs: ID KIND END END")
            gid, kind_s, e1, e2 = rest[:4]
            kv = _kv(rest[4:], no)
            claim(gid, no)
            try:
                kind = GluingKind(kind_s)
            except ValueError:
                raise ParseError(no, f"unknown gluing kind {kind_s!r}") from None
            for e in (e1, e2):
                if "." not in e:
                    raise ParseError(no, f"endpoint {e!r} is not BLOCK.PORT")
                bid, port = split_end(e)
                level.refs.append((no, "block", bid))
                if kind is not GluingKind.TANGENT:
                    level.refs.append((no, "spot", port))
            if kind is GluingKind.TANGENT:
                g = kv.get("genus", "-")
                gl = Gluing(gid, kind, (e1, e2), genus=None if g == "-" else _as_int(g, no),
                            compact=_as_bool(kv.get("compact", "true"), no))
            elif kind is GluingKind.CONNECTED_SUM:
                if "sing" not in kv:
                    raise ParseError(no, "connected_sum needs sing=")
                level.refs.append((no, "sing", kv["sing"]))
                gl = Gluing(gid, kind, (e1, e2), singularity=kv["sing"])
            else:
                gl = Gluing(gid, kind, (e1, e2), via=kv.get("via"))
            level.gluings[gid] = gl
        elif head == "leaf":
            if not rest:
                raise ParseError(no, "leaf needs an id")
            lid, kv = rest[0], _kv(rest[1:], no)
            claim(lid, no)
            for key in ("owner", "shape", "compact", "sc"):
                if key not in kv:
                    raise ParseError(no, f"leaf needs {key}=")
            level.refs.append((no, "host", kv["owner"]))
            sings = _ids(kv.get("sings"))
            for s in sings:
                level.refs.append((no, "sing", s))
            level.leaves[lid] = LeafDescriptor(lid, kv["owner"], kv["shape"], _as_bool(kv["compact"], no),
                                               _as_bool(kv["sc"], no), sings, _as_int(kv.get("genus", "0"), no))
        elif head == "begin":
            if len(rest) < 2 or rest[0] != "inner":
                raise ParseError(no, "expected 'begin inner BLOCK'")
            bid, kv = rest[1], _kv(rest[2:], no)
            if bid not in level.blocks:
                raise ParseError(no, f"dangling reference: block {bid!r}")
            stack.append((_Level(kv.get("name", f"{bid}.inner"), kv.get("ambient", "ball"), no), bid))
        elif head == "end":
            if len(rest) != 2 or rest[0] != "inner" or len(stack) < 2 or stack[-1][1] != rest[1]:
                raise ParseError(no, "unbalanced 'end inner'")
            inner_level, bid = stack.pop()
            stack[-1][0].inner[bid] = inner_level.build()
        else:
            raise ParseError(no, f"unknown directive {head!r}")
    if not version_seen or root is None:
        raise ParseError(max(1, len(text.splitlines())), "missing header")
    if len(stack) != 1:
        raise ParseError(stack[-1][0].line, "unterminated 'begin inner'")
    return root.build()


# ---------------------------------------------------------------------------
# DOT


_EDGE_STYLE = {
    GluingKind.TANGENT: "solid",
    GluingKind.SPOT_TRANSVERSE: "dashed",
    GluingKind.CONNECTED_SUM: "dotted",
}


def _dq(text: str) -> str:
    text = str(text).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + text + '"'


def export_dot(a: Assembly, cert=None) -> str:
    highlight = set()
    if cert is not None and getattr(cert, "component_sites", None):
        highlight = set(cert.component_sites)
        if cert.component is not None:
            highlight |= set(cert.component.blocks)
    lines = [f"graph {_dq(a.name)} {{", "  node [shape=box];"]

    def emit(sub: Assembly, indent: str) -> None:
        for bid in sorted(sub.blocks, key=natural_key):
            b = sub.blocks[bid]
            label = "\n".join([bid, b.kind.value] + list(b.singularities))
            attrs = [f"label={_dq(label)}"]
            if bid in highlight:
                attrs += ['color="red"', "penwidth=2", 'class="component"']
            lines.append(f"{indent}{_dq(bid)} [{', '.join(attrs)}];")
            if b.inner is not None:
                lines.append(f"{indent}subgraph {_dq('cluster_' + bid)} {{")
                lines.append(f"{indent}  label={_dq(bid + ' interior')};")
                emit(b.inner, indent + "  ")
                lines.append(f"{indent}}}")
        for gid in sorted(sub.gluings, key=natural_key):
            g = sub.gluings[gid]
            (b1, _), (b2, _) = split_end(g.ends[0]), split_end(g.ends[1])
            label = gid + (f" {g.singularity}" if g.singularity else "")
            lines.append(f"{indent}{_dq(b1)} -- {_dq(b2)} [style={_EDGE_STYLE[g.kind]}, label={_dq(label)}];")

    emit(a, "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# certificates and traces


def trace_to_json(steps) -> str:
    return json.dumps([s.to_json() for s in steps], indent=2, sort_keys=True)


def certificate_to_json(cert) -> str:
    doc = {
        "verdict": cert.verdict,
        "singular": cert.singular,
        "token": cert.token,
        "component_kind": cert.component_kind,
        "component_sites": list(cert.component_sites),
        "component_path": list(cert.component_path),
        "component": serialize(cert.component) if cert.component is not None else None,
        "final_assembly": serialize(cert.final_assembly),
        "trace": [s.to_json() for s in cert.trace],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def certificate_from_json(text: str):
    from .classify import Certificate
    from .rewrites import RewriteStep

    d = json.loads(text)
    return Certificate(
        d["verdict"], bool(d["singular"]),
        tuple(RewriteStep.from_json(s) for s in d["trace"]),
        parse(d["component"]) if d.get("component") else None,
        d.get("component_kind"), tuple(d.get("component_sites", ())),
        tuple(d.get("component_path", ())), parse(d["final_assembly"]),
    )
