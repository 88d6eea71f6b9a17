"""Structural equality of assemblies up to renaming of ids."""

from __future__ import annotations

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

from .model import REF_PARAMS, Assembly, GluingKind, split_end


def _param_label(params: dict) -> str:
    items = []
    for k in sorted(params):
        if k in REF_PARAMS:
            continue
        items.append(f"{k}={params[k]!r}")
    return ",".join(items)


def to_graph(a: Assembly) -> nx.DiGraph:
    """Id-free labelled graph of one nesting level; interiors become hashed labels."""
    g = nx.DiGraph()
    edges: dict[tuple[str, str], list[str]] = {}

    def edge(u: str, v: str, role: str) -> None:
        edges.setdefault((u, v), []).append(role)

    spot_nodes = {}
    for b in a.blocks.values():
        inner = structure_hash(b.inner) if b.inner is not None else "-"
        g.add_node(b.id, label=f"block|{b.kind.value}|{b.genus}|{_param_label(b.params)}|{inner}")
        for sp in b.spots:
            node = "spot:" + sp.id
            spot_nodes[sp.id] = node
            g.add_node(node, label=f"spot|{sp.direction.value}|{sp.interface}|{sp.boundary_holonomy_trivial}")
            edge(node, b.id, "owner")
            if sp.associated_singularity is not None:
                edge(node, "sing:" + sp.associated_singularity, "assoc")
        for key in REF_PARAMS:
            ref = b.params.get(key)
            if ref is not None:
                target = ref
                if ref in a.singularities:
                    target = "sing:" + ref
                elif ref in a.gluings:
                    target = "glue:" + ref
                elif ref not in a.blocks:
                    target = "spot:" + ref
                edge(b.id, target, key)
    for s in a.singularities.values():
        g.add_node("sing:" + s.id, label=f"sing|{s.index}")
        host = s.host if s.host in a.blocks else "glue:" + s.host
        edge("sing:" + s.id, host, "host")
        if s.leaf is not None:
            edge("sing:" + s.id, "leaf:" + s.leaf, "on")
    for gl in a.gluings.values():
        node = "glue:" + gl.id
        g.add_node(node, label=f"glue|{gl.kind.value}|{gl.genus}|{gl.via}|{gl.compact}")
        for end in gl.ends:
            bid, port = split_end(end)
            if gl.kind is GluingKind.TANGENT:
                edge(node, bid, "end:" + port)
            else:
                edge(node, spot_nodes.get(port, "spot:" + port), "end")
    for lf in a.leaves.values():
        node = "leaf:" + lf.id
        g.add_node(node, label=f"leaf|{lf.shape}|{lf.compact}|{lf.simply_connected}|{lf.genus}|{len(lf.singularities)}")
        owner = lf.owner if lf.owner in a.blocks else "glue:" + lf.owner
        edge(node, owner, "owner")
    for (u, v), roles in edges.items():
        for n in (u, v):
            if n not in g:
                g.add_node(n, label="dangling")
        g.add_edge(u, v, role="+".join(sorted(roles)))
    return g


def structure_hash(a: Assembly) -> str:
    return nx.weisfeiler_lehman_graph_hash(to_graph(a), node_attr="label", edge_attr="role", iterations=4)


def isomorphic(a: Assembly, b: Assembly) -> bool:
    """True iff ``a`` and ``b`` differ only by ids and assembly name."""
    if a.ambient != b.ambient:
        return False
    if a.evolve(name="") == b.evolve(name=""):
        return True
    ga, gb = to_graph(a), to_graph(b)
    if ga.number_of_nodes() != gb.number_of_nodes() or ga.number_of_edges() != gb.number_of_edges():
        return False
    wl = dict(node_attr="label", edge_attr="role", iterations=4)
    if nx.weisfeiler_lehman_graph_hash(ga, **wl) != nx.weisfeiler_lehman_graph_hash(gb, **wl):
        return False
    return nx.is_isomorphic(ga, gb, node_match=categorical_node_match("label", None),
                            edge_match=categorical_edge_match("role", None))
