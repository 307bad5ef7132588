"""Name-based dispatch to constructors and composition operators.

Used by the command line and by simulation scenarios so that a code can be
described by a small JSON object instead of its full node list.
"""
from __future__ import annotations

import json
import os

from . import compose, designs, graphs
from .catalog import catalog_load
from .core import FRCode, transpose
from .fields import field_for_order

FAMILIES = ("grid", "mols", "affine", "hadamard", "projective", "steiner", "girth",
            "complement", "identity", "catalog")


def construct(family: str, **p) -> FRCode:
    f = family.lower()
    if f == "grid":
        return designs.grid(int(p["a"]))
    if f == "mols":
        return designs.mols_net(field_for_order(int(p["q"])), int(p["r"]))
    if f == "affine":
        q, m = int(p["q"]), int(p["m"])
        r = int(p["r"]) if p.get("r") is not None else (q ** m - 1) // (q - 1)
        return designs.affine_resolvable(field_for_order(q), m, r)
    if f == "hadamard":
        return designs.hadamard(int(p["a"]))
    if f in ("projective", "projective_plane"):
        return designs.projective_plane(field_for_order(int(p["q"])))
    if f in ("steiner", "steiner_triple"):
        return designs.steiner_triple(int(p["theta"]))
    if f == "girth":
        return graphs.girth_code(graphs.graph_by_name(str(p["graph"])))
    if f in ("complement", "complement_identity"):
        return designs.complement_identity(int(p["t"]))
    if f == "identity":
        return compose.identity_code(int(p["t"]))
    if f == "catalog":
        return catalog_load(str(p["name"]))
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def load_code(desc, base_dir: str = ".") -> FRCode:
    """Resolve a code descriptor: a path, an inline code, a family or an operation."""
    if isinstance(desc, str):
        path = desc if os.path.isabs(desc) else os.path.join(base_dir, desc)
        with open(path, encoding="utf-8") as fh:
            return FRCode.from_dict(json.load(fh))
    if "theta" in desc and "nodes" in desc:
        return FRCode.from_dict(desc)
    if "path" in desc:
        return load_code(desc["path"], base_dir)
    if "catalog" in desc:
        return catalog_load(desc["catalog"])
    if "family" in desc:
        params = {k: v for k, v in desc.items() if k != "family"}
        return construct(desc["family"], **params)
    op = desc.get("op")
    if op == "kronecker":
        a, b = (load_code(x, base_dir) for x in desc["inputs"])
        return compose.kronecker(a, b)[0]
    if op == "expand":
        return compose.beta_expand(load_code(desc["input"], base_dir), int(desc["m"]))
    if op == "union":
        return compose.disjoint_union(load_code(desc["input"], base_dir), int(desc["copies"]))
    if op in ("select", "select-classes"):
        return compose.select_classes(load_code(desc["input"], base_dir), desc["classes"])
    if op == "transpose":
        return transpose(load_code(desc["input"], base_dir))
    raise ValueError(f"cannot interpret code descriptor {desc!r}")
