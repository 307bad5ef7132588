"""Embedded design tables.

Each ``catalog/<NAME>.txt`` file holds one block per line as comma-separated
labels.  Lines starting with ``#`` are comments, except ``# @classes a,b,..``
which groups consecutive blocks into parallel classes of the given sizes.
Labels are mapped to dense ids: numeric labels in increasing order, then any
non-numeric labels (such as ``inf``) in order of first appearance.
"""
from __future__ import annotations

from importlib import resources

from .core import FRCode
from .errors import UnknownName

NAMES = ("D1", "D2", "S2-4-16", "MOLS-16", "HADAMARD-7", "FANO")

_REPAIR = {
    "D1": {"d": 3, "beta": 1},
    "D2": {"d": 3, "beta": 1},
    "S2-4-16": {"d": 4, "beta": 1},
    "MOLS-16": {"d": 4, "beta": 1},
    "HADAMARD-7": {"d": 2, "beta": 2},
    "FANO": {"d": 3, "beta": 1},
}


def catalog_names() -> tuple:
    return NAMES


def catalog_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownName(f"no catalog entry {name!r}; known: {', '.join(NAMES)}")
    return resources.files("frcodes").joinpath("catalog").joinpath(f"{name}.txt").read_text(encoding="utf-8")


def parse_blocks(text: str):
    """Return ``(blocks, class_sizes, title)`` with blocks as lists of raw labels."""
    blocks, sizes, title = [], None, None
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if body.startswith("@classes"):
                sizes = [int(x) for x in body.split(None, 1)[1].split(",")]
            elif title is None:
                title = body
            continue
        blocks.append([x.strip() for x in s.split(",")])
    return blocks, sizes, title


def normalize_labels(blocks):
    labels = {x for b in blocks for x in b}
    numeric = sorted((x for x in labels if x.lstrip("-").isdigit()), key=int)
    other = []
    for b in blocks:
        for x in b:
            if x not in numeric and x not in other:
                other.append(x)
    order = numeric + other
    return {lab: i for i, lab in enumerate(order)}


def catalog_load(name: str) -> FRCode:
    blocks, sizes, title = parse_blocks(catalog_text(name))
    label_map = normalize_labels(blocks)
    nodes = tuple(frozenset(label_map[x] for x in b) for b in blocks)
    resolution = None
    if sizes:
        if sum(sizes) != len(nodes):
            raise ValueError(f"{name}: class sizes do not add up to the block count")
        resolution, start = [], 0
        for sz in sizes:
            resolution.append(tuple(range(start, start + sz)))
            start += sz
    meta = {"family": "catalog", "name": name, "title": title,
            "labels": {str(i): lab for lab, i in label_map.items()},
            "repair": dict(_REPAIR[name])}
    return FRCode(len(label_map), nodes, resolution, meta)
