"""Dataset files, CSV reports and the D-L (descendant-level) view.

A dataset file is UTF-8 JSON, either one object or a list of objects::

    {"name": "toy", "trees": [[1], [1, 2, 3]], "covariate": [30, 41], "start": [1]}

``covariate`` and ``start`` are optional.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .trees import Tree, TreeDataset, level, subtree_sizes
from .validation import check_dataset

ROOT = frozenset({1})


def _parse_one(obj, where: str) -> TreeDataset:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object with a 'trees' list")
    if "trees" not in obj or not isinstance(obj["trees"], list):
        raise ValueError(f"{where}: missing 'trees' list")
    try:
        return check_dataset(obj["trees"], obj.get("covariate"), str(obj.get("name", "")), obj.get("start"))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"{where}: {exc}") from None


def parse_datasets(text: str, source: str = "<string>") -> list[TreeDataset]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: not valid JSON ({exc})") from None
    if isinstance(data, list):
        if not data:
            raise ValueError(f"{source}: empty dataset list")
        return [_parse_one(obj, f"{source}[{i}]") for i, obj in enumerate(data)]
    return [_parse_one(data, source)]


def load_datasets(path) -> list[TreeDataset]:
    path = Path(path)
    return parse_datasets(path.read_text(encoding="utf-8"), str(path))


def ingest(path) -> TreeDataset:
    """Read a file holding exactly one dataset."""
    sets = load_datasets(path)
    if len(sets) != 1:
        raise ValueError(f"{path}: expected one dataset, found {len(sets)}")
    return sets[0]


def dataset_to_dict(ds: TreeDataset) -> dict:
    out = {"name": ds.name, "trees": [sorted(t) for t in ds.trees]}
    if ds.covariate is not None:
        out["covariate"] = list(ds.covariate)
    if ds.start != ROOT:
        out["start"] = sorted(ds.start)
    return out


def dumps_datasets(sets) -> str:
    if isinstance(sets, TreeDataset):
        return json.dumps(dataset_to_dict(sets)) + "\n"
    return json.dumps([dataset_to_dict(d) for d in sets]) + "\n"


def save_datasets(sets, path) -> None:
    Path(path).write_text(dumps_datasets(sets), encoding="utf-8")


def fmt(x) -> str:
    """Locale-free text for a CSV cell."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return repr(x)
        return f"{x:.6f}"
    if isinstance(x, (tuple, list, frozenset, set)):
        return " ".join(str(v) for v in x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def dlview(t: Tree) -> list[tuple[int, int, float, int | None]]:
    """(node, level, log2(1 + proper descendants), parent) for every node, by label.

    Leaves sit at height 0.
    """
    sizes = subtree_sizes(t)
    return [(v, level(v), math.log2(sizes[v]), v // 2 if v != 1 else None) for v in sorted(t)]


def dlview_csv(t: Tree) -> str:
    return csv_text(["node", "x", "y", "parent"], dlview(t))


def dlview_svg(t: Tree, classes: dict[int, str] | None = None, width: int = 480, height: int = 360) -> str:
    """SVG scatter of the D-L view with parent edges.

    ``classes`` maps nodes to a CSS class (``start``, ``pc1``, ``pc2``);
    other nodes get ``other``.
    """
    classes = classes or {}
    rows = dlview(t)
    max_x = max(r[1] for r in rows)
    max_y = max(r[2] for r in rows) or 1.0
    margin = 30
    dx = (width - 2 * margin) / max(max_x - 1, 1)
    dy = (height - 2 * margin) / max_y
    pos = {v: (margin + (x - 1) * dx, height - margin - y * dy) for v, x, y, _ in rows}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        "<desc>x: node level (root = 1); y: log2(1 + number of proper descendants)</desc>",
        "<style>.start{fill:black}.pc1{fill:red}.pc2{fill:green}.other{fill:white;stroke:gray}"
        "line{stroke:gray;stroke-width:1}</style>",
    ]
    for v, _, _, par in rows:
        if par is not None:
            (x1, y1), (x2, y2) = pos[par], pos[v]
            out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>')
    for v, _, _, _ in rows:
        x, y = pos[v]
        out.append(f'<circle id="n{v}" class="{classes.get(v, "other")}" cx="{x:.2f}" cy="{y:.2f}" r="4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
