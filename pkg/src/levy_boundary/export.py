"""Plain-text and JSON serialisations of pipeline results."""
from __future__ import annotations

import json
from typing import Dict, List, Mapping, Tuple

from .spectral import TransitionMatrix
from .typedyn import TypeCensus, TypeClassification


def dumps(doc) -> str:
    """Deterministic JSON: fixed key order, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def census_map(census: Mapping[int, int]) -> Dict[str, int]:
    """``{code: count}`` with codes as decimal strings, ascending by code."""
    return TypeCensus(census).to_json_dict()


def read_census(text: str) -> TypeCensus:
    return TypeCensus.from_json_dict(json.loads(text))


def stable_set_text(order, classification: TypeClassification) -> str:
    """One ``<code> <class>`` line per stable type, in row order."""
    return "".join(f"{c} {classification.class_of(c)}\n" for c in order)


def parse_stable_set_text(text: str) -> List[Tuple[int, str]]:
    out = []
    for line in text.splitlines():
        if line.strip():
            code, cls = line.split()
            out.append((int(code), cls))
    return out


def matrix_triplets(M: TransitionMatrix) -> str:
    """``rows cols nnz`` header, then one 0-based ``i j value`` line per nonzero."""
    trips = M.triplets()
    rows, cols = M.shape
    lines = [f"{rows} {cols} {len(trips)}"]
    lines.extend(f"{i} {j} {v}" for i, j, v in trips)
    return "\n".join(lines) + "\n"


def parse_triplets(text: str):
    lines = text.splitlines()
    rows, cols, nnz = (int(x) for x in lines[0].split())
    trips = [tuple(int(x) for x in line.split()) for line in lines[1:] if line.strip()]
    if len(trips) != nnz:
        raise ValueError(f"header declares {nnz} entries, found {len(trips)}")
    return rows, cols, trips


def matrix_metadata(M: TransitionMatrix) -> Dict[str, object]:
    t, e, a = M.sizes
    return {
        "rows": M.shape[0],
        "cols": M.shape[1],
        "index_base": 0,
        "order": list(M.order),
        "blocks": {
            "transient": [0, t],
            "core": [t, t + e],
            "absorbing": [t + e, t + e + a],
        },
    }
