"""Snapshot schema (version v1) shared by the CLI and the renderer.

Spin:    {"schema": "v1", "model": "spin", "n", "d", "L", "values", ["angles"]}
Loop:    {"schema": "v1", "model": "loop", "circuit", "edges"}
Hardhex: {"schema": "v1", "model": "hardhex", "dims", "occupied"}
"""

from __future__ import annotations

import json

from .loop_core import LoopConfig
from .spin_core import SpinConfig

SCHEMA = "v1"


def export_snapshot(state, path) -> dict:
    """Write a model state as schema-v1 JSON; returns the payload."""
    if hasattr(state, "to_json"):
        payload = state.to_json()
    else:
        raise TypeError(f"cannot snapshot object of type {type(state)!r}")
    if payload.get("schema") != SCHEMA:
        raise ValueError("snapshot payload must carry schema v1")
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
    return payload


def import_snapshot(path):
    """Read a v1 snapshot back into the corresponding state object."""
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported snapshot schema {data.get('schema')!r}")
    model = data.get("model")
    if model == "spin":
        return SpinConfig.from_json(data)
    if model == "loop":
        return LoopConfig.from_json(data)
    if model == "hardhex":
        from .representations.hardhex import HardHexagonChain, TriangularTorusPatch

        patch = TriangularTorusPatch(*data["dims"])
        chain = HardHexagonChain(patch, lam=1.0)
        for (i, j) in data["occupied"]:
            chain.occupied[patch.site(i, j)] = True
        return chain
    raise ValueError(f"unknown snapshot model {model!r}")
