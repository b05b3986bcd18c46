"""Versioned JSON text format for networks.

Layout::

    {
      "format": "requnet-network",
      "version": 1,
      "activation_power": 2,
      "input_dim": 1,
      "layers": [
        {"rows": 6, "cols": 1, "encoding": "coo",
         "entries": [[i, j, value], ...], "bias": [...],
         "passthrough": [row, ...]},
        ...
      ]
    }

A layer may use ``"encoding": "dense"`` with ``"entries"`` a list of rows.
Floats are written with Python's shortest round-trip repr, so reading a file
back reproduces every entry bit for bit.
"""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np
import scipy.sparse as sp

from .errors import ParseError
from .network import Activation, LayeredNetwork

__all__ = ["serialize", "deserialize", "FORMAT_NAME", "FORMAT_VERSION", "save", "load"]

FORMAT_NAME = "requnet-network"
FORMAT_VERSION = 1


def _to_document(net: LayeredNetwork) -> dict:
    layers = []
    for k, (A, b) in enumerate(net.layers):
        coo = A.tocoo()
        order = np.lexsort((coo.col, coo.row))
        entries = [
            [int(coo.row[t]), int(coo.col[t]), float(coo.data[t])] for t in order
        ]
        layer = {
            "rows": int(A.shape[0]),
            "cols": int(A.shape[1]),
            "encoding": "coo",
            "entries": entries,
            "bias": [float(v) for v in b],
        }
        if k < len(net.layers) - 1:
            layer["passthrough"] = sorted(int(r) for r in net.passthrough[k])
        layers.append(layer)
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "activation_power": int(net.s),
        "input_dim": int(net.input_dim),
        "layers": layers,
    }


def serialize(net: LayeredNetwork, indent: int | None = None) -> str:
    """Encode a network as a JSON document string."""
    return json.dumps(_to_document(net), indent=indent, allow_nan=False)


def _need(obj: dict, key: str, typ, loc: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", loc)
    val = obj[key]
    if typ is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ParseError(f"field {key!r} must be an integer", loc)
    elif not isinstance(val, typ):
        raise ParseError(f"field {key!r} has wrong type {type(val).__name__}", loc)
    return val


def _number(v: Any, loc: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError("expected a number", loc)
    f = float(v)
    if not math.isfinite(f):
        raise ParseError("non-finite number", loc)
    return f


def deserialize(document: str | dict) -> LayeredNetwork:
    """Decode a network produced by :func:`serialize`.

    Raises
    ------
    ParseError
        For malformed JSON, schema violations, or layer dimensions that do not
        chain; the error names the offending layer.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object", "$")
    if doc.get("format") != FORMAT_NAME:
        raise ParseError(f"unknown format {doc.get('format')!r}", "format")
    version = _need(doc, "version", int, "$")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version}", "version")
    s = _need(doc, "activation_power", int, "$")
    if s < 1:
        raise ParseError("activation_power must be >= 1", "activation_power")
    layers_doc = _need(doc, "layers", list, "$")
    if not layers_doc:
        raise ParseError("at least one layer is required", "layers")
    prev = doc.get("input_dim")
    layers, tags = [], []
    for k, ld in enumerate(layers_doc):
        loc = f"layers[{k}]"
        rows = _need(ld, "rows", int, loc)
        cols = _need(ld, "cols", int, loc)
        if rows < 0 or cols < 0:
            raise ParseError("negative dimension", loc)
        if prev is not None and cols != prev:
            raise ParseError(
                f"layer {k} has {cols} columns but the previous layer has {prev} outputs", loc
            )
        enc = ld.get("encoding", "coo")
        entries = _need(ld, "entries", list, loc)
        if enc == "coo":
            r_idx, c_idx, vals = [], [], []
            for t, e in enumerate(entries):
                eloc = f"{loc}.entries[{t}]"
                if not isinstance(e, list) or len(e) != 3:
                    raise ParseError("COO entry must be [row, col, value]", eloc)
                i, j = e[0], e[1]
                if not (isinstance(i, int) and isinstance(j, int)) or not (0 <= i < rows and 0 <= j < cols):
                    raise ParseError("entry index out of range", eloc)
                r_idx.append(i)
                c_idx.append(j)
                vals.append(_number(e[2], eloc))
            A = sp.csr_matrix((vals, (r_idx, c_idx)), shape=(rows, cols))
        elif enc == "dense":
            if len(entries) != rows:
                raise ParseError("dense entries must have one list per row", loc)
            arr = np.zeros((rows, cols))
            for i, row in enumerate(entries):
                if not isinstance(row, list) or len(row) != cols:
                    raise ParseError("dense row has wrong length", f"{loc}.entries[{i}]")
                arr[i] = [_number(v, f"{loc}.entries[{i}]") for v in row]
            A = arr
        else:
            raise ParseError(f"unknown encoding {enc!r}", loc)
        bias = _need(ld, "bias", list, loc)
        if len(bias) != rows:
            raise ParseError(f"bias has length {len(bias)}, expected {rows}", f"{loc}.bias")
        b = np.array([_number(v, f"{loc}.bias") for v in bias])
        if k < len(layers_doc) - 1:
            pt = ld.get("passthrough", [])
            if not isinstance(pt, list) or any(not isinstance(r, int) or not 0 <= r < rows for r in pt):
                raise ParseError("passthrough must list valid row indices", f"{loc}.passthrough")
            tags.append(frozenset(pt))
        layers.append((A, b))
        prev = rows
    return LayeredNetwork(layers, Activation(s), tags)


def save(net: LayeredNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(net))
        fh.write("\n")


def load(path) -> LayeredNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize(fh.read())
