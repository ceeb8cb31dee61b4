"""Manifold config files (JSON) and manifold resolution by name or path.

Schema::

    {
      "name": "kenmotsu-3d",              # required, string
      "dimension": 3,                      # required, integer >= 1
      "signature": 0,                      # optional, number of negative directions
      "metric": {"0,0": "1", "1,1": "exp(2*x0)", "2,2": "exp(2*x0)*sin(x1)^2"},
      "xi": ["1", "0", "0"],               # optional, one expression per coordinate
      "k": -1,                             # required when xi is given
      "epsilon": 1,                        # required when xi is given, +1 or -1
      "chart_box": [[-0.5, 0.5], [0.3, 2.8], [0, 1]],
      "class_tag": "kenmotsu"              # optional, default "generic"
    }

Metric keys are upper-triangle pairs ``"i,j"`` with ``i <= j``; missing pairs
are zero.
"""

from __future__ import annotations

import json
from pathlib import Path

from .expr import ExprError, parse, to_source
from .geometry import ManifoldSpec
from .nk import CLASS_TAGS, class_allows, registry_by_name

_KEYS = {"name", "dimension", "signature", "metric", "xi", "k", "epsilon", "chart_box",
         "class_tag", "description"}


class ConfigError(ValueError):
    pass


def _expr(src, n, where):
    if not isinstance(src, str):
        raise ConfigError(f"{where}: expression must be a string")
    try:
        return parse(src, n)
    except ExprError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def spec_from_dict(doc: dict) -> ManifoldSpec:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    for key in ("name", "dimension", "metric", "chart_box"):
        if key not in doc:
            raise ConfigError(f"missing key {key!r}")
    n = doc["dimension"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("dimension must be a positive integer")
    if not isinstance(doc["metric"], dict) or not doc["metric"]:
        raise ConfigError("metric must be a non-empty object")
    metric = {}
    for key, src in doc["metric"].items():
        try:
            i, j = (int(part) for part in key.split(","))
        except ValueError:
            raise ConfigError(f"metric key {key!r} is not of the form 'i,j'") from None
        if not 0 <= i <= j < n:
            raise ConfigError(f"metric key {key!r} is not an upper-triangle pair below {n}")
        metric[(i, j)] = _expr(src, n, f"metric[{key}]")
    box = doc["chart_box"]
    if (not isinstance(box, list) or len(box) != n
            or any(not isinstance(b, list) or len(b) != 2 or not b[0] < b[1] for b in box)):
        raise ConfigError(f"chart_box needs {n} intervals [lo, hi] with lo < hi")
    xi = doc.get("xi")
    k = doc.get("k")
    eps = doc.get("epsilon")
    if xi is not None:
        if not isinstance(xi, list) or len(xi) != n:
            raise ConfigError(f"xi needs {n} expressions")
        xi = [_expr(s, n, f"xi[{i}]") for i, s in enumerate(xi)]
        if not isinstance(k, (int, float)) or isinstance(k, bool):
            raise ConfigError("k must be a number when xi is given")
        if eps not in (1, -1):
            raise ConfigError("epsilon must be 1 or -1 when xi is given")
    tag = doc.get("class_tag", "generic")
    if tag not in CLASS_TAGS:
        raise ConfigError(f"class_tag must be one of {', '.join(CLASS_TAGS)}")
    if xi is not None and not class_allows(tag, k, eps):
        raise ConfigError(f"(k, epsilon) = ({k}, {eps}) does not fit class {tag}")
    return ManifoldSpec(
        name=str(doc["name"]), n=n, metric=metric,
        box=[(float(lo), float(hi)) for lo, hi in box], xi=xi,
        k=float(k) if xi is not None else None, eps=eps if xi is not None else None,
        class_tag=tag, signature=doc.get("signature"), description=doc.get("description", ""),
    )


def load_config(path) -> ManifoldSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return spec_from_dict(doc)


def spec_to_dict(spec: ManifoldSpec) -> dict:
    doc = {
        "name": spec.name, "dimension": spec.n, "signature": spec.signature,
        "metric": spec.metric_source(), "chart_box": [list(b) for b in spec.box],
        "class_tag": spec.class_tag,
    }
    if spec.has_xi:
        doc.update(xi=[to_source(a) for a in spec.xi], k=spec.k, epsilon=spec.eps)
    return doc


def resolve_manifold(selector: str) -> ManifoldSpec:
    """A built-in entry by name, otherwise a config file path."""
    builtins = registry_by_name()
    if selector in builtins:
        return builtins[selector]
    if Path(selector).exists():
        return load_config(selector)
    raise ConfigError(f"unknown manifold {selector!r}; built-ins: {', '.join(builtins)}")
