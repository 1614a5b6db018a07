"""Scenario files: strict JSON parsing shared by every CLI subcommand.

Schema (unknown keys are rejected at every level):

    {
      "n": 3, "k": 3,
      "marginals":   [{"family": "Pareto", "params": {"alpha": 2, "scale": 1}}, ...],
      "correlation": "independent" | [[1.0, ...], ...],
      "weights":     [{"kind": "Uniform", "params": {"omega": 1.0}}, ...],
      "diagnostics": {                       # optional
        "t_grid": {"from": 10, "to": 1e3, "points": 6},
        "L": {"default": 1.0} | {"pairs": {"0,1": 2.0}},
        "x_values": [1.0]
      }
    }

Two templates ship with the package: ``frechet_pareto`` (three independent
unit-scale Pareto(2) risks with uniform weights) and ``lcr_lognormal`` (a
large-claims-reinsurance default scenario: five correlated standard
log-normal claims, the three largest ceded, weights = 1 - recovery rate
drawn from Beta(2, 3)).
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .dependence import Scenario
from .errors import ValidationError
from .marginals import Exponential, LogNormal, Pareto, Weibullian
from .montecarlo import DiagnosticsConfig
from .weights import Beta, Degenerate, ModelA, Uniform, WeightVectorSpec

__all__ = ["parse_scenario", "load_scenario", "load_template", "template_path",
           "TEMPLATES"]

TEMPLATES = ("frechet_pareto", "lcr_lognormal")

_MARGINAL_FAMILIES = {
    "Pareto": (Pareto, {"alpha", "scale"}, {"alpha"}),
    "LogNormal": (LogNormal, {"mu", "sigma"}, set()),
    "Exponential": (Exponential, {"rate"}, set()),
    "Weibullian": (Weibullian, {"rate", "shape"}, {"rate", "shape"}),
}

_WEIGHT_KINDS = {
    "Degenerate": (Degenerate, {"c"}, {"c"}),
    "Uniform": (Uniform, {"omega"}, set()),
    "Beta": (Beta, {"a", "b", "omega"}, {"a", "b"}),
    "ModelA": (ModelA, {"omega", "p", "eta", "sub"}, {"omega", "p", "eta"}),
}


def _require_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where} must be an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"unknown key {sorted(unknown)[0]!r} in {where}")
    missing = required - set(obj)
    if missing:
        raise ValidationError(f"missing key {sorted(missing)[0]!r} in {where}")


def _parse_marginal(entry, where):
    _require_keys(entry, {"family", "params"}, {"family", "params"}, where)
    family = entry["family"]
    if family not in _MARGINAL_FAMILIES:
        raise ValidationError(
            f"unknown marginal family {family!r} in {where}; "
            f"expected one of {sorted(_MARGINAL_FAMILIES)}")
    cls, allowed, required = _MARGINAL_FAMILIES[family]
    params = entry["params"]
    _require_keys(params, allowed, required, f"{where}.params")
    return cls(**{key: float(value) for key, value in params.items()})


def _parse_weight(entry, where):
    _require_keys(entry, {"kind", "params"}, {"kind", "params"}, where)
    kind = entry["kind"]
    if kind not in _WEIGHT_KINDS:
        raise ValidationError(
            f"unknown weight kind {kind!r} in {where}; "
            f"expected one of {sorted(_WEIGHT_KINDS)}")
    cls, allowed, required = _WEIGHT_KINDS[kind]
    params = entry["params"]
    _require_keys(params, allowed, required, f"{where}.params")
    kwargs = {}
    for key, value in params.items():
        if key == "sub":
            kwargs[key] = _parse_weight(value, f"{where}.params.sub")
        else:
            kwargs[key] = float(value)
    return cls(**kwargs)


def _parse_diagnostics(doc):
    _require_keys(doc, {"t_grid", "L", "x_values"}, set(), "diagnostics")
    kwargs = {}
    if "t_grid" in doc:
        grid = doc["t_grid"]
        _require_keys(grid, {"from", "to", "points"},
                      {"from", "to", "points"}, "diagnostics.t_grid")
        kwargs["t_grid"] = np.geomspace(
            float(grid["from"]), float(grid["to"]), int(grid["points"]))
    if "L" in doc:
        spec = doc["L"]
        _require_keys(spec, {"default", "pairs"}, set(), "diagnostics.L")
        if "default" in spec:
            kwargs["l_default"] = float(spec["default"])
        if "pairs" in spec:
            pairs = {}
            for key, value in spec["pairs"].items():
                try:
                    i, j = (int(part) for part in key.split(","))
                except ValueError:
                    raise ValidationError(
                        f"diagnostics.L.pairs key {key!r} must look like 'i,j'")
                pairs[(i, j)] = float(value)
            kwargs["l_pairs"] = pairs
    if "x_values" in doc:
        kwargs["x_values"] = tuple(float(v) for v in doc["x_values"])
    return DiagnosticsConfig(**kwargs)


def parse_scenario(doc):
    """Build (Scenario, DiagnosticsConfig | None) from a decoded document."""
    _require_keys(doc, {"n", "k", "marginals", "correlation", "weights",
                        "diagnostics"},
                  {"n", "k", "marginals", "correlation", "weights"},
                  "scenario")
    n = int(doc["n"])
    k = int(doc["k"])
    marginals_doc = doc["marginals"]
    if not isinstance(marginals_doc, list):
        raise ValidationError("'marginals' must be an array")
    marginals = tuple(_parse_marginal(entry, f"marginals[{idx}]")
                      for idx, entry in enumerate(marginals_doc))
    corr_doc = doc["correlation"]
    if corr_doc == "independent":
        corr = None
    elif isinstance(corr_doc, list):
        corr = np.asarray(corr_doc, dtype=float)
    else:
        raise ValidationError(
            "'correlation' must be a matrix or the string \"independent\"")
    weights_doc = doc["weights"]
    if not isinstance(weights_doc, list):
        raise ValidationError("'weights' must be an array")
    models = tuple(_parse_weight(entry, f"weights[{idx}]")
                   for idx, entry in enumerate(weights_doc))
    scenario = Scenario(n=n, k=k, marginals=marginals, corr=corr,
                        weights=WeightVectorSpec(models=models))
    diagnostics = (_parse_diagnostics(doc["diagnostics"])
                   if "diagnostics" in doc else None)
    return scenario, diagnostics


def template_path(name):
    """Filesystem path of a shipped template scenario."""
    if name not in TEMPLATES:
        raise ValidationError(
            f"unknown template {name!r}; shipped templates: {TEMPLATES}")
    return resources.files("ordertail.templates") / f"{name}.json"


def load_template(name):
    """Parsed (Scenario, DiagnosticsConfig | None) for a shipped template."""
    with template_path(name).open("r", encoding="utf-8") as handle:
        return parse_scenario(json.load(handle))


def load_scenario(path):
    """Load a scenario file; ``template:<name>`` resolves a shipped template.

    Raises:
        ValidationError: unreadable file, malformed JSON, or schema violation
            (the message is identical across all subcommands).
    """
    if isinstance(path, str) and path.startswith("template:"):
        return load_template(path.removeprefix("template:"))
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario file {path} is not valid JSON: {exc}") from None
    return parse_scenario(doc)
