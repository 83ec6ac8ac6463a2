"""JSON scenario files.

Example::

    {
      "prior_true": {"kind": "binomial", "n": 100, "p": 0.5},
      "prior_pricing": {"kind": "uniform", "n": 100},
      "lambda": 1.5,
      "costs": {"c_s": 1.0, "c_p": 2.0, "c_q": 0.1},
      "k_star": 50,
      "replications": 100000,
      "seed": 7,
      "sweep": {"x_min": 0, "x_max": 100, "x_step": 1, "k_star": [20, 50, 80], "p": [0.5]}
    }

``prior_pricing`` defaults to ``prior_true``; ``sweep`` is only read by the
``curve`` command. Unknown keys are rejected everywhere.
"""

import json

import jsonschema

from .exceptions import InputError
from .laplace import PrivacyParams
from .pricing import MarketCosts
from .priors import AvailabilityPrior
from .simulator import Scenario

MAX_N = 100_000

_PRIOR = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["unit", "binomial", "uniform"]},
        "n": {"type": "integer", "minimum": 0, "maximum": MAX_N},
        "p": {"type": "number", "minimum": 0, "maximum": 1},
    },
    "required": ["kind", "n"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "prior_true": _PRIOR,
        "prior_pricing": _PRIOR,
        "lambda": {"type": "number", "exclusiveMinimum": 0},
        "costs": {
            "type": "object",
            "properties": {
                "c_s": {"type": "number", "exclusiveMinimum": 0},
                "c_p": {"type": "number", "exclusiveMinimum": 0},
                "c_q": {"type": "number", "minimum": 0},
            },
            "required": ["c_s", "c_p"],
            "additionalProperties": False,
        },
        "k_star": {"type": "integer", "minimum": 0},
        "replications": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "sweep": {
            "type": "object",
            "properties": {
                "x_min": {"type": "number"},
                "x_max": {"type": "number"},
                "x_step": {"type": "number", "exclusiveMinimum": 0},
                "k_star": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "p": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
            },
            "additionalProperties": False,
        },
    },
    "required": ["prior_true", "lambda", "costs", "k_star"],
    "additionalProperties": False,
}


def validate(doc):
    """Raise :class:`InputError` naming the offending key if ``doc`` violates the schema."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise InputError(f"config error at {where}: {err.message}")


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from None
    validate(doc)
    return doc


def _prior(d):
    return AvailabilityPrior(d["kind"], d["n"], d.get("p"))


def scenario_from_config(doc, replications=None, seed=None):
    """Build a :class:`Scenario`; non-``None`` keyword arguments override the document."""
    prior_true = _prior(doc["prior_true"])
    prior_pricing = _prior(doc.get("prior_pricing", doc["prior_true"]))
    costs = doc["costs"]
    return Scenario(
        prior_true=prior_true,
        prior_pricing=prior_pricing,
        privacy=PrivacyParams(doc["lambda"]),
        costs=MarketCosts(costs["c_s"], costs["c_p"], costs.get("c_q", 0.0)),
        k_star=doc["k_star"],
        replications=replications if replications is not None else doc.get("replications", 10_000),
        seed=seed if seed is not None else doc.get("seed", 0),
    )
