"""JSON Schemas (draft 2020-12) for the machine-readable CLI output, version v1.

Exact integers that may exceed 2^53 (energies, captured counts inside the
trace) are serialised as decimal strings.
"""

_NUM = {"type": ["number", "null"]}
_EXACT = {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"}
_HEAD = {"schema": {"const": "v1"}, "command": {"type": "string"}}


def _obj(props: dict, required) -> dict:
    return {"type": "object", "properties": {**_HEAD, **props},
            "required": ["schema", "command", *required]}


NORM = _obj({
    "p": {"type": "integer"},
    "set_size": {"type": "integer", "minimum": 0},
    "norm": {"type": "number", "minimum": 0},
    "err_bound": {"type": "number", "minimum": 0},
    "spectrum": {"type": "array", "items": {
        "type": "object",
        "properties": {"gamma": {"type": "integer"}, "re": {"type": "number"},
                       "im": {"type": "number"}, "abs": {"type": "number"}},
        "required": ["gamma", "re", "im", "abs"]}},
}, ["p", "set_size", "norm", "err_bound"])

ENERGY = _obj({
    "k": {"type": "integer", "minimum": 1},
    "domain": {"enum": ["integers", "residues"]},
    "set_size": {"type": "integer"},
    "t_k": _EXACT,
    "spectral_estimate": _NUM,
    "profile": {"type": "array", "items": {
        "type": "array", "prefixItems": [{"type": "integer"}, _EXACT],
        "minItems": 2, "maxItems": 2}},
}, ["k", "domain", "set_size", "t_k"])

VERIFY = _obj({
    "suite": {"type": "string"},
    "seed": {"type": "integer"},
    "trials": {"type": "integer"},
    "passed": {"type": "integer"},
    "failed": {"type": "integer"},
    "ok": {"type": "boolean"},
    "violations": {"type": "array"},
}, ["suite", "trials", "passed", "failed", "ok", "violations"])

_PAIR = {"type": "object",
         "properties": {"lhs": {"type": ["number", "string", "null"]},
                        "rhs": {"type": ["number", "string", "null"]},
                        "holds": {"type": ["boolean", "null"]},
                        "note": {"type": "string"}}}

TRACE = _obj({
    "p": {"type": "integer"}, "set_size": {"type": "integer"},
    "K": {"type": "number"}, "K_err": {"type": "number"},
    "eps": {"type": "number"}, "C": {"type": "number"},
    "d_eps": {"type": "number"}, "eta": {"type": "number"},
    "M": {"type": "integer"}, "m": {"type": "integer"}, "l_0": {"type": "integer"},
    "I": {"type": "integer"}, "k": {"type": ["integer", "null"]},
    "branch": {"enum": ["degenerate", "sparse_shell", "scattered"]},
    "localization": {"type": ["object", "null"]},
    "ap_cover": {"type": "object"},
    "shell_sizes": {"type": "array", "items": {"type": "integer"}},
    "deltas": {"type": "array", "items": {"type": "integer"}},
    "inequalities": {"type": "object", "additionalProperties": {"type": "object"},
                     "properties": {"trivial": _PAIR}, "required": ["trivial"]},
    "verdict": {"type": "string"},
}, ["p", "set_size", "K", "eps", "C", "d_eps", "eta", "M", "m", "l_0", "I", "branch",
    "inequalities", "verdict"])

SEARCH = _obj({
    "results": {"type": "array", "items": {
        "type": "object",
        "properties": {"p": {"type": "integer"}, "n": {"type": "integer"},
                       "strategy": {"enum": ["exhaustive", "local_search"]},
                       "best_set": {"type": "array", "items": {"type": "integer"}},
                       "best_norm": {"type": "number"},
                       "evaluations": {"type": "integer"},
                       "budget_exhausted": {"type": "boolean"},
                       "bound_comparisons": {"type": "object"}},
        "required": ["p", "n", "strategy", "best_set", "best_norm", "evaluations",
                     "budget_exhausted", "bound_comparisons"]}},
}, ["results"])

QUAD = _obj({
    "value": {"type": "number"},
    "samples_used": {"type": "integer"},
    "convergence_gap": _NUM,
}, ["value", "samples_used", "convergence_gap"])

BY_COMMAND = {"norm": NORM, "energy": ENERGY, "verify": VERIFY, "trace": TRACE,
              "search": SEARCH, "quad": QUAD}
