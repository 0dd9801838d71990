"""Experiment configuration: a single JSON document, fully validated before
any computation runs.  Matrices are nested row-major arrays; linear maps are
{"identity": true}, {"dense": [[...]]}, or {"coordinate_select": [[i,j],...]}.

Validation aggregates every problem it finds, anchored to JSON paths such as
problem.regularizer.grouped_lasso.weights[1]; syntax errors carry the
parser's line and column.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError

EXPERIMENTS = (
    "counterexample",
    "noncompact",
    "grouped-lasso",
    "lasso",
    "strongly-convex",
    "nuclear-regular",
    "custom",
)

_LOSSES = ("least_squares", "general_quadratic", "logistic", "poisson", "noncompact")
_MAPS = ("identity", "dense", "coordinate_select")
_REGS = ("l1", "ridge", "grouped_lasso", "nuclear_norm", "orthant")


class _Check:
    def __init__(self):
        self.errors = []

    def fail(self, path, message):
        self.errors.append(f"{path}: {message}")

    def known_keys(self, obj, path, allowed):
        for key in obj:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else key, "unknown key")

    def number(self, obj, path, *, positive=False, nonnegative=False):
        if not isinstance(obj, (int, float)) or isinstance(obj, bool):
            self.fail(path, "must be a number")
            return None
        if positive and obj <= 0:
            self.fail(path, "must be > 0")
        if nonnegative and obj < 0:
            self.fail(path, "must be >= 0")
        return obj

    def integer(self, obj, path, *, minimum=None):
        if not isinstance(obj, int) or isinstance(obj, bool):
            self.fail(path, "must be an integer")
            return None
        if minimum is not None and obj < minimum:
            self.fail(path, f"must be >= {minimum}")
        return obj

    def vector(self, obj, path):
        if not isinstance(obj, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj
        ):
            self.fail(path, "must be an array of numbers")
            return None
        return obj

    def matrix(self, obj, path):
        if (
            not isinstance(obj, list)
            or not obj
            or not all(isinstance(row, list) for row in obj)
            or len({len(row) for row in obj}) != 1
            or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool)
                for row in obj for v in row
            )
        ):
            self.fail(path, "must be a rectangular array of number rows")
            return None
        return obj


def _validate_probe(chk, probe, path):
    if not isinstance(probe, dict):
        chk.fail(path, "must be an object")
        return
    chk.known_keys(probe, path, {"radii", "directions", "seed"})
    radii = probe.get("radii")
    if radii is not None:
        if isinstance(radii, dict):
            chk.known_keys(radii, f"{path}.radii", {"start", "stop", "count"})
            for key in ("start", "stop"):
                if key not in radii:
                    chk.fail(f"{path}.radii.{key}", "missing")
                else:
                    chk.number(radii[key], f"{path}.radii.{key}")
            chk.integer(radii.get("count", 0), f"{path}.radii.count", minimum=2)
        elif isinstance(radii, list):
            chk.vector(radii, f"{path}.radii")
        else:
            chk.fail(f"{path}.radii", "must be an array or a start/stop/count object")
    if "directions" in probe:
        chk.integer(probe["directions"], f"{path}.directions", minimum=1)
    if "seed" in probe:
        chk.integer(probe["seed"], f"{path}.seed", minimum=0)


def _validate_solver(chk, solver, path):
    if not isinstance(solver, dict):
        chk.fail(path, "must be an object")
        return
    chk.known_keys(solver, path, {"step", "beta", "t0", "tol", "max_iter"})
    step = solver.get("step")
    if step is not None and step != "backtracking":
        if isinstance(step, dict) and set(step) == {"fixed"}:
            chk.number(step["fixed"], f"{path}.step.fixed", positive=True)
        else:
            chk.fail(f"{path}.step", 'must be "backtracking" or {"fixed": t}')
    if "beta" in solver:
        beta = chk.number(solver["beta"], f"{path}.beta", positive=True)
        if beta is not None and beta >= 1:
            chk.fail(f"{path}.beta", "must be < 1")
    if "t0" in solver:
        chk.number(solver["t0"], f"{path}.t0", positive=True)
    if "tol" in solver:
        chk.number(solver["tol"], f"{path}.tol", positive=True)
    if "max_iter" in solver:
        chk.integer(solver["max_iter"], f"{path}.max_iter", minimum=1)


def _validate_loss(chk, loss, path):
    chk.known_keys(loss, path, _LOSSES)
    if len(loss) != 1:
        chk.fail(path, f"must contain exactly one of {_LOSSES}")
        return
    (kind, body), = loss.items()
    if kind not in _LOSSES or not isinstance(body, dict):
        if kind in _LOSSES:
            chk.fail(f"{path}.{kind}", "must be an object")
        return
    p = f"{path}.{kind}"
    if kind == "least_squares":
        chk.known_keys(body, p, {"targets"})
        chk.vector(body.get("targets", "missing"), f"{p}.targets")
    elif kind == "general_quadratic":
        chk.known_keys(body, p, {"B", "d"})
        B = chk.matrix(body.get("B", "missing"), f"{p}.B")
        chk.vector(body.get("d", "missing"), f"{p}.d")
        if B is not None:
            arr = np.array(B, dtype=float)
            if arr.shape[0] != arr.shape[1]:
                chk.fail(f"{p}.B", "must be square")
            elif np.linalg.norm(arr - arr.T) > 1e-10 * max(1.0, np.linalg.norm(arr)):
                chk.fail(f"{p}.B", "must be symmetric")
            elif np.linalg.eigvalsh((arr + arr.T) / 2).min() <= 0:
                chk.fail(f"{p}.B", "must be positive definite")
    elif kind == "logistic":
        chk.known_keys(body, p, {"labels"})
        labels = chk.vector(body.get("labels", "missing"), f"{p}.labels")
        if labels is not None and not all(v in (-1, 1) for v in labels):
            chk.fail(f"{p}.labels", "labels must be -1 or +1")
    elif kind == "poisson":
        chk.known_keys(body, p, {"counts"})
        counts = chk.vector(body.get("counts", "missing"), f"{p}.counts")
        if counts is not None and not all(v >= 0 and v == int(v) for v in counts):
            chk.fail(f"{p}.counts", "counts must be nonnegative integers")
    else:  # noncompact
        chk.known_keys(body, p, set())


def _validate_regularizer(chk, reg, path):
    chk.known_keys(reg, path, _REGS)
    if len(reg) != 1:
        chk.fail(path, f"must contain exactly one of {_REGS}")
        return
    (kind, body), = reg.items()
    if kind not in _REGS or not isinstance(body, dict):
        if kind in _REGS:
            chk.fail(f"{path}.{kind}", "must be an object")
        return
    p = f"{path}.{kind}"
    if kind in ("l1", "ridge"):
        chk.known_keys(body, p, {"weight"})
        chk.number(body.get("weight", "missing"), f"{p}.weight", nonnegative=True)
    elif kind == "grouped_lasso":
        chk.known_keys(body, p, {"groups", "weights"})
        groups = body.get("groups")
        weights = body.get("weights")
        if not isinstance(groups, list) or not all(isinstance(J, list) for J in groups):
            chk.fail(f"{p}.groups", "must be an array of index arrays")
            groups = None
        weights = chk.vector(weights if weights is not None else "missing", f"{p}.weights")
        if weights is not None:
            for i, w in enumerate(weights):
                if w < 0:
                    chk.fail(f"{p}.weights[{i}]", "group weights must be >= 0")
        if groups is not None and weights is not None and len(groups) != len(weights):
            chk.fail(p, "groups and weights must have the same length")
        if groups is not None:
            flat = sorted(i for J in groups for i in J)
            if flat != list(range(len(flat))):
                chk.fail(f"{p}.groups", "groups must partition 0..n-1")
    elif kind == "nuclear_norm":
        chk.known_keys(body, p, set())
    else:  # orthant
        chk.known_keys(body, p, {"signs"})
        signs = chk.vector(body.get("signs", "missing"), f"{p}.signs")
        if signs is not None and not all(v in (-1, 0, 1) for v in signs):
            chk.fail(f"{p}.signs", "signs must be -1, 0, or +1")


def _validate_problem(chk, problem, path):
    if not isinstance(problem, dict):
        chk.fail(path, "must be an object")
        return
    allowed = {"shape", "loss", "linear_map", "c", "regularizer", "x0", "feasible_point"}
    chk.known_keys(problem, path, allowed)

    shape = problem.get("shape")
    if shape is None:
        chk.fail(f"{path}.shape", "missing")
    elif not isinstance(shape, dict) or set(shape) not in ({"vector"}, {"matrix"}):
        chk.fail(f"{path}.shape", 'must be {"vector": n} or {"matrix": [m, n]}')
    elif "vector" in shape:
        chk.integer(shape["vector"], f"{path}.shape.vector", minimum=1)
    else:
        dims = shape["matrix"]
        if not (isinstance(dims, list) and len(dims) == 2):
            chk.fail(f"{path}.shape.matrix", "must be [m, n]")
        else:
            for i, v in enumerate(dims):
                chk.integer(v, f"{path}.shape.matrix[{i}]", minimum=1)

    loss = problem.get("loss")
    if loss is None:
        chk.fail(f"{path}.loss", "missing")
    elif isinstance(loss, dict):
        _validate_loss(chk, loss, f"{path}.loss")
    else:
        chk.fail(f"{path}.loss", "must be an object")

    lmap = problem.get("linear_map")
    if lmap is None:
        chk.fail(f"{path}.linear_map", "missing")
    elif not isinstance(lmap, dict) or len(lmap) != 1 or next(iter(lmap)) not in _MAPS:
        chk.fail(f"{path}.linear_map", f"must contain exactly one of {_MAPS}")
    else:
        (kind, body), = lmap.items()
        if kind == "dense":
            chk.matrix(body, f"{path}.linear_map.dense")
        elif kind == "coordinate_select":
            ok = isinstance(body, list) and all(
                isinstance(i, int) or (isinstance(i, list) and all(isinstance(k, int) for k in i))
                for i in body
            )
            if not ok:
                chk.fail(f"{path}.linear_map.coordinate_select", "must be an array of indices")

    reg = problem.get("regularizer")
    if reg is None:
        chk.fail(f"{path}.regularizer", "missing")
    elif isinstance(reg, dict):
        _validate_regularizer(chk, reg, f"{path}.regularizer")
    else:
        chk.fail(f"{path}.regularizer", "must be an object")


def validate_config_data(data) -> dict:
    """Validate a parsed configuration object; returns it unchanged."""
    chk = _Check()
    if not isinstance(data, dict):
        raise ConfigError(["top level: must be a JSON object"])
    chk.known_keys(data, "", {"experiment", "seed", "probe", "solver", "problem",
                              "noncompact", "output"})

    name = data.get("experiment")
    if name is None:
        chk.fail("experiment", "missing")
    elif name not in EXPERIMENTS:
        chk.fail("experiment", f"unknown experiment {name!r}; choose from {EXPERIMENTS}")

    if "seed" in data:
        chk.integer(data["seed"], "seed", minimum=0)
    if "probe" in data:
        _validate_probe(chk, data["probe"], "probe")
    if "solver" in data:
        _validate_solver(chk, data["solver"], "solver")
    if "output" in data and not isinstance(data["output"], str):
        chk.fail("output", "must be a string path")

    if "noncompact" in data:
        block = data["noncompact"]
        if name not in (None, "noncompact"):
            chk.fail("noncompact", "only valid for the noncompact experiment")
        elif not isinstance(block, dict):
            chk.fail("noncompact", "must be an object")
        else:
            chk.known_keys(block, "noncompact", {"x_start", "x_stop", "count", "y"})
            for key in ("x_start", "x_stop", "y"):
                if key in block:
                    chk.number(block[key], f"noncompact.{key}")
            if "count" in block:
                chk.integer(block["count"], "noncompact.count", minimum=2)

    if name == "custom":
        if "problem" not in data:
            chk.fail("problem", "missing (required for the custom experiment)")
        else:
            _validate_problem(chk, data["problem"], "problem")
    elif "problem" in data:
        chk.fail("problem", "only the custom experiment accepts an inline problem")

    if chk.errors:
        raise ConfigError(chk.errors)
    return data


def validate_config(path) -> dict:
    """Load and validate a JSON config file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from exc
    return validate_config_data(data)


def radii_from_config(spec, default):
    if spec is None:
        return np.asarray(default, dtype=float)
    if isinstance(spec, dict):
        return np.logspace(
            np.log10(spec["start"]), np.log10(spec["stop"]), spec["count"]
        )
    return np.asarray(spec, dtype=float)
