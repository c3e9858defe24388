"""Command-line entry point with JSON/CSV input and output.

Each subcommand reads one JSON document (``--input``), computes a verdict or
an artifact, prints deterministic JSON to stdout, and optionally writes it to
``--output`` (grid-function results additionally get a CSV sibling with one
coordinate column per dimension plus a ``value`` column).

Exit codes:
    0  the computation ran and produced a verdict (even a negative one);
    1  a precondition failed or the problem is infeasible (the JSON carries a
       machine-readable diagnosis);
    2  the input could not be read or does not match the command's schema
       (the JSON names the offending field).

Extended reals are encoded as numbers, with the strings ``"inf"`` and
``"-inf"`` for the two infinities, in both JSON and CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .conjugation import (
    ConjugationOp,
    apply_linear,
    conj_sesqui,
    funk_kernel,
    is_in_range,
)
from .control import (
    MaupertuisProblem,
    asymmetrize,
    invert_terminal_cost,
    largest_subsolution_check,
    maupertuis_dp,
    space_slice_kernel,
    value_function,
)
from .core import (
    GridFunction,
    PointSet,
    PreconditionError,
    SizeError,
    as_point,
    decode_values,
    encode_extreal,
    encode_values,
)
from .kernels import (
    GramKernel,
    check_permutation_positivity,
    factorize,
    gram_on,
    is_tpsd_pairwise,
    kernel_from_spec,
)
from .linear_theory import (
    FunctionFamily,
    is_idempotent,
    is_von_neumann_regular,
    max_kernel_cG,
)
from .representer import (
    InfeasibleConstraintsError,
    SampleSet,
    build_f0,
    feasible_witnesses,
    reconstruct_stopping_cost,
    regress,
)

COMMANDS = (
    "check-tpsd",
    "factorize",
    "conjugate",
    "membership",
    "funk",
    "cg-kernel",
    "regularity",
    "interpolate",
    "regress",
    "maupertuis",
    "value-function",
    "invert-stopping-cost",
    "invert-terminal-cost",
)


@dataclass(frozen=True)
class RunConfig:
    """One reproducible CLI invocation.

    Attributes:
        command: Subcommand name (one of COMMANDS).
        input_path: JSON input document.
        output_path: Optional JSON output destination (CSV sibling for grid
            functions).
        seed: Seed for any randomized check; fixed seed gives bitwise
            identical output.
        tolerance: Numerical tolerance override for verdicts.
    """

    command: str
    input_path: str
    output_path: str | None = None
    seed: int = 0
    tolerance: float = 1e-9


class _SchemaError(Exception):
    """Input document does not match the command's schema."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(message)
        self.field = field


# ---------------------------------------------------------------------------
# Schema helpers.
# ---------------------------------------------------------------------------


def _need(data: Mapping, field: str, parent: str = "") -> object:
    path = f"{parent}.{field}" if parent else field
    if not isinstance(data, Mapping):
        raise _SchemaError(parent or field, "expected a JSON object")
    if field not in data:
        raise _SchemaError(path, "missing required field")
    return data[field]


def _points(raw: object, field: str, has_time: bool = False) -> PointSet:
    if not isinstance(raw, Sequence) or isinstance(raw, (str, bytes)):
        raise _SchemaError(field, "expected a list of points")
    try:
        return PointSet.make(list(raw), has_time=has_time)
    except (TypeError, ValueError) as exc:
        raise _SchemaError(field, str(exc)) from exc


def _values(raw: object, field: str) -> np.ndarray:
    try:
        return decode_values(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise _SchemaError(field, str(exc)) from exc


def _kernel(data: Mapping, field: str = "kernel"):
    spec = _need(data, field)
    if not isinstance(spec, Mapping):
        raise _SchemaError(field, "expected a kernel object")
    try:
        return kernel_from_spec(spec)
    except (TypeError, ValueError, KeyError) as exc:
        raise _SchemaError(field, str(exc)) from exc


def _kernel_domain(data: Mapping, kernel, field: str = "points") -> PointSet:
    """The grid a kernel-based operator acts on.

    Gram kernels carry their grid; closed-form kernels need explicit points.
    """
    if field in data:
        return _points(data[field], field)
    if isinstance(kernel, GramKernel):
        return kernel.points
    raise _SchemaError(field, "closed-form kernels require explicit points")


def _grid_function(domain: PointSet, raw: object, field: str) -> GridFunction:
    values = _values(raw, field)
    if values.shape != (len(domain),):
        raise _SchemaError(
            field, f"expected {len(domain)} values, got {values.shape}"
        )
    return GridFunction(domain, values)


def _samples(data: Mapping, candidates_field: str = "dual_candidates"):
    raw = _need(data, "samples")
    xs = _points(_need(raw, "xs", "samples"), "samples.xs")
    ys = _values(_need(raw, "ys", "samples"), "samples.ys")
    if ys.ndim != 1 or len(ys) != len(xs):
        raise _SchemaError("samples.ys", "one finite target per sample point")
    candidates = _points(_need(data, candidates_field), candidates_field)
    try:
        return SampleSet(xs, ys, candidates)
    except (TypeError, ValueError) as exc:
        raise _SchemaError("samples", str(exc)) from exc


def _problem(data: Mapping) -> MaupertuisProblem:
    spec = _need(data, "problem")
    if not isinstance(spec, Mapping):
        raise _SchemaError("problem", "expected a problem object")
    try:
        return MaupertuisProblem.from_spec(spec)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, SizeError):
            raise
        raise _SchemaError("problem", str(exc)) from exc


def _encode_points(points: PointSet) -> list:
    return [list(p) for p in points]


def _f0_payload(interpolant) -> dict:
    return {
        "terms": [[list(p), encode_extreal(off)] for p, off in interpolant.terms]
    }


# ---------------------------------------------------------------------------
# Subcommand handlers: input mapping -> (exit_code, payload, optional grid fn).
# ---------------------------------------------------------------------------

Handler = Callable[[Mapping, RunConfig], tuple[int, dict, GridFunction | None]]


def _cmd_check_tpsd(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    points = _points(data["points"], "points") if "points" in data else None
    verdict = is_tpsd_pairwise(kernel, points, tol=config.tolerance)
    payload: dict = {"tpsd": verdict.is_tpsd}
    if not verdict.is_tpsd:
        payload["failure"] = verdict.failure
        payload["witness"] = list(verdict.witness)
    m_max = data.get("permutation_m_max")
    if m_max is not None:
        if not isinstance(m_max, int) or m_max < 1:
            raise _SchemaError("permutation_m_max", "expected a positive integer")
        if points is not None:
            gram = GramKernel(points, gram_on(kernel, points))
        elif isinstance(kernel, GramKernel):
            gram = kernel
        else:
            raise _SchemaError("points", "closed-form kernels require explicit points")
        perm = check_permutation_positivity(
            gram.matrix, m_max=m_max, tol=config.tolerance
        )
        payload["permutation_positive"] = perm.holds
    return 0, payload, None


def _cmd_factorize(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    if not isinstance(kernel, GramKernel):
        domain = _kernel_domain(data, kernel)
        kernel = GramKernel(domain, gram_on(kernel, domain))
    feature_map = factorize(kernel)
    payload = {
        "points": _encode_points(feature_map.points),
        "labels": [list(z) for z in feature_map.z_labels],
        "features": encode_values(feature_map.psi),
    }
    return 0, payload, None


def _cmd_conjugate(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    domain = _kernel_domain(data, kernel)
    f = _grid_function(domain, _need(data, "values"), "values")
    direction = data.get("direction", "sesqui")
    if direction not in ("sesqui", "linear"):
        raise _SchemaError("direction", "expected 'sesqui' or 'linear'")
    op = ConjugationOp(kernel, domain)
    out = conj_sesqui(op, f) if direction == "sesqui" else apply_linear(op, f)
    payload = {
        "points": _encode_points(out.domain),
        "values": encode_values(out.values),
    }
    return 0, payload, out


def _cmd_membership(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    domain = _kernel_domain(data, kernel)
    g = _grid_function(domain, _need(data, "values"), "values")
    op = ConjugationOp(kernel, domain)
    verdict = is_in_range(op, g, tol=config.tolerance)
    payload = {
        "in_range": verdict.in_range,
        "gap": encode_values(verdict.gap.values),
        "biconjugate": encode_values(verdict.biconjugate.values),
    }
    return 0, payload, None


def _cmd_funk(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    domain = _kernel_domain(data, kernel)
    op = ConjugationOp(kernel, domain)
    payload = {
        "points": _encode_points(domain),
        "matrix": encode_values(funk_kernel(op)),
    }
    return 0, payload, None


def _cmd_cg_kernel(data: Mapping, config: RunConfig):
    domain = _points(_need(data, "points"), "points")
    raw_members = _need(data, "members")
    if not isinstance(raw_members, Sequence) or not raw_members:
        raise _SchemaError("members", "expected a nonempty list of value lists")
    members = []
    for k, raw in enumerate(raw_members):
        members.append(_grid_function(domain, raw, f"members[{k}]"))
    try:
        family = FunctionFamily(domain, tuple(members))
    except (TypeError, ValueError) as exc:
        raise _SchemaError("members", str(exc)) from exc
    cg = max_kernel_cG(family)
    payload = {
        "points": _encode_points(domain),
        "matrix": encode_values(cg),
        "idempotent": is_idempotent(cg, tol=config.tolerance),
    }
    return 0, payload, None


def _cmd_regularity(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    domain = _kernel_domain(data, kernel)
    gram = gram_on(kernel, domain)
    verdict = is_von_neumann_regular(gram, tol=config.tolerance)
    payload = {
        "idempotent": is_idempotent(gram, tol=config.tolerance),
        "von_neumann_regular": verdict.regular,
    }
    return 0, payload, None


def _cmd_interpolate(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    samples = _samples(data)
    wit = feasible_witnesses(samples, kernel, tol=config.tolerance)
    if not wit.feasible:
        return 1, {"feasible": False, "blocking_index": wit.blocking_index + 1}, None
    f0 = build_f0(samples, wit.witnesses, kernel, tol=config.tolerance)
    payload = {
        "feasible": True,
        "witnesses": [list(p) for p in wit.witnesses],
        "witness_indices": list(wit.witness_indices),
        "f0": _f0_payload(f0),
        "values_at_xs": encode_values(
            np.array([f0(x) for x in samples.xs])
        ),
    }
    return 0, payload, None


def _cmd_regress(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    samples = _samples(data)
    loss = data.get("loss", "sup_norm")
    if loss not in ("sup_norm", "sup", "l1"):
        raise _SchemaError("loss", "expected 'sup_norm' or 'l1'")
    mode = data.get("mode", "search")
    fixed_p = None
    if isinstance(mode, Mapping):
        fixed_p = [as_point(p) for p in _need(mode, "fixed_p", "mode")]
    elif mode != "search":
        raise _SchemaError("mode", "expected 'search' or {'fixed_p': [...]}")
    try:
        result = regress(samples, kernel, loss=loss, fixed_p=fixed_p, tol=config.tolerance)
    except InfeasibleConstraintsError as exc:
        return (
            1,
            {
                "feasible": False,
                "negative_cycle": list(exc.cycle) if exc.cycle else None,
            },
            None,
        )
    payload = {
        "feasible": True,
        "witnesses": [list(p) for p in result.p_star],
        "y_star": encode_values(result.y_star),
        "loss_value": encode_extreal(result.loss_value),
        "exact": result.exact,
        "f0": _f0_payload(result.interpolant),
    }
    return 0, payload, None


def _cmd_maupertuis(data: Mapping, config: RunConfig):
    problem = _problem(data)
    gram = maupertuis_dp(problem)
    if data.get("asymmetric", False):
        gram = asymmetrize(gram)
    payload = {
        "points": _encode_points(gram.points),
        "matrix": encode_values(gram.matrix),
        "asymmetric": bool(data.get("asymmetric", False)),
    }
    return 0, payload, None


def _cmd_value_function(data: Mapping, config: RunConfig):
    problem = _problem(data)
    psi = _grid_function(
        problem.space_points(), _need(data, "terminal_values"), "terminal_values"
    )
    v = value_function(problem, psi)
    payload = {
        "points": _encode_points(v.domain),
        "values": encode_values(v.values),
    }
    if data.get("check_extremal", False):
        payload["largest_subsolution"] = largest_subsolution_check(
            problem, psi, seed=config.seed, tol=config.tolerance
        )
    return 0, payload, v


def _cmd_invert_stopping_cost(data: Mapping, config: RunConfig):
    kernel = _kernel(data)
    if not isinstance(kernel, GramKernel):
        raise _SchemaError("kernel", "stopping-cost inversion needs a gram kernel")
    raw = _need(data, "samples")
    xs = _points(_need(raw, "xs", "samples"), "samples.xs")
    ys = _values(_need(raw, "ys", "samples"), "samples.ys")
    try:
        samples = SampleSet(xs, ys, kernel.points)
    except (TypeError, ValueError) as exc:
        raise _SchemaError("samples", str(exc)) from exc
    result = reconstruct_stopping_cost(samples, kernel, tol=config.tolerance)
    out = result.stopping_cost
    payload = {
        "points": _encode_points(out.domain),
        "stopping_cost": encode_values(out.values),
        "y_star": encode_values(result.y_star),
        "loss_value": encode_extreal(result.loss_value),
    }
    return 0, payload, out


def _cmd_invert_terminal_cost(data: Mapping, config: RunConfig):
    problem = _problem(data)
    start = data.get("start_index", 0)
    if not isinstance(start, int) or not (0 <= start < problem.n_time - 1):
        raise _SchemaError("start_index", "expected a time index before the last")
    kernel = space_slice_kernel(problem, start, problem.n_time - 1)
    raw = _need(data, "samples")
    xs = _points(_need(raw, "xs", "samples"), "samples.xs")
    ys = _values(_need(raw, "ys", "samples"), "samples.ys")
    if "dual_candidates" in data:
        candidates = _points(data["dual_candidates"], "dual_candidates")
    else:
        candidates = problem.space_points()
    try:
        samples = SampleSet(xs, ys, candidates)
    except (TypeError, ValueError) as exc:
        raise _SchemaError("samples", str(exc)) from exc
    result = invert_terminal_cost(samples, kernel, tol=config.tolerance)
    if not result.feasible:
        return (
            1,
            {"feasible": False, "blocking_index": result.blocking_index + 1},
            None,
        )
    payload = {
        "feasible": True,
        "witnesses": [list(p) for p in result.witnesses],
        "witness_indices": list(result.witness_indices),
        "points": _encode_points(result.psi_T.domain),
        "psi_T": encode_values(result.psi_T.values),
    }
    return 0, payload, result.psi_T


_HANDLERS: dict[str, Handler] = {
    "check-tpsd": _cmd_check_tpsd,
    "factorize": _cmd_factorize,
    "conjugate": _cmd_conjugate,
    "membership": _cmd_membership,
    "funk": _cmd_funk,
    "cg-kernel": _cmd_cg_kernel,
    "regularity": _cmd_regularity,
    "interpolate": _cmd_interpolate,
    "regress": _cmd_regress,
    "maupertuis": _cmd_maupertuis,
    "value-function": _cmd_value_function,
    "invert-stopping-cost": _cmd_invert_stopping_cost,
    "invert-terminal-cost": _cmd_invert_terminal_cost,
}


# ---------------------------------------------------------------------------
# Output plumbing.
# ---------------------------------------------------------------------------


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _csv_lines(fn: GridFunction) -> list[str]:
    dim = fn.domain.dim
    if fn.domain.has_time:
        header = ["t"] + [f"x{i}" for i in range(1, dim)]
    else:
        header = [f"x{i}" for i in range(dim)]
    lines = [",".join(header + ["value"])]
    for p, v in zip(fn.domain, fn.values):
        cells = [repr(float(c)) for c in p] + [str(encode_extreal(float(v)))]
        lines.append(",".join(cells))
    return lines


def _emit(
    payload: dict, config: RunConfig, grid_fn: GridFunction | None
) -> None:
    text = _dump_json(payload)
    sys.stdout.write(text + "\n")
    if config.output_path:
        out = Path(config.output_path)
        out.write_text(text + "\n")
        if grid_fn is not None:
            csv_path = out.with_suffix(".csv")
            csv_path.write_text("\n".join(_csv_lines(grid_fn)) + "\n")


def run(config: RunConfig) -> int:
    """Execute one configured invocation; returns the process exit status."""
    if config.command not in _HANDLERS:
        _emit(
            {"error": {"kind": "schema", "field": "command",
                       "message": f"unknown command {config.command!r}"}},
            config,
            None,
        )
        return 2
    try:
        raw = Path(config.input_path).read_text()
    except OSError as exc:
        _emit(
            {"error": {"kind": "io", "field": "input", "message": str(exc)}},
            config,
            None,
        )
        return 2
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        _emit(
            {"error": {"kind": "schema", "field": "input", "message": str(exc)}},
            config,
            None,
        )
        return 2
    if not isinstance(data, Mapping):
        _emit(
            {"error": {"kind": "schema", "field": "input",
                       "message": "top level must be a JSON object"}},
            config,
            None,
        )
        return 2
    try:
        code, payload, grid_fn = _HANDLERS[config.command](data, config)
    except _SchemaError as exc:
        _emit(
            {"error": {"kind": "schema", "field": exc.field, "message": str(exc)}},
            config,
            None,
        )
        return 2
    except (PreconditionError, SizeError) as exc:
        _emit(
            {"error": {"kind": "precondition", "message": str(exc)}},
            config,
            None,
        )
        return 1
    except InfeasibleConstraintsError as exc:
        _emit(
            {"feasible": False,
             "negative_cycle": list(exc.cycle) if exc.cycle else None},
            config,
            None,
        )
        return 1
    _emit(payload, config, grid_fn)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tropkern",
        description="Max-plus kernel computations with JSON/CSV input and output.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="JSON input document")
        p.add_argument("--output", default=None, help="JSON output destination")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        p.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance")
    args = parser.parse_args(argv)
    config = RunConfig(
        command=args.command,
        input_path=args.input,
        output_path=args.output,
        seed=args.seed,
        tolerance=args.tol,
    )
    return run(config)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
