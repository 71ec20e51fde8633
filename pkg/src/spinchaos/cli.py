"""Deterministic command-line front end.

Each subcommand reads a JSON config, runs the matching module operations
and writes one CSV or JSON output file.  Outputs embed the tool version,
the seed and a compact config echo, and are byte-identical for identical
(config, seed) pairs.  Complex quantities are emitted as _re/_im column
pairs; CSV uses UTF-8, LF line endings and 17 significant digits.

Exit codes: 0 success, 2 config error, 3 numerical-validity failure,
4 resource cap exceeded.  Failures print a one-line JSON error record to
stderr, e.g. {"error": "invalid-state", "message": "..."}.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .chaos_metrics import (ChaosReport, chaos_profile, fit_loglog_slope,
                            lemma_verifier)
from .curie_weiss import (CWParams, evolve_dense, index_labels,
                          marginal_dense, marginal_fast_matrix)
from .errors import (CapExceededError, ConvergenceError, DimensionError,
                     HermiticityError, IntegrationError, SpinChaosError,
                     StateValidationError)
from .gibbs import gibbs_chaos_check
from .kernels import KERNEL_BACKEND
from .mean_field import (PairPotential, closed_form_cw, conjecture_probe,
                         cw_pair_potential, integrate, swap_operator)
from .states import QubitState, product_power


class ConfigError(SpinChaosError):
    def __init__(self, message: str, code: str = "invalid-config"):
        super().__init__(message)
        self.code = code


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _get(cfg: dict, key: str, kind, required: bool = True, default=None):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing config key {key!r}")
        return default
    val = cfg[key]
    try:
        if kind is float:
            return float(val)
        if kind is int:
            if isinstance(val, float) and val != int(val):
                raise ValueError("not an integer")
            return int(val)
        if kind is str:
            if not isinstance(val, str):
                raise ValueError("not a string")
            return val
        if kind is list:
            if not isinstance(val, list):
                raise ValueError("not a list")
            return val
        if kind is dict:
            if not isinstance(val, dict):
                raise ValueError("not an object")
            return val
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from None
    raise ConfigError(f"unsupported kind for {key!r}")


def _parse_state(cfg: dict) -> QubitState:
    obj = _get(cfg, "state", dict)
    try:
        return QubitState.from_json_dict(obj)
    except StateValidationError as exc:
        raise ConfigError(f"state: {exc}", code=exc.code) from None


def _parse_n_list(cfg: dict, k: int | None = None) -> list:
    raw = _get(cfg, "n_list", list)
    if not raw:
        raise ConfigError("n_list must be non-empty")
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
            raise ConfigError(f"n_list entries must be integers, got {v!r}")
        n = int(v)
        if n < 1:
            raise ConfigError(f"n_list entries must be >= 1, got {n}")
        if k is not None and n < k:
            raise ConfigError(f"n_list entry {n} smaller than k = {k}")
        out.append(n)
    return sorted(out)


def _parse_cw(cfg: dict, hbar_flag: float | None, n: int = 1) -> CWParams:
    hbar = hbar_flag if hbar_flag is not None else _get(
        cfg, "hbar", float, required=False, default=1.0)
    try:
        return CWParams(J=_get(cfg, "J", float), Hfield=_get(cfg, "Hfield", float),
                        n=n, hbar=hbar)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_output(path: str, fmt: str, command: str, config: dict, seed: int,
                  columns: list, rows: list, meta: dict) -> None:
    if fmt == "csv":
        lines = [
            f"# spinchaos {__version__}",
            f"# command={command}",
            f"# seed={seed}",
            "# config=" + json.dumps(config, sort_keys=True, separators=(",", ":")),
        ]
        for key in sorted(meta):
            lines.append(
                f"# {key}=" + json.dumps(meta[key], sort_keys=True,
                                         separators=(",", ":"))
            )
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "tool": "spinchaos",
            "version": __version__,
            "command": command,
            "seed": seed,
            "config": config,
            "meta": meta,
            "columns": columns,
            "rows": [[(int(v) if isinstance(v, (int, np.integer)) else float(v))
                      for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit_error(code: str, message: str, extra: dict | None = None) -> None:
    record = {"error": code, "message": message}
    if extra:
        record.update(extra)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _matrix_columns(k: int) -> list:
    pats = ["".join(str(l) for l in index_labels(i, k)) for i in range(2**k)]
    cols = []
    for r in pats:
        for c in pats:
            cols.append(f"m_{r}_{c}_re")
            cols.append(f"m_{r}_{c}_im")
    return cols


def _time_grid(t_end: float, dt: float) -> list:
    n_full = int(np.floor(t_end / dt + 1e-12))
    rem = t_end - n_full * dt
    times = [i * dt for i in range(n_full + 1)]
    if rem >= 1e-12 * max(1.0, abs(t_end)):
        times.append(t_end)
    return times


def cmd_evolve(cfg: dict, args) -> tuple:
    state = _parse_state(cfg)
    n = _get(cfg, "n", int)
    k = _get(cfg, "k", int)
    if n < 1 or not 1 <= k <= n:
        raise ConfigError(f"need 1 <= k <= n, got k={k}, n={n}")
    params = _parse_cw(cfg, args.hbar, n)
    t_grid = [float(t) for t in _get(cfg, "t_grid", list)]
    if not t_grid:
        raise ConfigError("t_grid must be non-empty")
    method = _get(cfg, "method", str, required=False, default="fast")
    if method not in ("fast", "dense"):
        raise ConfigError(f"method must be fast or dense, got {method!r}")
    tail_sigma = _get(cfg, "tail_sigma", float, required=False)
    rows = []
    dn0 = product_power(state.matrix(), n) if method == "dense" else None
    for t in t_grid:
        if method == "dense":
            marg = marginal_dense(evolve_dense(dn0, params, t), k)
        else:
            marg = marginal_fast_matrix(state, params, k, t, tail_sigma)
        row = [t]
        for val in marg.ravel():
            row.extend((val.real, val.imag))
        rows.append(row)
    return ["t"] + _matrix_columns(k), rows, {"backend": KERNEL_BACKEND}, cfg


def cmd_meanfield(cfg: dict, args) -> tuple:
    state = _parse_state(cfg)
    params = _parse_cw(cfg, args.hbar)
    t_end = _get(cfg, "t_end", float)
    dt = _get(cfg, "dt", float)
    if dt <= 0 or t_end < 0 or (t_end > 0 and dt > t_end):
        raise ConfigError(f"need 0 < dt <= t_end, got dt={dt}, t_end={t_end}")
    mode = _get(cfg, "mode", str, required=False, default="both")
    if mode not in ("ode", "closed", "both"):
        raise ConfigError(f"mode must be ode, closed or both, got {mode!r}")
    columns = ["t"]
    ode_states = None
    if mode in ("ode", "both"):
        potential = cw_pair_potential(params)
        traj = integrate(state.matrix(), potential, params.hbar, t_end, dt)
        times = [float(t) for t in traj.times]
        ode_states = traj.states
        columns += ["ode_a", "ode_d", "ode_c_re", "ode_c_im"]
    else:
        times = _time_grid(t_end, dt)
    if mode in ("closed", "both"):
        columns += ["cf_a", "cf_d", "cf_c_re", "cf_c_im"]
    rows = []
    for i, t in enumerate(times):
        row = [t]
        if ode_states is not None:
            m = ode_states[i]
            row += [m[0, 0].real, m[1, 1].real, m[0, 1].real, m[0, 1].imag]
        if mode in ("closed", "both"):
            q = closed_form_cw(state, params, t)
            row += [q.a, q.d, q.c.real, q.c.imag]
        rows.append(row)
    return columns, rows, {}, cfg


def _profile_with_threads(state, params, n_list, k, t, tail_sigma,
                          threads: int) -> ChaosReport:
    if threads <= 1 or len(n_list) == 1:
        return chaos_profile(state, params, n_list, k, t, tail_sigma)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {n: pool.submit(chaos_profile, state, params, [n], k, t,
                                  tail_sigma) for n in n_list}
        entries = tuple(futures[n].result().entries[0] for n in sorted(n_list))
    slope, r2 = fit_loglog_slope([e.n for e in entries],
                                 [e.trace_distance for e in entries])
    return ChaosReport(entries, slope, r2)


def cmd_chaos_scan(cfg: dict, args) -> tuple:
    state = _parse_state(cfg)
    k = _get(cfg, "k", int)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    n_list = _parse_n_list(cfg, k)
    params = _parse_cw(cfg, args.hbar)
    t = _get(cfg, "t", float)
    tail_sigma = _get(cfg, "tail_sigma", float, required=False)
    report = _profile_with_threads(state, params, n_list, k, t, tail_sigma,
                                   args.threads)
    columns = ["n", "trace_distance"]
    fitted = report.fitted_slope is not None
    if fitted:
        columns += ["slope", "r2"]
    rows = []
    for e in report.entries:
        row = [e.n, e.trace_distance]
        if fitted:
            row += [report.fitted_slope, report.fit_r2]
        rows.append(row)
    return columns, rows, {"backend": KERNEL_BACKEND}, cfg


def _parse_potential(cfg: dict, args) -> PairPotential:
    kind = _get(cfg, "potential", str, required=False, default="cw")
    if kind == "cw":
        return cw_pair_potential(_parse_cw(cfg, args.hbar))
    if kind == "zero":
        d = _get(cfg, "d", int, required=False, default=2)
        if not 2 <= d <= 4:
            raise ConfigError(f"d must be in [2, 4], got {d}")
        return PairPotential(np.zeros((d * d, d * d), dtype=complex))
    if kind == "random":
        d = _get(cfg, "d", int, required=False, default=2)
        if d != 2:
            raise ConfigError("random potentials support d = 2 only in the CLI")
        scale = _get(cfg, "scale", float, required=False, default=1.0)
        rng = np.random.default_rng(args.seed)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        herm = 0.5 * (g + g.conj().T)
        s = swap_operator(2)
        return PairPotential(0.5 * scale * (herm + s @ herm @ s))
    raise ConfigError(f"potential must be cw, zero or random, got {kind!r}")


def cmd_gibbs(cfg: dict, args) -> tuple:
    potential = _parse_potential(cfg, args)
    k = _get(cfg, "k", int)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    n_list = _parse_n_list(cfg, k)
    method = _get(cfg, "method", str, required=False, default="auto")
    if method not in ("auto", "dense", "fast"):
        raise ConfigError(f"method must be auto, dense or fast, got {method!r}")
    result = gibbs_chaos_check(potential, n_list, k, seed=args.seed,
                               method=method)
    report = result.report
    fe = result.free_energy
    columns = ["n", "trace_distance"]
    fitted = report.fitted_slope is not None
    if fitted:
        columns += ["slope", "r2"]
    rows = []
    for e in report.entries:
        row = [e.n, e.trace_distance]
        if fitted:
            row += [report.fitted_slope, report.fit_r2]
        rows.append(row)
    meta = {
        "free_energy_value": fe.value,
        "stationarity_residual": fe.stationarity_residual,
        "restarts_used": fe.restarts_used,
        "distinct_minima": len(fe.distinct_minima),
        "monotone_decreasing": report.monotone_decreasing,
        "minimizer_re": fe.minimizer.real.tolist(),
        "minimizer_im": fe.minimizer.imag.tolist(),
    }
    return columns, rows, meta, cfg


def cmd_conjecture_probe(cfg: dict, args) -> tuple:
    potential = _parse_potential(cfg, args)
    state = _parse_state(cfg)
    k = _get(cfg, "k", int)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    n_list = _parse_n_list(cfg, k)
    t = _get(cfg, "t", float)
    dt = _get(cfg, "dt", float)
    if dt <= 0 or t < 0 or (t > 0 and dt > t):
        raise ConfigError(f"need 0 < dt <= t, got dt={dt}, t={t}")
    hbar = args.hbar if args.hbar is not None else _get(
        cfg, "hbar", float, required=False, default=1.0)
    report = conjecture_probe(state.matrix(), potential, n_list, k, t, dt, hbar)
    rows = [[e.n, e.trace_distance] for e in report.entries]
    ode = report.ode_state
    meta = {
        "ode_a": ode[0, 0].real,
        "ode_d": ode[1, 1].real,
        "ode_c_re": ode[0, 1].real,
        "ode_c_im": ode[0, 1].imag,
    }
    return ["n", "trace_distance"], rows, meta, cfg


def cmd_lemma_check(cfg: dict, args) -> tuple:
    state = _parse_state(cfg)
    x_labels = _get(cfg, "x_labels", list)
    y_labels = _get(cfg, "y_labels", list)
    for lab in list(x_labels) + list(y_labels):
        if lab not in (1, 2):
            raise ConfigError(f"labels must be 1 or 2, got {lab!r}")
    if len(x_labels) != len(y_labels) or not x_labels:
        raise ConfigError("x_labels and y_labels must be equal-length and non-empty")
    n_list = _parse_n_list(cfg, len(x_labels))
    thetas = _get(cfg, "thetas", list, required=False, default=[0.0, 0.5, 1.5])
    thetas = [float(v) for v in thetas]
    hbar = args.hbar if args.hbar is not None else _get(
        cfg, "hbar", float, required=False, default=1.0)
    params = CWParams(J=_get(cfg, "J", float, required=False, default=1.0),
                      Hfield=_get(cfg, "Hfield", float, required=False, default=0.0),
                      n=max(n_list), hbar=hbar)
    report = lemma_verifier(state, len(x_labels), x_labels, y_labels, params,
                            n_list, thetas)
    rows = [[e.n, e.theta, e.abs_error] for e in report.entries]
    meta = {"c_re": report.c.real, "c_im": report.c.imag, "f_one": report.f_one,
            "backend": KERNEL_BACKEND}
    return ["n", "theta", "abs_error"], rows, meta, cfg


_DISPATCH = {
    "evolve": cmd_evolve,
    "meanfield": cmd_meanfield,
    "chaos-scan": cmd_chaos_scan,
    "gibbs": cmd_gibbs,
    "conjecture-probe": cmd_conjecture_probe,
    "lemma-check": cmd_lemma_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchaos",
        description="Mean-field spin-ensemble chaos experiments with "
                    "deterministic CSV/JSON output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "evolve": "evolved k-site marginals of n-site product states",
        "meanfield": "mean-field ODE and/or closed-form trajectory",
        "chaos-scan": "marginal-vs-product distances over a list of n",
        "gibbs": "canonical-marginal distances from the free-energy minimizer",
        "conjecture-probe": "dense finite-n probe of the mean-field limit",
        "lemma-check": "weighted phase-sum concentration errors",
    }
    for name, txt in helps.items():
        sp = sub.add_parser(name, help=txt)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", required=True, help="output file path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--hbar", type=float, default=None,
                        help="override the config hbar")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads for independent n entries")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        columns, rows, meta, echo = _DISPATCH[args.command](cfg, args)
        _write_output(args.out, args.format, args.command, echo, args.seed,
                      columns, rows, meta)
        return 0
    except ConfigError as exc:
        _emit_error(exc.code, str(exc))
        return 2
    except (DimensionError, ValueError) as exc:
        _emit_error("invalid-config", str(exc))
        return 2
    except CapExceededError as exc:
        _emit_error("cap-exceeded", str(exc))
        return 4
    except IntegrationError as exc:
        _emit_error("numerical-validity", str(exc), {"step": exc.step})
        return 3
    except (StateValidationError,) as exc:
        _emit_error(exc.code, str(exc))
        return 3
    except (ConvergenceError, HermiticityError) as exc:
        _emit_error("numerical-validity", str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
