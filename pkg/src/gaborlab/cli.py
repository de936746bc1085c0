"""Experiment runner: configuration, reports, plot data.

Subcommands: stft, wigner, frames, matrix, decay, tausweep, norms, embed,
selftest.  Parameters come from built-in defaults, overridden by an optional
key=value config file, overridden by command-line flags.  Every run writes
its artifacts plus manifest.json (resolved config, config hash, artifact
checksums) into the output directory; wall-clock timings go to a separate
timings.json, which is the single artifact excluded from the determinism
contract (reruns with an identical resolved config are byte-identical,
including under different --parallel degrees).

Exit codes: 0 success, 2 configuration error, 3 numerical contract
violation (e.g. route disagreement beyond tolerance, selftest failure).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .phase_space import (Grid, Lattice, PhaseSpacePoint, SampledSignal,
                          WeightSpec, j_rot, j_rot_inv, t_tau, weight_eval)
from .windows import gaussian_window
from .stft import stft, frame_bounds, reconstruct
from .wigner import gauss_legendre, tau_wigner, born_jordan_dist
from .symbols import parse_symbol, constant, eval_symbol, seminorm
from .quantization import (gabor_matrix_direct, gabor_matrix_stft,
                           born_jordan_matrix, route_deviation)
from .decay import envelope, envelope_norm, decay_order_fit, verify_th34, tau_sweep
from .norms import (LatticeArray, check_embedding, cube_partition,
                    freq_uniform_decomp, modulation_norm_decomp,
                    modulation_norm_stft, besov_norm, weighted_seq_norm)
from .signals import SIGNAL_NAMES, make_signal, signal_family
from .serialize import (decay_report_dict, format_float, write_envelope_csv,
                        write_gabor_matrix_csv, write_json,
                        write_phase_space_binary, write_phase_space_csv,
                        JSON_SCHEMA_VERSION)

__all__ = ["main"]


class ConfigError(Exception):
    pass


class ContractViolation(Exception):
    pass


_COMMON_DEFAULTS = {
    "out": "gaborlab_out",
    "parallel": 1,
    "n": 256,
    "dt": 0.0625,
    "width": 1.0,
}

_DEFAULTS = {
    "stft": {"signal": "gauss", "x_step": 1, "padding": 0, "binary": False},
    "wigner": {"signal": "gauss", "tau": 0.5, "bj": False, "quad_nodes": 8,
               "binary": False},
    "frames": {"alpha": 0.5, "beta": 1.0, "radius": 8},
    "matrix": {"n": 512, "symbol": "bracket_power(1)", "tau": 0.5,
               "route": "direct", "alpha": 0.5, "beta": 0.5, "radius": 4,
               "quad_nodes": 8, "route_tol": 1e-6},
    "decay": {"n": 512, "symbol": "bracket_power(1)", "tau": 0.5, "m": 1.0,
              "n_order": 4, "alpha": 0.5, "beta": 0.5, "radius": 4},
    "tausweep": {"n": 512, "symbol": "bracket_power(0.5)",
                 "taus": "0,0.25,0.5,0.75,1", "m": 0.5, "q": 1.0, "s": 3.0,
                 "alpha": 0.5, "beta": 0.5, "radius": 4},
    "norms": {"signals": "family", "q_list": "1,2,inf", "s_list": "0,2"},
    "embed": {},
    "selftest": {},
}

_TYPES = {
    "out": str, "parallel": int, "n": int, "dt": float, "width": float,
    "signal": str, "x_step": int, "padding": int, "binary": bool,
    "tau": float, "bj": bool, "quad_nodes": int,
    "alpha": float, "beta": float, "radius": int,
    "symbol": str, "route": str, "route_tol": float,
    "m": float, "n_order": int, "taus": str, "q": float, "s": float,
    "signals": str, "q_list": str, "s_list": str,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaborlab",
        description="Numerical laboratory for Gabor analysis of "
                    "tau-pseudodifferential operators")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, extra in _DEFAULTS.items():
        p = sub.add_parser(cmd)
        p.add_argument("--config", type=str, default=None,
                       help="key=value config file; flags override it")
        keys = dict(_COMMON_DEFAULTS)
        keys.update(extra)
        for key in sorted(keys):
            flag = "--" + key.replace("_", "-")
            if _TYPES[key] is bool:
                p.add_argument(flag, action="store_const", const=True,
                               default=None)
            else:
                p.add_argument(flag, type=_TYPES[key], default=None)
    return parser


def _read_config_file(path: str) -> dict:
    data = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"config file {path!r}: {e}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config file {path!r} line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        data[key.strip().replace("-", "_")] = value.strip()
    return data


def _coerce(key: str, raw, where: str):
    typ = _TYPES.get(key)
    if typ is None:
        raise ConfigError(f"{where}: unknown configuration key {key!r}")
    if isinstance(raw, str):
        try:
            if typ is bool:
                low = raw.lower()
                if low in ("1", "true", "yes", "on"):
                    return True
                if low in ("0", "false", "no", "off"):
                    return False
                raise ValueError(raw)
            return typ(raw)
        except ValueError:
            raise ConfigError(f"{where}: field {key!r} expects {typ.__name__}, got {raw!r}")
    return raw


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(_COMMON_DEFAULTS)
    cfg.update(_DEFAULTS[command])
    if args.config:
        file_cfg = _read_config_file(args.config)
        for key, raw in file_cfg.items():
            if key not in cfg:
                raise ConfigError(f"config file: key {key!r} is not valid for "
                                  f"command {command!r}")
            cfg[key] = _coerce(key, raw, "config file")
    for key in cfg:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = _coerce(key, flag_val, "flag")
    _validate(command, cfg)
    return cfg


def _validate(command: str, cfg: dict):
    def bad(field, msg):
        raise ConfigError(f"invalid config field {field!r}: {msg}")
    if cfg["n"] < 8 or cfg["n"] & (cfg["n"] - 1):
        bad("n", "must be a power of two >= 8")
    if cfg["dt"] <= 0:
        bad("dt", "must be positive")
    if cfg["width"] <= 0:
        bad("width", "must be positive")
    if cfg["parallel"] < 1:
        bad("parallel", "must be a positive integer")
    if "tau" in cfg and not 0.0 <= cfg["tau"] <= 1.0:
        bad("tau", "must lie in [0, 1]")
    if "radius" in cfg and cfg["radius"] < 1:
        bad("radius", "must be a positive integer")
    if "alpha" in cfg and cfg["alpha"] <= 0:
        bad("alpha", "must be positive")
    if "beta" in cfg and cfg["beta"] <= 0:
        bad("beta", "must be positive")
    if "route" in cfg and cfg["route"] not in ("direct", "stft", "bj", "both"):
        bad("route", "must be one of direct|stft|bj|both")
    if "signal" in cfg and cfg["signal"] not in SIGNAL_NAMES:
        bad("signal", f"must be one of {SIGNAL_NAMES}")
    if "quad_nodes" in cfg and cfg["quad_nodes"] < 1:
        bad("quad_nodes", "must be >= 1")
    if "symbol" in cfg:
        try:
            parse_symbol(cfg["symbol"])
        except ValueError as e:
            bad("symbol", str(e))


# execution knobs that must not influence artifact bytes: out is a path,
# parallel only schedules fixed-shape work chunks
_EXECUTION_KEYS = ("out", "parallel")


def _experiment_config(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k not in _EXECUTION_KEYS}


def _config_hash(cfg: dict, command: str) -> str:
    blob = json.dumps({"command": command, "config": _experiment_config(cfg)},
                      sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_list(text: str) -> list[float]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        out.append(math.inf if piece in ("inf", "Inf") else float(piece))
    return out


class _Run:
    """Output-directory bookkeeping: artifacts, manifest, timings."""

    def __init__(self, command: str, cfg: dict):
        self.command = command
        self.cfg = cfg
        self.hash = _config_hash(cfg, command)
        self.out = Path(cfg["out"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[str] = []
        self.t0 = time.monotonic()

    def path(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.out / name

    def meta(self) -> dict:
        return {"config_hash": self.hash}

    def finish(self) -> None:
        digests = {}
        for name in self.artifacts:
            digests[name] = hashlib.sha256((self.out / name).read_bytes()).hexdigest()
        manifest = {
            "schema_version": JSON_SCHEMA_VERSION,
            "command": self.command,
            "config": _experiment_config(self.cfg),
            "config_hash": self.hash,
            "package_version": __version__,
            "artifacts": digests,
        }
        write_json(manifest, self.out / "manifest.json")
        write_json({"wall_seconds": time.monotonic() - self.t0,
                    "out": str(self.out),
                    "parallel": self.cfg["parallel"]},
                   self.out / "timings.json")


def _grid_window(cfg):
    grid = Grid(cfg["n"], cfg["dt"])
    return grid, gaussian_window(grid, cfg["width"])


def _csv(run: _Run, name: str, header: str, rows: list[str]):
    path = run.path(name)
    lines = [f"# config_hash={run.hash}", header] + rows
    path.write_text("\n".join(lines) + "\n")


# --- subcommand implementations ----------------------------------------------

def _cmd_stft(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    f = make_signal(grid, cfg["signal"])
    V = stft(f, g, x_step=cfg["x_step"], padding=cfg["padding"])
    write_phase_space_csv(V, run.path("stft.csv"), run.meta())
    if cfg["binary"]:
        write_phase_space_binary(V, run.path("stft.tfq"))
    return 0


def _cmd_wigner(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    f = make_signal(grid, cfg["signal"])
    if cfg["bj"]:
        W = born_jordan_dist(f, f, gauss_legendre(cfg["quad_nodes"]))
    else:
        W = tau_wigner(f, f, cfg["tau"])
    write_phase_space_csv(W, run.path("wigner.csv"), run.meta())
    if cfg["binary"]:
        write_phase_space_binary(W, run.path("wigner.tfq"))
    return 0


def _cmd_frames(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    rep = frame_bounds(g, Lattice(cfg["alpha"], cfg["beta"], cfg["radius"]))
    write_json({
        "schema_version": JSON_SCHEMA_VERSION,
        "config_hash": run.hash,
        "lower_bound_estimate": rep.lower_bound_estimate,
        "upper_bound_estimate": rep.upper_bound_estimate,
        "condition_number": (None if rep.lower_bound_estimate == 0
                             else rep.condition_number),
        "gram_truncation_radius": rep.gram_truncation_radius,
        "n_lattice_points": rep.n_lattice_points,
    }, run.path("frames.json"))
    return 0


def _cmd_matrix(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    sym = parse_symbol(cfg["symbol"])
    lat = Lattice(cfg["alpha"], cfg["beta"], cfg["radius"])
    route = cfg["route"]
    rc = 0
    if route in ("direct", "both"):
        M = gabor_matrix_direct(sym, g, lat, cfg["tau"], parallel=cfg["parallel"])
        write_gabor_matrix_csv(M, run.path("matrix.csv"), run.meta())
    if route in ("stft", "both"):
        Ms = gabor_matrix_stft(sym, g, lat, cfg["tau"])
        name = "matrix_stft.csv" if route == "both" else "matrix.csv"
        write_gabor_matrix_csv(Ms, run.path(name), run.meta())
    if route == "bj":
        M = born_jordan_matrix(sym, g, lat, gauss_legendre(cfg["quad_nodes"]),
                               parallel=cfg["parallel"])
        write_gabor_matrix_csv(M, run.path("matrix.csv"), run.meta())
    if route == "both":
        dev = route_deviation(M, Ms)
        write_json({
            "schema_version": JSON_SCHEMA_VERSION,
            "config_hash": run.hash,
            "max_dev_over_peak": dev.max_dev_over_peak,
            "max_rel_dev": dev.max_rel_dev,
            "peak": dev.peak,
            "tolerance": cfg["route_tol"],
            "within_tolerance": dev.max_dev_over_peak <= cfg["route_tol"],
        }, run.path("route_check.json"))
        if dev.max_dev_over_peak > cfg["route_tol"]:
            raise ContractViolation(
                f"route deviation {dev.max_dev_over_peak:.3e} exceeds "
                f"tolerance {cfg['route_tol']:.3e}")
    return rc


def _cmd_decay(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    sym = parse_symbol(cfg["symbol"])
    lat = Lattice(cfg["alpha"], cfg["beta"], cfg["radius"])
    try:
        rep = verify_th34(sym, g, lat, cfg["tau"], cfg["n_order"], cfg["m"],
                          parallel=cfg["parallel"])
    except ValueError as e:
        raise ConfigError(str(e))
    d = decay_report_dict(rep)
    d["config_hash"] = run.hash
    write_json(d, run.path("decay.json"))
    write_envelope_csv(rep.envelope, run.path("envelope.csv"), run.meta())
    return 0


def _cmd_tausweep(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    sym = parse_symbol(cfg["symbol"])
    lat = Lattice(cfg["alpha"], cfg["beta"], cfg["radius"])
    taus = _parse_list(cfg["taus"])
    rep = tau_sweep(sym, g, lat, taus, cfg["m"], cfg["q"], cfg["s"],
                    parallel=cfg["parallel"])
    rows = [f"{format_float(t)},{format_float(v)}" for t, v in rep.norms.items()]
    _csv(run, "tausweep.csv", "tau,envelope_norm", rows)
    write_json({
        "schema_version": JSON_SCHEMA_VERSION,
        "config_hash": run.hash,
        "q": rep.q, "s": rep.s,
        "max_over_tau": rep.max_over_tau,
        "norms": {format_float(t): v for t, v in rep.norms.items()},
    }, run.path("tausweep.json"))
    return 0


def _cmd_norms(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    if cfg["signals"] == "family":
        family = signal_family(grid)
    else:
        names = [s.strip() for s in cfg["signals"].split(",") if s.strip()]
        family = {name: make_signal(grid, name) for name in names}
    qs = _parse_list(cfg["q_list"])
    ss = _parse_list(cfg["s_list"])
    rows = []
    for name, f in family.items():
        for q in qs:
            for s in ss:
                w = WeightSpec.tensor(0.0, s)
                v1 = modulation_norm_stft(f, g, math.inf, q, w)
                v2 = modulation_norm_decomp(f, math.inf, q,
                                            w_seq=WeightSpec.polynomial(s))
                v3 = besov_norm(f, math.inf, q, s)
                params = f"q={q:g};s={s:g}"
                rows.append(f"{name},modulation_stft,{params},{format_float(v1)}")
                rows.append(f"{name},modulation_decomp,{params},{format_float(v2)}")
                rows.append(f"{name},besov,{params},{format_float(v3)}")
    _csv(run, "norms.csv", "signal_id,norm_name,parameters,value", rows)
    return 0


def _cmd_embed(run: _Run):
    cfg = run.cfg
    grid, g = _grid_window(cfg)
    # modulation ladder: frequency content pushed outward scale by scale
    ladder = [SampledSignal(grid, make_signal(grid, "gauss").values
                            * np.exp(2j * np.pi * om * grid.points))
              for om in (0.0, 1.0, 2.0, 4.0, 6.0)]
    checks = []

    def mod_norm(f, q, s):
        return modulation_norm_stft(f, g, math.inf, q, WeightSpec.tensor(0.0, s))

    # M^{inf,q1}_{<.>^r} -> M^{inf,q2}_{<.>^r} -> M^{inf,q1}_{<.>^s},
    # q1 <= q2, r > s + d(1/q1 - 1/q2)
    a = [mod_norm(f, 1.0, 2.0) for f in ladder]
    b = [mod_norm(f, 2.0, 2.0) for f in ladder]
    c = [mod_norm(f, 1.0, 0.0) for f in ladder]
    checks.append(("mod_q1_to_q2", check_embedding(a, b), False))
    checks.append(("mod_q2_to_s", check_embedding(b, c), False))
    checks.append(("mod_reversed_control", check_embedding(c, a), True))
    # Besov sandwich at q = 1, s = 0: B_{s+1/q} -> M_{1x<.>^s} -> B_{s+theta}
    bes_hi = [besov_norm(f, math.inf, 1.0, 1.0) for f in ladder]
    mmod = [mod_norm(f, 1.0, 0.0) for f in ladder]
    bes_lo = [besov_norm(f, math.inf, 1.0, 0.0) for f in ladder]
    checks.append(("besov_to_mod", check_embedding(bes_hi, mmod), False))
    checks.append(("mod_to_besov", check_embedding(mmod, bes_lo), False))
    report = {"schema_version": JSON_SCHEMA_VERSION, "config_hash": run.hash,
              "checks": {}}
    bad = []
    for name, rep, expect_violation in checks:
        report["checks"][name] = {
            "max_ratio": rep.max_ratio,
            "violated": rep.violated,
            "expected_violation": expect_violation,
            "ratios": list(rep.ratios),
        }
        if rep.violated != expect_violation:
            bad.append(name)
    report["all_as_predicted"] = not bad
    write_json(report, run.path("embed.json"))
    if bad:
        raise ContractViolation(f"embedding checks off prediction: {bad}")
    return 0


def _cmd_selftest(run: _Run):
    cfg = run.cfg
    checks = []

    def check(name, ok):
        checks.append((name, bool(ok)))
        print(f"{'PASS' if ok else 'FAIL'}  {name}")

    w2 = WeightSpec.polynomial(2.0)
    check("weight polynomial(2) at origin = 1",
          abs(weight_eval(w2, PhaseSpacePoint(0, 0)) - 1.0) < 1e-14)
    check("weight polynomial(2) at (1,0) = 2",
          abs(weight_eval(w2, PhaseSpacePoint(1, 0)) - 2.0) < 1e-14)
    z, u = PhaseSpacePoint(1, 2), PhaseSpacePoint(3, 4)
    check("t_tau boundary cases",
          t_tau(z, u, 0.0) == PhaseSpacePoint(1, 4)
          and t_tau(z, u, 1.0) == PhaseSpacePoint(3, 2)
          and t_tau(z, u, 0.5) == PhaseSpacePoint(2, 3))
    check("J and its inverse",
          j_rot(PhaseSpacePoint(1, 0)) == PhaseSpacePoint(0, -1)
          and j_rot_inv(j_rot(PhaseSpacePoint(0.3, -0.7))) == PhaseSpacePoint(0.3, -0.7))
    grid = Grid(cfg["n"], cfg["dt"])
    g = gaussian_window(grid, cfg["width"])
    check("gaussian window unit norm", abs(g.norm() - 1.0) < 1e-12)
    check("gaussian window even symmetry",
          np.max(np.abs(g.values - g.values[::-1].conj())) < 1e-13
          if cfg["n"] % 2 == 1 else
          np.max(np.abs(g.values[1:] - g.values[1:][::-1])) < 1e-13)
    V = stft(g, g)
    i0 = cfg["n"] // 2
    check("V_g g(0,0) = ||g||^2 = 1", abs(V.values[i0, i0] - 1.0) < 1e-10)
    rec, err = reconstruct(make_signal(grid, "hermite1"), g)
    check("STFT inversion", err < 1e-10)
    W = tau_wigner(g, g, 0.5)
    tm = W.omega_grid.spacing * np.sum(W.values, axis=1)
    check("Wigner time marginal", np.max(np.abs(tm - np.abs(g.values) ** 2)) < 1e-10)
    check("constant symbol derivative rules",
          abs(eval_symbol(constant(2.0), PhaseSpacePoint(0.3, 1.0)) - 2.0) < 1e-14
          and abs(eval_symbol(constant(2.0), PhaseSpacePoint(0.3, 1.0), (1, 0))) < 1e-14)
    check("constant symbol seminorm", seminorm(constant(3.0), 2, 0.0).value == 3.0
          and not seminorm(constant(3.0), 2, 0.0).divergence_flag)
    lat = Lattice(0.5, 0.5, 1)
    Mi = gabor_matrix_direct(constant(1.0), g, lat, 0.5)
    from .phase_space import tf_shift
    sig = SampledSignal(grid, g.values)
    pts = lat.points()
    gram_dev = 0.0
    for i in range(lat.count):
        for j in range(lat.count):
            gram = tf_shift(sig, PhaseSpacePoint(*pts[j])).inner(
                tf_shift(sig, PhaseSpacePoint(*pts[i])))
            gram_dev = max(gram_dev, abs(Mi.entries[i, j] - gram))
    check("identity symbol reproduces the Gram matrix", gram_dev < 1e-8)
    f = make_signal(grid, "gauss")
    total = sum(freq_uniform_decomp(f, k).values
                for k in range(-3, 4))
    check("frequency-uniform pieces sum back (band-limited input)",
          np.max(np.abs(total - f.values)) < 1e-10)
    dlat = Lattice(1.0, 1.0, 3)
    delta = np.zeros(dlat.count)
    delta[dlat.index_of(0, 0)] = 1.0
    check("sequence norm of the unit delta",
          abs(weighted_seq_norm(LatticeArray(dlat, delta), 2.0, 5.0) - 1.0) < 1e-14)
    failed = [name for name, ok in checks if not ok]
    write_json({"schema_version": JSON_SCHEMA_VERSION, "config_hash": run.hash,
                "checks": {name: ok for name, ok in checks},
                "all_passed": not failed},
               run.path("selftest.json"))
    if failed:
        raise ContractViolation(f"selftest failures: {failed}")
    return 0


_COMMANDS = {
    "stft": _cmd_stft,
    "wigner": _cmd_wigner,
    "frames": _cmd_frames,
    "matrix": _cmd_matrix,
    "decay": _cmd_decay,
    "tausweep": _cmd_tausweep,
    "norms": _cmd_norms,
    "embed": _cmd_embed,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    run = _Run(args.command, cfg)
    try:
        rc = _COMMANDS[args.command](run)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ContractViolation as e:
        run.finish()
        print(f"numerical contract violation: {e}", file=sys.stderr)
        return 3
    run.finish()
    return rc


if __name__ == "__main__":
    sys.exit(main())
