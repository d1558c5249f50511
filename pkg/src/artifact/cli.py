"""Command-line runner for spec-driven experiments.

Usage::

    artifact run SPEC [--out DIR] [--plot] [--threads N] [--seed S]
    artifact {rb,lrb,lrb-shield,surjectivity,twirl,fit} SPEC [...]
    artifact list

``SPEC`` is an INI file or the name of a bundled spec (``fig2`` ... ``fig6``,
``baseline-exp``). Exit codes: 0 success, 2 configuration error (nothing
written), 3 invariant violation detected while running.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import qec_codes, rb_engine, report
from .lrb_engine import estimate_lrb_survival, lrb_config
from .sampling import SurvivalCurve, SurvivalPoint

log = logging.getLogger("artifact")

EXPERIMENTS = ("rb", "lrb", "lrb-shield", "surjectivity", "twirl", "fit")
EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Spec parsing


def parse_values(text: str, kind=float) -> list:
    """Comma list whose items are numbers, ``a..b`` or ``a..b/step``."""
    out = []
    for item in (t.strip() for t in text.split(",")):
        if not item:
            continue
        if ".." in item:
            span, _, step = item.partition("/")
            lo, hi = (kind(v) for v in span.split(".."))
            step = kind(step) if step else kind(1)
            if step <= 0 or hi < lo:
                raise ConfigError(f"bad range {item!r}")
            n = int(round((hi - lo) / step))
            out += [kind(round(lo + i * step, 12)) for i in range(n + 1)]
        else:
            out.append(kind(item))
    if not out:
        raise ConfigError(f"no values in {text!r}")
    return out


def bundled_specs() -> list[str]:
    root = resources.files("artifact") / "specs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def resolve_spec(name: str) -> Path:
    path = Path(name)
    if path.is_file():
        return path
    candidate = resources.files("artifact") / "specs" / f"{name}.ini"
    if candidate.is_file():
        return Path(str(candidate))
    raise ConfigError(f"spec {name!r} is neither a file nor a bundled spec ({', '.join(bundled_specs())})")


@dataclass
class Plan:
    """A validated spec, ready to run."""

    experiment: str
    name: str
    seed: int
    section: dict
    base: Path
    configs: dict = field(default_factory=dict)
    title: str = ""


def _get(sec, key, kind, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {key!r} in [{sec.name}]")
        return default
    try:
        return kind(sec[key])
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] {key} = {sec[key]!r}: {exc}") from None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _load_code(value: str, base: Path):
    if value == "steane":
        return qec_codes.steane_code()
    path = Path(value)
    if not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise ConfigError(f"parity-check file {path} does not exist")
    return qec_codes.load_parity_check_file(path)


def _rb_config(sec, seed) -> rb_engine.RbConfig:
    return rb_engine.RbConfig(
        k=_get(sec, "k", int),
        model=_get(sec, "model", str),
        m_values=tuple(parse_values(_get(sec, "m_values", str), int)),
        n_sequences=_get(sec, "n_sequences", int),
        seed=seed,
        p=_get(sec, "p", float, 0.0),
        tau=_get(sec, "tau", int, 2),
    )


def _lrb_configs(sec, seed, base, shield: bool) -> dict:
    k_values = [_get(sec, "k", int)]
    r_values = [_get(sec, "reset_prob", float)]
    sweep = sec.get("sweep", "").strip()
    if sweep == "k":
        k_values = parse_values(_get(sec, "sweep_values", str), int)
    elif sweep == "reset_prob":
        r_values = parse_values(_get(sec, "sweep_values", str), float)
    elif sweep:
        raise ConfigError(f"cannot sweep {sweep!r}; use k or reset_prob")
    copies = _get(sec, "copies", int, 1)
    if shield and copies < 2:
        raise ConfigError("lrb-shield needs copies >= 2")
    if not shield and copies != 1:
        raise ConfigError("copies > 1 requires experiment type lrb-shield")
    code_name = sec.get("code", "steane").strip()
    m_values = tuple(parse_values(_get(sec, "m_values", str), int))
    n_seq = _get(sec, "n_sequences", int)
    out = {}
    for k in k_values:
        for r in r_values:
            if code_name == "steane":
                code = None
            else:
                code = _load_code(code_name, base)
            out[k if sweep == "k" else r] = lrb_config(
                k, r, copies=copies, code=code, m_values=m_values, n_sequences=n_seq, seed=seed
            )
    return out


def load_plan(spec: str, seed: int | None = None) -> Plan:
    path = resolve_spec(spec)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        if not parser.read(path):
            raise ConfigError(f"cannot read {path}")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    head = parser["experiment"]
    kind = head.get("type", "").strip()
    if kind not in EXPERIMENTS:
        raise ConfigError(f"{path}: unknown experiment type {kind!r}")
    name = head.get("name", path.stem).strip()
    run_seed = seed if seed is not None else _get(head, "seed", int, 0)
    if not 0 <= run_seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    section_name = {"lrb-shield": "lrb"}.get(kind, kind)
    if section_name not in parser:
        raise ConfigError(f"{path}: missing [{section_name}] section")
    sec = parser[section_name]
    plan = Plan(kind, name, run_seed, dict(sec), path.parent, title=head.get("title", ""))
    try:
        if kind == "rb":
            plan.configs["rb"] = _rb_config(sec, run_seed)
        elif kind in ("lrb", "lrb-shield"):
            plan.configs.update(_lrb_configs(sec, run_seed, path.parent, kind == "lrb-shield"))
            plan.section["sweep"] = sec.get("sweep", "").strip()
        elif kind == "surjectivity":
            plan.configs["code"] = _load_code(sec.get("code", "steane").strip(), path.parent)
            cutoff = sec.get("cutoff", "").strip()
            plan.configs["cutoff"] = int(cutoff) if cutoff else None
        elif kind == "twirl":
            plan.configs["k"] = _get(sec, "k", int, 1)
            plan.configs["channel"] = _channel(sec)
            plan.configs["m_values"] = parse_values(_get(sec, "m_values", str), int)
            plan.configs["witness"] = _get(sec, "witness", _bool, False)
        elif kind == "fit":
            plan.configs["components"] = _get(sec, "components", int, 1)
            source = sec.get("source", "rb").strip()
            if source == "rb":
                if "rb" not in parser:
                    raise ConfigError(f"{path}: fit with source = rb needs an [rb] section")
                plan.configs["rb"] = _rb_config(parser["rb"], run_seed)
            elif source == "csv":
                csv = Path(_get(sec, "input", str))
                csv = csv if csv.is_absolute() else path.parent / csv
                if not csv.is_file():
                    raise ConfigError(f"input curve {csv} does not exist")
                plan.configs["csv"] = csv
            else:
                raise ConfigError(f"unknown fit source {source!r}")
    except (ValueError, qec_codes.CodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return plan


def _channel(sec) -> np.ndarray:
    k = _get(sec, "k", int, 1)
    if k not in (1, 2):
        raise ConfigError("twirl experiments support k in {1, 2}")
    kind = sec.get("channel", "depolarizing").strip()
    p = _get(sec, "p", float, 0.1)
    if not 0 <= p <= 1:
        raise ConfigError("channel parameter p must lie in [0, 1]")
    if kind == "depolarizing":
        return rb_engine.depolarizing_ptm(p, k)
    if kind == "amplitude_damping":
        if k != 1:
            raise ConfigError("amplitude damping is defined for k = 1")
        kraus = [np.array([[1, 0], [0, np.sqrt(1 - p)]]), np.array([[0, np.sqrt(p)], [0, 0]])]
        return rb_engine.ptm_from_kraus(kraus, 1)
    raise ConfigError(f"unknown channel {kind!r}")


# ---------------------------------------------------------------------------
# Execution


def _check_alternating(curve: SurvivalCurve, what: str) -> None:
    for pt in curve.points:
        want = 1.0 if pt.m % 2 == 0 else 0.0
        if pt.p_hat != want:
            raise InvariantViolation(f"{what}: survival {pt.p_hat} at m={pt.m}, expected {want}")


def _check_rb(cfg: rb_engine.RbConfig, curve: SurvivalCurve) -> None:
    if cfg.model == "ideal" and np.any(curve.p_hat != 1.0):
        raise InvariantViolation("ideal RB curve is not identically 1")
    if cfg.model == "hidden_register":
        _check_alternating(curve, "hidden-register RB")


def execute(plan: Plan, out: Path, plot: bool, threads: int) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    stem = out / plan.name
    written: list[Path] = []
    kind = plan.experiment
    title = plan.title

    if kind == "rb":
        cfg = plan.configs["rb"]
        curve = rb_engine.estimate_survival(cfg, workers=threads)
        _check_rb(cfg, curve)
        written.append(report.emit_csv(curve, f"{stem}.csv"))
        if plot:
            written.append(report.emit_plot(curve, f"{stem}.svg", title))

    elif kind in ("lrb", "lrb-shield"):
        sweep = plan.section.get("sweep", "")
        curves = {}
        for key, cfg in plan.configs.items():
            curve = estimate_lrb_survival(cfg, workers=threads)
            if cfg.reset_prob == 0 and cfg.surjective:
                _check_alternating(curve, "reset-free LRB")
            curves[key] = curve
        if sweep:
            written.append(report.emit_sweep_csv(curves, sweep, f"{stem}.csv"))
            if plot:
                m0 = min(next(iter(plan.configs.values())).m_values)
                written.append(report.emit_sweep_plot(curves, sweep, m0, f"{stem}.svg", title))
        else:
            (curve,) = curves.values()
            written.append(report.emit_csv(curve, f"{stem}.csv"))
            if plot:
                written.append(report.emit_plot(curve, f"{stem}.svg", title))

    elif kind == "surjectivity":
        code = plan.configs["code"]
        decoder = qec_codes.min_weight_decoder(code, cutoff=plan.configs["cutoff"])
        ok, pre = qec_codes.check_surjective(decoder)
        lines = ["block,logical,syndrome"]
        for b, ((block, _), table) in enumerate(zip(decoder.groups, pre.tables)):
            for idx, s in enumerate(table):
                label = rb_engine.pauli_basis(block.k)[idx].label()
                syn = "" if s < 0 else format(int(s), f"0{block.n_syndrome}b")
                lines.append(f"{b},{label},{syn}")
        path = Path(f"{stem}.csv")
        path.write_text("\n".join(lines) + "\n")
        summary = {
            "code": code.name, "n": code.n, "k": code.k, "surjective": ok,
            "unfilled_syndromes": [blk.report.get("unfilled", []) for blk, _ in decoder.groups],
        }
        written += [path, _write_json(summary, f"{stem}.json")]

    elif kind == "twirl":
        k, channel = plan.configs["k"], plan.configs["channel"]
        oracle = rb_engine.twirl_exact(channel, k)
        resid = oracle.commutation_residual()
        if resid > 1e-8:
            raise InvariantViolation(f"twirl fails to commute with the group (residual {resid:.3g})")
        ms = plan.configs["m_values"]
        curve = SurvivalCurve(
            [SurvivalPoint(m, rb_engine.sequence_survival(m, channel, k), 0.0, 0) for m in ms],
            {"seed": plan.seed},
        )
        written.append(report.emit_csv(curve, f"{stem}.csv"))
        summary = {
            "commutation_residual": resid,
            "twirl_eigenvalues": sorted(np.linalg.eigvals(oracle.T).real.round(12).tolist()),
        }
        if plan.configs["witness"]:
            w = rb_engine.multiplicity_witness()
            summary["witness"] = {
                rep.name: {
                    "dimension": rep.dimension,
                    "commutant_dim": rep.commutant_dim,
                    "multiplicity_free": rep.multiplicity_free,
                    "scalar_action": rep.scalar_action,
                    "scalar_residual": rep.scalar_residual,
                }
                for rep in (w.standard, w.hidden)
            }
        written.append(_write_json(summary, f"{stem}.json"))
        if plot:
            written.append(report.emit_plot(curve, f"{stem}.svg", title))

    elif kind == "fit":
        comps = plan.configs["components"]
        overlays = {}
        if "rb" in plan.configs:
            cfg = plan.configs["rb"]
            curve = rb_engine.estimate_survival(cfg, workers=threads)
            _check_rb(cfg, curve)
            if cfg.model == "depolarizing" and cfg.k <= 2:
                chan = rb_engine.depolarizing_ptm(cfg.p, cfg.k)
                exact = [rb_engine.sequence_survival(m, chan, cfg.k) for m in curve.m]
                overlays["exact"] = (curve.m, exact)
        else:
            curve = report.read_csv(plan.configs["csv"])
        fit = rb_engine.fit_exponential(curve, comps)
        overlays["fit"] = (curve.m, fit.predict(curve.m))
        written.append(report.emit_csv(curve, f"{stem}.csv"))
        summary = {
            "components": [{"amplitude": a, "lambda": lam} for a, lam in fit.components],
            "rms_residual": fit.residual,
            "degenerate": fit.degenerate,
        }
        written.append(_write_json(summary, f"{stem}_fit.json"))
        if plot:
            written.append(report.emit_plot(curve, f"{stem}.svg", title, overlays))
    return written


def _write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in ("run",) + EXPERIMENTS:
        p = sub.add_parser(cmd, help="run a spec" if cmd == "run" else f"run a {cmd} spec")
        p.add_argument("spec", help="spec file or bundled spec name")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--plot", action="store_true", help="also render an SVG figure")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
        p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    sub.add_parser("list", help="list bundled specs")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_specs()))
        return EXIT_OK
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        plan = load_plan(args.spec, args.seed)
        if args.command != "run" and args.command != plan.experiment:
            raise ConfigError(f"spec is a {plan.experiment!r} experiment, not {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        written = execute(plan, Path(args.out), args.plot, args.threads)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    for path in written:
        log.info("wrote %s", path)
    log.info("%s finished in %.1fs", plan.name, time.perf_counter() - start)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
