"""Command-line entry point: ``scforge <command> [flags]``.

Every flag has a config-file twin (same name, JSON object). Values are
resolved as defaults, then ``--config``, then explicit flags. The resolved
set is embedded in every report and can be written back with
``--save-config`` to replay a run exactly.

Exit codes: 0 success, 1 unsatisfied condition or failed verdict under
``--strict``, 2 any error (bad flag, unknown command, module error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .bounds import (
    clique_lll_bound,
    cluster_expansion_bound,
    corollary1_bound,
    event_probabilities,
    mt_entropy_lower_bound,
    mt_support_lower_bound,
    noneq_count_lower_bound,
)
from .csp import build_csp_instance
from .entropy import h_alpha_product
from .equivalence import canonical_form
from .errors import BadFlag, ForgeError, OrbitTooLarge, ResampleCapExceeded, UnknownCommand
from .model import (
    Assignment,
    CodeParams,
    build_coupled_protograph,
    export_matrix,
    import_matrix,
    lift_to_parity_check,
    validate_params,
)
from .mt import DEFAULT_RESAMPLE_CAP, mt_batch_stats, run_artifact, run_many
from .oracle import (
    check_bounds,
    empirical_support_and_entropy,
    exhaustive_count,
    exhaustive_noneq_count,
    survival_product_check,
)
from .structures import check_absorbing_set, count_active_structures, girth

__all__ = ["run_command", "main", "COMMANDS", "DEFAULTS"]

COMMANDS = ("bounds", "construct", "verify", "enumerate", "entropy", "export")

DEFAULTS: dict[str, Any] = {
    "gamma": None,
    "kappa": None,
    "m": None,
    "Z": None,
    "L": 10,
    "g": [2],
    "p": None,
    "q": None,
    "seed": 0,
    "seeds": None,
    "variant": "paper_recursive",
    "cap": None,
    "alpha": "inf",
    "format": None,
    "out": None,
    "workers": 1,
    "strict": False,
    "assignment": None,
    "input": None,
    "vn_set": None,
}

ORACLE_SPACE_LIMIT = 2**24


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would call sys.exit(2)
        raise BadFlag(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--gamma", type=int, default=S, help="base-matrix rows")
    common.add_argument("--kappa", type=int, default=S, help="base-matrix columns")
    common.add_argument("--m", type=int, default=S, help="coupling memory")
    common.add_argument("--Z", type=int, default=S, help="lifting size")
    common.add_argument("--L", type=int, default=S, help="coupling length (replicas)")
    common.add_argument("--g", default=S, help="cycle half-lengths, e.g. 2 or 2,3")
    common.add_argument("--p", default=S, help="partition distribution, comma separated (fractions ok)")
    common.add_argument("--q", default=S, help="lifting distribution, comma separated")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--seeds", default=S, help="N (0..N-1), a:b, or a comma list")
    common.add_argument("--variant", default=S, choices=["paper_recursive", "classic_least_index"])
    common.add_argument("--cap", type=int, default=S, help="resample cap (construct) or space cap (enumerate)")
    common.add_argument("--alpha", default=S, help="Renyi order (> 0, != 1, or inf)")
    common.add_argument("--format", default=S, help="json | csv | alist")
    common.add_argument("--out", default=S, help="output path (stdout if omitted)")
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--save-config", default=None, help="write the resolved config here")
    common.add_argument("--workers", type=int, default=S)
    common.add_argument("--strict", action="store_true", default=S)
    common.add_argument("--assignment", default=S, help="assignment or construct artifact (JSON)")
    common.add_argument("--input", default=S, help="matrix or artifact file to convert")
    common.add_argument("--vn-set", dest="vn_set", default=S, help="variable nodes for the absorbing-set check")

    parser = _Parser(prog="scforge", description="QC-SC-LDPC design via Moser-Tardos resampling")
    parser.add_argument("--version", action="version", version=f"scforge {__version__}")
    sub = parser.add_subparsers(dest="command")
    helps = {
        "bounds": "counting, LLL and entropy bound reports",
        "construct": "run MT and emit designs",
        "verify": "girth, active structures and absorbing sets of a design",
        "enumerate": "exhaustive oracle counts and bound verdicts",
        "entropy": "Renyi entropies and the MT diversity experiment",
        "export": "matrix format conversion",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


# ---------------------------------------------------------------------------
# config resolution


def _split(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [s.strip() for s in str(value).split(",") if s.strip()]


def _parse_seeds(value) -> list[int] | None:
    if value is None:
        return None
    if isinstance(value, int):
        return list(range(value))
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value).strip()
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b)))
    if "," in text:
        return [int(v) for v in _split(text)]
    return list(range(int(text)))


def _parse_alpha(value) -> float | str:
    text = str(value).strip().lower()
    if text in ("inf", "infinity"):
        return "inf"
    return float(text)


def _normalize(cfg: dict) -> dict:
    out = dict(cfg)
    try:
        out["g"] = [int(v) for v in _split(out["g"])]
        for key in ("p", "q"):
            if out[key] is not None:
                out[key] = [str(Fraction(v)) for v in _split(out[key])]
        out["seeds"] = _parse_seeds(out["seeds"])
        out["alpha"] = _parse_alpha(out["alpha"])
        if out["vn_set"] is not None:
            out["vn_set"] = [int(v) for v in _split(out["vn_set"])]
        for key in ("gamma", "kappa", "m", "Z", "L", "seed", "workers", "cap"):
            if out[key] is not None:
                out[key] = int(out[key])
        out["strict"] = bool(out["strict"])
    except (TypeError, ValueError) as exc:
        raise BadFlag(f"cannot parse configuration: {exc}") from None
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadFlag(f"cannot read config {args.config}: {exc}") from None
        loaded = loaded.get("config", loaded)  # accept a whole report too
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise BadFlag(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k in DEFAULTS})
    for key in DEFAULTS:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return _normalize(cfg)


def _params(cfg: dict, fallback: dict | None = None) -> CodeParams:
    raw = dict(fallback or {})
    for key, name in (("gamma", "gamma"), ("kappa", "kappa"), ("m", "memory"), ("Z", "lift"),
                      ("L", "coupling_len"), ("p", "spread_dist"), ("q", "lift_dist")):
        if cfg[key] is not None and not (fallback and key == "L" and cfg[key] == DEFAULTS["L"]):
            raw[name] = cfg[key]
    missing = [k for k in ("gamma", "kappa", "memory", "lift") if k not in raw]
    if missing:
        raise BadFlag(f"missing parameters: {missing} (use --gamma --kappa --m --Z)")
    return validate_params(raw)


def _alpha(cfg: dict) -> float:
    return math.inf if cfg["alpha"] == "inf" else float(cfg["alpha"])


# ---------------------------------------------------------------------------
# output helpers


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return v.item()
    return v


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _emit(text: str, cfg: dict, stdout) -> None:
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
    else:
        stdout.write(text)


def _sidecar(cfg: dict, suffix: str) -> Path | None:
    if not cfg["out"]:
        return None
    p = Path(cfg["out"])
    return p.with_name(p.stem + suffix)


def _instance_summary(instance) -> dict:
    return {
        "n_events": instance.n_events,
        "delta": instance.delta,
        "neighbor_degree": instance.neighbor_degree,
        "w_max": instance.w_max,
        "event_cells": instance.event_cells,
        "event_size": instance.event_size,
    }


# ---------------------------------------------------------------------------
# commands


def _cmd_bounds(cfg, stdout) -> int:
    params = _params(cfg)
    alpha = _alpha(cfg)
    instance = build_csp_instance(params, cfg["g"])
    probs = event_probabilities(params, instance)
    c1 = corollary1_bound(params, instance)
    reports = {"corollary1": c1.to_dict(), "corollary2": noneq_count_lower_bound(c1, params.gamma, params.kappa).to_dict()}
    if instance.n_events:
        try:
            reports["clique_lll"] = clique_lll_bound(instance, probs).to_dict()
        except ForgeError as exc:
            reports["clique_lll"] = {"error": str(exc)}
        if instance.n_events <= 30 and instance.delta > 1:
            reports["cluster_expansion_lll"] = cluster_expansion_bound(
                instance, probs, Fraction(1, instance.delta - 1)
            ).to_dict()
    support = mt_support_lower_bound(params, instance, alpha)
    for rep in (support.eq19, support.eq20, support.eq19_noneq, support.eq20_noneq):
        reports[rep.name] = rep.to_dict()
    ent = mt_entropy_lower_bound(params, instance, alpha=alpha)
    doc = {
        "command": "bounds",
        "config": cfg,
        "params": params.to_dict(),
        "instance": _instance_summary(instance),
        "max_event_probability": max(probs, default=Fraction(0)),
        "reports": reports,
        "entropy": {
            "alpha": alpha,
            "h_omega": ent.h_omega,
            "lemma3": ent.lemma3,
            "lemma4": ent.lemma4,
            "lemma5": ent.lemma5,
        },
    }
    _emit(_dumps(doc), cfg, stdout)
    return 1 if cfg["strict"] and not c1.satisfied else 0


def _cmd_construct(cfg, stdout) -> int:
    params = _params(cfg)
    instance = build_csp_instance(params, cfg["g"])
    cap = cfg["cap"] or DEFAULT_RESAMPLE_CAP
    seeds = cfg["seeds"] if cfg["seeds"] is not None else [cfg["seed"]]
    try:
        results = run_many(params, instance, seeds, cfg["variant"], cap, cfg["workers"])
    except ResampleCapExceeded as exc:
        doc = {"command": "construct", "config": cfg, "error": str(exc)}
        if exc.stats is not None:
            doc["partial"] = run_artifact(params, exc.assignment, exc.stats)
        _emit(_dumps(doc), cfg, stdout)
        return 2

    fmt = cfg["format"] or "json"
    if len(results) == 1:
        assignment, stats = results[0]
        H = lift_to_parity_check(build_coupled_protograph(params, assignment), params, assignment)
        doc = {"command": "construct", "config": cfg, **run_artifact(params, assignment, stats)}
        doc["lifted_matrix"] = {"rows": H.rows, "cols": H.cols, "nnz": H.nnz}
        mat_fmt = fmt if fmt in ("alist",) else "alist"
        side = _sidecar(cfg, f".H.{mat_fmt}")
        if side is not None:
            side.write_bytes(export_matrix(H, mat_fmt))
            doc["lifted_matrix"]["path"] = side.name
        _emit(_dumps(doc), cfg, stdout)
        return 0

    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "variant", "total_resamples", "initial_violations", "terminated", "canonical"])
        for a, st in results:
            try:
                key = canonical_form(a).hex()
            except OrbitTooLarge:
                key = ""
            w.writerow([st.seed, st.variant, st.total_resamples, st.initial_violations, st.terminated, key])
        _emit(buf.getvalue(), cfg, stdout)
        return 0
    try:
        batch = mt_batch_stats(params, instance, seeds, cfg["variant"], cap, results=results)
        batch_doc = batch.to_dict()
    except OrbitTooLarge:
        batch_doc = mt_batch_stats(params, instance, seeds, cfg["variant"], cap, canonical=False, results=results).to_dict()
    doc = {
        "command": "construct",
        "config": cfg,
        "params": params.to_dict(),
        "batch": batch_doc,
        "runs": [{"seed": st.seed, "assignment": a.to_dict(), "stats": st.to_dict()} for a, st in results],
    }
    _emit(_dumps(doc), cfg, stdout)
    return 1 if cfg["strict"] and not all(batch_doc["checks"].values()) else 0


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadFlag(f"cannot read {what} {path}: {exc}") from None


def _cmd_verify(cfg, stdout) -> int:
    if not cfg["assignment"]:
        raise BadFlag("verify needs --assignment FILE")
    data = _load_json(cfg["assignment"], "assignment")
    params = _params(cfg, fallback=data.get("params"))
    assignment = Assignment.from_dict(data.get("assignment", data)).validate(params)
    proto = build_coupled_protograph(params, assignment)
    H = lift_to_parity_check(proto, params, assignment)
    active = count_active_structures(params, assignment, cfg["g"])
    doc = {
        "command": "verify",
        "config": cfg,
        "params": params.to_dict(),
        "assignment": assignment.to_dict(),
        "active_structures": {str(k): v for k, v in active.items()},
        "feasible": all(v == 0 for v in active.values()),
        "girth_protograph": girth(proto),
        "girth_lifted": girth(H),
        "lifted_matrix": {"rows": H.rows, "cols": H.cols, "nnz": H.nnz},
    }
    if cfg["vn_set"]:
        v = check_absorbing_set(H, cfg["vn_set"])
        doc["absorbing_set"] = {"vn_set": cfg["vn_set"], "a": v.a, "b": v.b, "is_absorbing": v.is_absorbing}
    _emit(_dumps(doc), cfg, stdout)
    return 1 if cfg["strict"] and not doc["feasible"] else 0


def _cmd_enumerate(cfg, stdout) -> int:
    params = _params(cfg)
    instance = build_csp_instance(params, cfg["g"])
    kwargs = {"g_set": cfg["g"], "workers": cfg["workers"], "instance": instance}
    if cfg["cap"]:
        kwargs["cap"] = cfg["cap"]
    try:
        report = exhaustive_noneq_count(params, **kwargs)
    except OrbitTooLarge:
        report = exhaustive_count(params, **kwargs)
    check_bounds(report, params, instance)
    ok = all(b.holds for b in report.bounds_checked)
    if (cfg["format"] or "json") == "csv":
        _emit(report.to_csv(), cfg, stdout)
    else:
        doc = {"command": "enumerate", "config": cfg, **report.to_dict()}
        doc["survival_product"] = survival_product_check(params, instance, report)
        _emit(_dumps(doc), cfg, stdout)
    unsatisfied = not corollary1_bound(params, instance).satisfied
    return 1 if cfg["strict"] and (not ok or unsatisfied) else 0


def _cmd_entropy(cfg, stdout) -> int:
    params = _params(cfg)
    alpha = _alpha(cfg)
    instance = build_csp_instance(params, cfg["g"])
    ent = mt_entropy_lower_bound(params, instance, alpha=alpha)
    doc = {
        "command": "entropy",
        "config": cfg,
        "params": params.to_dict(),
        "alpha": alpha,
        "h_omega": h_alpha_product(params, alpha),
        "mt_entropy_lower_bounds": {"lemma3": ent.lemma3, "lemma4": ent.lemma4, "lemma5": ent.lemma5},
    }
    ok = True
    if cfg["seeds"]:
        oracle = None
        if params.alphabet_size**params.n_cells <= ORACLE_SPACE_LIMIT:
            try:
                oracle = exhaustive_noneq_count(params, cfg["g"], instance=instance, workers=cfg["workers"])
            except OrbitTooLarge:
                oracle = exhaustive_count(params, cfg["g"], instance=instance, workers=cfg["workers"])
        exp = empirical_support_and_entropy(
            params, instance, len(cfg["seeds"]), 2, cfg["seeds"], cfg["variant"],
            cfg["cap"] or DEFAULT_RESAMPLE_CAP, oracle, cfg["workers"],
        )
        doc["experiment"] = exp
        ok = all(exp["verdicts"].values())
    _emit(_dumps(doc), cfg, stdout)
    return 1 if cfg["strict"] and not ok else 0


def _cmd_export(cfg, stdout) -> int:
    if not cfg["input"]:
        raise BadFlag("export needs --input FILE")
    path = Path(cfg["input"])
    target = cfg["format"] or "alist"
    if path.suffix == ".alist":
        matrix = import_matrix(path.read_text(), "alist")
    else:
        data = _load_json(str(path), "input")
        if "assignment" in data or "partition" in data:
            params = _params(cfg, fallback=data.get("params"))
            a = Assignment.from_dict(data.get("assignment", data)).validate(params)
            matrix = lift_to_parity_check(build_coupled_protograph(params, a), params, a)
        else:
            matrix = import_matrix(path.read_text(), "json")
    _emit(export_matrix(matrix, target).decode(), cfg, stdout)
    return 0


_HANDLERS = {
    "bounds": _cmd_bounds,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "enumerate": _cmd_enumerate,
    "entropy": _cmd_entropy,
    "export": _cmd_export,
}


def run_command(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Run one CLI invocation and return its exit code (never raises)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
            raise UnknownCommand(f"unknown command {argv[0]!r}; choose from {', '.join(COMMANDS)}")
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        if args.command is None:
            raise UnknownCommand(f"no command given; choose from {', '.join(COMMANDS)}")
        cfg = resolve_config(args)
        if args.save_config:
            Path(args.save_config).write_text(_dumps({"command": args.command, **cfg}))
        return _HANDLERS[args.command](cfg, stdout)
    except ForgeError as exc:
        stderr.write(f"scforge: {type(exc).__name__}: {exc}\n")
        return 2
    except (OSError, ValueError) as exc:
        stderr.write(f"scforge: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
