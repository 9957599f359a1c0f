"""Command-line front end.

Subcommands::

    skqes run --config acceptance.cfg [--seed S] [--trials N] [--jobs J] [--out FILE]
    skqes verify-design --family clifford --t 2 --n 1 [--mode exact]
    skqes qca --scheme twodes_tag --param m=1 --param t=1 --attack replace_tau
    skqes list

Exit codes: 0 pass, 1 a security verdict differs from the expectation, 2 usage or
configuration error, 3 an inconclusive verdict.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .auth import ATTACK_IDS, NAMED_UNITARIES, make_attack, qca_report
from .designs import CLIFFORD_SIZES, design_deviation, make_family
from .games import (GAMES, NOTIONS, TRANSFORMERS, AdvantageEstimate, make_adversary,
                    run_trials, summarize, verdict)
from .games.adversaries import QUANTUM_ADVERSARIES
from .games.classical import CLASSICAL_ADVERSARIES
from .schemes import SCHEME_IDS, make_scheme

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
OUT_DIR_ENV = "SKQES_OUT_DIR"
SUMMARY_FIELDS = ("game", "scheme", "adversary", "trials", "successes", "p_hat",
                  "ci_lo", "ci_hi", "verdict")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def bundled_config(name: str = "acceptance.cfg") -> Path:
    return Path(str(resources.files("skqes") / "configs" / name))


def load_config(path: str | Path) -> dict:
    """Read a JSON config; the row list is mandatory, everything else has defaults."""
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(cfg, dict) or not isinstance(cfg.get("rows"), list) or not cfg["rows"]:
        raise ConfigError(f"{path}: expected an object with a non-empty 'rows' list")
    return cfg


def _spec(value, what: str) -> tuple[str, dict]:
    if isinstance(value, str):
        return value, {}
    if isinstance(value, dict) and "id" in value:
        params = {k: v for k, v in value.items() if k != "id"}
        return value["id"], params
    raise ConfigError(f"{what} must be an id or an object with an 'id' field")


def _label(ident: str, params: dict) -> str:
    if not params:
        return ident
    return f"{ident}(" + ",".join(f"{k}={json.dumps(v, sort_keys=True)}"
                                   for k, v in sorted(params.items())) + ")"


def resolve_row(row: dict, index: int, defaults: dict) -> dict:
    """Check ids and parameters of one row and build its scheme and adversary."""
    try:
        game = row["game"]
    except KeyError:
        raise ConfigError(f"row {index}: missing 'game'") from None
    if game not in NOTIONS and game not in GAMES:
        raise ConfigError(f"row {index}: unknown game {game!r}")
    scheme_id, scheme_params = _spec(row.get("scheme"), f"row {index} scheme")
    adv_id, adv_params = _spec(row.get("adversary"), f"row {index} adversary")
    trials = row.get("trials", defaults.get("trials", 1000))
    if not isinstance(trials, int) or trials <= 0:
        raise ConfigError(f"row {index}: trials must be a positive integer, got {trials!r}")
    expect = row.get("expect")
    if expect not in (None, "secure", "broken"):
        raise ConfigError(f"row {index}: expect must be 'secure' or 'broken'")
    try:
        scheme = make_scheme(scheme_id, **scheme_params)
        adversary = make_adversary(adv_id, **adv_params)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"row {index}: {exc}") from exc
    return {
        "index": index, "game": game, "scheme": scheme, "adversary": adversary,
        "scheme_label": _label(scheme_id, scheme_params),
        "adversary_label": _label(adv_id, adv_params),
        "trials": trials, "max_queries": row.get("max_queries"), "expect": expect,
    }


def manifest_for(config_path, cfg: dict, rows: list[dict], seed: int) -> dict:
    return {
        "config": str(config_path),
        "rows": [{"game": r["game"], "scheme": r["scheme_label"],
                  "adversary": r["adversary_label"], "trials": r["trials"],
                  "max_queries": r["max_queries"], "expect": r["expect"]} for r in rows],
        "thresholds": cfg.get("thresholds", {}),
        "base_seed": seed,
        "version": __version__,
    }


def manifest_hash(manifest: dict) -> str:
    """Hash of the manifest without timestamps."""
    body = {k: v for k, v in manifest.items() if k not in ("started", "finished")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def evaluate_row(row: dict, seed: int, jobs: int, thresholds: dict, sink=None,
                 tag: str = "") -> dict:
    """Run one row and return its summary object.  Trial records go to ``sink``."""
    games = NOTIONS[row["game"]][:2] if row["game"] in NOTIONS else (row["game"],)
    estimates = []
    for game in games:
        records = run_trials(game, row["scheme"], row["adversary"], row["trials"], seed,
                             row["max_queries"], jobs)
        if sink is not None:
            for rec in records:
                sink.write(json.dumps({"manifest": tag, "row": row["index"], "kind": "trial",
                                       **rec.to_dict()}, sort_keys=True) + "\n")
        estimates.append(summarize(records))
    summary = {"manifest": tag, "row": row["index"], "kind": "summary", "game": row["game"],
               "scheme": row["scheme_label"], "adversary": row["adversary_label"],
               "trials": row["trials"], "expect": row["expect"]}
    if len(estimates) == 1:
        e = estimates[0]
        summary.update(successes=e.successes, p_hat=e.p_hat, ci_lo=e.ci_lo, ci_hi=e.ci_hi,
                       verdict="n/a")
        return summary
    signed = NOTIONS[row["game"]][2]
    adv = AdvantageEstimate.difference(*estimates, signed=signed)
    summary.update(successes=[e.successes for e in estimates], p_hat=adv.value,
                   ci_lo=adv.ci_lo, ci_hi=adv.ci_hi,
                   games={g: e.p_hat for g, e in zip(games, estimates)},
                   verdict=verdict(adv.value, thresholds.get("secure_max", 0.05),
                                   thresholds.get("broken_min", 0.25)))
    return summary


def _table(summaries: list[dict]) -> str:
    head = f"{'#':>2}  {'game':<10} {'scheme':<34} {'adversary':<28} {'trials':>6} " \
           f"{'value':>8} {'ci95':>17}  {'verdict':<12} expect"
    lines = [head, "-" * len(head)]
    for s in summaries:
        lines.append(f"{s['row']:>2}  {s['game']:<10} {s['scheme'][:34]:<34} "
                     f"{s['adversary'][:28]:<28} {s['trials']:>6} {s['p_hat']:>+8.4f} "
                     f"[{s['ci_lo']:+.3f},{s['ci_hi']:+.3f}]  {s['verdict']:<12} "
                     f"{s['expect'] or '-'}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    config_path = args.config or bundled_config()
    try:
        cfg = load_config(config_path)
        defaults = dict(cfg.get("defaults", {}))
        if args.trials is not None:
            if args.trials <= 0:
                raise ConfigError("--trials must be positive")
            defaults["trials"] = args.trials
        rows = []
        for i, raw in enumerate(cfg["rows"]):
            raw = dict(raw)
            if args.trials is not None:
                raw["trials"] = args.trials
            rows.append(resolve_row(raw, i, defaults))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    seed = args.seed if args.seed is not None else int(defaults.get("seed", 0))
    thresholds = cfg.get("thresholds", {})
    manifest = manifest_for(config_path, cfg, rows, seed)
    tag = manifest_hash(manifest)
    manifest["started"] = time.strftime("%Y-%m-%dT%H:%M:%S")

    out_path = args.out
    if out_path is not None and os.environ.get(OUT_DIR_ENV) and not os.path.isabs(out_path):
        out_path = os.path.join(os.environ[OUT_DIR_ENV], out_path)
    sink = open(out_path, "w") if out_path else None
    try:
        summaries = []
        for row in rows:
            # every row gets its own seed range so rows are reproducible one by one
            s = evaluate_row(row, seed + 1_000_000 * row["index"], args.jobs, thresholds,
                             sink, tag)
            summaries.append(s)
            line = json.dumps(s, sort_keys=True)
            print(line, flush=True)
            if sink is not None:
                sink.write(line + "\n")
        manifest["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        if sink is not None:
            sink.write(json.dumps({"kind": "manifest", "manifest": tag, **manifest},
                                  sort_keys=True) + "\n")
    finally:
        if sink is not None:
            sink.close()
    print()
    print(_table(summaries))
    decided = [s for s in summaries if s["expect"] is not None]
    if any(s["verdict"] in ("secure", "broken") and s["verdict"] != s["expect"] for s in decided):
        status = EXIT_FAIL
    elif any(s["verdict"] == "inconclusive" for s in decided):
        status = EXIT_INCONCLUSIVE
    else:
        status = EXIT_PASS
    print(f"\nmanifest {tag}: {['pass', 'FAIL', 'usage', 'INCONCLUSIVE'][status]}")
    return status


# ---------------------------------------------------------------------------
# verify-design / qca / list
# ---------------------------------------------------------------------------

def cmd_verify_design(args) -> int:
    try:
        family = make_family(args.family, args.n)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.mode == "exact" and not family.enumerable:
        print(f"error: {args.family} on {args.n} qubits cannot be enumerated; use --mode sampled",
              file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(args.seed)
    d = (2 ** args.n) ** args.t
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    dev = design_deviation(family, args.t, x, args.mode, args.samples, rng)
    tol = 1e-9 if args.mode == "exact" else 5e-2
    ok = dev <= tol
    print(json.dumps({"family": args.family, "t": args.t, "n": args.n, "mode": args.mode,
                      "max_deviation": dev, "tolerance": tol, "pass": ok}))
    return EXIT_PASS if ok else EXIT_FAIL


def _parse_params(items: list[str]) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def cmd_qca(args) -> int:
    try:
        scheme = make_scheme(args.scheme, **_parse_params(args.param))
        attack = make_attack(scheme, args.attack)
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = qca_report(scheme, attack, args.mode, args.samples, np.random.default_rng(args.seed))
    report["threshold"] = args.threshold
    report["pass"] = report["distance"] <= args.threshold
    print(json.dumps(report))
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def cmd_list(args) -> int:
    listing = {
        "schemes": list(SCHEME_IDS),
        "games": list(GAMES),
        "notions": list(NOTIONS),
        "adversaries": sorted({**QUANTUM_ADVERSARIES, **CLASSICAL_ADVERSARIES}),
        "reductions": sorted(TRANSFORMERS),
        "attacks": [a for a in ATTACK_IDS if "<" not in a]
                   + [f"unitary:{u}" for u in NAMED_UNITARIES],
        "families": ["pauli", f"clifford (enumerable n<={max(k for k in CLIFFORD_SIZES if k < 3)})",
                     "haar"],
    }
    for key, values in listing.items():
        print(f"{key}: {', '.join(values)}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skqes", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment rows of a config file")
    run.add_argument("--config", help="JSON config (default: bundled acceptance.cfg)")
    run.add_argument("--seed", type=int, help="base seed (overrides the config)")
    run.add_argument("--trials", type=int, help="trials per game for every row")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--out", help=f"JSON-lines results file (relative to ${OUT_DIR_ENV} if set)")
    run.set_defaults(func=cmd_run)

    vd = sub.add_parser("verify-design", help="compare a family's twirl with the Haar moment")
    vd.add_argument("--family", required=True, choices=["pauli", "clifford", "haar"])
    vd.add_argument("--t", type=int, required=True)
    vd.add_argument("--n", type=int, required=True)
    vd.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    vd.add_argument("--samples", type=int, default=10_000)
    vd.add_argument("--seed", type=int, default=0)
    vd.set_defaults(func=cmd_verify_design)

    qca = sub.add_parser("qca", help="one-time ciphertext authentication distance")
    qca.add_argument("--scheme", required=True)
    qca.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="scheme parameter (JSON value), repeatable")
    qca.add_argument("--attack", required=True)
    qca.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    qca.add_argument("--samples", type=int, default=500)
    qca.add_argument("--threshold", type=float, default=1e-6)
    qca.add_argument("--seed", type=int, default=0)
    qca.set_defaults(func=cmd_qca)

    ls = sub.add_parser("list", help="list the available ids")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
