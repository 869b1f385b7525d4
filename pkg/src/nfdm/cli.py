"""Command-line interface: transforms, propagation and experiment presets.

Subcommands: nft, inft, propagate, experiment, stats. Exit codes: 0 success,
1 usage error, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:                       # python < 3.11
    import tomli as tomllib

from . import experiments
from .core import (DiscreteSpectrum, TimeGrid, TimeSignal, signal_from_csv,
                   signal_from_json, signal_to_csv, signal_to_json)
from .darboux import multisoliton, suggested_grid
from .nlse import EnergyBlowup, LinkConfig, ssfm_propagate
from .oracles import UnsupportedOrder, hirota_multisoliton, rh_multisoliton
from .zs import (EigenSearchConfig, NonDecayingSignal, continuous_spectrum,
                 discrete_amplitudes, find_eigenvalues, spectrum_from_json,
                 spectrum_to_json)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class UsageError(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_signal(path: str) -> TimeSignal:
    if path.endswith(".json"):
        return signal_from_json(path)
    return signal_from_csv(path)


def _write_signal(signal: TimeSignal, path: str):
    if path.endswith(".json"):
        signal_to_json(signal, path)
    else:
        signal_to_csv(signal, path)


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_csv(path, rows, config_hash: str):
    """CSV with a schema-version/config-hash comment line then the header."""
    with open(path, "w") as fh:
        fh.write(f"# schema={experiments.SCHEMA_VERSION} config={config_hash}\n")
        if not rows:
            return
        cols = list(rows[0].keys())
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(row[c]) for c in cols) + "\n")


def _fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


# ---------------------------------------------------------------------------
# subcommands


def cmd_nft(args) -> int:
    try:
        sig = _read_signal(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    lam_grid = np.linspace(args.lambda_min, args.lambda_max, args.lambda_points)
    cfg = EigenSearchConfig.for_signal(sig) if args.box is None else \
        EigenSearchConfig(search_box=tuple(args.box))
    check = not args.no_decay_check
    try:
        eigs, details = find_eigenvalues(sig, cfg, return_details=True,
                                         check_decay=check)
        ds = discrete_amplitudes(sig, eigs, check_decay=check) if eigs \
            else DiscreteSpectrum.empty()
        cs = continuous_spectrum(sig, lam_grid, check_decay=check)
    except NonDecayingSignal as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    spectrum_to_json(ds, cs, args.output, extra={
        "residuals": [float(r) for r in details["residuals"]],
        "n_seeds": details["n_seeds"],
    })
    print(f"wrote {args.output}: {len(ds)} eigenvalue(s), "
          f"{len(cs)} continuous samples")
    return EXIT_OK


def cmd_inft(args) -> int:
    try:
        ds, _ = spectrum_from_json(args.input)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.n is not None:
        grid = TimeGrid(args.n, args.t_start, args.dt)
    else:
        grid = suggested_grid(ds, dt=args.dt)
    try:
        if args.method == "darboux":
            sig = multisoliton(ds, grid)
        elif args.method == "rh":
            sig = rh_multisoliton(ds, grid)
        else:
            sig = hirota_multisoliton(ds, grid)
    except UnsupportedOrder as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write_signal(sig, args.output)
    print(f"wrote {args.output}: {grid.n_samples} samples via {args.method}")
    return EXIT_OK


def cmd_propagate(args) -> int:
    try:
        sig = _read_signal(args.input)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    link = LinkConfig(z_total=abs(args.z), n_steps=args.steps,
                      noise_density=args.noise_density,
                      noise_bandwidth=args.noise_bandwidth, seed=args.seed)
    try:
        if args.z >= 0:
            out = ssfm_propagate(sig, link)
        else:
            from .nlse import backpropagate
            out = backpropagate(sig, link)
    except EnergyBlowup as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_signal(out, args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        with open(args.config, "rb") as fh:
            config = tomllib.load(fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except tomllib.TOMLDecodeError as exc:
        print(f"error: config parse: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    exp = config.get("experiment", {})
    name = exp.get("id")
    if not name:
        print("error: config needs [experiment] id", file=sys.stderr)
        return EXIT_VALIDATION
    overrides = {k: v for k, v in exp.items() if k != "id"}
    import os
    os.makedirs(args.output_dir, exist_ok=True)
    chash = _config_hash(config)
    try:
        rows, summary, extra = experiments.run_preset(name, overrides)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NonDecayingSignal, EnergyBlowup) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    csv_path = f"{args.output_dir}/{name}.csv"
    write_csv(csv_path, rows, chash)
    summary = dict(summary)
    summary["schema"] = experiments.SCHEMA_VERSION
    summary["config_hash"] = chash
    summary["experiment_id"] = name
    with open(f"{args.output_dir}/{name}-summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    for key, table in extra.items():
        write_csv(f"{args.output_dir}/{name}-{key}.csv", table, chash)
    print(f"wrote {csv_path} and summary")
    return EXIT_OK


def cmd_stats(args) -> int:
    overrides = {
        "seed": args.seed,
        "noise_density": args.density,
        "n_trials": args.trials,
    }
    if args.eigenvalue is not None:
        overrides["eigenvalue"] = [args.eigenvalue[0], args.eigenvalue[1]]
    rows, summary, _ = experiments.run_preset("eig-noise", overrides)
    payload = dict(summary)
    with open(args.output, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(f"wrote {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nfdm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nft", help="forward transform of a signal file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--lambda-min", type=float, default=-4.0)
    s.add_argument("--lambda-max", type=float, default=4.0)
    s.add_argument("--lambda-points", type=int, default=257)
    s.add_argument("--box", type=float, nargs=4, default=None,
                   metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    s.add_argument("--no-decay-check", action="store_true",
                   help="accept signals that have not decayed at the window "
                        "edges (noisy receiver input)")
    s.set_defaults(func=cmd_nft)

    s = sub.add_parser("inft", help="synthesize a waveform from a spectrum file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--method", choices=("darboux", "rh", "hirota"),
                   default="darboux")
    s.add_argument("--dt", type=float, default=1.0 / 512)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--t-start", type=float, default=-20.0)
    s.set_defaults(func=cmd_inft)

    s = sub.add_parser("propagate", help="split-step propagation of a signal file")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--z", type=float, required=True,
                   help="distance; negative backpropagates")
    s.add_argument("--steps", type=int, default=500)
    s.add_argument("--noise-density", type=float, default=0.0)
    s.add_argument("--noise-bandwidth", type=float, default=2.0)
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("experiment", help="run a preset from a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--output-dir", required=True)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("stats", help="eigenvalue noise-statistics report")
    s.add_argument("--output", required=True)
    s.add_argument("--density", type=float, default=2e-4)
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--eigenvalue", type=float, nargs=2, default=None,
                   metavar=("RE", "IM"))
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
