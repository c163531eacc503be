"""Command-line interface: ``franson-gup {levels,rate,sweep,mc,chsh}``.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 malformed config.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import analytic, bell
from .config import ConfigError, RunConfig, load_config
from .montecarlo import accidental_fraction, expected_probabilities, mc_records, run
from .output import FORMATS, ResultEnvelope, write_envelope
from .perturbation import level_energies

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_CONFIG = 4

log = logging.getLogger("franson_gup")


def cmd_levels(cfg: RunConfig) -> ResultEnvelope:
    sysm = cfg.model_system()
    levels = []
    for label, n in zip(("1", "2", "3"), cfg.system.levels):
        le = level_energies(sysm, n, cfg.hbar, cfg.gup.deformation)
        levels.append({"level": label, "n": n, "e": le.e, "e_p": le.e_p})
    de, de_p = cfg.deltas()
    payload = {"levels": levels, "delta_e": de, "delta_e_p": de_p}
    return ResultEnvelope("levels", cfg, payload, cfg.validate())


def cmd_rate(cfg: RunConfig) -> ResultEnvelope:
    p = cfg.rate_params()
    ph = p.phase()
    r0, r1, r2 = analytic.mode_overlaps(p.modes)
    payload = {
        "rate": p.rate(),
        "rate_baseline": analytic.rate_baseline(r0, p.phi1, p.phi2, p.delta_e, p.delta_t, p.hbar),
        "r0": r0,
        "r_prime": [r1, r2],
        "r0_gup": analytic.r0_gup(p.modes, p.beta),
        "beta": p.beta,
        "delta_e": p.delta_e,
        "delta_e_p": p.delta_e_p,
        "fringe_shift": p.shift(),
        "phase": {"phi1_prime": ph.phi1_prime, "phi2_prime": ph.phi2_prime, "total": ph.total},
    }
    return ResultEnvelope("rate", cfg, payload, cfg.validate())


def cmd_sweep(cfg: RunConfig) -> ResultEnvelope:
    sw = cfg.sweep
    values = analytic.axis_values(sw.start, sw.stop, sw.samples, sw.endpoint)
    betas = [] if sw.axis == "beta" else [float(b) for b in (sw.betas or (cfg.gup.beta,))]
    rates, errors = [], []
    for beta in betas or [None]:
        if sw.mode == "analytic":
            spec = analytic.scan_spectrum(cfg.rate_params(beta), sw.axis, sw.start, sw.stop,
                                          sw.samples, sw.endpoint)
            rates.append(spec.rates.tolist())
        else:
            # every beta column shares the master seed (common random numbers)
            _, records = mc_records(cfg.mc_setup(beta), sw.axis, values, cfg.mc.n_pairs,
                                    cfg.mc.seed, workers=cfg.mc.workers)
            rates.append([r.rate_estimate for r in records])
            errors.append([r.std_error for r in records])
    payload = {
        "axis": sw.axis,
        "mode": sw.mode,
        "betas": betas,
        "values": values.tolist(),
        "rates": rates,
        "std_errors": errors if sw.mode == "mc" else None,
    }
    return ResultEnvelope("sweep", cfg, payload, cfg.validate())


def cmd_mc(cfg: RunConfig) -> ResultEnvelope:
    setup = cfg.mc_setup()
    record = run(setup, cfg.mc.n_pairs, cfg.mc.seed, workers=cfg.mc.workers)
    payload = {
        "record": record.to_dict(),
        "accidental_fraction": accidental_fraction(record),
        "analytic_rate": setup.analytic_rate(),
        "expected": expected_probabilities(setup),
    }
    return ResultEnvelope("mc", cfg, payload, cfg.validate())


def cmd_chsh(cfg: RunConfig) -> ResultEnvelope:
    p = cfg.rate_params()
    best = bell.max_chsh(p.rate_at, cfg.chsh.resolution, cfg.chsh.refinements)
    payload = {"beta": p.beta, "fringe_shift": p.shift(), "max": best.to_dict()}
    if cfg.chsh.settings:
        fixed = []
        for beta in cfg.chsh.betas or (cfg.gup.beta,):
            pb = cfg.rate_params(float(beta))
            res = bell.chsh(pb.rate_at, *(float(s) for s in cfg.chsh.settings))
            fixed.append({"beta": float(beta), "fringe_shift": pb.shift(), **res.to_dict()})
        payload["fixed_settings"] = fixed
    return ResultEnvelope("chsh", cfg, payload, cfg.validate())


COMMANDS = {
    "levels": cmd_levels,
    "rate": cmd_rate,
    "sweep": cmd_sweep,
    "mc": cmd_mc,
    "chsh": cmd_chsh,
}


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="TOML run configuration")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--seed", type=_seed, help="override mc.seed")
    common.add_argument("--override-validation", action="store_true",
                        help="run even if the configuration violates the Franson regime")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="franson-gup",
        description="Franson interferometer coincidence rates with GUP corrections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "levels": "level energies and first-order GUP shifts",
        "rate": "single analytic coincidence rate",
        "sweep": "coincidence spectrum along one parameter axis",
        "mc": "Monte-Carlo coincidence counting at one setting",
        "chsh": "maximal CHSH value and fixed-setting S(beta)",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(args.seed, args.override_validation)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    except ConfigError as exc:
        log.error("malformed config: %s", exc)
        return EXIT_CONFIG

    fmt = args.format or cfg.output.format or ("csv" if args.command == "sweep" else "json")
    out = args.out or cfg.output.path or None

    report = cfg.validate()
    for w in report.warnings:
        log.warning(w)
    if not report.ok and not cfg.validation.override:
        for v in report.violations:
            log.error("validation: %s", v.message)
        env = ResultEnvelope(args.command, cfg, {}, report)
        code = EXIT_VALIDATION
    else:
        try:
            env = COMMANDS[args.command](cfg)
        except ValueError as exc:
            log.error("%s failed: %s", args.command, exc)
            return EXIT_VALIDATION
        code = EXIT_OK

    try:
        text = write_envelope(env, out, fmt)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    if out is None:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
