"""Batch driver: run the verification suites and write machine-readable reports.

    g2harmonic algebra --seed 7 --trials 100 --backend exact
    g2harmonic spectra --bundle functions --max-level 1
    g2harmonic theorem --which B --max-level 3 --out report.json

Exit status is 0 when every check passes, 1 when some check fails and 2 on
configuration or construction errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone

from . import __version__
from .g2algebra import DegenerateStructureError, identity_suite, invariant_checks
from .homogeneous import ConstructionError, curvature_suite, model_checks
from .linalg import IndeterminateRank
from .report import CheckReport
from .peterweyl.identities import operator_identity_suite
from .peterweyl.irreps import IrrepConstructionError, set_cache_dir
from .peterweyl.spectral import (SPECTRAL_OPERATORS, bundle_tag, instability_certificate, spectral_report,
                                 theorem_check)
from .peterweyl.weights import enumerate_weights

REPORT_VERSION = 1
SUBCOMMANDS = ("algebra", "curvature", "spectra", "theorem", "instability", "all")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 100
    max_level: int = 3
    tolerance: float = 1e-8
    backend: str = "exact"
    out_path: str | None = None
    cache_dir: str | None = None
    bundle: str | None = None
    which: str = "B"

    def validate(self):
        if self.trials < 1:
            raise ConfigError("--trials must be at least 1")
        if not self.tolerance > 0:
            raise ConfigError("--tol must be positive")
        if self.max_level < 0:
            raise ConfigError("--max-level must be non-negative")
        if self.backend not in ("exact", "float"):
            raise ConfigError("--backend must be 'exact' or 'float'")
        if self.which.upper() not in ("A", "B"):
            raise ConfigError("--which must be A or B")
        return self

    def to_dict(self):
        d = asdict(self)
        d.pop("out_path")
        d.pop("cache_dir")
        return d


# --- subcommands ---------------------------------------------------------------
# Each returns (CheckReport, extra payload for the JSON report, summary lines).

def _algebra(cfg):
    report = identity_suite(cfg.seed, cfg.trials, cfg.backend == "exact", cfg.tolerance)
    report.extend(invariant_checks())
    return report, {}, []


def _curvature(cfg):
    report = curvature_suite()
    report.extend(model_checks())
    return report, {}, []


def _spectra(cfg, spec=None):
    tag = bundle_tag(cfg.bundle) if cfg.bundle else None
    spec = spec or spectral_report(cfg.max_level)
    payload = {"spectral": spec.to_dict(tag)}
    payload["spectral"].pop("checks", None)
    lines = []
    for t in [tag] if tag else list(SPECTRAL_OPERATORS):
        lines.append(f"{t} ({SPECTRAL_OPERATORS[t]}), weights up to level {cfg.max_level}:")
        lines.append(f"  {'eigenvalue':>14s}  {'multiplicity':>12s}")
        for v, m in spec.spectrum(t):
            lines.append(f"  {v:>14.6f}  {m:>12d}")
    lines.append("totals: " + ", ".join(f"{k}={v}" for k, v in sorted(spec.totals().items())))
    return spec.checks, payload, lines


def _theorem(cfg, spec=None):
    report = theorem_check(cfg.which, cfg.max_level, spec)
    return report, {"totals": report.data.get("totals", {})}, []


def _instability(cfg, spec=None):
    report = instability_certificate(cfg.max_level, spec, cfg.tolerance)
    return report, dict(report.data), [f"verdict: {report.data['verdict']}"]


def _all(cfg):
    report = CheckReport()
    payload = {}
    lines = []
    for fn in (_algebra, _curvature):
        r, _, _ = fn(cfg)
        report.extend(r)
    for w in enumerate_weights(cfg.max_level):
        report.extend(operator_identity_suite(w, cfg.tolerance))
    spec = spectral_report(cfg.max_level)
    parts = [
        ("spectra", _spectra(cfg, spec)),
        ("theoremA", _theorem(replace(cfg, which="A"), spec)),
        ("theoremB", _theorem(replace(cfg, which="B"), spec)),
        ("instability", _instability(cfg, spec)),
    ]
    for key, (r, extra, more) in parts:
        report.extend(r)
        payload[key] = extra
        lines.extend(more)
    return report, payload, lines


_DISPATCH = {"algebra": _algebra, "curvature": _curvature, "spectra": _spectra, "theorem": _theorem,
             "instability": _instability, "all": _all}


def run(subcommand, config):
    """Run one subcommand; returns (exit code, JSON-ready report dict, summary lines)."""
    if subcommand not in _DISPATCH:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    cfg = config.validate()
    if cfg.cache_dir:
        set_cache_dir(cfg.cache_dir)
    report, payload, lines = _DISPATCH[subcommand](cfg)
    doc = {
        "report_version": REPORT_VERSION,
        "version": __version__,
        "subcommand": subcommand,
        "config": cfg.to_dict(),
        "passed": report.passed,
        "counts": {"total": len(report.checks), "failed": len(report.failures())},
    }
    doc.update(report.to_dict())
    doc.update(payload)
    return (EXIT_OK if report.passed else EXIT_FAIL), doc, report.summary_lines() + lines


def dumps(doc, timestamp=True):
    """Canonical JSON; the timestamp field is the only run-dependent entry."""
    doc = dict(doc)
    if timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    if hasattr(x, "tolist"):
        return x.tolist()
    return str(x)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--max-level", type=int, default=3)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--backend", choices=("exact", "float"), default="exact")
    common.add_argument("--out", default=None, help="write the JSON report here")
    common.add_argument("--cache-dir", default=None, help="directory for the irrep cache")
    parser = argparse.ArgumentParser(prog="g2harmonic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "spectra":
            p.add_argument("--bundle", default=None, help="e.g. functions, one-forms, three-forms27, s32")
        if name == "theorem":
            p.add_argument("--which", choices=("A", "B", "a", "b"), default="B")
    return parser


def config_from_args(args):
    return RunConfig(seed=args.seed, trials=args.trials, max_level=args.max_level, tolerance=args.tol,
                     backend=args.backend, out_path=args.out, cache_dir=args.cache_dir,
                     bundle=getattr(args, "bundle", None), which=getattr(args, "which", "B").upper())


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    cfg = config_from_args(args)
    try:
        code, doc, lines = run(args.subcommand, cfg)
    except (ConfigError, KeyError, IndeterminateRank, IrrepConstructionError, ConstructionError,
            DegenerateStructureError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    for line in lines:
        print(line)
    failed = doc["counts"]["failed"]
    print(f"{args.subcommand}: {doc['counts']['total'] - failed} passed, {failed} failed")
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
