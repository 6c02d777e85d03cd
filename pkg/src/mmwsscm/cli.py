"""Command-line driver.

    mmwsscm generate        write an ensemble of channel realizations
    mmwsscm validate        pool secondary statistics and compare with the acceptance bands
    mmwsscm export-spectrum write one realization's AOD or AOA angular power spectrum
    mmwsscm show-config     print the effective configuration

Precedence: command-line flags > ``--config`` file > built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .channel import assemble_spectrum
from .ensemble import check_acceptance, iter_realizations, realization_at, run_ensemble
from .io import FORMAT_VERSION, TabularWriter, dumps, write_spectrum, write_structured
from .params import ModelParams, ParameterError
from .spatial import Side

log = logging.getLogger("mmwsscm")

OUT_ENV = "MMWSSCM_OUT"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ACCEPTANCE = 2
EXIT_IO = 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    ensemble_size: int = 10_000
    params: ModelParams = field(default_factory=ModelParams)
    out_dir: Path = Path("mmwsscm_out")
    output_format: str = "tabular"
    validation_mode: bool = True
    workers: int = 1

    def validate(self) -> "RunConfig":
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed", "64-bit unsigned integer", self.seed)
        if self.ensemble_size < 1:
            raise ParameterError("ensemble_size", "ensemble_size >= 1", self.ensemble_size)
        if self.output_format not in ("tabular", "structured"):
            raise ParameterError("format", "one of tabular, structured", self.output_format)
        if self.workers < 1:
            raise ParameterError("workers", "workers >= 1", self.workers)
        self.params.validate()
        return self

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "format": self.output_format,
            "validation_mode": self.validation_mode,
            "params": self.params.to_dict(),
            "format_version": FORMAT_VERSION,
            "version": __version__,
        }


def _parse_param(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise ConfigError(f"--param expects NAME=VALUE, got {text!r}")
    return name.strip(), value.strip()


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict = {}
    if getattr(args, "config", None):
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    params = ModelParams.from_dict(file_cfg.get("params", {}))
    overrides = dict(_parse_param(p) for p in (getattr(args, "param", None) or []))
    if overrides:
        params = params.with_overrides(overrides)

    def pick(name, key=None, default=None):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return file_cfg.get(key or name, default)

    out = pick("out", default=os.environ.get(OUT_ENV, "mmwsscm_out"))
    try:
        cfg = RunConfig(
            seed=int(pick("seed", default=0)),
            ensemble_size=int(pick("ensemble_size", default=10_000)),
            params=params,
            out_dir=Path(out),
            output_format=str(pick("format", default="tabular")),
            validation_mode=bool(pick("validation_mode", default=True)),
            workers=int(pick("workers", default=1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ConfigError(f"invalid run setting: {exc}") from None
    return cfg.validate()


def _prepare_out(cfg: RunConfig) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "run.json").write_text(dumps(cfg.to_dict(), indent=1) + "\n", encoding="utf-8")
    return cfg.out_dir


def run_generate(cfg: RunConfig) -> Path:
    out = _prepare_out(cfg)
    realizations = iter_realizations(cfg.params, cfg.seed, cfg.ensemble_size)
    if cfg.output_format == "tabular":
        with TabularWriter(out) as writer:
            for i, r in enumerate(realizations):
                writer.write(r, i)
        return out / "taps.csv"
    path = out / "realizations.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, r in enumerate(realizations):
            write_structured(fh, r, i)
    return path


def run_validate(cfg: RunConfig) -> dict:
    out = _prepare_out(cfg)
    stats = run_ensemble(cfg.params, cfg.seed, cfg.ensemble_size, cfg.validation_mode, cfg.workers)
    report = stats.report()
    report["acceptance"] = check_acceptance(stats)
    report["format_version"] = FORMAT_VERSION
    report["config"] = cfg.to_dict()
    (out / "stats.json").write_text(dumps(report, indent=1) + "\n", encoding="utf-8")
    return report


def run_export_spectrum(cfg: RunConfig, realization_id: int, side: str) -> Path:
    if not 0 <= realization_id < cfg.ensemble_size:
        raise ConfigError(f"unknown realization id {realization_id} (ensemble has {cfg.ensemble_size})")
    out = _prepare_out(cfg)
    side = Side.parse(side)
    grid = assemble_spectrum(realization_at(cfg.params, cfg.seed, realization_id), side)
    ext = "csv" if cfg.output_format == "tabular" else "json"
    path = out / f"spectrum_{side.value.lower()}_{realization_id}.{ext}"
    meta = {"realization": realization_id, "side": side.value, "config": cfg.to_dict(),
            "note": "segment powers are the lobe power shaped by the segment profile, not a partition of it"}
    write_spectrum(path, grid, cfg.output_format, meta)
    return path


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="override one model parameter (repeatable)")
    common.add_argument("--seed", type=int)
    common.add_argument("--ensemble-size", dest="ensemble_size", type=int)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./mmwsscm_out)")
    common.add_argument("--format", choices=["tabular", "structured"])
    common.add_argument("--workers", type=int)
    common.add_argument("--no-validation-mode", dest="validation_mode", action="store_const", const=False,
                        help="keep subpaths below the -100 dBm floor in the statistics")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="mmwsscm", description="28 GHz NLOS 3-D statistical channel simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("generate", parents=[common], help="write channel realizations")
    v = sub.add_parser("validate", parents=[common], help="ensemble secondary statistics")
    v.add_argument("--strict", action="store_true", help="exit 2 if any acceptance band is violated")
    e = sub.add_parser("export-spectrum", parents=[common], help="write one angular power spectrum")
    e.add_argument("--realization", type=int, required=True)
    e.add_argument("--side", choices=["aod", "aoa", "AOD", "AOA"], default="aoa")
    sub.add_parser("show-config", parents=[common], help="print the effective configuration")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "show-config":
            print(dumps(cfg.to_dict(), indent=1))
        elif args.command == "generate":
            path = run_generate(cfg)
            log.info("wrote %d realizations to %s", cfg.ensemble_size, path)
            print(path)
        elif args.command == "export-spectrum":
            print(run_export_spectrum(cfg, args.realization, args.side))
        elif args.command == "validate":
            report = run_validate(cfg)
            failed = []
            for name, res in report["acceptance"].items():
                status = "PASS" if res["passed"] else "FAIL"
                print(f"{status} {name} = {res['value']:.4g} in [{res['low']:.4g}, {res['high']:.4g}]")
                if not res["passed"]:
                    failed.append(name)
            if failed and args.strict:
                return EXIT_ACCEPTANCE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
