"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 phase synthesis did not
converge (``synthesis.strict`` or the ``phases`` subcommand), 4 numerical
contract violation.
"""

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from . import experiments as ex
from .errors import (
    AccuracyError,
    CapacityError,
    ConfigError,
    ContractError,
    DegenerateOutcomeError,
    DomainError,
    ParseError,
    SynthesisError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SYNTHESIS = 3
EXIT_CONTRACT = 4

SUBCOMMANDS = {
    "heisenberg-ti": "heisenberg_ti",
    "heisenberg-td": "heisenberg_td",
    "h2": "h2",
    "complexity": "complexity_sweep",
    "approx": "approx_report",
    "phases": "phases",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qspsim", description="Classical simulation of coherent QSP Hamiltonian simulation.")
    parser.add_argument("--version", action="version", version=f"qspsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat 'key = value' configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one configuration key")
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--seed", type=int, help="synthesis seed (overrides synthesis.seed)")
        p.add_argument("--no-cache", action="store_true", help="do not read or write the phase cache")
        p.add_argument("--cache-dir", help="phase cache directory")
    return parser


def fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".12g")
    if hasattr(v, "dtype"):
        return fmt(v.item())
    return str(v)


def render_csv(header_lines, columns, rows):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text, out):
    if out:
        path = Path(out)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary_path(out):
    return Path(str(out) + ".summary.json")


def run(args):
    experiment = SUBCOMMANDS[args.command]
    file_values = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {args.config!r} does not exist")
        file_values = ex.parse_config_text(path.read_text(encoding="utf-8"))
    cfg = ex.build_config(experiment, file_values, args.set, args.seed)
    header = [f"qspsim {__version__} {args.command}", *ex.config_header(experiment, cfg)]
    directory = None if args.no_cache else (args.cache_dir or ex.PhaseCache.default_directory())
    cache = ex.PhaseCache(directory, strict=cfg.get("synthesis.strict", False))

    if experiment == "approx_report":
        reports = ex.run_approx_report(cfg)
        blob = {
            "config": {k: cfg[k] for k in sorted(cfg)},
            "reports": [
                {"target": r.target_name, "epsilon_requested": r.epsilon_requested, "epsilon_measured": r.epsilon_measured, "degree": r.degree, "ok": r.ok}
                for r in reports
            ],
        }
        _write(render_json(blob), args.out)
        return EXIT_OK

    if experiment == "phases":
        pv, err, conv = ex.run_phases(cfg, cache)
        lines = header + [f"achieved_error = {err!r}", f"converged = {'true' if conv else 'false'}"]
        text = "".join(f"# {ln}\n" for ln in lines) + pv.to_text()
        _write(text, args.out)
        if not conv:
            print(f"qspsim: phases reached {err:.3e}, above tolerance {cfg['synthesis.tolerance']:.3e}", file=sys.stderr)
            return EXIT_SYNTHESIS
        return EXIT_OK

    runner = {
        "heisenberg_ti": ex.run_heisenberg_ti,
        "heisenberg_td": ex.run_heisenberg_td,
        "h2": ex.run_h2,
        "complexity_sweep": ex.run_complexity_sweep,
    }[experiment]
    columns, rows, summary = runner(cfg, cache)
    _write(render_csv(header, columns, rows), args.out)
    if experiment != "complexity_sweep":
        text = render_json({"experiment": experiment, "summary": summary})
        if args.out:
            _summary_path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stderr.write(text)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except (ConfigError, ParseError, OSError) as exc:
        print(f"qspsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SynthesisError as exc:
        print(f"qspsim: synthesis did not converge: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    except (ContractError, DomainError, CapacityError, AccuracyError, DegenerateOutcomeError) as exc:
        print(f"qspsim: numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
