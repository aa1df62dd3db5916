"""Command-line entry point: ``interbranch {run,report,frontier,circuit}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import frontier_table, load_config, read_rows, report, run_and_write, write_table
from .bench.report import FIGURES
from .circuit import dumps, two_qubit_count, two_qubit_depth
from .protocol import VARIANTS, VariantSpec, build, generate_message


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="interbranch", description=__doc__)
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    ap.add_argument("--shots", type=int, help="shots per circuit (overrides the config)")
    ap.add_argument("--out-dir", type=Path, default=None, help="directory for output files")
    ap.add_argument("--sv-limit", type=int, help="statevector capacity in qubits")
    ap.add_argument("--workers", type=int, help="parallel worker processes")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config, write results CSV")
    run.add_argument("config", type=Path)
    run.add_argument("-o", "--output", type=Path)

    rep = sub.add_parser("report", help="aggregate a results CSV into plot data")
    rep.add_argument("rows", type=Path)
    rep.add_argument("--figure", required=True, choices=sorted(FIGURES) + ["frontier"])
    rep.add_argument("-o", "--output", type=Path)

    fr = sub.add_parser("frontier", help="frontier table (largest n with mean p_all >= 0.1)")
    fr.add_argument("rows", type=Path)
    fr.add_argument("-o", "--output", type=Path)

    circ = sub.add_parser("circuit", help="print one protocol circuit in text form")
    circ.add_argument("--family", default="sparse", choices=["sparse", "half", "dense"])
    circ.add_argument("-n", type=int, default=1)
    circ.add_argument("--variant", default="protocol", choices=VARIANTS)
    circ.add_argument("--p0", type=float)
    circ.add_argument("--cousins", type=int, nargs=2, metavar=("K", "D"))
    return ap


def _place(args, path: Path | None, default: str) -> Path:
    path = path or Path(default)
    if args.out_dir is not None and not path.is_absolute():
        path = args.out_dir / path.name
    return path


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.command == "run":
        config = load_config(args.config, master_seed=args.seed, shots=args.shots,
                             statevector_limit=args.sv_limit, workers=args.workers)
        out = _place(args, args.output or (Path(config.output) if config.output else None), f"{config.name}.csv")
        rows, path = run_and_write(config, out)
        failed = sum(1 for r in rows if r.error)
        print(f"wrote {len(rows)} rows to {path}" + (f" ({failed} failed)" if failed else ""))
    elif args.command == "report":
        records = report(read_rows(args.rows), args.figure)
        path = write_table(records, _place(args, args.output, f"{args.rows.stem}.{args.figure}.csv"))
        print(f"wrote {len(records)} lines to {path}")
    elif args.command == "frontier":
        records = frontier_table(read_rows(args.rows))
        if args.output:
            write_table(records, _place(args, args.output, ""))
        for rec in records:
            value = rec["frontier_n"] if rec["frontier_n"] is not None else "-"
            print(f"{rec['backend_model']:<16} {rec['family']:<8} {value}")
    elif args.command == "circuit":
        msg = generate_message(args.family, args.n, args.seed)
        variant = VariantSpec(args.variant, args.p0, tuple(args.cousins) if args.cousins else None)
        c = build(msg, variant)
        sys.stdout.write(dumps(c))
        print(f"# mu={msg.mu} twoq_count={two_qubit_count(c)} twoq_depth={two_qubit_depth(c)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
