"""Command-line front end: enumeration, moments, identities, and experiments.

Every failure path prints one machine-parsable line `error:<code>: <message>`
to stderr and exits nonzero. JSON output is key-sorted with a fixed indent,
so identical configurations produce byte-identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .chaos import moment_report
from .errors import (
    GridMismatchError,
    GroundSetMismatchError,
    IdentityMismatchError,
    MirrorSymmetryError,
    SizeLimitError,
)
from .kernels import GridKernel, load_kernel
from .partitions import enumerate_nc, enumerate_partitions, nc0_classes, riordan
from .theorems import (
    convergence_experiment,
    fourth_moment_identity,
    hyperdiagonal_family,
    indicator_family,
    perturbed_indicator_family,
    transfer_experiment,
)

MAX_TOTAL_PARTITIONS = 12


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand run depends on; equal configs give equal bytes."""

    command: str
    n: int | None = None
    m: int | None = None
    max_order: int | None = None
    q: int | None = None
    bins: int | None = None
    cell_width: float = 1.0
    kernel_path: str | None = None
    family: str | None = None
    seed: int = 0
    steps: int = 8
    eps0: float = 0.5
    rho: float = 0.5
    method: str = "diagram"
    measure: str = "poisson"
    classes: bool = False
    listing: bool = False
    fmt: str | None = None
    out: str | None = None
    tol: float = 1e-2


def build_parser() -> _Parser:
    parser = _Parser(prog="freechaos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--format", choices=("text", "json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write output to this path instead of stdout")

    p_nc = sub.add_parser("nc", help="count or list non-crossing partitions and diagram classes")
    p_nc.add_argument("--n", type=int, help="ground-set size for plain counting")
    p_nc.add_argument("--m", type=int, help="number of kernel copies for class counting")
    p_nc.add_argument("--q", type=int, help="kernel arity for class counting")
    p_nc.add_argument("--classes", action="store_true", help="count the diagram classes for (m, q)")
    p_nc.add_argument("--list", dest="listing", action="store_true", help="include the partitions themselves")
    common(p_nc)

    p_r = sub.add_parser("riordan", help="no-singleton non-crossing partition counts by block count")
    p_r.add_argument("--m", type=int, required=True)
    common(p_r)

    p_mom = sub.add_parser("moments", help="moments of a chaos integral next to the law oracle")
    p_mom.add_argument("--m", type=int, required=True, help="moment order")
    p_mom.add_argument("--method", choices=("product", "diagram", "trace", "all"), default="diagram")
    p_mom.add_argument("--measure", choices=("poisson", "wigner"), default="poisson")
    _kernel_flags(p_mom)
    common(p_mom)

    p_id = sub.add_parser("identity", help="fourth-moment norm decomposition for one kernel")
    _kernel_flags(p_id)
    common(p_id)

    p_conv = sub.add_parser("converge", help="statistic and moment gaps along a kernel family")
    p_conv.add_argument("--family", choices=("indicator", "perturbed-indicator", "hyperdiagonal"), required=True)
    p_conv.add_argument("--steps", type=int, default=8)
    p_conv.add_argument("--M", dest="max_order", type=int, default=5, help="largest moment order tracked")
    p_conv.add_argument("--q", type=int, default=2, help="arity for the hyperdiagonal family")
    p_conv.add_argument("--bins", type=int, default=4)
    p_conv.add_argument("--cell-width", type=float, default=1.0)
    p_conv.add_argument("--eps0", type=float, default=0.5)
    p_conv.add_argument("--rho", type=float, default=0.5)
    p_conv.add_argument("--seed", type=int, default=0)
    p_conv.add_argument("--tol", type=float, default=1e-2, help="final-gap threshold")
    common(p_conv)

    p_tr = sub.add_parser("transfer", help="moments under both product rules next to both laws")
    p_tr.add_argument("--M", dest="max_order", type=int, required=True)
    _kernel_flags(p_tr)
    common(p_tr)

    return parser


def _kernel_flags(p: _Parser) -> None:
    p.add_argument("--kernel", dest="kernel_path", default=None, help="kernel JSON file")
    p.add_argument("--family", choices=("indicator", "random"), default="indicator")
    p.add_argument("--q", type=int, default=1, help="arity for the random family")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--cell-width", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _config(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k != "format"}
    return RunConfig(fmt=getattr(args, "format", None), **fields)


def _resolve_kernel(cfg: RunConfig) -> GridKernel:
    if cfg.kernel_path is not None:
        return load_kernel(cfg.kernel_path)
    if cfg.family == "random":
        return GridKernel.random_mirror_symmetric(cfg.q, cfg.bins, cfg.cell_width, cfg.seed)
    return GridKernel.indicator(cfg.bins, cfg.cell_width)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _rows_to_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    keys = list(rows[0].keys())
    writer.writerow(keys)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in keys])
    return out.getvalue()


def _cell(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def cmd_nc(cfg: RunConfig) -> str:
    if cfg.classes:
        if cfg.m is None or cfg.q is None:
            raise UsageError("nc --classes needs --m and --q")
        pairings, big, ge2 = nc0_classes(cfg.m, cfg.q)
        payload = {
            "m": cfg.m,
            "q": cfg.q,
            "pairings": len(pairings),
            "blocks_gt2": len(big),
            "blocks_ge2": len(ge2),
        }
        if cfg.listing:
            payload["classes"] = {
                "pairings": [p.to_lists() for p in pairings],
                "blocks_gt2": [p.to_lists() for p in big],
                "blocks_ge2": [p.to_lists() for p in ge2],
            }
        if cfg.fmt == "json":
            return _json(payload)
        return (
            f"(m={cfg.m}, q={cfg.q}): {len(pairings)} pairings, "
            f"{len(big)} with blocks > 2, {len(ge2)} with blocks >= 2\n"
        )
    if cfg.n is None:
        raise UsageError("nc needs --n, or --classes with --m and --q")
    ncs = enumerate_nc(cfg.n)
    total = len(enumerate_partitions(cfg.n)) if cfg.n <= MAX_TOTAL_PARTITIONS else None
    payload: dict = {"n": cfg.n, "noncrossing": len(ncs), "total": total}
    if cfg.listing:
        payload["partitions"] = [p.to_lists() for p in ncs]
    if cfg.fmt == "json":
        return _json(payload)
    if total is None:
        return f"{len(ncs)} non-crossing\n"
    return f"{len(ncs)} non-crossing of {total} total\n"


def cmd_riordan(cfg: RunConfig) -> str:
    table = riordan(cfg.m)
    if cfg.fmt == "json":
        return _json({"m": table.m, "counts": {str(j): c for j, c in table.counts}, "total": table.total})
    parts = [f"R_{{{table.m},{j}}}={c}" for j, c in table.counts]
    parts.append(f"R_{table.m}={table.total}")
    return " ".join(parts) + "\n"


def cmd_moments(cfg: RunConfig) -> str:
    f = _resolve_kernel(cfg)
    methods = ("product", "diagram", "trace") if cfg.method == "all" else (cfg.method,)
    reports = [moment_report(f, cfg.m, method, cfg.measure).to_dict() for method in methods]
    if cfg.fmt == "csv":
        return _rows_to_csv(reports)
    return _json(reports if len(reports) > 1 else reports[0])


def cmd_identity(cfg: RunConfig) -> str:
    report = fourth_moment_identity(_resolve_kernel(cfg))
    if cfg.fmt == "csv":
        row = report.to_dict()
        terms = row.pop("terms")
        row.update(terms)
        return _rows_to_csv([row])
    return _json(report.to_dict())


def cmd_converge(cfg: RunConfig) -> str:
    if cfg.family == "indicator":
        family = indicator_family(cfg.bins, cfg.cell_width)
    elif cfg.family == "perturbed-indicator":
        family = perturbed_indicator_family(cfg.bins, cfg.cell_width, cfg.eps0, cfg.rho, cfg.seed)
    else:
        family = hyperdiagonal_family(cfg.q, cfg.bins * cfg.cell_width)
    series = convergence_experiment(family, cfg.steps, cfg.max_order, cfg.tol)
    if cfg.fmt == "csv":
        return series.to_csv()
    return _json(series.to_dict())


def cmd_transfer(cfg: RunConfig) -> str:
    report = transfer_experiment(_resolve_kernel(cfg), cfg.max_order)
    if cfg.fmt == "csv":
        return report.to_csv()
    return _json(report.to_dict())


_COMMANDS = {
    "nc": cmd_nc,
    "riordan": cmd_riordan,
    "moments": cmd_moments,
    "identity": cmd_identity,
    "converge": cmd_converge,
    "transfer": cmd_transfer,
}

_ERROR_CODES: tuple[tuple[type[BaseException], str], ...] = (
    (SizeLimitError, "size-limit"),
    (GridMismatchError, "grid-mismatch"),
    (GroundSetMismatchError, "ground-set-mismatch"),
    (MirrorSymmetryError, "mirror-symmetry"),
    (IdentityMismatchError, "identity-mismatch"),
    (json.JSONDecodeError, "io"),
    (ValueError, "domain"),
    (OSError, "io"),
)


def _fail(code: str, message: str) -> int:
    line = " ".join(str(message).split())
    sys.stderr.write(f"error:{code}: {line}\n")
    return 2 if code == "usage" else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        _emit(_COMMANDS[cfg.command](cfg), cfg)
        return 0
    except UsageError as exc:
        return _fail("usage", str(exc))
    except Exception as exc:  # noqa: BLE001 - map everything to the error contract
        for etype, code in _ERROR_CODES:
            if isinstance(exc, etype):
                return _fail(code, str(exc))
        raise


if __name__ == "__main__":
    sys.exit(main())
