"""Command-line front end: ``msh <command> ...``.

Every command prints one JSON document (or CSV with ``--format csv``).
Timestamps and timings live in the ``header`` block so that the rest of the
document is identical across runs with the same parameters.

Exit status: 0 when every verdict agrees, 1 when some verdict disagrees,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__, cache
from .boundary import phi_matrix
from .conjectures import mixed_complex_profile, verify_generation, verify_odd_conjectures, verify_restricted_conjectures
from .errors import ChainConditionError, InapplicableError
from .gfmat import rank, write_matrix
from .homology import (
    ChainComplexSpec,
    complex_profile,
    exactness_predicate,
    homology_dim,
    split_exactness_report,
    theta_on_homology,
)
from .subsets import verify_identity

VERIFY_TARGETS = ("thm1", "thm2", "thm3", "conj7.2", "conj7.3", "conj7.4", "conj7.5", "conj7.6", "identities")

# defaults keep each command to a few minutes on one core
DEFAULT_N_MAX = {
    "thm1": 14,
    "thm2": 12,
    "thm3": 12,
    "conj7.2": 14,
    "conj7.3": 12,
    "conj7.4": 12,
    "conj7.5": 12,
    "conj7.6": 12,
    "identities": 64,
}

IDENTITY_RANGES = {
    "even_2m": range(0, 33),
    "odd_2m1": range(0, 33),
    "mod3": range(0, 65),
    "fib_5m": range(1, 13),
    "fib_5m2": range(0, 13),
    "andrews": range(0, 65),
}


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    started: str = ""
    finished: str = ""
    timings: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {
            "header": {
                "command": self.command,
                "tool_version": self.tool_version,
                "started": self.started,
                "finished": self.finished,
                "timings": self.timings,
            },
            "params": self.parameters,
        }
        doc.update(self.results)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunManifest":
        header = doc["header"]
        results = {k: v for k, v in doc.items() if k not in ("header", "params")}
        return cls(
            command=header["command"],
            parameters=doc["params"],
            tool_version=header["tool_version"],
            started=header["started"],
            finished=header["finished"],
            timings=header.get("timings", {}),
            results=results,
        )

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls.from_dict(json.loads(text))

    @property
    def agrees(self) -> bool:
        return self.results.get("predicate_vs_bruteforce", "agree") == "agree"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _verdict(flags) -> str:
    return "agree" if all(flags) else "disagree"


# ---------------------------------------------------------------------------
# Per-n cells; module level so worker processes can pickle them


def _thm1_cells(n: int) -> list[dict]:
    return [homology_dim(n, 2, k, 2, 2).to_dict() for k in range(n + 1)]


def _thm2_cells(n: int) -> list[dict]:
    out = []
    for t in range(1, n + 1):
        for k in range(n + 1):
            r = exactness_predicate(n, t, k, brute_force=True)
            out.append(r.to_dict() | {"agrees": r.agrees})
    return out


def _thm3_cells(n: int) -> list[dict]:
    return [split_exactness_report(n, t, a).to_dict() for t in range(1, n + 1) for a in range(t)]


def _gen_cells(args: tuple[int, tuple[int, ...]]) -> list[dict]:
    n, ts = args
    return [verify_generation(n, t).to_dict() for t in ts]


def _restricted_cells(n: int) -> list[dict]:
    return [v.to_dict() for v in verify_restricted_conjectures(n)]


def _odd_cells(n: int) -> list[dict]:
    return [v.to_dict() for v in verify_odd_conjectures(n, n_min=n)]


def _sweep(fn, items, jobs: int, cache_dir) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        chunks = [fn(x) for x in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=cache.configure, initargs=(cache_dir,)) as pool:
            chunks = list(pool.map(fn, items))
    return [row for chunk in chunks for row in chunk]


# ---------------------------------------------------------------------------
# Commands; each returns (params, results)


def cmd_phi_matrix(args) -> tuple[dict, dict]:
    m = phi_matrix(args.n, args.t, args.k, args.p, args.dual)
    params = {"n": args.n, "t": args.t, "k": args.k, "p": args.p, "dual": args.dual}
    report = {
        "rows": m.rows,
        "cols": m.cols,
        "rank": rank(m),
        "row_sums": m.to_dense().sum(axis=1).tolist(),
    }
    return params, {"reports": [report], "predicate_vs_bruteforce": "agree", "matrix": m}


def cmd_export(args) -> tuple[dict, dict]:
    m = phi_matrix(args.n, args.t, args.k, args.p, args.dual)
    with open(args.out, "w") as fh:
        write_matrix(m, fh)
    params = {"n": args.n, "t": args.t, "k": args.k, "p": args.p, "dual": args.dual, "out": args.out}
    return params, {"reports": [{"rows": m.rows, "cols": m.cols, "path": args.out}], "predicate_vs_bruteforce": "agree"}


def cmd_homology(args) -> tuple[dict, dict]:
    s = args.s if args.s is not None else args.t
    params = {"n": args.n, "p": args.p, "t": args.t, "s": s, "a": args.a, "k": args.k}
    if args.a is not None:
        if s != args.t:
            raise ValueError("--a builds the equal-step complex; drop --s")
        reports = complex_profile(ChainComplexSpec(args.n, args.p, args.a, args.t))
    elif args.k is not None:
        reports = [homology_dim(args.n, args.p, args.k, s, args.t)]
    else:
        reports = [homology_dim(args.n, args.p, k, s, args.t) for k in range(args.n + 1)]
    rows = [r.to_dict() for r in reports]
    flags = [r.agrees is not False for r in reports]
    results = {
        "reports": rows,
        "degrees": [r.k for r in reports],
        "dims": [r.dim_H for r in reports],
        "predicate_vs_bruteforce": _verdict(flags),
    }
    return params, results


def cmd_mixed(args) -> tuple[dict, dict]:
    steps = [int(x) for x in args.steps.split(",")]
    reports = mixed_complex_profile(args.n, args.p, args.start, steps)
    params = {"n": args.n, "p": args.p, "start": args.start, "steps": steps}
    return params, {
        "reports": [r.to_dict() for r in reports],
        "degrees": [r.k for r in reports],
        "dims": [r.dim_H for r in reports],
        "predicate_vs_bruteforce": "agree",
    }


def cmd_exactness_table(args) -> tuple[dict, dict]:
    rows = _sweep(_thm2_cells, range(args.n_min, args.n_max + 1), args.jobs, args.cache_dir)
    params = {"n_min": args.n_min, "n_max": args.n_max}
    return params, {"reports": rows, "predicate_vs_bruteforce": _verdict(r["agrees"] for r in rows)}


def cmd_split_table(args) -> tuple[dict, dict]:
    rows = _sweep(_thm3_cells, range(args.n_min, args.n_max + 1), args.jobs, args.cache_dir)
    params = {"n_min": args.n_min, "n_max": args.n_max}
    return params, {
        "reports": rows,
        "predicate_vs_bruteforce": _verdict(r["agrees"] for r in rows),
        "split_reading": _verdict(r["split_agrees"] for r in rows),
    }


def cmd_theta(args) -> tuple[dict, dict]:
    rep = theta_on_homology(args.n)
    row = rep.to_dict() | {"theta_matrix": rep.theta_matrix.to_dense().tolist() if args.dense else None}
    return {"n": args.n}, {"reports": [row], "predicate_vs_bruteforce": _verdict([rep.ok])}


def cmd_verify(args) -> tuple[dict, dict]:
    target = args.target
    n_max = args.n_max if args.n_max is not None else DEFAULT_N_MAX[target]
    params = {"target": target, "n_max": n_max}
    jobs, cdir = args.jobs, args.cache_dir
    extra = {}
    if target == "thm1":
        rows = _sweep(_thm1_cells, range(0, n_max + 1), jobs, cdir)
        flags = [r["dim_H"] == r["predicted_dim"] for r in rows]
    elif target == "thm2":
        rows = _sweep(_thm2_cells, range(1, n_max + 1), jobs, cdir)
        flags = [r["agrees"] for r in rows]
    elif target == "thm3":
        rows = _sweep(_thm3_cells, range(1, n_max + 1), jobs, cdir)
        flags = [r["agrees"] for r in rows]
        extra["split_reading"] = _verdict(r["split_agrees"] for r in rows)
    elif target == "conj7.2":
        ts = tuple(args.t_values)
        params["t_values"] = list(ts)
        rows = _sweep(_gen_cells, [(n, ts) for n in range(1, n_max + 1)], jobs, cdir)
        flags = [r["agrees"] for r in rows]
    elif target in ("conj7.3", "conj7.4"):
        parity = 0 if target == "conj7.3" else 1
        ns = [n for n in range(2, n_max + 1) if n % 2 == parity]
        rows = _sweep(_restricted_cells, ns, jobs, cdir)
        flags = [r["agrees"] for r in rows]
    elif target in ("conj7.5", "conj7.6"):
        cid = target[4:]
        rows = [r for r in _sweep(_odd_cells, range(1, n_max + 1), jobs, cdir) if r["conjecture"] == cid]
        flags = [r["agrees"] for r in rows]
        if target == "conj7.5" and n_max >= 10:
            mixed = mixed_complex_profile(10, 3, 10, [1, 2, 1, 2, 1, 2, 1])
            extra["alternating_complex"] = {
                "n": 10,
                "p": 3,
                "degrees": [r.k for r in mixed],
                "dims": [r.dim_H for r in mixed],
            }
            flags.append(all(r.exact for r in mixed))
    else:
        rows = []
        for name, rng in IDENTITY_RANGES.items():
            if name in ("mod3", "andrews"):
                rng = range(0, n_max + 1)
            rows.extend(r.to_dict() for r in verify_identity(name, rng))
        flags = [r["holds"] for r in rows]
    return params, {"reports": rows, "predicate_vs_bruteforce": _verdict(flags), **extra}


# ---------------------------------------------------------------------------
# Argument parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--cache-dir", default=None, help="rank cache directory (default: $MSH_CACHE_DIR)")

    parser = argparse.ArgumentParser(prog="msh", description="Homology of multistep subset boundary maps.")
    parser.add_argument("--version", action="version", version=f"msh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def mat_args(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--t", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--dual", action="store_true")

    p = sub.add_parser("phi-matrix", parents=[common], help="print one boundary map in the triplet text format")
    mat_args(p)
    p.add_argument("--summary", action="store_true", help="print shape, rank and row sums as JSON instead")
    p.set_defaults(func=cmd_phi_matrix)

    p = sub.add_parser("export", parents=[common], help="write a boundary map in the triplet text format")
    mat_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("homology", parents=[common], help="homology dimensions of a complex")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--t", type=int, required=True, help="step of the outgoing map")
    p.add_argument("--s", type=int, default=None, help="step of the incoming map (default: t)")
    p.add_argument("--a", type=int, default=None, help="base degree of the complex a, a+t, ...")
    p.add_argument("--k", type=int, default=None, help="single degree")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("mixed", parents=[common], help="homology of a complex with a list of steps")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--steps", required=True, help="comma separated, e.g. 1,2,1,2")
    p.set_defaults(func=cmd_mixed)

    for name, func, default in (("exactness-table", cmd_exactness_table, 8), ("split-table", cmd_split_table, 8)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--n-max", type=int, default=default)
        p.add_argument("--n-min", type=int, default=1)
        p.set_defaults(func=func)

    p = sub.add_parser("theta", parents=[common], help="square-zero endomorphism of the middle homology")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dense", action="store_true", help="include the theta matrix")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("verify", parents=[common], help="run a verification sweep")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--t-values", type=int, nargs="+", default=[1, 2, 4, 8])
    p.set_defaults(func=cmd_verify)
    return parser


def _csv_cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return v


def to_csv(reports: list[dict]) -> str:
    cols: list[str] = []
    for r in reports:
        cols.extend(c for c in r if c not in cols)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir is not None:
        cache.configure(args.cache_dir)
    else:
        args.cache_dir = cache.active().directory if cache.active() else None
    manifest = RunManifest(command=args.command, parameters={})
    manifest.started = _now()
    t0 = time.perf_counter()
    try:
        params, results = args.func(args)
    except (ValueError, InapplicableError, ChainConditionError, OSError) as exc:
        print(f"msh {args.command}: {exc}", file=sys.stderr)
        return 2
    manifest.timings = {"total_seconds": round(time.perf_counter() - t0, 3)}
    manifest.finished = _now()
    manifest.parameters = params
    matrix = results.pop("matrix", None)
    manifest.results = results
    if matrix is not None and not getattr(args, "summary", False):
        write_matrix(matrix, sys.stdout)
    elif args.format == "csv":
        sys.stdout.write(to_csv(results["reports"]))
    else:
        print(manifest.to_json())
    return 0 if manifest.agrees else 1


if __name__ == "__main__":
    sys.exit(main())
