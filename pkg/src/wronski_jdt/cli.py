"""Command line: ``wronski-jdt {fiber,monodromy,lr,verify}``.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 verification
mismatch. ``WM_THREADS`` caps the BLAS thread pools; it is read before
numpy is imported.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 2, 3, 4
SCHEMA = "wm/1"


def _limit_threads() -> None:
    n = os.environ.get("WM_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=2, help="subspace dimension")
    p.add_argument("--n", type=int, default=4, help="polynomials of degree < n")
    p.add_argument("--beta", type=float, default=None, help="ratio of the separated base roots")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-newton", type=float, default=1e-12)
    p.add_argument("--tol-collision", type=float, default=1e-5)
    p.add_argument("--trace", metavar="CSV", default=None, help="write a tracking trace")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="wronski-jdt", description="Wronski map fibers, monodromy and jeu de taquin.")
    sub = top.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fiber", help="solve a fiber and label its points")
    _common(f)
    f.add_argument("--roots", default=None, help="comma separated roots (complex literals or inf)")

    m = sub.add_parser("monodromy", help="track a loop and compare with the tableau prediction")
    _common(m)
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--skl", nargs=2, type=int, metavar=("K", "L"))
    g.add_argument("--rotate", action="store_true")
    g.add_argument("--path", metavar="FILE", help="JSON list of linear segments")

    lr = sub.add_parser("lr", help="Littlewood-Richardson number by three methods")
    _common(lr)
    for name in ("lam", "mu", "nu"):
        lr.add_argument(f"--{name}", required=True, help="parts, comma separated")

    v = sub.add_parser("verify", help="run an acceptance suite")
    _common(v)
    v.add_argument("suite", help="suite name or 'all'")
    v.add_argument("--trials", type=int, default=None)
    v.set_defaults(d=None, n=None)
    return top


# -- helpers -----------------------------------------------------------------


def _bound(args):
    from .partitions import RectBound

    if args.d is None or args.n is None:
        raise UsageError("--d and --n are required")
    if not 0 < args.d < args.n:
        raise UsageError(f"need 0 < d < n, got d={args.d}, n={args.n}")
    return RectBound(args.d, args.n)


def _parse_root(s: str):
    from .tableaux import INF

    s = s.strip()
    if s.lower() in ("inf", "infinity"):
        return INF
    try:
        z = complex(s.replace("i", "j"))
    except ValueError as e:
        raise UsageError(f"bad root {s!r}") from e
    return z.real if z.imag == 0 else z


def _parts(bound, text: str):
    from .partitions import Partition

    parts = [int(x) for x in text.split(",") if x.strip()] if text.strip() else []
    try:
        return Partition.of(bound, parts)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _grid(T) -> str:
    from .tableaux import ordinalize

    return "/".join(" ".join(str(v) for v in row) for row in ordinalize(T).rows())


def _cycles(perm, names) -> str:
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        if len(cyc) > 1:
            out.append("(" + " ".join(names[k] for k in cyc) + ")")
    return "".join(out) or "id"


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, default=str))
    else:
        print("\n".join(lines))


def _write_trace(path: str, rows, names) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "point_label", "chart_id", "residual", "step"])
        for t, k, chart, res, h in rows:
            w.writerow([repr(t), names[k], chart, repr(res), repr(h)])


# -- commands -----------------------------------------------------------------


def cmd_fiber(args) -> int:
    from .partitions import syt_count
    from .tracker import is_separated, label_point, separated_roots, solve_fiber

    b = _bound(args)
    roots = [_parse_root(x) for x in args.roots.split(",")] if args.roots else separated_roots(b, args.beta)
    if len(roots) != b.N:
        raise UsageError(f"need {b.N} roots, got {len(roots)}")
    pts = solve_fiber(b, roots, tol=args.tol_newton, seed=args.seed, beta=args.beta)
    want = syt_count(b.full())
    labelled = is_separated(roots)
    rows, lines = [], [f"fiber of {b.d}x{b.width}: {len(pts)} points (expected {want})"]
    for i, q in enumerate(pts):
        lab = label_point(q, roots) if labelled else None
        rows.append({"index": i + 1, "label": None if lab is None else _grid(lab), "residual": q.residual, "point": q.to_json()})
        lines.append(f"  P{i + 1}  label={_grid(lab) if lab is not None else '-':<24} residual={q.residual:.2e}")
    _emit(args, {"command": "fiber", "d": b.d, "n": b.n, "roots": [str(r) for r in roots], "count": len(pts), "expected": want, "points": rows}, lines)
    return EXIT_OK if len(pts) == want else EXIT_NUMERIC


def cmd_monodromy(args) -> int:
    from .jdt import evacuation_step, s_kL
    from .tracker import (
        expected_perm,
        homogeneous_close,
        is_separated,
        label_point,
        load_path,
        loop_rotation,
        loop_skl,
        monodromy,
        predict_slide,
        separated_roots,
        solve_base_fiber,
        solve_fiber,
        track,
    )

    b = _bound(args)
    kw = {"collision": args.tol_collision, "final_tol": args.tol_newton, "trace": bool(args.trace)}
    if args.path:
        try:
            with open(args.path) as fh:
                loop = load_path(fh)
        except OSError as e:
            raise UsageError(str(e)) from e
        roots = loop.start()
        if len(roots) != b.N:
            raise UsageError(f"path has {len(roots)} roots, bound needs {b.N}")
        base = solve_fiber(b, roots, tol=args.tol_newton, seed=args.seed)
        kind = "path"
    else:
        roots = separated_roots(b, args.beta)
        base = solve_base_fiber(b, roots, args.tol_newton)
        if args.skl:
            k, L = args.skl
            if not 1 <= k < b.N or L < 2:
                raise UsageError(f"need 1 <= k < {b.N} and L >= 2")
            loop = loop_skl(roots, k, L, bound=b)
            kind = f"skl {k} {L}"
        else:
            loop = loop_rotation(roots)
            kind = "rotate"
    names = [f"T{i + 1}" for i in range(len(base))]
    labelled = is_separated(roots)
    closed, _ = homogeneous_close(loop)

    predicted = None
    if args.skl:
        predicted = expected_perm(base, lambda T: s_kL(T, *args.skl))
    elif args.rotate:
        predicted = expected_perm(base, evacuation_step)

    if closed:
        res = monodromy(loop, base, **kw)
        perm, report = res.perm, res.report
        if predicted is None and labelled and _all_real(loop):
            predicted = _slide_perm(base, loop, predict_slide)
        got = _cycles(perm, names)
        end_labels = None
    else:
        ends, report = track(loop, base, **kw)
        perm = None
        got = "open path"
        end_labels = [_grid(label_point(e, loop.end())) if is_separated(loop.end()) else None for e in ends]
        if labelled and is_separated(loop.end()) and _all_real(loop):
            predicted = [_grid(predict_slide(q.label, loop)[0]) for q in base]
            got = " ".join(f"{n}->{lab}" for n, lab in zip(names, end_labels))

    if predicted is None:
        verdict = "UNPREDICTED"
    elif closed:
        verdict = "MATCH" if perm == predicted else "MISMATCH"
    else:
        verdict = "MATCH" if end_labels == predicted else "MISMATCH"
    if args.trace:
        _write_trace(args.trace, report.trace, names)
    lines = [f"{n} = {_grid(q.label) if q.label is not None else '-'}" for n, q in zip(names, base)]
    lines.append(f"{got} {verdict}" + ("" if predicted is None or verdict == "MATCH" or not closed else f" (predicted {_cycles(predicted, names)})"))
    payload = {
        "command": "monodromy",
        "loop": kind,
        "d": b.d,
        "n": b.n,
        "labels": {n: (_grid(q.label) if q.label is not None else None) for n, q in zip(names, base)},
        "permutation": perm,
        "cycles": got,
        "predicted": predicted,
        "verdict": verdict,
        "end_labels": end_labels,
        "diagnostics": report.to_json(),
    }
    _emit(args, payload, lines)
    return EXIT_MISMATCH if verdict == "MISMATCH" else EXIT_OK


def _all_real(loop) -> bool:
    from .tableaux import is_inf

    for seg in loop.segments:
        if seg.linear_values is None:
            return False
        for v in (*seg.linear_values[0], *seg.linear_values[1]):
            if is_inf(v) or complex(v).imag != 0:
                return False
    return True


def _slide_perm(base, loop, predict_slide):
    idx = {q.label.entries: i for i, q in enumerate(base)}
    return [idx[predict_slide(q.label, loop)[0].entries] for q in base]


def cmd_lr(args) -> int:
    from .jdt import lr_methods

    b = _bound(args)
    lam, mu, nu = (_parts(b, getattr(args, x)) for x in ("lam", "mu", "nu"))
    counts = lr_methods(lam, mu, nu)
    agree = len(set(counts)) == 1
    lines = [f"dual classes {counts[0]}, equivalence class size {counts[1]}, rectification count {counts[2]}", f"c = {counts[0]}" if agree else "DISAGREE"]
    _emit(args, {"command": "lr", "lam": list(lam.parts), "mu": list(mu.parts), "nu": list(nu.parts), "methods": list(counts), "agree": agree}, lines)
    return EXIT_OK if agree else EXIT_MISMATCH


def cmd_verify(args) -> int:
    import inspect

    from .experiments import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or all")
    results = []
    for n in names:
        fn = SUITES[n]
        params = inspect.signature(fn.__wrapped__).parameters
        kw = {"seed": args.seed}
        if args.d is not None or args.n is not None:
            bound = _bound(args)
            if "bounds" in params:
                kw["bounds"] = ((bound.d, bound.n),)
        if args.trials is not None and "trials" in params:
            kw["trials"] = args.trials
        results.append(fn(**kw))
    ok = all(r.passed for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<15} {r.summary}  ({r.seconds:.1f}s)" for r in results]
    _emit(args, {"command": "verify", "seed": args.seed, "passed": ok, "suites": [r.to_json() for r in results]}, lines)
    return EXIT_OK if ok else EXIT_MISMATCH


COMMANDS = {"fiber": cmd_fiber, "monodromy": cmd_monodromy, "lr": cmd_lr, "verify": cmd_verify}


def main(argv=None) -> int:
    _limit_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    import numpy as np

    from .tracker import AmbiguousMatch, TrackingError

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TrackingError, AmbiguousMatch, ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
