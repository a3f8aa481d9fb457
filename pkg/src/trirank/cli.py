"""Command-line front end: rank computations, decompositions, and corpus runs.

Exit codes: 0 success, 1 an inequality under test failed, 2 usage or budget
error.  Reports are JSON with a schema version; with a fixed seed the bytes
are identical across runs (timings go to stderr, never into reports).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import analytic, biascx, decomp, geometric, slicerank, tensor, variety
from .errors import OutOfExactScope, TrirankError, UnstableEstimate
from .fields import parse_field

SCHEMA = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _default_budget() -> int:
    env = os.environ.get("TRIRANK_BUDGET")
    return int(env) if env else analytic.ENUM_BUDGET


def _tensor_id(T: tensor.Tensor3) -> str:
    return hashlib.sha256(tensor.dumps(T).encode()).hexdigest()[:16]


def _emit(report: dict, out: str | None) -> None:
    report = {"schema": SCHEMA, **report}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_tensor(path: str) -> tensor.Tensor3:
    return tensor.load(path)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_ar(args) -> int:
    T = _load_tensor(args.tensor)
    ar = analytic.analytic_rank(T, budget=args.budget)
    if args.histogram:
        me = analytic.min_entropy(T, budget=args.budget)
        with open(args.histogram, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["b_vector", "count"])
            n3, q = T.dims[2], T.field.q
            for code, count in enumerate(me.histogram):
                digits = []
                c = code
                for _ in range(n3):
                    digits.append(str(c % q))
                    c //= q
                w.writerow([":".join(digits), int(count)])
    _emit({"tensor": _tensor_id(T), "ar": ar.to_dict()}, args.out)
    return EXIT_OK


def _cmd_gr(args) -> int:
    T = _load_tensor(args.tensor)
    rep = geometric.geometric_rank(
        T,
        kmax=args.kmax,
        axis=args.axis,
        budget=args.budget,
        mc_samples=args.mc_samples,
        seed=args.seed,
        cross_check=args.cross_check,
    )
    _emit({"tensor": _tensor_id(T), "gr": rep.to_dict()}, args.out)
    if args.cross_check and rep.consistent is False:
        return EXIT_CHECK_FAILED
    return EXIT_OK


class _ARShim:
    def __init__(self, value):
        self.value = value


class _GRShim:
    def __init__(self, gr):
        self.gr = gr


def _cmd_sr(args) -> int:
    T = _load_tensor(args.tensor)
    ar = gr = None
    if args.ar_from:
        with open(args.ar_from, encoding="utf-8") as fh:
            ar = _ARShim(json.load(fh)["ar"]["value"])
    if args.gr_from:
        with open(args.gr_from, encoding="utf-8") as fh:
            gr = _GRShim(json.load(fh)["gr"]["gr"])
    if args.exact:
        res = slicerank.slice_rank_exact(T)
    elif args.bounds:
        res = slicerank.slice_rank_bounds(T, ar=ar, gr=gr)
    else:
        res = slicerank.slice_rank(T, ar=ar, gr=gr)
    _emit({"tensor": _tensor_id(T), "sr": res.to_dict()}, args.out)
    return EXIT_OK


def _cmd_chain(args) -> int:
    T = _load_tensor(args.tensor)
    if args.field and parse_field(args.field) != T.field:
        raise TrirankError(
            f"--field {args.field} does not match tensor field "
            f"{T.field.designation()}"
        )
    rep = slicerank.verify_rank_chain(
        T, kmax=args.kmax, ar_budget=args.budget, seed=args.seed,
        cross_check=args.cross_check,
    )
    _emit({"tensor": _tensor_id(T), "chain": rep.to_dict()}, args.out)
    return EXIT_OK if rep.all_hold else EXIT_CHECK_FAILED


def _cmd_decompose(args) -> int:
    T = _load_tensor(args.tensor)
    D = decomp.slice_decompose(T, k_work=args.kwork, seed=args.seed)
    verified = decomp.verify_decomposition(T, D)
    _emit(
        {"tensor": _tensor_id(T), "decomposition": D.to_dict(), "verified": verified},
        args.out,
    )
    return EXIT_OK if verified else EXIT_CHECK_FAILED


def _cmd_verify(args) -> int:
    T = _load_tensor(args.tensor)
    with open(args.decomp, encoding="utf-8") as fh:
        payload = json.load(fh)
    D = decomp.decomposition_from_dict(payload.get("decomposition", payload))
    ok = decomp.verify_decomposition(T, D)
    _emit({"tensor": _tensor_id(T), "verified": ok}, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_szcheck(args) -> int:
    F = parse_field(args.field)
    with open(args.system, encoding="utf-8") as fh:
        S = variety.parse_poly_system(fh.read(), F, args.nvars)
    est = variety.estimate_dim(S, kmax=args.kmax, budget=args.budget, seed=args.seed)
    rep = variety.sz_check(S, est)
    _emit(
        {
            "estimate": est.to_dict(),
            "sz": {
                "holds": rep.holds,
                "lhs": str(rep.lhs),
                "rhs": str(rep.rhs),
                "vacuous": rep.vacuous,
                "degree": rep.degree,
                "codim": rep.codim,
            },
        },
        args.out,
    )
    return EXIT_OK if rep.holds else EXIT_CHECK_FAILED


def _cmd_closeness(args) -> int:
    f = _load_tensor(args.f)
    g = _load_tensor(args.g)
    rep = biascx.closeness_report(f, g, budget=args.budget)
    _emit({"f": _tensor_id(f), "g": _tensor_id(g), "closeness": rep.to_dict()}, args.out)
    failed = rep.subadditivity_holds is False or rep.ar_bound_holds is False
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_extremal(args) -> int:
    F = parse_field(args.field)
    f, g = biascx.extremal_pair(F, args.r, args.t, args.n)
    f_path = args.out_prefix + "_f.t"
    g_path = args.out_prefix + "_g.t"
    tensor.dump(f, f_path)
    tensor.dump(g, g_path)
    delta = biascx.closeness(f, g)
    closed = biascx.extremal_delta(F.q, args.r, args.t)
    _emit(
        {
            "f_file": f_path,
            "g_file": g_path,
            "delta": str(delta),
            "delta_closed_form": str(closed),
            "matches": delta == closed,
        },
        args.out,
    )
    return EXIT_OK if delta == closed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def builtin_corpus(seed: int):
    """(name, tensor) pairs: identities, Levi-Civita, T_2, 50 random 3x3x3."""
    F3 = parse_field("3^1")
    items = [(f"identity_{n}", tensor.identity_tensor(F3, n)) for n in range(1, 5)]
    items.append(("levi_civita", tensor.levi_civita(F3)))
    items.append(("t2_direct_sum", tensor.tk_family(F3, 2)))
    for i in range(50):
        items.append(
            (f"random_{i:02d}", tensor.random_tensor(F3, (3, 3, 3), seed=seed ^ (100 + i)))
        )
    return items


def _corpus_item(name, T, seed, kwork):
    t0 = time.time()
    try:
        chain = slicerank.verify_rank_chain(T, seed=seed)
        D = decomp.slice_decompose(T, k_work=kwork, seed=seed, gr_report=chain.gr)
        verified = decomp.verify_decomposition(T, D)
        row = {
            "name": name,
            "tensor": _tensor_id(T),
            "chain": chain.to_dict(),
            "decomposition": {
                "term_count": D.term_count,
                "working_field": D.working_field.designation(),
                "verified": verified,
                "flagged": D.flagged,
                "retries": D.retries,
            },
            "error": None,
        }
        ratio = chain.ratio_sr_gr
        sr_ar = None
        if chain.sr.exact and chain.ar is not None and chain.ar.value > 0:
            sr_ar = chain.sr.value / chain.ar.value
        ok = chain.all_hold and verified
    except TrirankError as exc:
        row = {"name": name, "error": f"{type(exc).__name__}: {exc}"}
        ratio, sr_ar, ok = None, None, True  # recorded, batch continues
    print(f"[corpus] {name}: {time.time() - t0:.2f}s", file=sys.stderr)
    return row, ratio, sr_ar, ok


def _cmd_corpus(args) -> int:
    items = builtin_corpus(args.seed)
    seeds = [args.seed ^ i for i in range(len(items))]
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(
                pool.map(
                    lambda t: _corpus_item(t[0][0], t[0][1], t[1], args.kwork),
                    zip(items, seeds),
                )
            )
    else:
        results = [
            _corpus_item(name, T, s, args.kwork) for (name, T), s in zip(items, seeds)
        ]
    rows = [r[0] for r in results]
    ratios = [r[1] for r in results if r[1] is not None]
    sr_ars = [r[2] for r in results if r[2] is not None]
    all_ok = all(r[3] for r in results)
    summary = {
        "items": len(items),
        "errors": sum(1 for r in rows if r.get("error")),
        "max_sr_gr_ratio": str(max(ratios)) if ratios else None,
        "min_sr_ar_ratio": min(sr_ars) if sr_ars else None,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for row in rows:
            with open(
                os.path.join(args.out_dir, row["name"] + ".json"), "w", encoding="utf-8"
            ) as fh:
                json.dump({"schema": SCHEMA, **row}, fh, indent=2, sort_keys=True)
        with open(
            os.path.join(args.out_dir, "summary.csv"), "w", newline="", encoding="utf-8"
        ) as fh:
            w = csv.writer(fh)
            w.writerow(
                ["name", "ar", "gr", "sr_lo", "sr_hi", "ratio_sr_gr", "terms", "verified", "error"]
            )
            for row in rows:
                if row.get("error"):
                    w.writerow([row["name"], "", "", "", "", "", "", "", row["error"]])
                    continue
                ch = row["chain"]
                w.writerow(
                    [
                        row["name"],
                        ch["ar"]["value"] if ch["ar"] else "",
                        ch["gr"]["gr"],
                        ch["sr"]["lo"],
                        ch["sr"]["hi"],
                        ch["ratio_sr_gr"] or "",
                        row["decomposition"]["term_count"],
                        row["decomposition"]["verified"],
                        "",
                    ]
                )
    _emit({"summary": summary}, args.out)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trirank",
        description="Analytic, geometric, and slice rank of 3-tensors over finite fields.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    budget = _default_budget()

    def add_common(sp, seed=True):
        sp.add_argument("--budget", type=int, default=budget)
        sp.add_argument("--out", default=None, help="report path (default: stdout)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("ar", help="exact analytic rank by enumeration")
    sp.add_argument("--tensor", required=True)
    sp.add_argument("--histogram", default=None, help="output-histogram CSV path")
    add_common(sp, seed=False)
    sp.set_defaults(func=_cmd_ar)

    sp = sub.add_parser("gr", help="geometric rank via rank strata over a tower")
    sp.add_argument("--tensor", required=True)
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--axis", choices=("x", "y", "z"), default="x")
    sp.add_argument("--mc-samples", type=int, default=geometric.MC_SAMPLES)
    sp.add_argument("--cross-check", action="store_true")
    add_common(sp)
    sp.set_defaults(func=_cmd_gr, budget=geometric.ELIM_BUDGET)

    sp = sub.add_parser("sr", help="slice rank (exact, vertex cover, or bounds)")
    sp.add_argument("--tensor", required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--bounds", action="store_true")
    sp.add_argument("--ar-from", default=None, help="ar report JSON for the lower bound")
    sp.add_argument("--gr-from", default=None, help="gr report JSON for the lower bound")
    add_common(sp, seed=False)
    sp.set_defaults(func=_cmd_sr)

    sp = sub.add_parser("chain", help="verify SR <= 3 GR <= 8.13 AR and reverses")
    sp.add_argument("--tensor", required=True)
    sp.add_argument("--field", default=None, help="assert the tensor field, e.g. 3^1")
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--cross-check", action="store_true")
    add_common(sp)
    sp.set_defaults(func=_cmd_chain)

    sp = sub.add_parser("decompose", help="explicit slice decomposition")
    sp.add_argument("--tensor", required=True)
    sp.add_argument("--kwork", type=int, default=3)
    add_common(sp)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("verify", help="re-verify a decomposition JSON")
    sp.add_argument("--tensor", required=True)
    sp.add_argument("--decomp", required=True)
    add_common(sp, seed=False)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("szcheck", help="dimension estimate + Schwartz-Zippel check")
    sp.add_argument("--system", required=True)
    sp.add_argument("--field", required=True)
    sp.add_argument("--nvars", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=3)
    add_common(sp)
    sp.set_defaults(func=_cmd_szcheck)

    sp = sub.add_parser("closeness", help="delta-closeness trade-off report")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    add_common(sp, seed=False)
    sp.set_defaults(func=_cmd_closeness)

    sp = sub.add_parser("extremal", help="write a sharp closeness pair to files")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--field", required=True)
    sp.add_argument("--out-prefix", required=True)
    add_common(sp, seed=False)
    sp.set_defaults(func=_cmd_extremal)

    sp = sub.add_parser("corpus", help="run the built-in corpus and summarize")
    sp.add_argument("--out-dir", default=None)
    sp.add_argument("--kwork", type=int, default=3)
    sp.add_argument("--workers", type=int, default=1)
    add_common(sp)
    sp.set_defaults(func=_cmd_corpus)

    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (OutOfExactScope, UnstableEstimate, TrirankError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
