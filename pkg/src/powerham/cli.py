"""Command line surface binding the library modules into one binary.

Subcommand grammar, no config files: every invocation is reproducible from
its argv alone.  Seeds default to a fixed constant; the environment
variable POWERHAM_SEED overrides that default wherever a seed was not
given explicitly.  Machine output goes to stdout as canonical JSON (sorted
keys, no spaces) under --json, human-readable text otherwise; diagnostics
and progress always go to stderr.

Exit codes: 0 success, 1 verification or feasibility failure (a negative
oracle, an invalid certificate, a failed pipeline stage, a failed
matchability check), 2 usage errors and unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from itertools import product

from .constants import connector_constants, main_constants
from .errors import InputError, PowerhamError, SizeError
from .generators import GenSpec, generate
from .graph import from_text, to_text
from .hamiltonian import (Certificate, PipelineConfig, brute_force_oracle,
                          find_hamiltonian_power, find_with_hitting_sets,
                          verify)
from .properties import (denseness_exact, denseness_heuristic,
                         inseparable_exact, inseparable_heuristic,
                         robustly_matchable_exact)
from .rng import DEFAULT_SEED
from .walks import delta_schedule

HEURISTIC_BUDGET = 20000


def _default_seed() -> int:
    env = os.environ.get("POWERHAM_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise InputError(f"POWERHAM_SEED is not an integer: '{env}'")


def _rational(text: str) -> Fraction:
    # accepts "3/4" and "0.75" alike, both exactly
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: '{text}'")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read '{path}': {e}")


def _read_graph(path: str):
    return from_text(_read_text(path))


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True,
                                separators=(",", ":")) + "\n")


def _parse_certificate(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"certificate is not valid JSON: {e}")
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    if not isinstance(data, dict) or "k" not in data or "ordering" not in data:
        raise InputError("certificate JSON needs 'k' and 'ordering' fields")
    return Certificate(int(data["k"]),
                       tuple(int(x) for x in data["ordering"]))


# ----------------------------------------------------------------- generate

def _cmd_generate(args) -> int:
    fam = args.family
    seed = args.seed if args.seed is not None else _default_seed()
    if fam in ("gnp", "random_bipartite"):
        if args.n is None or args.p is None:
            raise InputError(f"family '{fam}' needs --n and --p")
        spec = GenSpec(fam, {"n": args.n, "p": str(_rational(args.p))}, seed)
    elif fam == "multipartite":
        if not args.parts:
            raise InputError("family 'multipartite' needs --parts")
        parts = [int(x) for x in args.parts.split(",") if x]
        spec = GenSpec(fam, {"parts": parts})
    elif fam in ("two_cliques", "clique_complement"):
        if args.n is None or args.mu is None:
            raise InputError(f"family '{fam}' needs --n and --mu")
        spec = GenSpec(fam, {"n": args.n, "mu": str(_rational(args.mu))})
    else:
        raise InputError(f"unknown family '{fam}'")

    g = generate(spec)
    text = to_text(g)
    if args.output == "-":
        sys.stdout.write(text)
        print(spec.to_json(), file=sys.stderr)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.output + ".json", "w", encoding="utf-8") as fh:
            fh.write(spec.to_json() + "\n")
    return 0


# -------------------------------------------------------------------- check

def _cmd_check(args) -> int:
    if args.dense is None and not args.insep and args.robust is None:
        raise InputError("nothing to check: pass --dense, --insep, "
                         "or --robust")
    g = _read_graph(args.input)
    exact = args.exact
    seed = _default_seed()
    out: dict = {}
    failed = False

    if args.dense is not None:
        d = _rational(args.dense)
        rep = (denseness_exact(g, d) if exact
               else denseness_heuristic(g, d, seed=seed,
                                        budget=args.budget))
        out["dense"] = rep.to_json_dict()
    if args.insep:
        rep = (inseparable_exact(g) if exact
               else inseparable_heuristic(g, seed=seed, budget=args.budget))
        out["insep"] = rep.to_json_dict()
        if rep.mu_star == 0:
            failed = True
    if args.robust is not None:
        try:
            rho_txt, d_txt = args.robust.split(",")
        except ValueError:
            raise InputError("--robust expects 'RHO,D'")
        # subset scan only; there is no sampling shortcut for this one
        rep = robustly_matchable_exact(g, _rational(rho_txt),
                                       _rational(d_txt))
        out["robust"] = rep.to_json_dict()
        if not rep.ok:
            failed = True

    if args.json:
        _emit_json(out)
    else:
        for name, rep in out.items():
            fields = ", ".join(f"{key} = {val}" for key, val in rep.items()
                               if not key.startswith("witness"))
            print(f"{name}: {fields}")
    return 1 if failed else 0


# --------------------------------------------------------------------- find

def _cmd_find(args) -> int:
    g = _read_graph(args.input)
    kwargs: dict = {"k": args.k}
    if args.zeta is not None:
        kwargs["zeta"] = _rational(args.zeta)
    if args.reservoir is not None:
        kwargs["reservoir_fraction"] = _rational(args.reservoir)
    if args.stop is not None:
        kwargs["stop_fraction"] = _rational(args.stop)
    if args.retries is not None:
        kwargs["retries"] = args.retries
    kwargs["seed"] = args.seed if args.seed is not None else _default_seed()
    cfg = PipelineConfig(**kwargs)

    tallies = None
    if args.hitting_sets is not None:
        raw = json.loads(_read_text(args.hitting_sets))
        if not isinstance(raw, list):
            raise InputError("hitting sets file must hold a JSON list "
                             "of vertex lists")
        sets = [tuple(int(v) for v in s) for s in raw]
        res = find_with_hitting_sets(g, cfg, sets)
        tallies = list(res.tallies) if res.ok else None
    else:
        res = find_hamiltonian_power(g, cfg)

    payload = {
        "ok": res.ok,
        "certificate": (None if res.certificate is None
                        else res.certificate.to_json_dict()),
        "report": res.report.to_json_dict(),
    }
    if args.hitting_sets is not None:
        payload["tallies"] = tallies
    if args.json:
        _emit_json(payload)
    else:
        rep = res.report
        if res.ok:
            print(f"found: k={rep.k} power of a Hamilton cycle on {rep.n} "
                  f"vertices after {rep.attempts} attempt(s)")
            print("cycle:", " ".join(map(str, res.certificate.ordering)))
            if tallies is not None:
                print("window tallies:", " ".join(map(str, tallies)))
        else:
            print(f"failed: stage '{rep.failed_stage}' after "
                  f"{rep.attempts} attempt(s)")
            for note in rep.notes:
                print("note:", note, file=sys.stderr)
    return 0 if res.ok else 1


# ------------------------------------------------------------------- verify

def _cmd_verify(args) -> int:
    if args.input == "-" and args.certificate == "-":
        raise InputError("graph and certificate cannot both come from stdin")
    g = _read_graph(args.input)
    cert = _parse_certificate(_read_text(args.certificate))
    if args.k is not None and args.k != cert.k:
        raise InputError(f"-k {args.k} disagrees with certificate k={cert.k}")
    ok, violation = verify(g, cert)
    if args.json:
        _emit_json({"ok": ok,
                    "violation": None if violation is None
                    else list(violation)})
    else:
        if ok:
            print(f"valid: k={cert.k} power Hamilton cycle on {g.n} vertices")
        else:
            u, v = violation
            print(f"invalid: vertices {u} and {v} are at cyclic distance "
                  f"<= {cert.k} but share no edge")
    return 0 if ok else 1


# ------------------------------------------------------------------- oracle

def _cmd_oracle(args) -> int:
    g = _read_graph(args.input)
    cert = brute_force_oracle(g, args.k)
    if cert is None:
        if args.json:
            _emit_json({"certificate": None})
        else:
            print("none")
        return 1
    if args.json:
        _emit_json({"certificate": cert.to_json_dict()})
    else:
        print(" ".join(map(str, cert.ordering)))
    return 0


# ---------------------------------------------------------------- constants

def _fmt_rational(q: Fraction) -> str:
    approx = f"{float(q):.6g}" if q.denominator != 1 else ""
    return f"{q}" + (f" (~{approx})" if approx else "")


def _cmd_constants(args) -> int:
    d = _rational(args.d)
    mu = _rational(args.mu)
    mc = main_constants(d, mu, args.k)
    sched = delta_schedule(mu)
    out = {
        "main": mc.to_json_dict(),
        "delta_schedule": {"mu": str(sched.mu), "L": sched.L,
                           "c": str(sched.c),
                           "delta": [str(x) for x in sched.delta]},
    }
    if args.zeta is not None:
        cc = connector_constants(d, mu, _rational(args.zeta), args.k)
        out["connector_at_zeta"] = cc.to_json_dict()
    if args.json:
        _emit_json(out)
        return 0

    print(f"inputs: d = {d}, mu = {mu}, k = {args.k}")
    print(f"long-path threshold zeta = {_fmt_rational(mc.path.zeta)}")
    print(f"long-path density slack rho = {_fmt_rational(mc.path.rho)}")
    ab = mc.absorber
    print(f"absorber zeta = {_fmt_rational(ab.zeta)}")
    print(f"absorber capacity alpha = {_fmt_rational(ab.alpha)}")
    print(f"connection length cap M = {mc.connector.M}")
    print(f"connection count floor xi = {mc.connector.xi}")
    print(f"composed zeta = {_fmt_rational(mc.zeta)}")
    print(f"composed rho = {mc.rho}")
    print(f"reservoir rate = {_fmt_rational(mc.reservoir_rate)}")
    print(f"walk schedule: L = {sched.L}, c = {_fmt_rational(sched.c)}")
    print("walk deltas:",
          ", ".join(_fmt_rational(x) for x in sched.delta))
    return 0


# -------------------------------------------------------------------- bench

def _parse_sweep(spec: str) -> tuple[list[int], list[Fraction], list[int], int]:
    fields = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"bad sweep field '{part}'")
        key, _, val = part.partition("=")
        fields[key.strip()] = val.strip()
    missing = {"n", "k", "seeds"} - set(fields)
    if missing:
        raise InputError(f"sweep spec is missing {sorted(missing)}; "
                         "expected 'n=..;p=..;k=..;seeds=N'")
    ns = [int(x) for x in fields["n"].split(",")]
    ks = [int(x) for x in fields["k"].split(",")]
    ps = [_rational(x) for x in fields.get("p", "3/4").split(",")]
    seeds = int(fields["seeds"])
    if seeds < 1:
        raise InputError("sweep needs at least one seed")
    return ns, ps, ks, seeds


STAGE_COLUMNS = ("absorbing_path", "reservoir", "cover", "connect", "absorb")


def _cmd_bench(args) -> int:
    from .generators import gnp
    ns, ps, ks, seeds = _parse_sweep(args.sweep)
    rows = []
    for n, p, k in product(ns, ps, ks):
        wins = 0
        for seed in range(seeds):
            g = gnp(n, p, seed)
            res = find_hamiltonian_power(g, PipelineConfig(k=k, seed=seed))
            timings = res.report.timings
            row = {"n": n, "p": str(p), "k": k, "seed": seed,
                   "success": int(res.ok),
                   "stage": res.report.failed_stage or ""}
            for name in STAGE_COLUMNS:
                row[f"t_{name}"] = f"{timings.get(name, 0.0):.6f}"
            row["t_total"] = f"{sum(timings.values()):.6f}"
            rows.append(row)
            wins += res.ok
        print(f"cell n={n} p={p} k={k}: {wins}/{seeds}", file=sys.stderr)

    header = ["n", "p", "k", "seed", "success", "stage"]
    header += [f"t_{name}" for name in STAGE_COLUMNS] + ["t_total"]
    out = sys.stdout if args.out == "-" else open(args.out, "w",
                                                  encoding="utf-8",
                                                  newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ------------------------------------------------------------------ parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerham",
        description="Search dense inseparable graphs for k-th powers of "
                    "Hamiltonian cycles, and check the structural "
                    "properties that make the search work.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="emit a graph from a named family")
    p.add_argument("--family", required=True,
                   choices=["gnp", "random_bipartite", "multipartite",
                            "two_cliques", "clique_complement"])
    p.add_argument("--n", type=int)
    p.add_argument("--mu")
    p.add_argument("--p")
    p.add_argument("--parts")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("check", help="measure structural properties")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--dense", metavar="D")
    p.add_argument("--insep", action="store_true")
    p.add_argument("--robust", metavar="RHO,D")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--heuristic", dest="exact", action="store_false")
    p.add_argument("--budget", type=int, default=HEURISTIC_BUDGET)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_check, exact=False)

    p = sub.add_parser("find", help="run the staged pipeline search")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--zeta")
    p.add_argument("--reservoir")
    p.add_argument("--stop")
    p.add_argument("--retries", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--hitting-sets", metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_find)

    p = sub.add_parser("verify", help="check a certificate against a graph")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-k", type=int)
    p.add_argument("--certificate", metavar="FILE", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive search on tiny graphs")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("constants",
                       help="evaluate the proof-grade constant schedule")
    p.add_argument("--mu", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--zeta")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_constants)

    p = sub.add_parser("bench", help="pipeline sweep over seeded gnp cells")
    p.add_argument("--sweep", metavar="SPEC", required=True,
                   help="e.g. 'n=40,60;p=3/4;k=1,2;seeds=20'")
    p.add_argument("--out", metavar="CSV", required=True)
    p.set_defaults(handler=_cmd_bench)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help, 2 for grammar violations
        return 0 if e.code == 0 else 2
    try:
        return args.handler(args)
    except BrokenPipeError:
        return 0
    except (InputError, SizeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PowerhamError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
