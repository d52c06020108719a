"""Command-line front end: `voa <command> ...` (or `python -m voa`)."""
from __future__ import annotations

import argparse
import sys

from .cache import Cache
from .fock import SystemError_, format_state, parse_system, state_of
from .serial import (
    dumps, nopoly_to_json, poly_from_json, poly_to_json, q,
    state_from_json, state_to_json, system_to_json,
)
from .sexpr import ParseError, elaborate, from_expr, parse, to_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


# ---------------------------------------------------------------- commands
# Each command maps a canonical request to a JSON payload plus a status;
# text output is rendered from the payload alone so cached runs match.

def run_ope(req):
    try:
        system = parse_system(req["system"])
    except (SystemError_, ValueError) as e:
        raise UsageError(str(e))
    try:
        ast = parse(req["expr"])
        e = elaborate(ast, system)
    except ParseError as err:
        raise UsageError(f"parse error: {err}")
    except ValueError as err:
        raise UsageError(str(err))
    v = state_of(system, e)
    return {"system": system_to_json(system), "expr": to_text(ast), "state": state_to_json(v)}, EXIT_OK


def run_singular(req):
    from .w1inf import find_singular

    n, w = req["n"], req["weight"]
    basis = find_singular(n, w, exhaustive=req.get("exhaustive", False))
    return {"n": n, "weight": w, "dimension": len(basis),
            "basis": [state_to_json(v.normalized()) for v in basis]}, EXIT_OK


def _dij_payload(n, I, J):
    from .invariant import det_dij, symbol
    from .w1inf import construct_dij, pi_project, remainder

    D = construct_dij(n, I, J)
    st = D.state()
    img = pi_project(st, n)
    sym_ok = symbol(st, 2 * (n + 1)) == det_dij(D.I, D.J)
    R, m = remainder(D)
    payload = {
        "n": n, "I": list(D.I), "J": list(D.J), "weight": D.weight,
        "poly": nopoly_to_json(D.poly),
        "decomposition": {str(k): repr(p) for k, p in sorted(D.decomposition.items(), reverse=True)},
        "remainder": {"coeff": q(R), "l": m},
        "checks": {"projection_zero": img.is_zero(), "symbol_is_det": sym_ok},
    }
    ok = img.is_zero() and sym_ok
    if not ok:
        payload["witness"] = {"projection": state_to_json(img)}
    return payload, (EXIT_OK if ok else EXIT_FAIL)


def run_dij(req):
    return _dij_payload(req["n"], req["I"], req["J"])


def run_remainder(req):
    from .w1inf import construct_dij, remainder

    n = req["n"]
    I = req.get("I") or list(range(n + 1))
    J = req.get("J") or list(range(n + 1))
    R, m = remainder(construct_dij(n, I, J))
    return {"n": n, "I": I, "J": J, "coeff": q(R), "l": m}, EXIT_OK


def _relation_json(rel):
    ok = rel.verify()
    out = {"r": rel.r, "target": rel.target, "expr": to_text(from_expr(rel.expr)),
           "text": repr(rel), "verified": ok}
    if not ok:
        out["witness"] = state_to_json(rel.residual())
    return out


def run_decouple(req):
    from .w1inf import bc_decoupling, decoupling, raise_decoupling

    n = req["n"]
    if req.get("bc"):
        D, rel = bc_decoupling(n)
        rels = [rel]
        extra = {"singular": state_to_json(D.normalized())}
    else:
        base = decoupling(n)
        rels = [base]
        top = req.get("raise_to") or base.r
        if top < base.r:
            raise UsageError(f"--raise-to must be at least {base.r}")
        while rels[-1].r < top:
            rels.append(raise_decoupling(n, rels[-1], base))
        extra = {}
    items = [_relation_json(r) for r in rels]
    status = EXIT_OK if all(x["verified"] for x in items) else EXIT_FAIL
    return {"n": n, "relations": items, **extra}, status


def run_zhu(req):
    from .w1inf import construct_dij
    from .zhu import leading_term, variety_relation

    n = req["n"]
    if req["mode"] == "lt":
        K = tuple(range(n + 1))
        lt = leading_term(construct_dij(n, K, K).state())
        return {"n": n, "mode": "lt", "lt": poly_to_json(lt)}, EXIT_OK
    vr = variety_relation(n)
    form = vr.lt_form()
    payload = {"n": n, "mode": "relation", "lambda": [q(x) for x in vr.lam],
               "relation": poly_to_json(vr.poly), "lt": poly_to_json(vr.lt),
               "lt_form": form}
    return payload, (EXIT_OK if form is not None else EXIT_FAIL)


def run_verify(req):
    from .suites import run_suite

    rep = run_suite(req["suite"], req["seed"], req["cases"])
    return rep, (EXIT_OK if not rep["failures"] else EXIT_FAIL)


RUNNERS = {"ope": run_ope, "singular": run_singular, "dij": run_dij, "remainder": run_remainder,
           "decouple": run_decouple, "zhu": run_zhu, "verify": run_verify}
UNCACHED = {"ope", "verify"}


# ---------------------------------------------------------------- text rendering

def render_text(cmd, p):
    from .zhu import ZhuPoly, format_lt

    if cmd == "ope":
        return format_state(state_from_json(p["state"]))
    if cmd == "singular":
        lines = [f"singular vectors of weight {p['weight']} in M_{{-{p['n']}}}: dimension {p['dimension']}"]
        lines += [format_state(state_from_json(s)) for s in p["basis"]]
        return "\n".join(lines)
    if cmd == "dij":
        lines = [f"D_{{{tuple(p['I'])},{tuple(p['J'])}}}  (weight {p['weight']})"]
        for k, text in p["decomposition"].items():
            lines.append(f"  D^{k} = {text}")
        r = p["remainder"]
        lines.append(f"  remainder: {r['coeff']} J^{r['l']}")
        lines.append("  checks: " + ", ".join(f"{k}={v}" for k, v in sorted(p["checks"].items())))
        return "\n".join(lines)
    if cmd == "remainder":
        return f"R = {p['coeff']} J^{p['l']}"
    if cmd == "decouple":
        lines = []
        if "singular" in p:
            lines.append("singular vector: " + format_state(state_from_json(p["singular"])))
        for r in p["relations"]:
            lines.append(f"{r['text']}    [{'verified' if r['verified'] else 'FAILED'}]")
        return "\n".join(lines)
    if cmd == "zhu":
        lt = ZhuPoly.of(poly_from_json(p["lt"]))
        if p["mode"] == "lt":
            return f"LT(D_0) = {format_lt(lt)}"
        rel = ZhuPoly.of(poly_from_json(p["relation"]))
        form = p["lt_form"]
        tag = f"predicted form {form + 1}" if form is not None else "NOT a predicted form"
        return "\n".join([f"relation: {rel!r}", f"LT = {format_lt(lt)}  ({tag})",
                          f"lambda = ({', '.join(p['lambda'])})"])
    if cmd == "verify":
        head = f"{p['suite']}: {p['passed']}/{p['cases']} passed (seed {p['seed']})"
        if p["failures"]:
            return head + "\n" + dumps(p["failures"][0])
        return head
    raise ValueError(cmd)


# ---------------------------------------------------------------- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="voa", description="Exact computations in M_c, W_{1+inf} and free-field models.")
    p.add_argument("--no-cache", action="store_true", help="bypass the result cache")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("ope", help="evaluate an expression to a state")
    s.add_argument("--system", required=True, help="current:C, betagamma:N or bc:N")
    s.add_argument("--expr", required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("singular", help="singular vectors of M_{-n} at a weight")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--exhaustive", action="store_true", help="test all J^l(k), not only l <= 2")
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("dij", help="construct D_{I,J}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--I", dest="I", required=True)
    s.add_argument("--J", dest="J", required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("remainder", help="remainder of D_{I,J} (default D_0)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--I", dest="I")
    s.add_argument("--J", dest="J")
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("decouple", help="decoupling relations")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--raise-to", type=int, dest="raise_to")
    s.add_argument("--bc", action="store_true", help="W_{1+inf,+n} in the bc system")
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("zhu", help="Zhu algebra leading terms and the variety relation")
    s.add_argument("--n", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--lt", action="store_true")
    g.add_argument("--relation", action="store_true")
    s.add_argument("--format", choices=["text", "json"], default="text")

    s = sub.add_parser("verify", help="seeded randomized checks")
    s.add_argument("--suite", required=True, choices=["identities", "parabolic", "weyl", "lw"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cases", type=int, default=20)
    s.add_argument("--format", choices=["text", "json"], default="text")
    return p


def _request(args):
    cmd = args.cmd
    if cmd == "ope":
        try:
            expr = to_text(parse(args.expr))
        except ParseError as err:
            raise UsageError(f"parse error: {err}")
        return {"cmd": cmd, "system": args.system, "expr": expr}
    if cmd in ("singular", "dij", "remainder", "decouple", "zhu") and args.n < 1:
        raise UsageError("--n must be a positive integer")
    if cmd == "singular":
        if args.weight < 0:
            raise UsageError("--weight must be nonnegative")
        return {"cmd": cmd, "n": args.n, "weight": args.weight, "exhaustive": args.exhaustive}
    if cmd in ("dij", "remainder"):
        I = _int_list(args.I) if args.I else None
        J = _int_list(args.J) if args.J else None
        if cmd == "dij" or I or J:
            from .invariant import check_index_lists

            I = I or list(range(args.n + 1))
            J = J or list(range(args.n + 1))
            try:
                I, J = (list(x) for x in check_index_lists(I, J))
            except ValueError as e:
                raise UsageError(str(e))
            if len(I) != args.n + 1:
                raise UsageError(f"I and J need n+1 = {args.n + 1} entries")
        return {"cmd": cmd, "n": args.n, "I": I, "J": J}
    if cmd == "decouple":
        return {"cmd": cmd, "n": args.n, "raise_to": args.raise_to, "bc": args.bc}
    if cmd == "zhu":
        return {"cmd": cmd, "n": args.n, "mode": "lt" if args.lt else "relation"}
    if cmd == "verify":
        if args.cases < 0:
            raise UsageError("--cases must be nonnegative")
        return {"cmd": cmd, "suite": args.suite, "seed": args.seed, "cases": args.cases}
    raise UsageError("a command is required")


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.cmd is None:
            raise UsageError("a command is required (ope, singular, dij, remainder, decouple, zhu, verify)")
        req = _request(args)
        cache = Cache(enabled=not args.no_cache and args.cmd not in UNCACHED)
        entry = cache.get(req)
        if entry is None:
            payload, status = RUNNERS[args.cmd](req)
            if status == EXIT_OK:
                cache.put(req, {"payload": payload, "status": status})
        else:
            payload, status = entry["payload"], entry["status"]
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    if args.format == "json":
        body = payload["state"] if args.cmd == "ope" else payload
        print(dumps(body), file=out)
    else:
        print(render_text(args.cmd, payload), file=out)
    if status == EXIT_FAIL:
        print("verification failed", file=err)
    return status


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
