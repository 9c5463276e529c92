"""Command line entry point.

Exit codes: 0 when every requested check passes, 1 for malformed input, a
violated index hypothesis or a size cap, 2 for an unclassified group, an
unmet threshold or a failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds
from .almost import AlmostAutomorphism
from .perm import Permutation, PermGroup, ValidationError
from .small_index import HypothesisViolation, classify_alternative, d2_classify
from .tree import BallSpec, ball_aut_generators
from .verifier import (
    MAX_DEGREE,
    CandidateSubgroup,
    CapExceeded,
    ObstructionCertificate,
    PreconditionError,
    ThresholdNotMet,
    alt1_obstruction,
    alt2_obstruction,
    alternative_obstruction,
    cocompact_obstruction,
    covolume_profile,
    level_group,
    verify_certificate,
)

log = logging.getLogger("neretin")

OK, BAD_INPUT, NEGATIVE = 0, 1, 2


class UsageError(Exception):
    """Bad input detected by the CLI itself."""


# ---------------------------------------------------------------------------
# Rendering


def _plain(x):
    """Recursively convert to JSON-safe values (Fractions become num/den strings)."""
    if isinstance(x, Fraction):
        return bounds.as_fraction_json(x)
    if isinstance(x, Permutation):
        return x.to_json()
    if isinstance(x, AlmostAutomorphism):
        return x.to_json()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _cell(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (dict, list, tuple)):
        return json.dumps(_plain(x), sort_keys=True)
    if x is None:
        return ""
    return str(x)


def _flatten(obj, prefix="") -> list[tuple[str, object]]:
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.extend(_flatten(v, f"{prefix}{k}."))
        return out
    return [(prefix.rstrip("."), obj)]


def render(payload: dict, fmt: str) -> str:
    """``payload`` is a dict; a ``rows`` entry (list of dicts) is shown as a table."""
    if fmt == "json":
        return json.dumps(_plain(payload), indent=2) + "\n"
    rows = payload.get("rows")
    notes = []
    if rows is None:
        rows = [{"key": k, "value": v} for k, v in _flatten(payload)]
    else:
        notes = [f"# {k}: {_cell(v)}" for k, v in payload.items() if k != "rows"]
    cols = list(rows[0]) if rows else []
    for r in rows:
        cols.extend(c for c in r if c not in cols)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    table = [cols] + [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(cols))]
    lines = ["  ".join(s.ljust(w) for s, w in zip(line, widths)).rstrip() for line in table]
    return "\n".join(notes + lines) + "\n"


def emit(payload: dict, args) -> None:
    text = render(payload, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _alpha(args, d: int, fallback: float | None = None) -> float:
    if args.alpha is not None:
        return args.alpha
    return fallback if fallback is not None else 0.8 / d ** 2


# ---------------------------------------------------------------------------
# Subcommands


def cmd_analyze(args) -> int:
    G = PermGroup.from_json(_load_json(args.group))
    d = args.d
    alpha = _alpha(args, d)
    constants = bounds.choose_constants(args.c, d, alpha)
    verdict = classify_alternative(G, constants)
    payload = {"degree": G.degree, "order": str(G.order), "index": str(G.index_in_sym),
               "d": d, "c": args.c, "alpha": alpha, **verdict.to_json()}
    if args.d2:
        if d != 2:
            raise UsageError("--d2 needs --d 2")
        v2 = d2_classify(G, args.c, alpha=alpha if args.alpha is not None else 0.24,
                         seed=args.seed)
        payload["d2_route"] = v2.to_json()
        classified = verdict.classified or v2.classified
    else:
        classified = verdict.classified
    emit(payload, args)
    return OK if classified else NEGATIVE


BUILTINS = ("trivial", "flip", "swap", "ball")


def builtin_candidate(name: str, d: int, L: int) -> CandidateSubgroup:
    """Small reference candidates: trivial, edge flip, one level-2 sibling swap, lifts of A_2."""
    if name == "trivial":
        gens = []
    elif name == "flip":
        gens = [AlmostAutomorphism.edge_flip(d)]
    elif name == "swap":
        gens = [AlmostAutomorphism.sibling_swap(d, (0, 0))]
    elif name == "ball":
        spec = BallSpec(d, 2)
        gens = [AlmostAutomorphism.from_sphere_permutation(d, 2, s)
                for s in ball_aut_generators(spec)]
    else:
        raise UsageError(f"unknown builtin candidate {name!r}")
    return CandidateSubgroup(d, gens, L)


def _candidate(args) -> CandidateSubgroup:
    if args.builtin:
        return builtin_candidate(args.builtin, args.d, args.word_length)
    if not args.candidate:
        raise UsageError("give a candidate file or --builtin")
    cand = CandidateSubgroup.from_json(_load_json(args.candidate))
    if args.word_length_set:
        cand.L = args.word_length
    return cand


def cmd_covolume(args) -> int:
    cand = _candidate(args)
    k_top = 2 * cand.d ** args.n_max
    if k_top > MAX_DEGREE:
        raise CapExceeded(f"k_{args.n_max} = {k_top} exceeds {MAX_DEGREE}")
    rows, scan = covolume_profile(cand, args.n_max, c=args.c)
    table = []
    for r in rows:
        table.append({"n": r.n, "k_n": r.k, "a_n": r.a, "gamma_order": r.gamma_order,
                      "c_n": r.c_n, "c_n_float": float(r.c_n), "routes_agree": r.routes_agree,
                      "discrete": r.discrete_at, "eq2": r.eq2})
    payload = {"d": cand.d, "word_length": cand.L, "ball_size": scan.ball_size,
               "truncated": scan.truncated, "n0": scan.n0,
               "outside_O": cand.outside_O, "rows": table}
    emit(payload, args)
    return OK if all(r.routes_agree for r in rows) else NEGATIVE


def _parts(spec: dict) -> list[list[int]]:
    parts = spec.get("parts")
    if not isinstance(parts, list) or not parts:
        raise UsageError("obstruct spec needs a non-empty 'parts' list")
    return [list(map(int, p)) for p in parts]


def _synthetic_gamma(parts: list[list[int]], k: int) -> PermGroup:
    gens = []
    for p in parts:
        if len(p) >= 3:
            gens.extend(PermGroup.alternating(p, k).generators)
    return PermGroup(gens, k)


def cmd_obstruct(args) -> int:
    spec = _load_json(args.spec)
    if not isinstance(spec, dict):
        raise UsageError("obstruct spec must be a JSON object")
    if "generators" in spec and "kind" not in spec:
        return _obstruct_candidate(args, CandidateSubgroup.from_json(spec))
    kind = spec.get("kind")
    d = int(spec.get("d", args.d))
    n = args.n if args.n is not None else spec.get("n")
    if n is None:
        raise UsageError("level n missing (spec 'n' or --n)")
    n = int(n)
    alpha = _alpha(args, d, spec.get("alpha"))
    k = 2 * d ** n
    if k > MAX_DEGREE:
        raise CapExceeded(f"k_{n} = {k} exceeds {MAX_DEGREE}")
    parts = _parts(spec)
    if "group" in spec:
        G = PermGroup.from_json(spec["group"])
    else:
        G = _synthetic_gamma(parts, k)
    L = spec.get("truncation_L")
    if kind == "Cocompact3":
        result = cocompact_obstruction(G, parts[0], n, d, truncation_L=L)
    elif kind == "Alt1":
        result = alt1_obstruction(G, parts[0], n, d, truncation_L=L)
    elif kind == "Alt2":
        result = alt2_obstruction(G, parts, n, d, alpha, truncation_L=L)
    else:
        raise UsageError(f"unknown kind {kind!r}; use Cocompact3, Alt1 or Alt2")
    return _finish_obstruct(args, result, G)


def _obstruct_candidate(args, cand: CandidateSubgroup) -> int:
    if args.n is None:
        raise UsageError("--n is required for a candidate file")
    n, d = args.n, cand.d
    G = level_group(cand, n)
    alpha = _alpha(args, d)
    constants = bounds.choose_constants(args.c, d, alpha)
    verdict = classify_alternative(G, constants)
    if not verdict.classified:
        emit({"result": "Unclassified", "verdict": verdict.to_json()}, args)
        return NEGATIVE
    result = alternative_obstruction(G, verdict, n, d, alpha, truncation_L=cand.L)
    return _finish_obstruct(args, result, G)


def _finish_obstruct(args, result, G: PermGroup) -> int:
    if isinstance(result, ThresholdNotMet):
        emit(result.to_json(), args)
        return NEGATIVE
    report = verify_certificate(result, G)
    payload = {"certificate": result.to_json(), "gamma_n": G.to_json(),
               "verification": report.to_json()}
    emit(payload, args)
    return OK if report.passed else NEGATIVE


def cmd_verify(args) -> int:
    obj = _load_json(args.certificate)
    if isinstance(obj, dict) and "certificate" in obj:
        cert_obj, bundled = obj["certificate"], obj.get("gamma_n")
    else:
        cert_obj, bundled = obj, None
    if args.group:
        G = PermGroup.from_json(_load_json(args.group))
    elif bundled is not None:
        G = PermGroup.from_json(bundled)
    else:
        raise UsageError("no Gamma_n given: pass a group file or a bundle from 'obstruct'")
    report = verify_certificate(ObstructionCertificate.from_json(cert_obj), G)
    emit(report.to_json(), args)
    return OK if report.passed else NEGATIVE


def cmd_bounds(args) -> int:
    d, c = args.d, args.c
    alpha = _alpha(args, d)
    constants = bounds.choose_constants(c, d, alpha)
    delta = args.delta if args.delta is not None else constants.delta
    eps = bounds.f1(d, delta)
    payload: dict = {
        "entropy_profile": bounds.entropy_profile(d, alpha),
        "entropy_bits": constants.entropy_bits,
        "two_to_H": 2 ** constants.entropy_bits,
        "constants": constants.to_json(),
        "f1": {"delta": delta, "eps": eps},
        "f2": {"eps": eps, "ln_f2": bounds.ln_f2(d, eps)},
    }
    y = args.y
    block = bounds.block_bound_and_unimodularity(y, y // 2, d, eps)
    payload["block_bound"] = {"y": y, "h_prime_decreasing": block.h_prime_decreasing,
                              "ln_g_half": block.ln_g_half,
                              "ln_g_half_floor": block.ln_g_half_floor,
                              "g_half_ok": block.g_half_ok}
    if args.n is not None:
        n = args.n
        fact = math.factorial(n)
        babai = {}
        for label, order in (("sym", fact), ("alt", fact // 2), ("cyclic", n)):
            rep = bounds.babai_predicates(n, order, label != "cyclic", args.babai_c)
            babai[label] = {"must_be_giant": rep.must_be_giant,
                            "maroti_must_be_giant": rep.maroti_must_be_giant}
        payload["babai"] = {"n": n, "c_param": args.babai_c, **babai}
    emit(payload, args)
    return OK


def cmd_primes(args) -> int:
    lo = args.k
    hi = args.k_max if args.k_max is not None else lo
    if hi < lo:
        raise UsageError("--k-max is below --k")
    rows = []
    for k in range(lo, hi + 1):
        pair = bounds.prime_pair(k)
        rows.append({"k": k, "p": pair.p if pair else None, "q": pair.q if pair else None,
                     "interval": list(pair.interval) if pair else None,
                     "found": pair is not None})
    emit({"rows": rows}, args)
    return OK if all(r["found"] for r in rows) else NEGATIVE


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    report = run_selftest(seed=args.seed)
    emit(report, args)
    return OK if report["passed"] else NEGATIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=2, help="children per vertex (default 2)")
    common.add_argument("--c", type=float, default=100.0, help="index constant c (default 100)")
    common.add_argument("--alpha", type=float, default=None,
                        help="alpha; default 0.8/d^2 unless the input file sets it")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="neretin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="classify a small-index subgroup")
    a.add_argument("group", help="group JSON file")
    a.add_argument("--d2", action="store_true", help="also run the prime-cycle route (d = 2)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("covolume", parents=[common], help="per-level covolume table")
    c.add_argument("candidate", nargs="?", help="candidate JSON file")
    c.add_argument("--builtin", choices=BUILTINS)
    c.add_argument("--n-max", type=int, default=2)
    c.add_argument("--word-length", type=int, default=None)
    c.set_defaults(func=cmd_covolume)

    o = sub.add_parser("obstruct", parents=[common], help="build and check a certificate")
    o.add_argument("spec", help="synthetic spec JSON or candidate JSON")
    o.add_argument("--n", type=int, default=None)
    o.set_defaults(func=cmd_obstruct)

    v = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    v.add_argument("certificate", help="certificate JSON (or an 'obstruct' output bundle)")
    v.add_argument("group", nargs="?", help="Gamma_n group JSON")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", parents=[common], help="tabulate the analytic constants")
    b.add_argument("--delta", type=float, default=None)
    b.add_argument("--n", type=int, default=None, help="degree for the Babai predicates")
    b.add_argument("--babai-c", type=float, default=None,
                   help="constant of the 2-transitive bound (unset: bound not applied)")
    b.add_argument("--y", type=int, default=10_000, help="orbit size for the block bound")
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("primes", parents=[common], help="prime pairs (p, q) for k")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--k-max", type=int, default=None)
    r.set_defaults(func=cmd_primes)

    s = sub.add_parser("selftest", parents=[common], help="run the oracle self-test")
    s.set_defaults(func=cmd_selftest)
    return p


def _setup_logging() -> None:
    level = os.environ.get("NERETIN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "word_length", "absent") != "absent":
        args.word_length_set = args.word_length is not None
        if args.word_length is None:
            args.word_length = 6
    try:
        if args.d < 2:
            raise UsageError("--d must be at least 2")
        return args.func(args)
    except HypothesisViolation as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return BAD_INPUT
    except CapExceeded as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (UsageError, PreconditionError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
