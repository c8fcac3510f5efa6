"""Command-line surface: membership runs, certificates, verification.

Exit codes are frozen for scripting: 0 member/success, 10 undetermined,
2 invalid input, 3 verification failure, 4 internal inconsistency.
Reports and certificates are byte-deterministic for identical inputs and
configuration; wall time goes to stderr, never into documents.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .complexes import DSquaredNonzero, cone
from .envelope import (
    BoundsExceeded,
    GeneratorSet,
    TowerState,
    check_membership,
    functor_values,
    oracle_search,
    tower_step,
    verify_certificate_data,
)
from .formats import (
    ParseError,
    ValidationError,
    certificate_document,
    complex_document,
    digest_complex,
    digest_context,
    format_row,
    parse_category_manifest,
    parse_certificate,
    parse_chain_map,
    parse_complex,
)
from .exactlin import is_prime
from .homspace import hom_space, is_contractible
from .localize import check_membership_local, local_global_report

EXIT_OK = 0
EXIT_UNDETERMINED = 10
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_INCONSISTENT = 4


class InputError(Exception):
    pass


class Doc:
    def __init__(self):
        self.lines: list[str] = []

    def section(self, *tokens):
        self.lines.append("[" + " ".join(str(t) for t in tokens) + "]")

    def kv(self, key, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.lines.append(f"{key} = {value}")

    def row(self, text):
        self.lines.append(text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_context(args):
    return parse_category_manifest(_read(args.manifest))


def _load_instance(args):
    """Manifest + target + generators, with canonical digests."""
    ctx = _load_context(args)
    Y = parse_complex(_read(args.target), ctx)
    gens = tuple(parse_complex(_read(g), ctx) for g in args.gen or [])
    if not gens:
        raise InputError("at least one generator (-g) is required")
    return ctx, Y, GeneratorSet(gens)


def _report_header(doc: Doc, command: str, ctx, args, Y=None, D=None):
    doc.section("report")
    doc.kv("tool", "conetower")
    doc.kv("version", __version__)
    doc.kv("command", command)
    doc.kv("mode", ctx.mode)
    doc.kv("manifest_digest", digest_context(ctx))
    if Y is not None:
        doc.kv("target_digest", digest_complex(Y))
    if D is not None:
        for k, e in enumerate(D.elements):
            doc.kv(f"gen_digest {k}", digest_complex(e))
    if getattr(args, "seed", None) is not None:
        doc.kv("seed", args.seed)


def _stage_sections(doc: Doc, report):
    for d in report.diagnostics:
        doc.section("stage", d.stage)
        doc.kv("hom", d.hom_summary)
        doc.kv("alpha_zero", d.alpha_class_zero)
        doc.kv("alpha_order", "infinite" if d.alpha_class_order is None else d.alpha_class_order)
        doc.kv("stationary", d.stationary)
        doc.kv("top_rank", d.top_total_rank)


# ---------------------------------------------------------------------------
# commands


def cmd_hom(args) -> int:
    ctx = _load_context(args)
    X = parse_complex(_read(args.source), ctx)
    Y = parse_complex(_read(args.target), ctx)
    H = hom_space(X, Y)
    doc = Doc()
    doc.section("report")
    doc.kv("tool", "conetower")
    doc.kv("version", __version__)
    doc.kv("command", "hom")
    doc.kv("mode", ctx.mode)
    doc.kv("manifest_digest", digest_context(ctx))
    doc.kv("source_digest", digest_complex(X))
    doc.kv("target_digest", digest_complex(Y))
    doc.kv("hom", H.rank_summary)
    if ctx.mode == "field":
        doc.kv("dim", H.dim)
    else:
        doc.kv("free_rank", H.group.free_rank)
        doc.kv("invariant_factors", "[" + ", ".join(map(str, H.group.invariant_factors)) + "]")
    for i, g in enumerate(H.generating_maps()):
        for d, M in g.comps:
            doc.section("generator", i, "d", d)
            for row in M:
                doc.row(format_row(row, ctx))
    _write_out(doc.text(), args.out)
    return EXIT_OK


def cmd_cone(args) -> int:
    ctx = _load_context(args)
    X = parse_complex(_read(args.source), ctx)
    Y = parse_complex(_read(args.target), ctx)
    f = parse_chain_map(_read(args.map), ctx, X, Y)
    C, _, _ = cone(f)
    meta = {
        "tool": "conetower",
        "version": __version__,
        "manifest_digest": digest_context(ctx),
    }
    _write_out(complex_document(C, name="cone", meta=meta), args.out)
    return EXIT_OK


def cmd_contract(args) -> int:
    ctx = _load_context(args)
    X = parse_complex(_read(args.complex), ctx)
    h = is_contractible(X)
    doc = Doc()
    doc.section("report")
    doc.kv("tool", "conetower")
    doc.kv("version", __version__)
    doc.kv("command", "contract")
    doc.kv("mode", ctx.mode)
    doc.kv("manifest_digest", digest_context(ctx))
    doc.kv("complex_digest", digest_complex(X))
    doc.kv("contractible", h is not None)
    if h is not None:
        for d, M in h.comps:
            doc.section("homotopy", "d", d)
            for row in M:
                doc.row(format_row(row, ctx))
    _write_out(doc.text(), args.out)
    return EXIT_OK if h is not None else EXIT_UNDETERMINED


def cmd_member(args) -> int:
    ctx, Y, D = _load_instance(args)
    if args.max_stages < 1:
        raise InputError("--max-stages must be >= 1")
    if args.prime is not None:
        if ctx.mode != "integer":
            raise InputError("--prime needs an integer-mode manifest")
        if not is_prime(args.prime):
            raise InputError(f"--prime must be prime, got {args.prime}")
        report = check_membership_local(D, Y, args.prime, args.max_stages)
    else:
        report = check_membership(D, Y, args.max_stages)
    doc = Doc()
    _report_header(doc, "member", ctx, args, Y, D)
    doc.kv("max_stages", args.max_stages)
    if args.prime is not None:
        doc.kv("prime", args.prime)
    doc.kv("verdict", report.verdict)
    if report.is_member:
        doc.kv("stage", report.stage)
        doc.kv("multiplier", report.certificate.multiplier)
    doc.kv("stationary", report.stationary)
    cert_path = args.cert
    if report.is_member:
        if cert_path is None:
            cert_path = (args.out + ".cert") if args.out else "certificate.ct"
        doc.kv("certificate", cert_path)
    _stage_sections(doc, report)
    _write_out(doc.text(), args.out)
    if report.is_member:
        cert_text = certificate_document(
            report.certificate,
            digest_context(ctx),
            digest_complex(Y),
            [digest_complex(e) for e in D.elements],
            __version__,
        )
        Path(cert_path).write_text(cert_text, encoding="utf-8")
        return EXIT_OK
    return EXIT_UNDETERMINED


def cmd_oracle(args) -> int:
    ctx, Y, D = _load_instance(args)
    bounds_exceeded = False
    try:
        outcome = oracle_search(D, Y, args.max_depth, args.max_total_rank)
        member = outcome.member
        pool_size = len(outcome.pool)
        rounds = outcome.rounds
    except BoundsExceeded as exc:
        bounds_exceeded = True
        member = False
        pool_size = -1
        rounds = -1
        note = str(exc)
    doc = Doc()
    _report_header(doc, "oracle", ctx, args, Y, D)
    doc.kv("max_depth", args.max_depth)
    doc.kv("max_total_rank", args.max_total_rank)
    doc.kv("member", member)
    doc.kv("bounds_exceeded", bounds_exceeded)
    if bounds_exceeded:
        doc.kv("note", note)
    else:
        doc.kv("pool_size", pool_size)
        doc.kv("rounds", rounds)
    _write_out(doc.text(), args.out)
    return EXIT_OK if member else EXIT_UNDETERMINED


def cmd_verify(args) -> int:
    ctx, Y, D = _load_instance(args)
    parsed = parse_certificate(_read(args.certificate), ctx, len(D.elements))
    checks = []
    if parsed.manifest_digest != digest_context(ctx):
        checks.append("manifest digest mismatch")
    if parsed.target_digest != digest_complex(Y):
        checks.append("target digest mismatch")
    for k, e in enumerate(D.elements):
        if parsed.gen_digests[k] != digest_complex(e):
            checks.append(f"generator {k} digest mismatch")
    if checks:
        print(f"verification failed: {checks[0]}")
        return EXIT_VERIFY
    ok, reason = verify_certificate_data(parsed.data, D, Y)
    if ok:
        print("verification: ok")
        return EXIT_OK
    print(f"verification failed: {reason}")
    return EXIT_VERIFY


def cmd_local_global(args) -> int:
    ctx, Y, D = _load_instance(args)
    if ctx.mode != "integer":
        raise InputError("local-global comparison needs an integer-mode manifest")
    if args.max_stages < 1:
        raise InputError("--max-stages must be >= 1")
    primes = None
    if args.primes:
        try:
            primes = tuple(int(p) for p in args.primes.split(","))
        except ValueError:
            raise InputError(f"bad --primes list: {args.primes!r}") from None
        bad = [p for p in primes if not is_prime(p)]
        if bad:
            raise InputError(f"--primes entries must be prime: {bad}")
    rep = local_global_report(D, Y, primes, args.max_stages)
    doc = Doc()
    _report_header(doc, "local-global", ctx, args, Y, D)
    doc.kv("max_stages", args.max_stages)
    doc.kv("primes", "[" + ", ".join(str(p) for p, _ in rep.local_reports) + "]")
    doc.kv("auto_primes", rep.primes_were_auto)
    doc.kv("consistent", rep.consistent)
    doc.kv("locals_suggest_membership", rep.locals_suggest_membership)
    if rep.locals_suggest_membership:
        doc.kv("note", "locals suggest membership; raise max_stages")
    if rep.primes_were_auto:
        doc.kv(
            "prime_note",
            "relevant primes are a heuristic surrogate for all maximal ideals, not a proof",
        )
    doc.section("global")
    doc.kv("verdict", rep.global_report.verdict)
    if rep.global_report.is_member:
        doc.kv("stage", rep.global_report.stage)
    doc.kv("stationary", rep.global_report.stationary)
    for p, lrep in rep.local_reports:
        doc.section("local", p)
        doc.kv("verdict", lrep.verdict)
        if lrep.is_member:
            doc.kv("stage", lrep.stage)
            doc.kv("multiplier", lrep.certificate.multiplier)
        doc.kv("stationary", lrep.stationary)
    _write_out(doc.text(), args.out)
    return EXIT_OK if rep.consistent else EXIT_INCONSISTENT


def cmd_functor_table(args) -> int:
    ctx, Y, D = _load_instance(args)
    probes = [parse_complex(_read(p), ctx) for p in args.probe or []]
    if not probes:
        probes = list(D.elements) + [Y]
    state = TowerState(D, Y)
    for _ in range(args.max_stages):
        state = tower_step(state)
        if state.stages[-1].stationary:
            break
    cells = functor_values(state, probes)
    doc = Doc()
    _report_header(doc, "functor-table", ctx, args, Y, D)
    doc.kv("max_stages", args.max_stages)
    doc.kv("stages_run", state.stage_count)
    doc.kv("probes", len(probes))
    for c in cells:
        doc.section("cell", c.probe, c.stage)
        doc.kv("hom", c.summary)
        if c.connecting_zero is not None:
            doc.kv("connecting_zero", c.connecting_zero)
            doc.kv("connecting_rank", c.connecting_rank)
    _write_out(doc.text(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _common_instance_flags(sp, target_help="target complex file"):
    sp.add_argument("-m", "--manifest", required=True, help="category manifest file")
    sp.add_argument("-t", "--target", required=True, help=target_help)
    sp.add_argument("-g", "--gen", action="append", help="generator complex file (repeatable)")
    sp.add_argument(
        "--seed",
        type=int,
        default=0,
        help="recorded in the report; tower runs never use randomness",
    )
    sp.add_argument("--out", help="write the report document here (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="conetower",
        description="exact envelope-membership workbench for bounded complexes",
    )
    ap.add_argument("--version", action="version", version=f"conetower {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("hom", help="Hom group of two complexes in the homotopy category")
    sp.add_argument("-m", "--manifest", required=True)
    sp.add_argument("-s", "--source", required=True)
    sp.add_argument("-t", "--target", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_hom)

    sp = sub.add_parser("cone", help="mapping cone of a chain map")
    sp.add_argument("-m", "--manifest", required=True)
    sp.add_argument("-s", "--source", required=True)
    sp.add_argument("-t", "--target", required=True)
    sp.add_argument("-f", "--map", required=True, help="chain map file")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cone)

    sp = sub.add_parser("contract", help="decide contractibility, emit the witness")
    sp.add_argument("-m", "--manifest", required=True)
    sp.add_argument("-c", "--complex", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_contract)

    sp = sub.add_parser("member", help="envelope membership by the cone tower")
    _common_instance_flags(sp)
    sp.add_argument("--max-stages", type=int, default=6)
    sp.add_argument("--prime", type=int, default=None, help="run the p-local tower instead")
    sp.add_argument("--cert", help="certificate output path (member verdicts)")
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("oracle", help="independent brute-force envelope search")
    _common_instance_flags(sp)
    sp.add_argument("--max-depth", type=int, default=3)
    sp.add_argument("--max-total-rank", type=int, default=12)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="re-verify a membership certificate")
    sp.add_argument("-m", "--manifest", required=True)
    sp.add_argument("-t", "--target", required=True)
    sp.add_argument("-g", "--gen", action="append")
    sp.add_argument("--certificate", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("local-global", help="compare the global tower with p-local towers")
    _common_instance_flags(sp)
    sp.add_argument("--max-stages", type=int, default=6)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--primes", help="comma-separated prime list")
    group.add_argument("--auto-primes", action="store_true", help="use relevant_primes (default)")
    sp.set_defaults(func=cmd_local_global)

    sp = sub.add_parser("functor-table", help="stagewise Hom(T, Y_n) table")
    _common_instance_flags(sp)
    sp.add_argument("-p", "--probe", action="append", help="probe complex file (repeatable)")
    sp.add_argument("--max-stages", type=int, default=4)
    sp.set_defaults(func=cmd_functor_table)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.monotonic()
    try:
        code = args.func(args)
    except (ParseError, ValidationError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DSquaredNonzero as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        print(f"elapsed {time.monotonic() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
