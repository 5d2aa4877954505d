"""Command-line entry point.

JSON results go to stdout (or ``-o``), diagnostics to stderr.  Exit codes:
0 success, 1 negative verdict, 2 usage error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import SCHEMA_VERSION, __version__
from .catalog import EXAMPLES, example
from .errors import (
    ConjugateInto,
    ConjugateIntoDetected,
    InvalidInput,
    NormalizerConditionUnverified,
    ResourceError,
    ScsError,
)
from .finite_covers import build_K
from .girth_gluing import glue_stars, glued_girth
from .gog_core import (
    GraphOfGroups,
    check_normalizer_condition,
    format_path,
    is_closed,
    length,
    normal_form,
    parse_path,
    parse_path_list,
    reduce_path,
)
from .gog_coverings import PreCovering, fold_subgroup, validate
from .scs_free import Conjugate, scs_witness, sics_witness, verify_certificate
from .scs_vf import (
    ConjInto,
    round_report,
    vf_conj_into_decide,
    vf_sics_witness,
    vf_verify,
)
from .subgroup_graphs import fold_generators
from .words import format_word, parse_word_list

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("scs")


@dataclass
class RunConfig:
    seed: int = 0
    max_sheets: int | None = None
    output: str | None = None
    verbosity: int = 0

    def __post_init__(self) -> None:
        if self.max_sheets is not None and self.max_sheets <= 0:
            raise InvalidInput("--max-sheets must be positive")


def _emit(data: dict, cfg: RunConfig) -> None:
    text = json.dumps(data, sort_keys=True)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc.msg}") from exc


def _load_gog(spec: str, base: str | None = None) -> GraphOfGroups:
    """A JSON file, or ``example:NAME``."""
    if spec.startswith("example:"):
        gog = example(spec.split(":", 1)[1])
    else:
        gog = GraphOfGroups.from_json(_read_json(spec))
    if base is not None:
        gog = gog.with_base(gog.vertex_index(_match_id(gog, base)))
    return gog


def _match_id(gog: GraphOfGroups, text: str):
    for vid in gog.vertex_ids:
        if str(vid) == text:
            return vid
    raise InvalidInput(f"unknown vertex id {text!r}")


# --- free groups -----------------------------------------------------------

def _free_witness(args, cfg: RunConfig) -> int:
    h1 = parse_word_list(args.h1, args.rank)
    h2 = parse_word_list(args.h2, args.rank)
    try:
        cert = sics_witness(h1, h2, args.k, args.rank)
    except ConjugateInto as exc:
        _emit({"verdict": "conjugate_into", "conjugator": format_word(exc.conjugator)}, cfg)
        return EXIT_NEGATIVE
    _emit(cert.to_json(), cfg)
    return EXIT_OK


def _free_verify(args, cfg: RunConfig) -> int:
    ok, reason = verify_certificate(_read_json(args.certificate))
    _emit({"ok": ok, "reason": reason}, cfg)
    if not ok:
        print(f"verification failed: {reason}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _free_conj(args, cfg: RunConfig) -> int:
    h1 = parse_word_list(args.h1, args.rank)
    h2 = parse_word_list(args.h2, args.rank)
    res = scs_witness(h1, h2, args.k, args.rank)
    if isinstance(res, Conjugate):
        _emit({"result": "conjugate", "conjugator": format_word(res.g)}, cfg)
    else:
        _emit({"result": "witness", "direction": res.direction, "certificate": res.certificate.to_json()}, cfg)
    return EXIT_OK


def _free_fold(args, cfg: RunConfig) -> int:
    g = fold_generators(parse_word_list(args.gens, args.rank), args.rank)
    _emit(g.to_json(), cfg)
    return EXIT_OK


def _free_girth_cover(args, cfg: RunConfig) -> int:
    _K, cert = build_K(args.rank, args.C, args.k)
    _emit(cert.to_json(), cfg)
    return EXIT_OK


# --- star gluing -----------------------------------------------------------

def _glue(args, cfg: RunConfig) -> int:
    g = glue_stars(args.r, args.s, args.t, args.seed)
    data = g.to_json()
    data["glued_girth"] = glued_girth(g)
    _emit(data, cfg)
    return EXIT_OK


# --- trees of groups -------------------------------------------------------

def _gog_check(args, cfg: RunConfig) -> int:
    gog = _load_gog(args.gog)
    verdict = check_normalizer_condition(gog)
    _emit(verdict.to_json(), cfg)
    return {"holds": EXIT_OK, "fails": EXIT_NEGATIVE}.get(verdict.status, EXIT_RESOURCE)


def _gog_reduce(args, cfg: RunConfig) -> int:
    gog = _load_gog(args.gog, args.base)
    p = parse_path(gog, args.path)
    out = {
        "reduced": format_path(gog, reduce_path(gog, p)),
        "normal_form": format_path(gog, normal_form(gog, p)),
        "length": length(gog, p) if is_closed(gog, p) else None,
    }
    _emit(out, cfg)
    return EXIT_OK


def _gog_fold(args, cfg: RunConfig) -> int:
    gog = _load_gog(args.gog, args.base)
    pc = fold_subgroup(gog, parse_path_list(gog, args.gens))
    _emit(pc.to_json(), cfg)
    return EXIT_OK


def _gog_validate(args, cfg: RunConfig) -> int:
    pc = PreCovering.from_json(_read_json(args.precovering))
    ok, reason = validate(pc, require_complete=args.complete)
    _emit({"ok": ok, "reason": reason, "free_handles": len(pc.free_handles())}, cfg)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _gog_example(args, cfg: RunConfig) -> int:
    gog = example(args.name)
    if args.base is not None:
        gog = gog.with_base(gog.vertex_index(_match_id(gog, args.base)))
    _emit(gog.to_json(), cfg)
    return EXIT_OK


# --- virtually free pipeline ---------------------------------------------

def _vf_witness(args, cfg: RunConfig) -> int:
    gog = _load_gog(args.gog, args.base)
    h1 = parse_path_list(gog, args.h1)
    h2 = parse_path_list(gog, args.h2)
    try:
        cert = vf_sics_witness(gog, h1, h2, cfg.seed, args.assume_normalizer_condition)
    except ConjugateIntoDetected as exc:
        _emit({"verdict": "conjugate_into_detected", "fixed_sheet": exc.fixed_sheet}, cfg)
        return EXIT_NEGATIVE
    log.info("sheets=%d rounds=%s", cert.sheets, round_report(cert))
    _emit(cert.to_json(), cfg)
    return EXIT_OK


def _vf_verify(args, cfg: RunConfig) -> int:
    ok, reason = vf_verify(_read_json(args.certificate))
    _emit({"ok": ok, "reason": reason}, cfg)
    if not ok:
        print(f"verification failed: {reason}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _vf_decide(args, cfg: RunConfig) -> int:
    gog = _load_gog(args.gog, args.base)
    h1 = parse_path_list(gog, args.h1)
    h2 = parse_path_list(gog, args.h2)
    res = vf_conj_into_decide(gog, h1, h2, cfg.seed, max_len=args.max_len,
                              assume_normalizer_condition=args.assume_normalizer_condition)
    if isinstance(res, ConjInto):
        _emit({"result": "conj_into", "conjugator": format_path(gog, res.conjugator)}, cfg)
    else:
        _emit({"result": "not_conj_into", "certificate": res.certificate.to_json()}, cfg)
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-sheets", type=int, help="cap on cover degrees (overrides SCS_MAX_SHEETS)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="scs", description="Conjugacy-into witnesses for free and virtually free groups.")
    p.add_argument("--version", action="version", version=f"scs {__version__} (schema v{SCHEMA_VERSION})")
    sub = p.add_subparsers(dest="command", required=True)

    free = sub.add_parser("free", help="free groups").add_subparsers(dest="action", required=True)
    for name, fn, helptext in [("witness", _free_witness, "separating certificate for H2 not conj-into H1"),
                               ("conj", _free_conj, "conjugator or separating certificate")]:
        q = free.add_parser(name, parents=[common], help=helptext)
        q.add_argument("--rank", type=int, default=2)
        q.add_argument("--h1", required=True, help="comma-separated words")
        q.add_argument("--h2", required=True, help="comma-separated words")
        q.add_argument("--k", default="auto", help="exact | auto | random:SEED:DEGREE")
        q.set_defaults(func=fn)
    q = free.add_parser("verify", parents=[common], help="check a free certificate")
    q.add_argument("certificate")
    q.set_defaults(func=_free_verify)
    q = free.add_parser("fold", parents=[common], help="Stallings graph of a subgroup")
    q.add_argument("--rank", type=int, default=2)
    q.add_argument("--gens", default="", help="comma-separated words")
    q.set_defaults(func=_free_fold)
    q = free.add_parser("girth-cover", parents=[common], help="normal finite cover with girth > C")
    q.add_argument("--rank", type=int, default=2)
    q.add_argument("--C", type=int, required=True)
    q.add_argument("--k", default="auto")
    q.set_defaults(func=_free_girth_cover)

    q = sub.add_parser("glue", parents=[common], help="glue r-stars to s-stars without short cycles")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.set_defaults(func=_glue)

    gog = sub.add_parser("gog", help="trees of finite groups").add_subparsers(dest="action", required=True)
    gog_help = f"JSON file or example:NAME with NAME in {sorted(EXAMPLES)}"
    q = gog.add_parser("check", parents=[common], help="normalizer condition")
    q.add_argument("gog", help=gog_help)
    q.set_defaults(func=_gog_check)
    q = gog.add_parser("reduce", parents=[common], help="reduced and normal form of a path")
    q.add_argument("gog", help=gog_help)
    q.add_argument("--path", required=True, help="g@v : e : g@v ...")
    q.add_argument("--base")
    q.set_defaults(func=_gog_reduce)
    q = gog.add_parser("fold", parents=[common], help="folded pre-covering of a subgroup")
    q.add_argument("gog", help=gog_help)
    q.add_argument("--gens", default="", help="semicolon-separated paths")
    q.add_argument("--base")
    q.set_defaults(func=_gog_fold)
    q = gog.add_parser("validate", parents=[common], help="structural check of a pre-covering")
    q.add_argument("precovering")
    q.add_argument("--complete", action="store_true", help="also require no free handles")
    q.set_defaults(func=_gog_validate)
    q = gog.add_parser("example", parents=[common], help="print a built-in tree of groups")
    q.add_argument("name", choices=sorted(EXAMPLES))
    q.add_argument("--base")
    q.set_defaults(func=_gog_example)

    vf = sub.add_parser("vf", help="virtually free groups").add_subparsers(dest="action", required=True)
    for name, fn in [("witness", _vf_witness), ("decide", _vf_decide)]:
        q = vf.add_parser(name, parents=[common])
        q.add_argument("gog", help=gog_help)
        q.add_argument("--h1", required=True, help="semicolon-separated paths")
        q.add_argument("--h2", required=True, help="semicolon-separated paths")
        q.add_argument("--base")
        q.add_argument("--assume-normalizer-condition", action="store_true")
        if name == "decide":
            q.add_argument("--max-len", type=int, default=12)
        q.set_defaults(func=fn)
    q = vf.add_parser("verify", parents=[common], help="check a virtually free certificate")
    q.add_argument("certificate")
    q.set_defaults(func=_vf_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    saved = os.environ.get("SCS_MAX_SHEETS")
    try:
        cfg = RunConfig(args.seed, args.max_sheets, args.output, args.verbose)
        if cfg.max_sheets is not None:
            os.environ["SCS_MAX_SHEETS"] = str(cfg.max_sheets)
        return args.func(args, cfg)
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NormalizerConditionUnverified as exc:
        print(f"normalizer condition: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except ScsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    finally:
        if saved is None:
            os.environ.pop("SCS_MAX_SHEETS", None)
        else:
            os.environ["SCS_MAX_SHEETS"] = saved


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
