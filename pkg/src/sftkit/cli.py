"""``sftkit`` command-line front end.

Exit codes: 0 nonempty/success, 1 empty (or ray search exhausted),
2 unknown, 64 usage error, 65 input format error, 70 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import deciders, formats
from .deciders import SearchBudgetExceeded, decide_tree, decide_z, emptiness_semidecide
from .ends import thickness_profile
from .groups import BallTooLarge, FreeAbelian, FreeGroup, ball, get_embedding, get_model
from .reduction import (
    CheckerBug,
    RayWord,
    check_target,
    decode_g_config,
    encode_z2_config,
    find_ray_status,
    lift_subgroup_sft,
    reduce_z2_to_g,
)
from .render import render_ball_assignment, render_z2_patch, write_svg
from .sft import to_one_step

EXIT_OK, EXIT_EMPTY, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_FORMAT, EXIT_BUDGET = 64, 65, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        return formats.read_json(path)
    except OSError as exc:
        raise formats.FormatError(f"cannot read {path}: {exc.strerror}") from None


def _budget(args) -> int:
    return args.budget if args.budget is not None else deciders.default_budget()


def cmd_decide(args) -> int:
    s = formats.load_tileset(_load_json(args.sft))
    m = s.model
    if isinstance(m, FreeAbelian) and m.rank == 1 and m.step == 1:
        decider = decide_z
    elif isinstance(m, FreeGroup):
        decider = decide_tree
    else:
        raise UsageError(f"no exact decider for {m.name}; use 'search'")
    one_step = to_one_step(s)
    verdict = decider(one_step)
    doc = formats.dump_verdict(verdict, m)
    if one_step is not s:
        doc["recoded_alphabet_size"] = len(one_step.alphabet)
    _emit(formats.dumps(doc), args.output)
    return EXIT_OK if verdict.kind == deciders.NONEMPTY else EXIT_EMPTY


def cmd_search(args) -> int:
    s = formats.load_tileset(_load_json(args.sft))
    radius = args.radius if args.radius is not None else deciders.DEFAULT_MAX_RADIUS
    verdict = emptiness_semidecide(s, radius, _budget(args), threads=args.threads)
    _emit(formats.dumps(formats.dump_verdict(verdict, s.model)), args.output)
    return EXIT_EMPTY if verdict.kind == deciders.EMPTY else EXIT_UNKNOWN


def _parse_ray(text: str, model) -> RayWord:
    path = Path(text)
    if path.exists():
        return formats.load_ray(_load_json(text), model)
    if text.lstrip().startswith("{"):
        try:
            return formats.load_ray(json.loads(text), model)
        except json.JSONDecodeError as exc:
            raise formats.FormatError(f"bad inline ray: {exc}") from None
    # shorthand: comma-separated period letters, e.g. "x" for x^inf
    return formats.load_ray({"prefix": [], "period": [t for t in text.split(",") if t]}, model)


def cmd_reduce(args) -> int:
    s = formats.load_tileset(_load_json(args.sft))
    target = get_model(args.group)
    check_target(target)
    if args.ray:
        ray = _parse_ray(args.ray, target)
    else:
        ray, status = find_ray_status(target, args.ray_length, _budget(args))
        if ray is None:
            print(f"no ray found on {target.name} ({status})", file=sys.stderr)
            return EXIT_BUDGET if status == "budget" else EXIT_EMPTY
    if not ray.verify(args.ray_length if ray.max_length is None else min(args.ray_length, ray.max_length)):
        raise formats.FormatError("ray has a subword in the central cyclic subgroup")
    red = reduce_z2_to_g(s, target, ray)
    _emit(formats.dumps(formats.dump_reduced(red)), args.output)
    counts = red.rule_counts()
    print(f"forbidden patterns: {len(red.rule_index)} (I={counts['I']}, II={counts['II']}, III={counts['III']})",
          file=sys.stderr)
    return EXIT_OK


def cmd_lift(args) -> int:
    s = formats.load_tileset(_load_json(args.sft))
    e = get_embedding(args.embedding)
    if not e.finite_index:
        print(f"warning: {e.name} has infinite index; only forbidden patterns are lifted", file=sys.stderr)
    lifted = lift_subgroup_sft(s, e)
    _emit(formats.dumps(formats.dump_tileset(lifted)), args.output)
    return EXIT_OK


def cmd_encode(args) -> int:
    config = formats.load_z2_config(_load_json(args.config))
    red = formats.load_reduced(_load_json(args.sft_reduced))
    if red.ray is None:
        raise formats.FormatError("reduced tileset carries no ray")
    x = encode_z2_config(config, red.ray, red, args.radius, reseed=not args.no_reseed)
    _emit(formats.dumps(formats.dump_partial(red.target, x)), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    model, x = formats.load_partial(_load_json(args.window))
    red = formats.load_reduced(_load_json(args.sft_reduced))
    if model.name != red.target.name:
        raise formats.FormatError("window and reduced tileset live on different groups")
    patch = decode_g_config(x, red, args.height, args.width, strict=args.strict)
    _emit(formats.dumps(formats.dump_patch(patch)), args.output)
    return EXIT_OK


def cmd_find_ray(args) -> int:
    model = get_model(args.group)
    ray, status = find_ray_status(model, args.length, _budget(args))
    if ray is None:
        print(f"NotFound: {status}", file=sys.stderr)
        _emit(formats.dumps({"group": model.name, "found": False, "reason": status}), args.output)
        return EXIT_BUDGET if status == "budget" else EXIT_EMPTY
    doc = {"group": model.name, "found": True, "length": args.length, **formats.dump_ray(ray)}
    _emit(formats.dumps(doc), args.output)
    return EXIT_OK


def cmd_ends_probe(args) -> int:
    model = get_model(args.group)
    try:
        radii = [int(t) for t in args.radii.split(",") if t]
    except ValueError:
        raise UsageError("--radii must be a comma-separated integer list") from None
    try:
        report = thickness_profile(model, radii, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = report.table() if args.table else formats.dumps(report.to_dict())
    _emit(text, args.output)
    return EXIT_OK


def cmd_render(args) -> int:
    doc = _load_json(args.patch)
    if isinstance(doc, dict) and doc.get("type") == "z2-patch":
        patch = formats.load_patch(doc)
        if not patch:
            raise formats.FormatError("empty patch")
        svg = render_z2_patch(patch, args.alphabet.split(",") if args.alphabet else None)
    else:
        model, x = formats.load_partial(doc)
        if not x:
            raise formats.FormatError("empty assignment")
        if not model.has_cyclic_oracle:
            raise formats.FormatError(f"{model.name} has no designated g1-lines to lay out")
        radius = max(len(c["word"]) for c in doc["cells"])
        order = ball(model, radius).vertices
        svg = render_ball_assignment(model, x, order, args.alphabet.split(",") if args.alphabet else None)
    write_svg(svg, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (never changes output)")
    common.add_argument("-o", "--output", help="output file (default: stdout)")

    p = _Parser(prog="sftkit", description="Subshifts of finite type on finitely generated groups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("decide", parents=[common], help="exact emptiness on Z and free groups")
    q.add_argument("--sft", required=True)
    q.set_defaults(func=cmd_decide)

    q = sub.add_parser("search", parents=[common], help="ball-admissibility semi-decider")
    q.add_argument("--sft", required=True)
    q.add_argument("--radius", type=_nonneg)
    q.add_argument("--budget", type=_nonneg)
    q.set_defaults(func=cmd_search)

    q = sub.add_parser("reduce", parents=[common], help="compile a Z^2 tileset to a target group")
    q.add_argument("--sft", required=True)
    q.add_argument("--group", required=True)
    q.add_argument("--ray", help="ray file, inline JSON, or comma-separated period letters")
    q.add_argument("--ray-length", type=_nonneg, default=100)
    q.add_argument("--budget", type=_nonneg)
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("lift", parents=[common], help="lift a subgroup tileset to the ambient group")
    q.add_argument("--sft", required=True)
    q.add_argument("--embedding", required=True)
    q.set_defaults(func=cmd_lift)

    q = sub.add_parser("encode", parents=[common], help="transfer a Z^2 configuration to the target ball")
    q.add_argument("--config", required=True)
    q.add_argument("--sft-reduced", required=True)
    q.add_argument("--radius", type=_nonneg, required=True)
    q.add_argument("--no-reseed", action="store_true", help="stop where the plain recursion stalls")
    q.set_defaults(func=cmd_encode)

    q = sub.add_parser("decode", parents=[common], help="read a Z^2 patch off a target window")
    q.add_argument("--window", required=True)
    q.add_argument("--sft-reduced", required=True)
    q.add_argument("--width", type=_nonneg, default=2)
    q.add_argument("--height", type=_nonneg, default=2)
    q.add_argument("--strict", action="store_true", help="fail on cells outside the window")
    q.set_defaults(func=cmd_decode)

    q = sub.add_parser("find-ray", parents=[common], help="search a ray avoiding the central cyclic subgroup")
    q.add_argument("--group", required=True)
    q.add_argument("--length", type=_nonneg, required=True)
    q.add_argument("--budget", type=_nonneg)
    q.set_defaults(func=cmd_find_ray)

    q = sub.add_parser("ends-probe", parents=[common], help="finite-radius thickness profile")
    q.add_argument("--group", required=True)
    q.add_argument("--radii", default="1,2,3,4")
    q.add_argument("--table", action="store_true", help="tab-separated table instead of JSON")
    q.set_defaults(func=cmd_ends_probe)

    q = sub.add_parser("render", parents=[common], help="SVG of a Z^2 patch or ball assignment")
    q.add_argument("--patch", required=True)
    q.add_argument("--alphabet", help="comma-separated symbol order for the palette")
    q.set_defaults(func=cmd_render)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if args.command == "render" and not args.output:
        parser.error("render needs -o/--output")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sftkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SearchBudgetExceeded, BallTooLarge) as exc:
        print(f"sftkit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CheckerBug as exc:
        print(f"sftkit: internal error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (formats.FormatError, ValueError, KeyError) as exc:
        print(f"sftkit: {exc}", file=sys.stderr)
        return EXIT_FORMAT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
