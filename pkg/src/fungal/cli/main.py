"""``python -m fungal``: reduce, predict, verify, certify, render.

Exit status: 0 on success or full agreement, 1 on a disagreement or a
certification failure, 2 on usage, parse or IO errors.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from ..circuit import CircuitError, CvpInstance, parse, parse_instance
from ..components import Registry
from ..layout import BudgetExceeded, compile, emit_columns
from .instance import InstanceFormatError, predict, read_instance, write_columns
from .render import render
from .verify import all_circuits, random_instances, verify_instance

OK, DISAGREE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _bits(s: str):
    if not s or set(s) - {"0", "1"}:
        raise UsageError(f"input bits must be a string of 0s and 1s, got {s!r}")
    return tuple(int(ch) for ch in s)


def _instance(path, bits, seed):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None
    try:
        if bits is not None:
            return CvpInstance(parse(text), _bits(bits))
        try:
            return parse_instance(text)
        except CircuitError as e:
            if "inputs" not in str(e):
                raise
            cd = parse(text)
            rng = random.Random(seed)
            return CvpInstance(cd, tuple(rng.randint(0, 1) for _ in range(cd.n)))
    except CircuitError as e:
        where = f"{path}:{e.line}" if getattr(e, "line", None) else str(path)
        raise UsageError(f"{where}: {e}") from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def _registry(args):
    if args.registry is None:
        return None
    try:
        return Registry(args.registry)
    except FileNotFoundError as e:
        raise UsageError(str(e)) from None


def cmd_reduce(args):
    inst = _instance(args.circuit, args.bits, args.seed)
    reg = _registry(args)
    emb = compile(inst, registry=reg)
    chunks = emit_columns(inst, registry=reg, D=emb.D)
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w")
    try:
        write_columns(out, chunks, emb.shape, emb.y, emb.T)
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"reduced: {emb.shape[0]}x{emb.shape[1]} cells, D={emb.D}, probe {emb.y}, T={emb.T}",
          file=sys.stderr)
    return OK


def cmd_predict(args):
    try:
        pi = read_instance(args.instance)
    except OSError as e:
        raise UsageError(f"{args.instance}: {e.strerror}") from None
    except InstanceFormatError as e:
        raise UsageError(str(e)) from None
    p = predict(pi, args.max_steps_override)
    print(p.bit)
    if args.verbose:
        first = "NONE" if p.first is None else p.first
        print(f"first={first} steps={p.steps} topplings={p.topplings} stable={p.stable}", file=sys.stderr)
    return OK


def cmd_verify(args):
    reg = _registry(args)
    if args.random:
        n, m, seed, count = args.random
        cases = list(random_instances(n, m, seed, count))
    elif args.exhaustive:
        n, gates = args.exhaustive
        cases = []
        for i, cd in enumerate(all_circuits(n, gates)):
            for v in range(2 ** n):
                bits = tuple((v >> (n - 1 - k)) & 1 for k in range(n))
                cases.append((f"all-{i}-{''.join(map(str, bits))}", CvpInstance(cd, bits)))
    elif args.circuit:
        cases = [(Path(args.circuit).name, _instance(args.circuit, args.bits, args.seed))]
    else:
        raise UsageError("verify needs a circuit file, --random or --exhaustive")
    bad = undecided = 0
    t0 = time.time()
    for name, inst in cases:
        rep = verify_instance(inst, name, registry=reg, max_steps=args.max_steps_override)
        bad += not rep.agree
        undecided += not rep.decided
        if args.verbose or not rep.agree:
            print(rep.line())
    print(f"{len(cases) - bad}/{len(cases)} agree, {undecided} undecided at T, {time.time() - t0:.1f}s")
    return OK if bad == 0 else DISAGREE


def cmd_certify(args):
    reg = _registry(args) or Registry()
    failed = 0
    for rep in reg.certify_all():
        print(rep.summary())
        failed += not rep.ok
    print(f"{len(reg.names()) - failed}/{len(reg.names())} templates certified")
    return OK if failed == 0 else DISAGREE


def cmd_render(args):
    try:
        pi = read_instance(args.instance)
    except OSError as e:
        raise UsageError(f"{args.instance}: {e.strerror}") from None
    except InstanceFormatError as e:
        raise UsageError(str(e)) from None
    if args.max_steps_override is not None:
        pi.T = min(pi.T, args.max_steps_override)
    paths = render(pi, args.out, every=args.every, fmt=args.format, window=args.window, cycles=args.cycles)
    print(f"wrote {len(paths)} frames to {args.out}")
    return OK


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fungal", description=__doc__.splitlines()[0])
    p.add_argument("--registry", metavar="DIR", help="template registry directory")
    p.add_argument("--seed", type=int, default=0, help="seed for input bits left unspecified")
    p.add_argument("--max-steps-override", type=int, metavar="N", help="cap every run at N steps")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("reduce", help="compile a circuit and input bits into a prediction instance")
    s.add_argument("circuit")
    s.add_argument("bits", nargs="?", help="input bits, e.g. 0110 (default: the file's inputs line)")
    s.add_argument("-o", "--output", help="output file (default: stdout)")
    s.set_defaults(fn=cmd_reduce)

    s = sub.add_parser("predict", help="run an instance and print the probe's bit")
    s.add_argument("instance")
    s.set_defaults(fn=cmd_predict)

    s = sub.add_parser("verify", help="reduce, predict and compare with direct evaluation")
    s.add_argument("circuit", nargs="?")
    s.add_argument("bits", nargs="?")
    s.add_argument("--random", nargs=4, type=int, metavar=("N", "M", "SEED", "COUNT"))
    s.add_argument("--exhaustive", nargs=2, type=int, metavar=("N", "GATES"),
                   help="every circuit on N inputs with up to GATES gates, on every input vector")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("certify", help="certify every template in the registry")
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("render", help="write frames of a run")
    s.add_argument("instance")
    s.add_argument("--every", type=int, default=1, metavar="K", help="one frame every K cycles")
    s.add_argument("--format", choices=("ascii", "pgm"), default="ascii")
    s.add_argument("--window", nargs=4, type=int, metavar=("R0", "C0", "ROWS", "COLS"))
    s.add_argument("--cycles", type=int, help="stop after this many cycles")
    s.add_argument("--out", default="frames", help="output directory")
    s.set_defaults(fn=cmd_render)
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"fungal: {e}", file=sys.stderr)
        return USAGE
    except BudgetExceeded as e:
        print(f"fungal: {e}", file=sys.stderr)
        return USAGE
    except OSError as e:
        print(f"fungal: {e}", file=sys.stderr)
        return USAGE
