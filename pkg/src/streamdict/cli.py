"""Command-line front end.

    streamdict match  --dict D [--input T|-]    events as "end<TAB>witness"
    streamdict verify --dict D [--input T|-]    compare with Aho-Corasick
    streamdict bench  --dict D [--input T | --length N] [--report DIR]

Exit codes: 0 ok, 1 verify found a difference, 2 configuration error,
3 stream longer than --max-stream-len.
"""

from __future__ import annotations

import argparse
import random
import struct
import sys
import time
from pathlib import Path
from typing import BinaryIO, Iterator

from .ac import ac_offline_match
from .engine import MODES, ConfigError, EngineConfig, StreamMatcher, StreamOverflowError, engine_build
from .krhash import MERSENNE61

EXIT_OK, EXIT_DIFF, EXIT_CONFIG, EXIT_OVERFLOW = 0, 1, 2, 3
CHUNK = 1 << 16


def read_dictionary(path: str, binary: bool) -> list[bytes]:
    data = Path(path).read_bytes()
    if not binary:
        lines = data.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        return lines
    pats = []
    i = 0
    while i < len(data):
        if i + 4 > len(data):
            raise ConfigError("truncated length prefix in binary dictionary")
        (n,) = struct.unpack_from(">I", data, i)
        i += 4
        if i + n > len(data):
            raise ConfigError("truncated pattern in binary dictionary")
        pats.append(data[i : i + n])
        i += n
    return pats


def write_binary_dictionary(patterns: list[bytes], path: str) -> None:
    with open(path, "wb") as f:
        for p in patterns:
            f.write(struct.pack(">I", len(p)))
            f.write(p)


def parse_prime(spec: str) -> int:
    if spec == "mersenne61":
        return MERSENNE61
    if spec.startswith("custom:"):
        try:
            return int(spec[len("custom:") :], 0)
        except ValueError:
            pass
    raise ConfigError(f"bad --prime {spec!r}; use mersenne61 or custom:P")


def open_input(path: str) -> BinaryIO:
    if path == "-":
        return sys.stdin.buffer
    return open(path, "rb")


def chunks(f: BinaryIO) -> Iterator[bytes]:
    # read1 hands back whatever is available, so a character written to a
    # pipe is processed (and its event flushed) without waiting for more
    read = getattr(f, "read1", f.read)
    while True:
        b = read(CHUNK)
        if not b:
            return
        yield b


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="streamdict", description="Streaming dictionary matching.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("match", "report every position where a pattern ends"),
        ("verify", "run the engine and Aho-Corasick side by side"),
        ("bench", "throughput, accounted words and per-arrival work"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--dict", required=True, dest="dict_path")
        p.add_argument("--binary-dict", action="store_true", help="length-prefixed patterns (4-byte big-endian)")
        p.add_argument("--input", default="-", help="text file, or - for standard input")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--prime", default="mersenne61", help="mersenne61 or custom:P")
        p.add_argument("--allow-weak-prime", action="store_true", help="skip the p > N^3 check (testing only)")
        p.add_argument("--max-stream-len", type=int, default=1 << 20)
        p.add_argument("--mode", choices=MODES, default="auto")
        p.add_argument("--override-L", type=int, default=None)
        p.add_argument("--override-kL", type=int, default=None)
        p.add_argument("--format", choices=("text", "tsv"), default="text")
        if name == "bench":
            p.add_argument("--length", type=int, default=None, help="synthetic stream length when no --input file")
            p.add_argument("--report", default=None, help="directory for bench.tsv and heavy_ops.png")
    return ap


def make_engine(args) -> StreamMatcher:
    if args.seed < 0 or args.seed >= 1 << 64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if args.max_stream_len < 1:
        raise ConfigError("--max-stream-len must be positive")
    try:
        patterns = read_dictionary(args.dict_path, args.binary_dict)
    except OSError as e:
        raise ConfigError(f"cannot read dictionary: {e}") from e
    config = EngineConfig(
        seed=args.seed,
        prime=parse_prime(args.prime),
        max_stream_len=args.max_stream_len,
        mode=args.mode,
        override_L=args.override_L,
        override_kL=args.override_kL,
        check_prime_bound=not args.allow_weak_prime,
    )
    return engine_build(patterns, config)


def cmd_match(args, out: BinaryIO) -> int:
    eng = make_engine(args)
    if args.format == "tsv":
        out.write(b"end\twitness\n")
        out.flush()
    with open_input(args.input) as f:
        for block in chunks(f):
            for c in block:
                for ev in eng.push(c):
                    out.write(b"%d\t%d\n" % (ev.end, ev.witness))
                    out.flush()
    return EXIT_OK


def cmd_verify(args, out: BinaryIO) -> int:
    eng = make_engine(args)
    with open_input(args.input) as f:
        text = b"".join(chunks(f))
    got = []
    for c in text:
        got.extend(ev.end for ev in eng.push(c))
    want = sorted({e for e, _ in ac_offline_match(eng.plan.patterns, text)})
    missing = sorted(set(want) - set(got))
    extra = sorted(set(got) - set(want))
    sep = b"\t" if args.format == "tsv" else b" "
    out.write(b"reported%s%d\n" % (sep, len(got)))
    out.write(b"expected%s%d\n" % (sep, len(want)))
    for name, diff in ((b"missing", missing), (b"extra", extra)):
        line = b"%s%s%d" % (name, sep, len(diff))
        if diff:
            line += sep + b",".join(b"%d" % x for x in diff[:20])
        out.write(line + b"\n")
    out.flush()
    return EXIT_OK if not missing and not extra else EXIT_DIFF


def synthetic_text(patterns: list[bytes], n: int, seed: int) -> bytes:
    rng = random.Random(seed)
    alphabet = sorted(set(b"".join(patterns))) or [97]
    out = bytearray()
    while len(out) < n:
        if rng.random() < 0.3:
            out += rng.choice(patterns)
        else:
            out += bytes(rng.choice(alphabet) for _ in range(rng.randint(1, 16)))
    return bytes(out[:n])


def cmd_bench(args, out: BinaryIO) -> int:
    eng = make_engine(args)
    if args.length is not None:
        text = synthetic_text(eng.plan.patterns, args.length, args.seed)
    else:
        with open_input(args.input) as f:
            text = b"".join(chunks(f))
    push = eng.push
    t0 = time.perf_counter()
    for c in text:
        push(c)
    elapsed = time.perf_counter() - t0
    st = eng.finish()
    rate = len(text) / elapsed if elapsed > 0 else float("inf")
    rows = [
        ("characters", str(len(text))),
        ("seconds", f"{elapsed:.3f}"),
        ("chars_per_sec", f"{rate:.0f}"),
        ("events", str(st.events)),
        ("words", str(st.words)),
        ("k", str(eng.plan.k)),
        ("L", str(eng.plan.L)),
        ("kL", str(eng.plan.kL)),
        ("max_heavy_ops", str(st.max_heavy_ops)),
        ("classes", ",".join(f"{c}={n}" for c, n in st.classes.items())),
    ]
    sep = "\t" if args.format == "tsv" else ": "
    lines = "".join(f"{k}{sep}{v}\n" for k, v in rows)
    out.write(lines.encode())
    out.flush()
    if args.report:
        write_report(Path(args.report), rows, st.heavy_ops_hist)
    return EXIT_OK


def write_report(directory: Path, rows: list[tuple[str, str]], hist) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    directory.mkdir(parents=True, exist_ok=True)
    (directory / "bench.tsv").write_text("".join(f"{k}\t{v}\n" for k, v in rows))
    xs = sorted(hist)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(xs, [hist[x] for x in xs], color="0.35", width=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("heavy operations in one arrival")
    ax.set_ylabel("arrivals")
    fig.tight_layout()
    fig.savefig(directory / "heavy_ops.png", dpi=120)
    plt.close(fig)


COMMANDS = {"match": cmd_match, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: list[str] | None = None, out: BinaryIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = out if out is not None else sys.stdout.buffer
    try:
        return COMMANDS[args.command](args, out)
    except ConfigError as e:
        print(f"streamdict: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"streamdict: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except StreamOverflowError as e:
        print(f"streamdict: {e}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
