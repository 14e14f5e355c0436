"""Command-line interface: ``rrdh {embed,extract,attack,nbcr,drift,bench}``.

Exit codes: 0 ok, 1 I/O, 2 usage or capacity, 3 integrity (damaged aux or map).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .corpus import gen_secret, load_pgm, resolve_corpus, save_pgm
from .errors import CapacityError, PgmFormatError
from .jpeg_sim import compress_roundtrip
from .rdh.scheme import EmbedConfig, embed, extract_partial

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_INTEGRITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fail(msg: str, code: int) -> int:
    print(f"rrdh: {msg}", file=sys.stderr)
    return code


# --------------------------------------------------------------------------
# parsing helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _qf_list(text: str) -> list:
    out = []
    for x in text.split(","):
        x = x.strip().lower()
        if not x:
            continue
        if x == "none":
            out.append(None)
            continue
        try:
            out.append(int(x))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad quality factor {x!r}") from None
    return out


def _block(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("block origin must be ROW,COL")
    return vals[0], vals[1]


def _predictor(text: str):
    return "auto" if text == "auto" else int(text)


def _check_qfs(qfs) -> None:
    for qf in qfs:
        if qf is not None and not 1 <= qf <= 100:
            raise UsageError(f"quality factor {qf} outside [1, 100]")


def read_secret(path) -> np.ndarray:
    text = Path(path).read_text()
    bits = "".join(ch for ch in text if not ch.isspace())
    if set(bits) - {"0", "1"}:
        raise UsageError(f"secret file {path} must contain only 0/1 characters")
    return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")


def write_secret(path, bits) -> None:
    Path(path).write_text("".join(map(str, np.asarray(bits, dtype=np.uint8).tolist())) + "\n")


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _corpus(source):
    try:
        images = resolve_corpus(source)
    except (NotADirectoryError, FileNotFoundError) as exc:
        raise UsageError(str(exc)) from exc
    if not images:
        raise UsageError("corpus is empty")
    return images


def _config(args) -> EmbedConfig:
    try:
        return EmbedConfig(n=args.n, N=args.N, ordering=args.ordering, T=args.T, r=args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_scheme_flags(p, defaults: bool = True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--n", type=int, default=d(3), help="MSB/LSB split plane, 1..7 (default 3)")
    p.add_argument("--N", type=_predictor, default=d("auto"), help="predictor size 1, 2, 3 or auto")
    p.add_argument("--ordering", choices=("complexity", "raster"), default=d("complexity"),
                   help="embedding order within each pass")
    p.add_argument("--T", type=int, default=d(1), help="histogram shift quantity (1 = baseline)")
    p.add_argument("--r", type=int, default=d(1), help="odd repetition factor for the aux bits")


# --------------------------------------------------------------------------
# subcommands


def cmd_embed(args) -> int:
    image = load_pgm(args.input)
    if args.secret is not None:
        secret = read_secret(args.secret)
    elif args.bits is not None:
        if args.bits < 0:
            raise UsageError("--bits must be non-negative")
        secret = gen_secret(args.seed, args.bits)
    else:
        raise UsageError("give either --secret FILE or --bits COUNT")
    cfg = _config(args)
    try:
        rec = embed(image, secret, cfg)
    except CapacityError as exc:
        return _fail(f"capacity exceeded: {exc} (achievable secret bits: {exc.achievable})", EXIT_USAGE)
    save_pgm(rec.marked, args.out)
    meta = rec.metadata()
    meta["seed"] = args.seed if args.secret is None else None
    Path(args.out).with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"embedded {meta['secret_len']} bits with N={meta['N']}, PSNR {meta['psnr']} dB")
    return EXIT_OK


def _extract_config(args) -> EmbedConfig:
    meta = {}
    sidecar = Path(args.meta) if args.meta else Path(args.input).with_suffix(".json")
    if args.meta or sidecar.exists():
        meta = json.loads(sidecar.read_text())
    merged = {}
    for key, default in (("n", 3), ("ordering", "complexity"), ("T", 1), ("r", 1)):
        flag = getattr(args, key)
        merged[key] = flag if flag is not None else meta.get(key, default)
    try:
        # N is read back from the aux bits; the config value is not used
        return EmbedConfig(N="auto", **merged)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_extract(args) -> int:
    marked = load_pgm(args.input)
    cfg = _extract_config(args)
    res = extract_partial(marked, cfg)
    write_secret(args.secret_out, res.secret)
    if res.restored is not None:
        save_pgm(res.restored, args.restored)
    if not res.ok:
        return _fail(f"integrity failure ({res.status}): {res.detail}; partial secret written", EXIT_INTEGRITY)
    print(f"extracted {res.secret.size} bits; image restored")
    return EXIT_OK


def cmd_attack(args) -> int:
    _check_qfs([args.qf])
    image = load_pgm(args.input)
    save_pgm(compress_roundtrip(image, args.qf), args.out)
    return EXIT_OK


def cmd_nbcr(args) -> int:
    _check_qfs(args.qf)
    report = analysis.nbcr_report(_corpus(args.corpus), args.qf)
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    return EXIT_OK


def cmd_drift(args) -> int:
    _check_qfs(args.qf)
    image = load_pgm(args.input)
    try:
        report = analysis.ordering_drift(image, args.block, args.n, args.qf)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    _check_qfs(args.qf)
    try:
        grid = [analysis.grid_config(g, args.n) for g in args.grid.split(",") if g]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not grid:
        raise UsageError("empty grid")
    results = analysis.robustness_bench(_corpus(args.corpus), grid, args.qf, args.bits, args.seed)
    _emit(analysis.write_records(analysis.bench_records(results), analysis.BENCH_FIELDS, args.format), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrdh", description="Two-layer MSB reversible data hiding toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide a secret bit stream in a PGM image")
    p.add_argument("--in", dest="input", required=True, help="cover image (binary PGM)")
    p.add_argument("--out", required=True, help="marked image; metadata goes next to it as .json")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--secret", help="text file of 0/1 characters")
    src.add_argument("--bits", type=int, help="generate this many pseudo-random secret bits")
    p.add_argument("--seed", type=int, default=0, help="seed for --bits (default 0)")
    _add_scheme_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the secret and the original image")
    p.add_argument("--in", dest="input", required=True, help="marked image (binary PGM)")
    p.add_argument("--meta", help="sidecar JSON written by embed (default: <input>.json if present)")
    p.add_argument("--secret-out", required=True, help="where to write the recovered 0/1 secret")
    p.add_argument("--restored", required=True, help="where to write the restored image")
    _add_scheme_flags(p, defaults=False)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="JPEG quantize/dequantize roundtrip")
    p.add_argument("--in", dest="input", required=True, help="input image (binary PGM)")
    p.add_argument("--out", required=True, help="attacked image")
    p.add_argument("--qf", type=int, required=True, help="quality factor 1..100")
    p.set_defaults(func=cmd_attack)

    fmt = dict(choices=("csv", "json"), default="csv", help="output format (default csv)")
    corpus_help = "synth (bundled generator), dir ($RRDH_CORPUS_DIR) or a directory of PGMs"

    p = sub.add_parser("nbcr", help="per-plane bit change rates after JPEG attack")
    p.add_argument("--corpus", default=None, help=corpus_help + "; default $RRDH_CORPUS_DIR or synth")
    p.add_argument("--qf", type=_qf_list, default=list(analysis.DEFAULT_QFS), help="comma-separated quality factors")
    p.add_argument("--format", **fmt)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_nbcr)

    p = sub.add_parser("drift", help="complexity-ordering drift of one 8x8 block")
    p.add_argument("--in", dest="input", required=True, help="input image (binary PGM)")
    p.add_argument("--block", type=_block, default=(0, 0), help="block origin ROW,COL (default 0,0)")
    p.add_argument("--n", type=int, default=3, help="MSB/LSB split plane (default 3)")
    p.add_argument("--qf", type=_qf_list, default=[85, 90, 100], help="comma-separated quality factors")
    p.add_argument("--format", **fmt)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("bench", help="bit error rates over a configuration grid")
    p.add_argument("--corpus", default=None, help=corpus_help + "; default $RRDH_CORPUS_DIR or synth")
    p.add_argument("--grid", default="baseline,raster,shift4,rep5",
                   help=f"comma-separated presets from {','.join(analysis.GRID_PRESETS)}")
    p.add_argument("--n", type=int, default=None, help="override the split plane of every preset")
    p.add_argument("--qf", type=_qf_list, default=[None, 95], help="quality factors; 'none' = no attack")
    p.add_argument("--bits", type=int, default=256, help="secret length per cell (default 256)")
    p.add_argument("--seed", type=int, default=7, help="secret seed (default 7)")
    p.add_argument("--format", **fmt)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail(str(exc), EXIT_USAGE)
    except PgmFormatError as exc:
        return _fail(str(exc), EXIT_IO)
    except OSError as exc:
        return _fail(f"{exc.filename or ''}: {exc.strerror or exc}", EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
