"""Command-line interface.

    idxdict dict init|stats|export PATH [--overwrite]
    idxdict compress INPUT --dict PATH [--output PATH]
    idxdict decompress INPUT --dict PATH [--output PATH]
    idxdict bench FILE... [--dict PATH] [--external LABEL=BYTES ...] [--original-size N]

Exit codes: 0 success, 2 usage, 3 I/O, 4 dictionary errors, 5 codec errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .codec import CompressedContainer, compress, decompress, metrics
from .dictionary import Dictionary
from .errors import CodecError, DictionaryError, ZeroOriginal

log = logging.getLogger("idxdict")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DICTIONARY = 4
EXIT_CODEC = 5

CONTAINER_SUFFIX = ".idxd"


class UsageError(Exception):
    pass


# -- bench report ------------------------------------------------------------

@dataclass
class BenchRow:
    label: str
    original_size: int
    compressed_size: int
    compressed_percent: float
    compression_ratio: float


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def add(self, label: str, original_size: int, compressed_size: int) -> BenchRow:
        m = metrics(original_size, compressed_size)
        row = BenchRow(label, original_size, compressed_size, m.compressed_percent, m.compression_ratio)
        self.rows.append(row)
        return row

    def format(self) -> str:
        header = ("S. No", "Approach", "Original Size", "Compressed Size", "Compressed %", "Compression Ratio")
        body = [
            (str(i), r.label, str(r.original_size), str(r.compressed_size),
             f"{r.compressed_percent:.2f}", f"{r.compression_ratio:.4f}")
            for i, r in enumerate(self.rows, start=1)
        ]
        widths = [max(len(row[c]) for row in [header, *body]) for c in range(len(header))]
        lines = []
        for row in [header, *body]:
            cells = [row[0].rjust(widths[0]), row[1].ljust(widths[1])]
            cells += [cell.rjust(w) for cell, w in zip(row[2:], widths[2:])]
            lines.append("  ".join(cells).rstrip())
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)


def parse_external(spec: str) -> Tuple[str, int]:
    label, sep, size = spec.rpartition("=")
    if not sep or not label:
        raise UsageError(f"--external expects LABEL=BYTES, got {spec!r}")
    try:
        n = int(size)
    except ValueError:
        raise UsageError(f"--external size must be an integer: {spec!r}") from None
    if n < 0:
        raise UsageError(f"--external size must be non-negative: {spec!r}")
    return label, n


def run_bench(paths: Sequence[Path], dict_path: Optional[Path] = None,
              externals: Sequence[Tuple[str, int]] = (), original_size: Optional[int] = None) -> BenchReport:
    """Measure the codec on each file; external rows are attached to the first file.

    Each file is compressed against its own copy of the starting dictionary
    (empty, or loaded from ``dict_path``); nothing is written back.
    """
    report = BenchReport()
    for i, path in enumerate(paths):
        data = path.read_bytes()
        if not data:
            log.warning("skipping %s: empty file", path)
            continue
        d = Dictionary.load(dict_path) if dict_path else Dictionary()
        size = len(compress(data, d).to_bytes())
        if i == 0:
            base = original_size if original_size is not None else len(data)
            for label, ext_size in externals:
                report.add(label, base, ext_size)
        report.add(f"Proposed ({path.name})", len(data), size)
    return report


# -- file helpers ------------------------------------------------------------

def _stage(dest: Path, data: bytes) -> str:
    fd, tmp = tempfile.mkstemp(prefix=dest.name + ".", suffix=".tmp", dir=dest.parent)
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    return tmp


def _commit_pair(output: Path, container: bytes, dict_path: Path, d: Dictionary) -> None:
    """Replace the output file and the dictionary file together.

    Both payloads are fully written to temp files first; if the dictionary
    rename fails the output file is rolled back.
    """
    tmp_out = _stage(output, container)
    tmp_dict = None
    try:
        tmp_dict = _stage(dict_path, d.dumps().encode("utf-8"))
        backup = output.read_bytes() if output.exists() else None
        os.replace(tmp_out, output)
        tmp_out = None
        try:
            os.replace(tmp_dict, dict_path)
            tmp_dict = None
        except OSError:
            if backup is None:
                output.unlink(missing_ok=True)
            else:
                output.write_bytes(backup)
            raise
    finally:
        for tmp in (tmp_out, tmp_dict):
            if tmp is not None:
                Path(tmp).unlink(missing_ok=True)


# -- commands ----------------------------------------------------------------

def cmd_dict_init(path: Path, overwrite: bool = False) -> Dictionary:
    if path.exists() and not overwrite:
        raise UsageError(f"{path} exists; pass --overwrite to replace it")
    d = Dictionary()
    d.save(path)
    return d


def cmd_dict_stats(path: Path) -> str:
    return Dictionary.load(path).stats().format()


def cmd_dict_export(path: Path) -> str:
    return Dictionary.load(path).dumps()


def cmd_compress(input_path: Path, dict_path: Path, output_path: Optional[Path] = None) -> Path:
    output_path = output_path or input_path.with_name(input_path.name + CONTAINER_SUFFIX)
    data = input_path.read_bytes()
    d = Dictionary.load(dict_path)
    container = compress(data, d)
    _commit_pair(output_path, container.to_bytes(), dict_path, d)
    log.info("%s: %d -> %d bytes, %d frames", input_path, len(data), len(container), container.frame_count)
    return output_path


def cmd_decompress(input_path: Path, dict_path: Path, output_path: Optional[Path] = None) -> Path:
    if output_path is None:
        name = input_path.name
        output_path = input_path.with_name(
            name[: -len(CONTAINER_SUFFIX)] if name.endswith(CONTAINER_SUFFIX) else name + ".out"
        )
    container = CompressedContainer.from_bytes(input_path.read_bytes())
    d = Dictionary.load(dict_path)
    data = decompress(container, d)
    os.replace(_stage(output_path, data), output_path)
    return output_path


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="idxdict", description="Word-level text compression against a shared indexed dictionary.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    dp = sub.add_parser("dict", help="dictionary lifecycle")
    dsub = dp.add_subparsers(dest="dict_command", required=True, parser_class=_Parser)
    init = dsub.add_parser("init", help="create an empty dictionary file")
    init.add_argument("path", type=Path)
    init.add_argument("--overwrite", action="store_true")
    for name, help_ in (("stats", "print entry counts"), ("export", "print entries in file order")):
        sp = dsub.add_parser(name, help=help_)
        sp.add_argument("path", type=Path)

    for name in ("compress", "decompress"):
        sp = sub.add_parser(name)
        sp.add_argument("input", type=Path)
        sp.add_argument("--dict", dest="dict_path", type=Path, required=True)
        sp.add_argument("--output", "-o", type=Path)

    bp = sub.add_parser("bench", help="print a comparison table")
    bp.add_argument("files", type=Path, nargs="+")
    bp.add_argument("--dict", dest="dict_path", type=Path,
                    help="starting dictionary (default: empty); never modified")
    bp.add_argument("--external", action="append", default=[], metavar="LABEL=BYTES",
                    help="size produced by another tool for the first file (repeatable)")
    bp.add_argument("--original-size", type=int,
                    help="original size used for --external rows (default: first file's size)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"idxdict: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "dict":
            if args.dict_command == "init":
                d = cmd_dict_init(args.path, args.overwrite)
                print(f"initialized {args.path} (id {d.id:016x})")
            elif args.dict_command == "stats":
                print(cmd_dict_stats(args.path))
            else:
                sys.stdout.write(cmd_dict_export(args.path))
        elif args.command == "compress":
            cmd_compress(args.input, args.dict_path, args.output)
        elif args.command == "decompress":
            cmd_decompress(args.input, args.dict_path, args.output)
        elif args.command == "bench":
            externals = [parse_external(s) for s in args.external]
            print(run_bench(args.files, args.dict_path, externals, args.original_size).format())
    except UsageError as exc:
        print(f"idxdict: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroOriginal as exc:
        print(f"idxdict: ZeroOriginal: {exc}", file=sys.stderr)
        return EXIT_CODEC
    except DictionaryError as exc:
        print(f"idxdict: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DICTIONARY
    except CodecError as exc:
        print(f"idxdict: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODEC
    except OSError as exc:
        print(f"idxdict: IoFailure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
