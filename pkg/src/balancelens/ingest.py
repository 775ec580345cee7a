"""Line-oriented edge-list files.

Format: one edge per line as ``source<TAB>target`` with decimal unsigned
ids, ``#`` comment lines and blank lines skipped, UTF-8, LF or CRLF.
Lenient mode (the default) also accepts single-space and comma
delimiters, since public social-graph dumps vary. The reader holds O(1)
lines at a time; memory is the edge buffer handed back to the caller.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeListFormatError

__all__ = ["ReadReport", "read_edge_list", "write_edge_list"]

MALFORMED_LINE_CAP = 10


@dataclass
class ReadReport:
    """What the reader skipped or had to guess at."""

    n_edges: int = 0
    comment_lines: int = 0
    blank_lines: int = 0
    malformed_count: int = 0
    malformed_lines: list = field(default_factory=list)  # (line_no, text) up to cap
    delimiter_fallbacks: int = 0  # lines parsed with a non-tab delimiter


def _parse_fields(line, lenient):
    parts = line.split("\t")
    if len(parts) == 2:
        return parts, False
    if lenient:
        for sep in (None, ","):  # None splits on any whitespace run
            parts = line.split(sep)
            if len(parts) == 2:
                return parts, True
    return None, False


def read_edge_list(path, strict=False):
    """Read (source, target) pairs from an edge-list file.

    Parameters
    ----------
    path : str or Path
    strict : bool
        When True, any malformed line raises EdgeListFormatError naming
        the first offending line; tab is then the only delimiter.

    Returns
    -------
    (ndarray of shape (m, 2) and dtype uint64, ReadReport)

    Malformed lines are never silently dropped: they are counted, and the
    first few are kept verbatim in the report.
    """
    sources, targets = [], []
    report = ReadReport()
    lenient = not strict
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                report.blank_lines += 1
                continue
            if line.startswith("#"):
                report.comment_lines += 1
                continue
            parts, fell_back = _parse_fields(line, lenient)
            if parts is not None:
                try:
                    u, v = int(parts[0]), int(parts[1])
                except ValueError:
                    parts = None
                else:
                    if u < 0 or v < 0 or u > 0xFFFFFFFFFFFFFFFF or v > 0xFFFFFFFFFFFFFFFF:
                        parts = None
            if parts is None:
                report.malformed_count += 1
                if len(report.malformed_lines) < MALFORMED_LINE_CAP:
                    report.malformed_lines.append((line_no, line[:80]))
                if strict:
                    raise EdgeListFormatError(
                        f"{path}: malformed line {line_no}: {line[:80]!r}")
                continue
            if fell_back:
                report.delimiter_fallbacks += 1
            sources.append(u)
            targets.append(v)

    report.n_edges = len(sources)
    edges = np.empty((len(sources), 2), dtype=np.uint64)
    edges[:, 0] = sources
    edges[:, 1] = targets
    return edges, report


def write_edge_list(g, path):
    """Write one ``source<TAB>target`` line per edge, in storage order.

    Output uses dense ids and LF endings; equal graphs produce
    byte-identical files.
    """
    src = g.src
    dst = g.dst
    chunk = 1 << 18
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for lo in range(0, src.size, chunk):
                hi = min(lo + chunk, src.size)
                fh.writelines(
                    f"{u}\t{v}\n"
                    for u, v in zip(src[lo:hi].tolist(), dst[lo:hi].tolist())
                )
    except OSError as exc:
        raise OSError(f"cannot write edge list to {path}: {exc}") from exc
