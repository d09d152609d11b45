"""Plain-text files describing samples and function classes.

A file is a header of ``key value`` lines followed by numeric rows::

    # two functions on two points with values in R^2
    kind finite
    n 2
    K 2

    1 0
    0 1

    0 1
    1 0

``kind finite`` lists one ``n x K`` table per block, blocks separated by
blank lines.  ``kind kmeans`` (keys ``n K d``) and ``kind linear`` (keys
``n K d norm radius``) give the n sample points as rows of ``d`` numbers,
either inline or through ``points <path>`` relative to the file.  Lines
starting with ``#`` are comments.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .classes import FiniteClass, KMeansCenters, LinearNormBall, Sample

__all__ = ["ClassFileError", "load_class_file", "save_class_file", "parse_class_text", "format_class"]

_HEADER_KEYS = {
    "finite": {"kind", "n", "K", "d"},
    "kmeans": {"kind", "n", "K", "d", "points"},
    "linear": {"kind", "n", "K", "d", "norm", "radius", "points"},
}


class ClassFileError(ValueError):
    def __init__(self, source: str, line: int, col: int, message: str):
        self.source, self.line, self.col = source, line, col
        super().__init__(f"{source}:{line}:{col}: {message}")


def _tokens(line: str):
    """Yield ``(column, token)`` with 1-based columns."""
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def _is_numeric_row(line: str) -> bool:
    first = line.split()[0]
    try:
        float(first)
    except ValueError:
        return False
    return True


def parse_class_text(text: str, source: str = "<string>", base: Path | None = None):
    lines = text.splitlines()
    header: dict[str, tuple[str, int]] = {}
    body_start = len(lines)
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if _is_numeric_row(line):
            body_start = lineno - 1
            break
        toks = list(_tokens(line))
        if len(toks) != 2:
            raise ClassFileError(source, lineno, 1, f"expected 'key value', got {line.strip()!r}")
        (_, key), (vcol, value) = toks
        if key in header:
            raise ClassFileError(source, lineno, 1, f"duplicate key {key!r}")
        header[key] = (value, lineno, vcol)

    if "kind" not in header:
        raise ClassFileError(source, 1, 1, "missing 'kind' in header")
    kind = header["kind"][0]
    if kind not in _HEADER_KEYS:
        _, ln, col = header["kind"]
        raise ClassFileError(source, ln, col, f"unknown kind {kind!r}")
    for key, (_, ln, _) in header.items():
        if key not in _HEADER_KEYS[kind]:
            raise ClassFileError(source, ln, 1, f"unknown key {key!r} for kind {kind}")

    def need_int(key, required=True):
        if key not in header:
            if required:
                raise ClassFileError(source, 1, 1, f"missing {key!r} in header")
            return None
        value, ln, col = header[key]
        try:
            v = int(value)
        except ValueError:
            raise ClassFileError(source, ln, col, f"{key} must be an integer, got {value!r}") from None
        if v < 1:
            raise ClassFileError(source, ln, col, f"{key} must be >= 1")
        return v

    blocks = _numeric_blocks(lines, body_start, source)
    n, K = need_int("n"), need_int("K")

    if kind == "finite":
        need_int("d", required=False)
        if not blocks:
            raise ClassFileError(source, len(lines) or 1, 1, "a finite class needs at least one table")
        tables = []
        for block in blocks:
            if len(block) != n:
                raise ClassFileError(source, block[0][0], 1, f"table has {len(block)} rows, expected n={n}")
            tables.append(_rows_to_array(block, K, source))
        return FiniteClass(np.array(tables))

    d = need_int("d")
    if "points" in header:
        if blocks:
            raise ClassFileError(source, blocks[0][0][0], 1, "points given both inline and by file")
        value, ln, col = header["points"]
        path = (base or Path.cwd()) / value
        try:
            ptext = path.read_text()
        except OSError as exc:
            raise ClassFileError(source, ln, col, f"cannot read points file: {exc.strerror}") from None
        plines = ptext.splitlines()
        rows = [r for b in _numeric_blocks(plines, 0, str(path)) for r in b]
        psource = str(path)
    else:
        rows = [r for b in blocks for r in b]
        psource = source
    if len(rows) != n:
        at = rows[-1][0] if rows else 1
        raise ClassFileError(psource, at, 1, f"found {len(rows)} points, expected n={n}")
    X = _rows_to_array(rows, d, psource)

    if kind == "kmeans":
        norms = np.linalg.norm(X, axis=1)
        for idx, (ln, _) in enumerate(rows):
            if norms[idx] > 1 + 1e-12:
                raise ClassFileError(psource, ln, 1, f"point {idx} has norm {norms[idx]:.6g} > 1")
        return KMeansCenters(Sample(X), K)

    norm = header.get("norm", ("frobenius", 1, 1))
    if norm[0] not in ("frobenius", "spectral"):
        raise ClassFileError(source, norm[1], norm[2], f"unknown norm {norm[0]!r}")
    radius = 1.0
    if "radius" in header:
        value, ln, col = header["radius"]
        try:
            radius = float(value)
        except ValueError:
            raise ClassFileError(source, ln, col, f"radius must be a number, got {value!r}") from None
        if not radius > 0:
            raise ClassFileError(source, ln, col, "radius must be positive")
    return LinearNormBall(Sample(X), K, radius, norm[0])


def _numeric_blocks(lines, start, source):
    """Group numeric lines into blank-line separated blocks of ``(lineno, line)``."""
    blocks, current = [], []
    for lineno in range(start + 1, len(lines) + 1):
        line = lines[lineno - 1].split("#", 1)[0].rstrip()
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        blocks.append(current)
    return blocks


def _rows_to_array(rows, width, source) -> np.ndarray:
    out = np.empty((len(rows), width))
    for r, (lineno, line) in enumerate(rows):
        toks = list(_tokens(line))
        if len(toks) != width:
            raise ClassFileError(source, lineno, 1, f"row has {len(toks)} values, expected {width}")
        for c, (col, tok) in enumerate(toks):
            try:
                out[r, c] = float(tok)
            except ValueError:
                raise ClassFileError(source, lineno, col, f"non-numeric token {tok!r}") from None
            if not np.isfinite(out[r, c]):
                raise ClassFileError(source, lineno, col, f"non-finite value {tok!r}")
    return out


def load_class_file(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ClassFileError(str(path), 0, 0, f"cannot read class file: {exc.strerror}") from None
    return parse_class_text(text, str(path), path.parent)


def _fmt(x: float) -> str:
    return "%.17g" % x


def format_class(cls) -> str:
    if isinstance(cls, FiniteClass) and not isinstance(cls, KMeansCenters):
        out = ["kind finite", f"n {cls.n}", f"K {cls.output_dim}"]
        for table in cls.tables:
            out.append("")
            out.extend(" ".join(_fmt(v) for v in row) for row in table)
        return "\n".join(out) + "\n"
    if isinstance(cls, KMeansCenters):
        out = ["kind kmeans", f"n {cls.n}", f"K {cls.output_dim}", f"d {cls.sample.d}", ""]
    elif isinstance(cls, LinearNormBall):
        out = [
            "kind linear",
            f"n {cls.n}",
            f"K {cls.output_dim}",
            f"d {cls.sample.d}",
            f"norm {cls.norm}",
            f"radius {_fmt(cls.radius)}",
            "",
        ]
    else:
        raise TypeError(f"cannot serialize {type(cls).__name__}")
    out.extend(" ".join(_fmt(v) for v in row) for row in cls.sample.points)
    return "\n".join(out) + "\n"


def save_class_file(cls, path) -> None:
    Path(path).write_text(format_class(cls))
