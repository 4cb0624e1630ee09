"""Plain-text matrix format and witness files.

Matrix format: a line holding ``n``, then ``n`` lines of ``n`` whitespace
separated entries written ``a+bi`` / ``a-bi`` (imaginary part omitted when
zero). Numbers use ``.`` as decimal separator regardless of locale and are
written with 17 significant digits so doubles survive a round trip.

A witness file starts with one JSON header line (check id, trial
parameters, recorded outcome) followed by blocks ``matrix <name>`` each
holding a matrix in the format above.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError


def format_real(x: float) -> str:
    return format(float(x), ".17g")


def format_entry(z: complex) -> str:
    z = complex(z)
    text = format_real(z.real)
    if z.imag != 0:
        sign = "-" if z.imag < 0 else "+"
        text += f"{sign}{format_real(abs(z.imag))}i"
    return text


def parse_entry(token: str) -> complex:
    tok = token.strip()
    if not tok or "j" in tok.lower() or "_" in tok:
        raise ParseError(f"bad matrix entry {token!r}")
    try:
        value = complex(tok[:-1] + "j" if tok.endswith("i") else tok)
    except ValueError as exc:
        raise ParseError(f"bad matrix entry {token!r}") from exc
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise ParseError(f"non-finite matrix entry {token!r}")
    return value


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=np.complex128)
    lines = [str(m.shape[0])]
    lines += [" ".join(format_entry(v) for v in row) for row in m]
    return "\n".join(lines) + "\n"


def _parse_matrix_lines(lines: list[str], start: int = 0) -> tuple[np.ndarray, int]:
    """Parse one matrix beginning at ``lines[start]``; return it and the next index."""
    try:
        n = int(lines[start].strip())
    except (IndexError, ValueError) as exc:
        raise ParseError(f"expected matrix dimension at line {start + 1}") from exc
    if n < 1:
        raise ParseError(f"matrix dimension must be positive, got {n}")
    rows = []
    for i in range(n):
        idx = start + 1 + i
        if idx >= len(lines):
            raise ParseError(f"matrix truncated after {i} of {n} rows")
        tokens = lines[idx].split()
        if len(tokens) != n:
            raise ParseError(f"line {idx + 1}: expected {n} entries, found {len(tokens)}")
        rows.append([parse_entry(tok) for tok in tokens])
    return np.array(rows, dtype=np.complex128), start + 1 + n


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    m, end = _parse_matrix_lines(lines)
    if end != len(lines):
        raise ParseError("trailing content after matrix")
    return m


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def write_matrix(path, m) -> None:
    Path(path).write_text(format_matrix(m), encoding="utf-8")


def format_witness(header: dict, matrices: dict[str, np.ndarray]) -> str:
    out = [json.dumps(header, sort_keys=True)]
    for name, m in matrices.items():
        out.append(f"matrix {name}")
        out.append(format_matrix(m).rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_witness(text: str) -> tuple[dict, dict[str, np.ndarray]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty witness")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad witness header: {exc}") from exc
    if not isinstance(header, dict) or "check_id" not in header:
        raise ParseError("witness header must be a JSON object with a check_id")
    matrices: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != "matrix":
            raise ParseError(f"line {i + 1}: expected 'matrix <name>'")
        matrices[parts[1]], i = _parse_matrix_lines(lines, i + 1)
    if not matrices:
        raise ParseError("witness holds no matrices")
    return header, matrices


def read_witness(path) -> tuple[dict, dict[str, np.ndarray]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read witness {path}: {exc}") from exc
    return parse_witness(text)
