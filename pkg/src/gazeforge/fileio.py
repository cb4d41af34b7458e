"""Readers/writers for trace CSV files and portable graymap (PGM) images.

All readers reject malformed input with positioned errors; writers produce
byte-stable output (fixed formats, no locale dependence).
"""
from __future__ import annotations

import os
import tempfile
from collections.abc import Iterable

import numpy as np

from .core import LABEL_NAMES, NAME_LABELS, MovementLabel
from .errors import ParseError
from .mapping import GazeTrace
from .resampler import SampledSignal

VELOCITY_HEADER = "t_ms,velocity_deg_s,label"
GAZE_HEADER = "t_ms,x_px,y_px,label"


def atomic_write_text(path: str, text: str) -> None:
    """Write via temp-then-rename so errors never leave partial output."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".gazeforge-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".gazeforge-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_label(lab: int) -> str:
    return LABEL_NAMES[MovementLabel(int(lab))]


def _parse_label(token: str, row: int) -> MovementLabel:
    try:
        return NAME_LABELS[token]
    except KeyError:
        raise ParseError(f"unknown label {token!r}", f"row {row}") from None


def velocity_csv_text(signal: SampledSignal) -> str:
    lines = [VELOCITY_HEADER]
    for t, v, lab in zip(signal.timestamps, signal.velocities, signal.labels):
        lines.append(f"{t * 1000.0:.3f},{v:.6g},{_format_label(lab)}")
    return "\n".join(lines) + "\n"


def write_velocity_csv(path: str, signal: SampledSignal) -> None:
    atomic_write_text(path, velocity_csv_text(signal))


def _read_rows(text: str, header: str, n_fields: int) -> Iterable[tuple[int, list[str]]]:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", "row 1")
    if lines[0].strip() != header:
        raise ParseError(
            f"bad header: expected {header!r}, got {lines[0].strip()!r}", "row 1"
        )
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != n_fields:
            raise ParseError(
                f"expected {n_fields} comma-separated fields, got {len(fields)}",
                f"row {i}",
            )
        yield i, [f.strip() for f in fields]


def _parse_float(token: str, row: int, what: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"invalid {what} {token!r}", f"row {row}") from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite {what} {token!r}", f"row {row}")
    return v


def read_velocity_csv_text(text: str) -> SampledSignal:
    ts, vs, ls = [], [], []
    for row, (t_ms, v, lab) in _read_rows(text, VELOCITY_HEADER, 3):
        ts.append(_parse_float(t_ms, row, "timestamp") / 1000.0)
        vs.append(_parse_float(v, row, "velocity"))
        ls.append(int(_parse_label(lab, row)))
    if not ts:
        raise ParseError("no data rows", "row 2")
    ts_arr = np.array(ts)
    if np.any(np.diff(ts_arr) <= 0):
        bad = int(np.argmax(np.diff(ts_arr) <= 0)) + 3
        raise ParseError("timestamps not strictly increasing", f"row {bad}")
    return SampledSignal(ts_arr, np.array(vs), np.array(ls))


def read_velocity_csv(path: str) -> SampledSignal:
    with open(path, "r", newline="") as fh:
        return read_velocity_csv_text(fh.read())


def gaze_csv_text(trace: GazeTrace) -> str:
    lines = [GAZE_HEADER]
    for t, x, y, lab in zip(trace.timestamps, trace.x, trace.y, trace.labels):
        lines.append(
            f"{t * 1000.0:.3f},{x:.3f},{y:.3f},{_format_label(lab)}"
        )
    return "\n".join(lines) + "\n"


def write_gaze_csv(path: str, trace: GazeTrace) -> None:
    atomic_write_text(path, gaze_csv_text(trace))


def read_gaze_csv_text(
    text: str,
    width: int = 0,
    height: int = 0,
    pixels_per_degree: float = 30.0,
) -> GazeTrace:
    ts, xs, ys, ls = [], [], [], []
    for row, (t_ms, x, y, lab) in _read_rows(text, GAZE_HEADER, 4):
        ts.append(_parse_float(t_ms, row, "timestamp") / 1000.0)
        xs.append(_parse_float(x, row, "x coordinate"))
        ys.append(_parse_float(y, row, "y coordinate"))
        ls.append(int(_parse_label(lab, row)))
    if not ts:
        raise ParseError("no data rows", "row 2")
    if width == 0:
        width = int(np.ceil(max(xs))) + 1
    if height == 0:
        height = int(np.ceil(max(ys))) + 1
    return GazeTrace(
        np.array(ts), np.array(xs), np.array(ys), np.array(ls),
        width, height, pixels_per_degree,
    )


def read_gaze_csv(path: str, **kwargs) -> GazeTrace:
    with open(path, "r", newline="") as fh:
        return read_gaze_csv_text(fh.read(), **kwargs)


# --- Portable graymap (P2 ASCII / P5 binary) ---

MAX_PGM_DIM = 1 << 16


class _PgmScanner:
    """Tokenizer for PNM headers: whitespace separated, '#' comments."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.data):
            c = self.data[self.pos : self.pos + 1]
            if c in b" \t\r\n":
                self.pos += 1
            elif c == b"#":
                while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def token(self, what: str) -> bytes:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in b" \t\r\n#":
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"missing {what}", f"byte {start}")
        return self.data[start : self.pos]

    def integer(self, what: str, lo: int, hi: int) -> int:
        self.skip_ws()
        start = self.pos
        tok = self.token(what)
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"invalid {what} {tok!r}", f"byte {start}") from None
        if not lo <= v <= hi:
            raise ParseError(f"{what} {v} out of range [{lo}, {hi}]", f"byte {start}")
        return v


def read_pgm_bytes(data: bytes) -> np.ndarray:
    """Decode a P2/P5 graymap into a float grid normalized by maxval."""
    sc = _PgmScanner(data)
    magic = sc.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"bad magic {magic!r} (expected P2 or P5)", "byte 0")
    width = sc.integer("width", 1, MAX_PGM_DIM)
    height = sc.integer("height", 1, MAX_PGM_DIM)
    maxval = sc.integer("maxval", 1, 65535)
    n = width * height
    if magic == b"P2":
        values = np.empty(n, dtype=float)
        for i in range(n):
            start = sc.pos
            v = sc.integer("pixel value", 0, maxval)
            values[i] = v
        sc.skip_ws()
        if sc.pos < len(sc.data):
            raise ParseError("trailing data after pixels", f"byte {sc.pos}")
    else:
        # Exactly one whitespace byte separates the header from the payload.
        if sc.pos >= len(data) or data[sc.pos : sc.pos + 1] not in b" \t\r\n":
            raise ParseError("missing separator before binary payload", f"byte {sc.pos}")
        sc.pos += 1
        bpp = 1 if maxval < 256 else 2
        need = n * bpp
        payload = data[sc.pos : sc.pos + need]
        if len(payload) < need:
            raise ParseError(
                f"truncated payload: need {need} bytes, have {len(payload)}",
                f"byte {sc.pos + len(payload)}",
            )
        if len(data) > sc.pos + need:
            raise ParseError("trailing data after payload", f"byte {sc.pos + need}")
        dtype = ">u2" if bpp == 2 else np.uint8
        values = np.frombuffer(payload, dtype=dtype).astype(float)
        if values.max(initial=0) > maxval:
            bad = int(np.argmax(values > maxval))
            raise ParseError(
                f"pixel value {int(values[bad])} exceeds maxval {maxval}",
                f"byte {sc.pos + bad * bpp}",
            )
    return values.reshape(height, width) / float(maxval)


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pgm_bytes(fh.read())


def pgm_bytes(grid: np.ndarray) -> bytes:
    """Encode a [0,1] grid as binary P5 with maxval 255 (round half up)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2:
        raise ParseError("grid must be 2D")
    h, w = grid.shape
    q = np.floor(np.clip(grid, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    return b"P5\n%d %d\n255\n" % (w, h) + q.tobytes()


def write_pgm(path: str, grid: np.ndarray) -> None:
    atomic_write_bytes(path, pgm_bytes(grid))
