"""Frame I/O: YUV4MPEG2, binary PGM (P5) and headerless planar YUV 4:2:0.

A :class:`FrameStream` holds every frame as a list of planes, luma first.
Y4M header tokens and per-frame parameters are kept verbatim so an
unmodified stream writes back byte-for-byte.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .frames import LumaFrame


class FormatError(ValueError):
    """Malformed file or dimensions that do not fit the data."""


class StreamFormat(enum.Enum):
    Y4M = "y4m"
    PGM = "pgm"
    RAW_YUV420 = "yuv"


@dataclass
class FrameStream:
    format: StreamFormat
    width: int
    height: int
    frames: list[list[np.ndarray]] = field(default_factory=list)
    # Y4M only: header tokens after the magic, and each frame's parameter string.
    header: list[str] = field(default_factory=list)
    frame_params: list[bytes] = field(default_factory=list)
    bit_depth: int = 8

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def luma(self, index: int) -> LumaFrame:
        return LumaFrame(self.frames[index][0], bit_depth=self.bit_depth)

    def with_frames(self, frames: list[list[np.ndarray]]) -> FrameStream:
        return FrameStream(self.format, self.width, self.height, frames,
                           list(self.header), list(self.frame_params), self.bit_depth)


def guess_format(path: str | os.PathLike) -> StreamFormat:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".y4m":
        return StreamFormat.Y4M
    if ext in (".pgm", ".pnm"):
        return StreamFormat.PGM
    if ext in (".yuv", ".raw"):
        return StreamFormat.RAW_YUV420
    with open(path, "rb") as f:
        magic = f.read(9)
    if magic.startswith(b"YUV4MPEG2"):
        return StreamFormat.Y4M
    if magic.startswith(b"P5"):
        return StreamFormat.PGM
    raise FormatError(f"cannot tell the format of {path}; pass --format")


def read_stream(path: str | os.PathLike, fmt: StreamFormat | None = None,
                width: int | None = None, height: int | None = None) -> FrameStream:
    fmt = fmt or guess_format(path)
    with open(path, "rb") as f:
        data = f.read()
    if fmt is StreamFormat.Y4M:
        return parse_y4m(data)
    if fmt is StreamFormat.PGM:
        return parse_pgm(data)
    if width is None or height is None:
        raise FormatError("raw YUV 4:2:0 needs an explicit width and height")
    return parse_raw_yuv420(data, width, height)


def write_stream(path: str | os.PathLike, stream: FrameStream) -> None:
    if stream.format is StreamFormat.Y4M:
        data = dump_y4m(stream)
    elif stream.format is StreamFormat.PGM:
        data = dump_pgm(stream)
    else:
        data = dump_raw_yuv420(stream)
    with open(path, "wb") as f:
        f.write(data)


# --- Y4M -------------------------------------------------------------------

def _chroma_shape(colorspace: str, width: int, height: int) -> tuple[int, int] | None:
    cs = colorspace.lower()
    if cs.startswith("mono"):
        return None
    if cs.startswith("420"):
        return (height + 1) // 2, (width + 1) // 2
    if cs.startswith("422"):
        return height, (width + 1) // 2
    if cs.startswith("444"):
        return height, width
    raise FormatError(f"unsupported Y4M colorspace C{colorspace}")


def _y4m_layout(header: list[str]) -> tuple[int, int, str]:
    width = height = None
    colorspace = "420jpeg"
    for tok in header:
        if tok[:1] == "W":
            width = int(tok[1:])
        elif tok[:1] == "H":
            height = int(tok[1:])
        elif tok[:1] == "C":
            colorspace = tok[1:]
    if not width or not height:
        raise FormatError("Y4M header lacks width or height")
    if re.search(r"p(9|1[0-6])", colorspace):
        raise FormatError(f"high bit depth Y4M (C{colorspace}) is not supported")
    return width, height, colorspace


def parse_y4m(data: bytes) -> FrameStream:
    nl = data.find(b"\n")
    if not data.startswith(b"YUV4MPEG2") or nl < 0:
        raise FormatError("not a YUV4MPEG2 stream")
    header = data[:nl].decode("ascii").split()[1:]
    try:
        width, height, colorspace = _y4m_layout(header)
    except ValueError as exc:
        raise FormatError(f"bad Y4M header: {exc}") from exc
    chroma = _chroma_shape(colorspace, width, height)
    shapes = [(height, width)] + ([chroma, chroma] if chroma else [])
    frame_bytes = sum(h * w for h, w in shapes)

    stream = FrameStream(StreamFormat.Y4M, width, height, header=header)
    pos = nl + 1
    while pos < len(data):
        end = data.find(b"\n", pos)
        if end < 0 or not data.startswith(b"FRAME", pos):
            raise FormatError(f"expected FRAME marker at byte {pos}")
        stream.frame_params.append(data[pos + 5:end])
        pos = end + 1
        if pos + frame_bytes > len(data):
            raise FormatError("truncated Y4M frame")
        planes = []
        for h, w in shapes:
            planes.append(np.frombuffer(data, np.uint8, h * w, pos).reshape(h, w).copy())
            pos += h * w
        stream.frames.append(planes)
    return stream


def dump_y4m(stream: FrameStream) -> bytes:
    header = stream.header or [f"W{stream.width}", f"H{stream.height}", "F25:1", "Ip", "A1:1", "C420jpeg"]
    out = [b"YUV4MPEG2 " + " ".join(header).encode("ascii") + b"\n"]
    for i, planes in enumerate(stream.frames):
        params = stream.frame_params[i] if i < len(stream.frame_params) else b""
        out.append(b"FRAME" + params + b"\n")
        out.extend(np.ascontiguousarray(p, dtype=np.uint8).tobytes() for p in planes)
    return b"".join(out)


def y4m_from_luma(frames: list[np.ndarray], fps: str = "25:1") -> FrameStream:
    """Wrap luma planes as a mono Y4M stream."""
    h, w = frames[0].shape
    header = [f"W{w}", f"H{h}", f"F{fps}", "Ip", "A1:1", "Cmono"]
    return FrameStream(StreamFormat.Y4M, w, h, [[f] for f in frames], header,
                       [b""] * len(frames))


# --- PGM -------------------------------------------------------------------

_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def parse_pgm(data: bytes) -> FrameStream:
    """Parse one or more concatenated binary PGM images."""
    pos = 0
    frames = []
    width = height = None
    depth = 8
    while pos < len(data) and data[pos:].strip():
        tokens = []
        for _ in range(4):
            m = _PGM_TOKEN.match(data, pos)
            if not m:
                raise FormatError("truncated PGM header")
            tokens.append(m.group(1))
            pos = m.end()
        if tokens[0] != b"P5":
            raise FormatError(f"unsupported PGM magic {tokens[0]!r}")
        try:
            w, h, maxval = (int(t) for t in tokens[1:])
        except ValueError as exc:
            raise FormatError(f"bad PGM header: {exc}") from exc
        if not 0 < maxval < 65536 or w < 1 or h < 1:
            raise FormatError("bad PGM dimensions or maxval")
        pos += 1  # single whitespace byte before the raster
        if maxval < 256:
            n = w * h
            arr = np.frombuffer(data, np.uint8, n, pos) if pos + n <= len(data) else None
        else:
            n = 2 * w * h
            arr = np.frombuffer(data, ">u2", w * h, pos) if pos + n <= len(data) else None
            depth = 16
        if arr is None:
            raise FormatError("truncated PGM raster")
        if width is not None and (w, h) != (width, height):
            raise FormatError("PGM images in one file differ in size")
        width, height = w, h
        frames.append([arr.reshape(h, w).astype(np.uint8 if maxval < 256 else np.uint16)])
        pos += n
    if not frames:
        raise FormatError("empty PGM file")
    return FrameStream(StreamFormat.PGM, width, height, frames, bit_depth=depth)


def encode_pgm(plane: np.ndarray) -> bytes:
    plane = np.asarray(plane)
    h, w = plane.shape
    if plane.dtype == np.uint16 or plane.max(initial=0) > 255:
        return f"P5\n{w} {h}\n65535\n".encode() + plane.astype(">u2").tobytes()
    return f"P5\n{w} {h}\n255\n".encode() + plane.astype(np.uint8).tobytes()


def dump_pgm(stream: FrameStream) -> bytes:
    return b"".join(encode_pgm(planes[0]) for planes in stream.frames)


def write_pgm(path: str | os.PathLike, plane: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(encode_pgm(plane))


# --- raw planar 4:2:0 ------------------------------------------------------

def parse_raw_yuv420(data: bytes, width: int, height: int) -> FrameStream:
    if width < 1 or height < 1:
        raise FormatError("width and height must be positive")
    cw, ch = (width + 1) // 2, (height + 1) // 2
    shapes = [(height, width), (ch, cw), (ch, cw)]
    frame_bytes = sum(h * w for h, w in shapes)
    if len(data) == 0 or len(data) % frame_bytes:
        raise FormatError(
            f"file size {len(data)} is not a multiple of the {width}x{height} 4:2:0 frame size {frame_bytes}")
    stream = FrameStream(StreamFormat.RAW_YUV420, width, height)
    for start in range(0, len(data), frame_bytes):
        pos = start
        planes = []
        for h, w in shapes:
            planes.append(np.frombuffer(data, np.uint8, h * w, pos).reshape(h, w).copy())
            pos += h * w
        stream.frames.append(planes)
    return stream


def dump_raw_yuv420(stream: FrameStream) -> bytes:
    return b"".join(np.ascontiguousarray(p, dtype=np.uint8).tobytes()
                    for planes in stream.frames for p in planes)
