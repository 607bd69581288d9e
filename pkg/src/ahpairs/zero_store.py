"""Zero ordinate tables: the ZeroSet container, text and binary formats, caching.

Text format: one decimal ordinate per line, ascending, ``#`` starts a
comment.  Comments of the form ``# key: value`` carry optional metadata
(``source``, ``t_max``, ``tol``, ``rescaled``).  Ordinates are written
with 9 decimal places.

Binary cache format (all little-endian)::

    offset  size  field
    0       4     magic  b"AHZ0"
    4       4     uint32 version (= 1)
    8       8     uint64 count
    16      8*n   float64 ordinates, ascending
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO, Union

import numpy as np

from . import zero_engine
from .errors import MonotonicityError, ParseError, RangeBeyondCertified

SOURCES = ("computed", "ingested", "synthetic")
DEFAULT_TOL = 1e-8
CACHE_ENV = "AHPAIRS_CACHE_DIR"

MAGIC = b"AHZ0"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def _cluster_snap(values: np.ndarray, tol: float) -> np.ndarray:
    """Replace every run of ordinates closer than ``tol`` by its first member."""
    if values.size < 2:
        return values
    new_cluster = np.concatenate(([True], np.diff(values) > tol))
    starts = np.flatnonzero(new_cluster)
    owner = np.cumsum(new_cluster) - 1
    return values[starts][owner]


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Immutable, sorted multiset of ordinates.

    ``t_max`` is the height below which the set is complete.  ``rescaled``
    marks synthetic sets that already live in unit-mean-spacing
    coordinates; pair statistics then use L = 1.
    """

    ordinates: np.ndarray
    source: str = "computed"
    tol: float = DEFAULT_TOL
    t_max: float = 0.0
    certified: bool = True
    rescaled: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        arr = np.array(self.ordinates, dtype=float).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("ordinates must be finite")
        if arr.size > 1 and np.any(np.diff(arr) < 0):
            raise ValueError("ordinates must be ascending")
        if self.source != "synthetic" and arr.size and arr[0] <= 14.0:
            raise ValueError("zeta ordinates must exceed 14")
        arr = _cluster_snap(arr, self.tol)
        arr.setflags(write=False)
        object.__setattr__(self, "ordinates", arr)
        t_max = float(self.t_max)
        if arr.size and t_max < arr[-1]:
            t_max = float(arr[-1])
        object.__setattr__(self, "t_max", t_max)

    def __len__(self) -> int:
        return int(self.ordinates.size)

    def __eq__(self, other):
        if not isinstance(other, ZeroSet):
            return NotImplemented
        return (
            np.array_equal(self.ordinates, other.ordinates)
            and self.source == other.source
            and self.tol == other.tol
            and self.t_max == other.t_max
            and self.rescaled == other.rescaled
        )

    __hash__ = None

    def check_height(self, T: float) -> None:
        if T > self.t_max:
            raise RangeBeyondCertified(T, self.t_max)

    def below(self, T: float) -> np.ndarray:
        """Ordinates with gamma <= T (checked against t_max)."""
        self.check_height(T)
        return self.ordinates[: np.searchsorted(self.ordinates, T, side="right")]

    def certify(self) -> "ZeroSet":
        return replace(self, certified=True)


def query_range(zs: ZeroSet, a: float, b: float) -> np.ndarray:
    """Ordinates with a < gamma <= b."""
    if not a < b:
        raise ValueError("need a < b")
    zs.check_height(b)
    o = zs.ordinates
    return o[np.searchsorted(o, a, side="right") : np.searchsorted(o, b, side="right")]


# -- text format -------------------------------------------------------------

def _lines(stream) -> Iterable[str]:
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    if isinstance(stream, io.TextIOBase):
        return stream
    # binary file-like
    return io.TextIOWrapper(stream, encoding="utf-8")


def ingest_table(
    stream: Union[bytes, str, TextIO, BinaryIO],
    format: str = "plain-text",
    trusted: bool = False,
    tol: float = DEFAULT_TOL,
) -> ZeroSet:
    """Parse a plain-text ordinate table.

    Raises ParseError or MonotonicityError naming the 1-based line number.
    The result is certified only if ``trusted`` is set; otherwise run
    :func:`verify_against_engine` first.
    """
    if format != "plain-text":
        raise ValueError(f"unsupported format {format!r}")
    values: list[float] = []
    meta: dict[str, str] = {}
    prev = None
    for lineno, raw in enumerate(_lines(stream), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, val = body.partition(":")
                meta[key.strip()] = val.strip()
            continue
        try:
            v = float(line)
        except ValueError:
            raise ParseError(lineno, line) from None
        if v != v or v in (float("inf"), float("-inf")):
            raise ParseError(lineno, line)
        if prev is not None and v < prev:
            raise MonotonicityError(lineno, v, prev)
        prev = v
        values.append(v)
    source = "synthetic" if meta.get("source") == "synthetic" else "ingested"
    t_max = float(meta["t_max"]) if "t_max" in meta else (values[-1] if values else 0.0)
    return ZeroSet(
        np.asarray(values, dtype=float),
        source=source,
        tol=float(meta.get("tol", tol)),
        t_max=t_max,
        certified=trusted,
        rescaled=meta.get("rescaled", "false").lower() == "true",
        meta={k: v for k, v in meta.items() if k not in ("t_max", "tol", "rescaled")},
    )


def serialize_table(zs: ZeroSet, header: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write(f"# source: {zs.source}\n")
    out.write(f"# t_max: {zs.t_max:.9f}\n")
    out.write(f"# tol: {zs.tol!r}\n")
    out.write(f"# rescaled: {'true' if zs.rescaled else 'false'}\n")
    out.write(f"# count: {len(zs)}\n")
    for v in zs.ordinates:
        out.write(f"{v:.9f}\n")
    return out.getvalue()


def write_table(zs: ZeroSet, path, header: Iterable[str] = ()) -> None:
    Path(path).write_text(serialize_table(zs, header), encoding="utf-8")


def read_table(path, trusted: bool = False, tol: float = DEFAULT_TOL) -> ZeroSet:
    with open(path, "rb") as fh:
        return ingest_table(fh.read(), trusted=trusted, tol=tol)


# -- binary cache --------------------------------------------------------------

def encode_binary(ordinates: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(ordinates, dtype="<f8")
    return _HEADER.pack(MAGIC, VERSION, arr.size) + arr.tobytes()


def decode_binary(blob: bytes) -> np.ndarray:
    if len(blob) < _HEADER.size:
        raise ValueError("binary table shorter than its header")
    magic, version, count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported binary table version {version}")
    if len(blob) != _HEADER.size + 8 * count:
        raise ValueError("binary table length does not match its count")
    return np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).astype(float)


def cache_dir(override=None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ahpairs"


def _cache_name(t_max: float) -> str:
    return f"zeros_{float(t_max).hex()}.bin"


def computed_zeros(t_max: float, cache: Union[str, Path, None, bool] = None) -> ZeroSet:
    """Engine zeros in (10, t_max], reloaded from the binary cache if present.

    ``cache=False`` disables the cache; ``None`` uses $AHPAIRS_CACHE_DIR or
    ``~/.cache/ahpairs``.
    """
    path = None
    if cache is not False:
        path = cache_dir(cache) / _cache_name(t_max)
        if path.exists():
            return ZeroSet(decode_binary(path.read_bytes()), "computed", t_max=t_max)
    gamma = zero_engine.zero_ordinates(zero_engine.T_MIN, t_max)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(encode_binary(gamma))
        tmp.replace(path)
    return ZeroSet(gamma, "computed", t_max=t_max)


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class Mismatch:
    index: int
    value: float
    nearest: float

    @property
    def distance(self) -> float:
        return abs(self.value - self.nearest)


@dataclass
class VerificationReport:
    t_max: float
    tol: float
    table_count: int
    engine_count: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.table_count == self.engine_count

    def __len__(self) -> int:
        return len(self.mismatches)


def verify_against_engine(zs: ZeroSet, tol: float = 1e-6) -> VerificationReport:
    """Compare every table ordinate with the nearest engine zero below t_max."""
    if len(zs) == 0:
        return VerificationReport(zs.t_max, tol, 0, 0)
    lo = zero_engine.T_MIN
    engine = zero_engine.zero_ordinates(lo, zs.t_max, tol=1e-9)
    table = zs.ordinates
    pos = np.clip(np.searchsorted(engine, table), 1, max(engine.size - 1, 1))
    if engine.size == 0:
        nearest = np.full_like(table, np.nan)
    elif engine.size == 1:
        nearest = np.full_like(table, engine[0])
    else:
        left, right = engine[pos - 1], engine[pos]
        nearest = np.where(np.abs(table - left) <= np.abs(table - right), left, right)
    bad = ~(np.abs(table - nearest) <= tol)
    mism = [Mismatch(int(i), float(table[i]), float(nearest[i])) for i in np.flatnonzero(bad)]
    return VerificationReport(zs.t_max, tol, int(table.size), int(engine.size), mism)
