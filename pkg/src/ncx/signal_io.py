"""Recording containers, file formats, and epoch extraction.

Recordings are immutable multi-channel sample matrices with a sampling
rate. Two on-disk formats are supported: a CSV layout (header = channel
labels, one row per time sample, optional "# fs=<Hz>" comment line) and a
compact raw-binary layout with an "NCX1" magic. Values are written with
17 significant digits so CSV round-trips are exact for float64.

No filtering, re-referencing, or resampling happens here: acquisition
bandpass is a hardware property recorded as metadata only, and epochs are
verbatim slices of the recording.
"""

from __future__ import annotations

import csv
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (CountMismatch, MalformedFile, NonFiniteSample,
                     OffsetOutOfRange, UnknownChannelLabel)

#: The 19-electrode referential montage this pipeline was designed around.
MONTAGE_19 = ("Fp1", "Fp2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2",
              "F7", "F8", "T3", "T4", "T5", "T6", "Fz", "Cz", "Pz")

_RAW_MAGIC = b"NCX1"


@dataclass(frozen=True)
class Recording:
    """One subject's multi-channel recording (channels x samples)."""

    subject_id: str
    fs: float
    channels: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise MalformedFile(
                f"data must be 2-D (channels x samples), got shape {data.shape}")
        if data.shape[1] < 1:
            raise MalformedFile("recording must contain at least one sample")
        if data.shape[0] != len(self.channels):
            raise MalformedFile(
                f"{data.shape[0]} data rows for {len(self.channels)} channel labels")
        if len(set(self.channels)) != len(self.channels):
            raise MalformedFile("channel labels must be unique")
        if not self.fs > 0:
            raise MalformedFile(f"sampling rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise NonFiniteSample(
                f"non-finite sample at channel {self.channels[bad[0]]!r}, "
                f"index {bad[1]}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def channel_data(self, label: str) -> np.ndarray:
        return self.data[self.channels.index(label)]


def validate_montage(rec: Recording) -> None:
    """Require the exact 19-electrode label set (any order)."""
    expected = set(MONTAGE_19)
    got = set(rec.channels)
    if got != expected:
        extra = sorted(got - expected)
        missing = sorted(expected - got)
        raise UnknownChannelLabel(
            f"montage mismatch: unexpected {extra}, missing {missing}")


@dataclass(frozen=True)
class Epoch:
    """A fixed-length slice of one channel."""

    subject_id: str
    channel: str
    samples: np.ndarray
    fs: float


@dataclass
class EpochSet:
    """Per-subject, per-channel epochs with a uniform epoch count."""

    epochs_per_subject: int
    channels: tuple[str, ...]
    _store: dict[str, dict[str, list[Epoch]]] = field(default_factory=dict)

    def add_subject(self, subject_id: str,
                    by_channel: dict[str, list[Epoch]]) -> None:
        if tuple(by_channel.keys()) != self.channels:
            raise ValueError("channel set mismatch when adding subject")
        for ch, eps in by_channel.items():
            if len(eps) != self.epochs_per_subject:
                raise ValueError(
                    f"subject {subject_id!r} channel {ch!r} has {len(eps)} "
                    f"epochs, expected {self.epochs_per_subject}")
        if subject_id in self._store:
            raise ValueError(f"duplicate subject {subject_id!r}")
        self._store[subject_id] = by_channel

    def subject_ids(self) -> list[str]:
        return list(self._store.keys())

    def epochs_for(self, subject_id: str, channel: str) -> list[Epoch]:
        return self._store[subject_id][channel]

    @property
    def n_channel_epochs(self) -> int:
        """Total channel-epochs: subjects * channels * epochs_per_subject."""
        return (len(self._store) * len(self.channels)
                * self.epochs_per_subject)

    @staticmethod
    def merge(sets: list["EpochSet"]) -> "EpochSet":
        """Union of single-subject sets sharing channels and epoch count."""
        if not sets:
            raise ValueError("nothing to merge")
        first = sets[0]
        merged = EpochSet(first.epochs_per_subject, first.channels)
        for es in sets:
            if es.channels != first.channels:
                raise ValueError("cannot merge epoch sets with different channels")
            if es.epochs_per_subject != first.epochs_per_subject:
                raise ValueError("cannot merge epoch sets with different epoch counts")
            for sid in es.subject_ids():
                merged.add_subject(sid, es._store[sid])
        return merged


def extract_epochs(rec: Recording, epoch_seconds: float, count: int,
                   offsets: list[int]) -> EpochSet:
    """Cut `count` epochs of round(epoch_seconds * fs) samples per channel.

    Offsets are sample indices into the recording; they may overlap (a
    warning is emitted) but must not run past the end. Epochs are copied
    verbatim; no filtering or detrending is applied.
    """
    length = int(round(epoch_seconds * rec.fs))
    if length < 1:
        raise ValueError(f"epoch of {epoch_seconds} s at fs={rec.fs} is empty")
    if len(offsets) < count:
        raise CountMismatch(f"{len(offsets)} offsets for {count} epochs")
    offsets = [int(o) for o in offsets[:count]]
    for o in offsets:
        if o < 0 or o + length > rec.n_samples:
            raise OffsetOutOfRange(
                f"offset {o} + epoch length {length} exceeds recording "
                f"length {rec.n_samples}")
    in_order = sorted(offsets)
    if any(a + length > b for a, b in zip(in_order, in_order[1:])):
        warnings.warn("epoch offsets overlap", stacklevel=2)

    out = EpochSet(epochs_per_subject=count, channels=rec.channels)
    by_channel: dict[str, list[Epoch]] = {}
    for ci, ch in enumerate(rec.channels):
        by_channel[ch] = [
            Epoch(rec.subject_id, ch, rec.data[ci, o:o + length].copy(), rec.fs)
            for o in offsets]
    out.add_subject(rec.subject_id, by_channel)
    return out


def evenly_spaced_offsets(n_samples: int, epoch_length: int, count: int) -> list[int]:
    """Default epoch placement: first at 0, last ending at the final sample."""
    if count * epoch_length > n_samples:
        raise OffsetOutOfRange(
            f"{count} epochs of {epoch_length} samples do not fit in "
            f"{n_samples} samples")
    if count == 1:
        return [0]
    stride = (n_samples - epoch_length) // (count - 1)
    return [i * stride for i in range(count)]


# --- CSV format ---------------------------------------------------------


def write_recording_csv(rec: Recording, path: str | Path) -> None:
    """Header = channel labels, one row per time sample, 17 sig. digits."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# fs={rec.fs:.17g}\n")
        writer = csv.writer(fh)
        writer.writerow(rec.channels)
        for t in range(rec.n_samples):
            writer.writerow([f"{v:.17g}" for v in rec.data[:, t]])


def load_recording_csv(path: str | Path, fs: float | None = None,
                       subject_id: str | None = None,
                       strict_montage: bool = False) -> Recording:
    path = Path(path)
    if not path.exists():
        raise MalformedFile(f"no such file: {path}")
    file_fs: float | None = None
    header: list[str] | None = None
    rows: list[list[float]] = []
    with path.open("r", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                meta = line.lstrip("#").strip()
                if meta.startswith("fs="):
                    try:
                        file_fs = float(meta[3:])
                    except ValueError as exc:
                        raise MalformedFile(
                            f"{path}:{lineno}: bad fs metadata {meta!r}") from exc
                continue
            cells = line.split(",")
            if header is None:
                header = [c.strip() for c in cells]
                continue
            if len(cells) != len(header):
                raise MalformedFile(
                    f"{path}:{lineno}: row has {len(cells)} cells, "
                    f"header has {len(header)}")
            try:
                values = [float(c) for c in cells]
            except ValueError as exc:
                raise MalformedFile(f"{path}:{lineno}: non-numeric cell") from exc
            for c, v in zip(header, values):
                if not np.isfinite(v):
                    raise NonFiniteSample(
                        f"{path}:{lineno}: non-finite sample in channel {c!r}")
            rows.append(values)
    if header is None or not rows:
        raise MalformedFile(f"{path}: no header or no data rows")
    effective_fs = file_fs if file_fs is not None else fs
    if effective_fs is None:
        raise MalformedFile(
            f"{path}: no '# fs=' metadata line; pass the sampling rate explicitly")
    rec = Recording(subject_id=subject_id or path.stem,
                    fs=effective_fs,
                    channels=tuple(header),
                    data=np.array(rows, dtype=float).T)
    if strict_montage:
        validate_montage(rec)
    return rec


# --- raw-binary format --------------------------------------------------


def write_recording_raw(rec: Recording, path: str | Path) -> None:
    """Magic NCX1, LE u32 channel/sample counts, f64 fs, labels, samples."""
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_RAW_MAGIC)
        fh.write(struct.pack("<II", len(rec.channels), rec.n_samples))
        fh.write(struct.pack("<d", rec.fs))
        for ch in rec.channels:
            raw = ch.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        fh.write(np.ascontiguousarray(rec.data, dtype="<f8").tobytes())


def load_recording_raw(path: str | Path, subject_id: str | None = None,
                       strict_montage: bool = False) -> Recording:
    path = Path(path)
    if not path.exists():
        raise MalformedFile(f"no such file: {path}")
    blob = path.read_bytes()
    if blob[:4] != _RAW_MAGIC:
        raise MalformedFile(f"{path}: bad magic {blob[:4]!r}")
    try:
        n_channels, n_samples = struct.unpack_from("<II", blob, 4)
        (fs,) = struct.unpack_from("<d", blob, 12)
        pos = 20
        channels = []
        for _ in range(n_channels):
            (ln,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            channels.append(blob[pos:pos + ln].decode("utf-8"))
            pos += ln
        need = n_channels * n_samples * 8
        payload = blob[pos:pos + need]
        if len(payload) != need:
            raise MalformedFile(
                f"{path}: truncated sample block ({len(payload)} of {need} bytes)")
        data = np.frombuffer(payload, dtype="<f8").reshape(n_channels, n_samples)
    except struct.error as exc:
        raise MalformedFile(f"{path}: truncated header") from exc
    rec = Recording(subject_id=subject_id or path.stem, fs=fs,
                    channels=tuple(channels), data=data.copy())
    if strict_montage:
        validate_montage(rec)
    return rec


def load_recording(path: str | Path, format: str, fs: float | None = None,
                   subject_id: str | None = None,
                   strict_montage: bool = False) -> Recording:
    """Dispatch on format name: "csv" or "raw-binary"."""
    if format == "csv":
        return load_recording_csv(path, fs=fs, subject_id=subject_id,
                                  strict_montage=strict_montage)
    if format == "raw-binary":
        return load_recording_raw(path, subject_id=subject_id,
                                  strict_montage=strict_montage)
    raise ValueError(f"unknown recording format {format!r}")


def write_recording(rec: Recording, path: str | Path, format: str) -> None:
    if format == "csv":
        write_recording_csv(rec, path)
    elif format == "raw-binary":
        write_recording_raw(rec, path)
    else:
        raise ValueError(f"unknown recording format {format!r}")
