"""Nonlinear complexity measures of scalar time series.

Two estimators drive the whole pipeline: the Higuchi fractal dimension
(curve-length scaling in the time domain, values in [1, 2]) and sample
entropy (negative log conditional probability that templates matching for
m points still match at m+1, Chebyshev distance, self-matches excluded).
Per-channel values are assembled into named per-subject feature vectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (ConstantSeries, DegenerateScale, FeatureExtractionError,
                     NoTemplateMatches)
from .signal_io import EpochSet

HFD_NAME_PREFIX = "HFD"
SAMPEN_NAME_PREFIX = "SampEn"


@dataclass(frozen=True)
class HfdParams:
    """Scale bound for the Higuchi curve-length fit (2 <= k_max < N)."""

    k_max: int = 8

    def __post_init__(self):
        if self.k_max < 2:
            raise ValueError(f"k_max must be >= 2, got {self.k_max}")


@dataclass(frozen=True)
class SampEnParams:
    """Embedding length m, tolerance r = r_factor * SD(x).

    sd_mode selects the standard-deviation convention used for the
    tolerance: "population" divides by N (the common sample-entropy
    convention and our default), "sample" divides by N - 1.
    """

    m: int = 2
    r_factor: float = 0.15
    sd_mode: str = "population"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not self.r_factor > 0:
            raise ValueError(f"r_factor must be > 0, got {self.r_factor}")
        if self.sd_mode not in ("population", "sample"):
            raise ValueError(f"unknown sd_mode {self.sd_mode!r}")


@dataclass
class FeatureVector:
    """Named features for one subject (or one epoch in per-epoch mode)."""

    subject_id: str
    values: dict[str, float]
    epoch: int | None = None


def curve_length(x: np.ndarray, k: int, m_start: int) -> float:
    """Normalized curve length L_m(k) of the subsampled series.

    Walks the series from 1-based start offset m_start with stride k and
    sums absolute increments; the result is rescaled by (N-1)/(n_seg*k)
    for the unused tail and by 1/k for the stride, per Higuchi's
    construction.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not (1 <= m_start <= k < n):
        raise ValueError(
            f"need 1 <= m_start <= k < N, got m_start={m_start} k={k} N={n}")
    n_seg = (n - m_start) // k
    if n_seg < 1:
        raise DegenerateScale(
            f"no complete segment for k={k}, m_start={m_start}, N={n}")
    idx = (m_start - 1) + k * np.arange(n_seg + 1)
    total = float(np.sum(np.abs(np.diff(x[idx]))))
    return total * (n - 1) / (n_seg * k) / k


def higuchi_fd(x: np.ndarray, params: HfdParams = HfdParams()) -> float:
    """Higuchi fractal dimension via the log-log curve-length slope.

    L(k) is the mean of curve_length over start offsets 1..k; the
    dimension is the OLS slope of ln L(k) against ln(1/k) for
    k = 1..k_max. Results are not clamped to [1, 2]: a value outside the
    interval signals a numerical or sampling pathology and is returned
    as-is with a RuntimeWarning.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < params.k_max + 1:
        raise ValueError(f"series length {n} < k_max + 1 = {params.k_max + 1}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite samples")
    if np.all(x == x[0]):
        raise ConstantSeries("constant series has zero curve length everywhere")

    ks = np.arange(1, params.k_max + 1)
    mean_lengths = np.empty(ks.shape[0])
    for i, k in enumerate(ks):
        mean_lengths[i] = np.mean(
            [curve_length(x, int(k), m) for m in range(1, int(k) + 1)])
    if np.any(mean_lengths <= 0.0):
        bad = int(ks[np.argmax(mean_lengths <= 0.0)])
        raise DegenerateScale(f"curve length vanished at scale k={bad}")

    slope = np.polyfit(np.log(1.0 / ks), np.log(mean_lengths), 1)[0]
    fd = float(slope)
    if not (1.0 <= fd <= 2.0):
        warnings.warn(f"Higuchi dimension {fd:.6f} outside [1, 2]",
                      RuntimeWarning, stacklevel=2)
    return fd


def _series_sd(x: np.ndarray, sd_mode: str) -> float:
    ddof = 0 if sd_mode == "population" else 1
    return float(np.std(x, ddof=ddof))


def sample_entropy_counts(x: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """Ordered template-match counts (A, B) at lengths m+1 and m.

    Both counts range over the same template start indices 1..N-m so the
    ratio A/B is a conditional probability. Matching uses Chebyshev
    distance <= r, self-matches excluded; counts are of ordered pairs.
    KD-tree pair counting gives the same integers as the brute-force
    double loop -- the distances compared are identical floats.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    n_templates = n - m
    if n_templates < 2:
        raise ValueError(f"need N >= m + 2, got N={n}, m={m}")
    emb_m = np.lib.stride_tricks.sliding_window_view(x, m)[:n_templates]
    emb_m1 = np.lib.stride_tricks.sliding_window_view(x, m + 1)

    tree_m = cKDTree(emb_m)
    b = int(tree_m.count_neighbors(tree_m, r, p=np.inf)) - n_templates
    tree_m1 = cKDTree(emb_m1)
    a = int(tree_m1.count_neighbors(tree_m1, r, p=np.inf)) - n_templates
    return a, b


def sample_entropy(x: np.ndarray, params: SampEnParams = SampEnParams()) -> float:
    """Sample entropy -ln(A/B) with tolerance r = r_factor * SD(x)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < params.m + 2:
        raise ValueError(f"series length {n} < m + 2 = {params.m + 2}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite samples")
    r = params.r_factor * _series_sd(x, params.sd_mode)
    a, b = sample_entropy_counts(x, params.m, r)
    if b == 0 or a == 0:
        raise NoTemplateMatches(
            f"undefined sample entropy: A={a}, B={b} (no template matches)",
            a_count=a, b_count=b)
    return float(-np.log(a / b)) + 0.0  # +0.0 normalizes -0.0 when A == B


def feature_names(channels: list[str] | tuple[str, ...]) -> list[str]:
    """Feature-name order: all HFD columns first, then all SampEn columns."""
    names = [f"{HFD_NAME_PREFIX}:{ch}" for ch in channels]
    names += [f"{SAMPEN_NAME_PREFIX}:{ch}" for ch in channels]
    return names


def extract_features(epochs: EpochSet,
                     hfd: HfdParams = HfdParams(),
                     sampen: SampEnParams = SampEnParams(),
                     epoch_merge: str = "mean") -> list[FeatureVector]:
    """Compute HFD and SampEn per (subject, channel, epoch) and merge.

    epoch_merge "mean" (default) and "median" collapse a subject's epochs
    into one vector; "per-epoch" returns one vector per epoch with the
    epoch index attached. Feature errors are re-raised annotated with
    their (subject, channel, epoch) coordinates.
    """
    if epoch_merge not in ("mean", "median", "per-epoch"):
        raise ValueError(f"unknown epoch_merge {epoch_merge!r}")
    channels = list(epochs.channels)
    names = feature_names(channels)

    out: list[FeatureVector] = []
    for subject_id in epochs.subject_ids():
        per_epoch = np.empty((epochs.epochs_per_subject, len(names)))
        for ci, ch in enumerate(channels):
            for ei, ep in enumerate(epochs.epochs_for(subject_id, ch)):
                try:
                    per_epoch[ei, ci] = higuchi_fd(ep.samples, hfd)
                    per_epoch[ei, len(channels) + ci] = sample_entropy(
                        ep.samples, sampen)
                except Exception as exc:  # annotate with coordinates
                    raise FeatureExtractionError(subject_id, ch, ei, exc) from exc
        if epoch_merge == "per-epoch":
            for ei in range(per_epoch.shape[0]):
                out.append(FeatureVector(
                    subject_id, dict(zip(names, per_epoch[ei])), epoch=ei))
        else:
            merged = (np.mean(per_epoch, axis=0) if epoch_merge == "mean"
                      else np.median(per_epoch, axis=0))
            out.append(FeatureVector(subject_id, dict(zip(names, merged))))
    return out
