"""Short-time analysis and the fixed 57-value feature vector.

Per frame (2048 samples, hop 512, Hann window at 22050 Hz) we compute
13 MFCCs, a 12-bin chromagram, zero-crossing rate, spectral centroid and
rolloff; the clip-level vector is the column means followed by the column
population standard deviations of those 28 values, plus one global tempo
estimate:

    [mfcc_mean_0..12 | chroma_mean_0..11 | zcr_mean | centroid_mean |
     rolloff_mean | the same 28 as *_std | tempo_bpm]

Tempo comes from the autocorrelation of a spectral-flux onset envelope,
searched over 40-200 BPM; 0.0 is the sentinel for "no tempo detected".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import CANONICAL_RATE, AudioClip
from .errors import ClipTooShortForFrame

FRAME_LENGTH = 2048
HOP_LENGTH = 512
NUM_MEL_FILTERS = 26
NUM_MFCC = 13
NUM_CHROMA = 12
CHROMA_FMIN = 55.0
CHROMA_FMAX = 8000.0
ROLLOFF_FRACTION = 0.85
LOG_FLOOR = 1e-10
TEMPO_MIN_BPM = 40.0
TEMPO_MAX_BPM = 200.0

FEATURE_COUNT = 2 * (NUM_MFCC + NUM_CHROMA + 3) + 1  # 57

FEATURE_LAYOUT = (
    [f"mfcc_mean_{i}" for i in range(NUM_MFCC)]
    + [f"chroma_mean_{i}" for i in range(NUM_CHROMA)]
    + ["zcr_mean", "centroid_mean", "rolloff_mean"]
    + [f"mfcc_std_{i}" for i in range(NUM_MFCC)]
    + [f"chroma_std_{i}" for i in range(NUM_CHROMA)]
    + ["zcr_std", "centroid_std", "rolloff_std"]
    + ["tempo_bpm"]
)

FEATURE_LAYOUT_ID = "mfcc13-chroma12-zcr-centroid-rolloff/mean+std/tempo:v1"


def hann_window(length: int = FRAME_LENGTH) -> np.ndarray:
    """Periodic Hann window w[n] = 0.5 - 0.5 cos(2 pi n / L).

    The periodic form is bin-aligned: a constant (DC) frame leaks no
    measurable power into the chroma band, so the silent-frame rule sees
    DC content as silence. The symmetric form does not have this property.
    """
    n = np.arange(length)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)


_HANN = hann_window()


def frame_signal(samples: np.ndarray, frame_length: int = FRAME_LENGTH,
                 hop: int = HOP_LENGTH) -> np.ndarray:
    """Slice a signal into overlapping raw frames, one per row.

    Frame count is floor((N - frame_length)/hop) + 1; trailing samples
    that do not fill a frame are dropped.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < frame_length:
        raise ClipTooShortForFrame(
            f"need at least {frame_length} samples, got {samples.size}"
        )
    count = (samples.size - frame_length) // hop + 1
    starts = np.arange(count) * hop
    return samples[starts[:, None] + np.arange(frame_length)]


def frame_and_window(clip: AudioClip) -> np.ndarray:
    """Hann-windowed analysis frames of a clip (rows of length 2048)."""
    return frame_signal(clip.samples) * _HANN


def power_spectrum(frames: np.ndarray) -> np.ndarray:
    """Squared magnitudes of the real-input DFT, bins 0..1024.

    Accepts a single frame or a stack of frames; the bin layout matches
    numpy's rfft of a 2048-point input.
    """
    spectrum = np.fft.rfft(frames, axis=-1)
    return (spectrum.real ** 2 + spectrum.imag ** 2)


def fft_bin_frequencies(frame_length: int = FRAME_LENGTH,
                        sample_rate: int = CANONICAL_RATE) -> np.ndarray:
    return np.arange(frame_length // 2 + 1) * (sample_rate / frame_length)


def zero_crossing_rate(frame: np.ndarray) -> float:
    """Fraction of adjacent sample pairs with a strict sign change.

    Computed on the raw, un-windowed frame. Zero samples take the sign of
    the previous nonzero sample (leading zeros take the first sign that
    follows); an all-zero frame has rate 0.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size < 2:
        raise ValueError("zero_crossing_rate needs at least 2 samples")
    signs = np.sign(frame)
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        return 0.0
    # forward-fill zeros from the previous nonzero sign, backward for leaders
    idx = np.maximum.accumulate(np.where(signs != 0, np.arange(frame.size), -1))
    idx[idx < 0] = nonzero[0]
    filled = signs[idx]
    crossings = int(np.count_nonzero(filled[1:] != filled[:-1]))
    return crossings / (frame.size - 1)


def mel_from_hz(f):
    """HTK mel scale: m = 2595 log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def hz_from_mel(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(num_filters: int = NUM_MEL_FILTERS,
                   frame_length: int = FRAME_LENGTH,
                   sample_rate: int = CANONICAL_RATE) -> np.ndarray:
    """Triangular mel filterbank over [0, sample_rate/2], peaks at 1.

    Returns a (num_filters, frame_length//2 + 1) weight matrix evaluated at
    the FFT bin center frequencies.
    """
    edges_mel = np.linspace(mel_from_hz(0.0), mel_from_hz(sample_rate / 2.0),
                            num_filters + 2)
    edges_hz = hz_from_mel(edges_mel)
    bins_hz = fft_bin_frequencies(frame_length, sample_rate)

    bank = np.zeros((num_filters, bins_hz.size))
    for i in range(num_filters):
        lo, center, hi = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        rising = (bins_hz - lo) / (center - lo)
        falling = (hi - bins_hz) / (hi - center)
        bank[i] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def dct_matrix(size: int = NUM_MEL_FILTERS) -> np.ndarray:
    """Orthonormal DCT-II matrix (D @ D.T = identity)."""
    j = np.arange(size)[:, None]
    i = np.arange(size)[None, :]
    d = np.sqrt(2.0 / size) * np.cos(np.pi * j * (2 * i + 1) / (2.0 * size))
    d[0] /= np.sqrt(2.0)
    return d


_MEL_BANK = mel_filterbank()
_DCT = dct_matrix()


def mfcc(power_spec: np.ndarray, filterbank: np.ndarray | None = None) -> np.ndarray:
    """First 13 coefficients of the orthonormal DCT-II of the log mel energies.

    Log energies are floored at 1e-10, so silence maps to a constant log
    vector whose DCT is zero beyond coefficient 0.
    """
    bank = _MEL_BANK if filterbank is None else filterbank
    energies = power_spec @ bank.T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    return log_energies @ _DCT[:NUM_MFCC].T


_BIN_FREQS = fft_bin_frequencies()
_CHROMA_MASK = (_BIN_FREQS >= CHROMA_FMIN) & (_BIN_FREQS <= CHROMA_FMAX)
# pitch class of each in-range bin: round(69 + 12 log2(f/440)) mod 12, 0 = C
_CHROMA_CLASS = np.mod(
    np.rint(69.0 + 12.0 * np.log2(_BIN_FREQS[_CHROMA_MASK] / 440.0)).astype(int), 12
)


def chromagram(power_spec: np.ndarray) -> np.ndarray:
    """Fold spectral power in [55 Hz, 8 kHz] onto the 12 pitch classes.

    L1-normalized; a frame with total in-range power below 1e-12 returns
    the all-zero vector.
    """
    single = np.ndim(power_spec) == 1
    power_spec = np.atleast_2d(power_spec)
    in_range = power_spec[:, _CHROMA_MASK]
    chroma = np.zeros((power_spec.shape[0], NUM_CHROMA))
    for pitch_class in range(NUM_CHROMA):
        chroma[:, pitch_class] = in_range[:, _CHROMA_CLASS == pitch_class].sum(axis=1)
    totals = chroma.sum(axis=1)
    live = totals >= 1e-12
    chroma[live] /= totals[live, None]
    chroma[~live] = 0.0
    return chroma[0] if single else chroma


def spectral_shape(power_spec: np.ndarray) -> tuple[float, float]:
    """(centroid Hz, rolloff Hz) of one power spectrum.

    Centroid is the power-weighted mean bin frequency; rolloff the lowest
    frequency below which 85% of the total power lies. An all-zero
    spectrum yields (0, 0).
    """
    power_spec = np.asarray(power_spec, dtype=np.float64)
    total = power_spec.sum()
    if total <= 0.0:
        return 0.0, 0.0
    centroid = float((_BIN_FREQS * power_spec).sum() / total)
    cumulative = np.cumsum(power_spec)
    rolloff_bin = int(np.searchsorted(cumulative, ROLLOFF_FRACTION * total))
    return centroid, float(_BIN_FREQS[rolloff_bin])


@dataclass(frozen=True)
class TempoEstimate:
    """Estimated tempo with an octave-ambiguity flag.

    ``octave_ambiguous`` is set when the double-tempo lag scores nearly as
    high as the chosen one; no correction is applied beyond the flag.
    """

    bpm: float
    octave_ambiguous: bool = False


def onset_envelope(clip: AudioClip) -> tuple[np.ndarray, float]:
    """Spectral-flux onset strength per frame and the frame rate (frames/s).

    Half-wave-rectified positive differences of the log mel-filterbank
    energies, summed across filters.
    """
    frames = frame_and_window(clip)
    energies = power_spectrum(frames) @ _MEL_BANK.T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    flux = np.diff(log_energies, axis=0)
    envelope = np.maximum(flux, 0.0).sum(axis=1)
    return envelope, clip.sample_rate / HOP_LENGTH


PEAK_KEEP_FRACTION = 0.75


def estimate_tempo(clip: AudioClip) -> TempoEstimate | None:
    """Tempo in [40, 200] BPM from onset-envelope autocorrelation.

    The envelope is mean-removed and autocorrelated at every lag in the
    BPM search band. A beat period whose lag is not near-integer in frames
    loses correlation mass to quantization while its near-integer
    multiples do not, so the raw argmax lands on subharmonics; the
    estimate is therefore the smallest local-maximum lag scoring at least
    0.75 of the band maximum, refined by parabolic interpolation (integer
    lags alone quantize fast tempos more coarsely than +-3 BPM). Returns
    None when the maximal autocorrelation is non-positive (e.g. silence).
    """
    envelope, frame_rate = onset_envelope(clip)
    # 3-tap binomial smoothing widens 1-frame onset spikes so that beat
    # periods falling between integer lags keep most of their correlation;
    # symmetric, so peak locations are unchanged
    envelope = np.convolve(envelope, [0.25, 0.5, 0.25], mode="same")
    envelope = envelope - envelope.mean()

    lag_min = max(1, int(np.ceil(60.0 * frame_rate / TEMPO_MAX_BPM)))
    lag_max = int(np.floor(60.0 * frame_rate / TEMPO_MIN_BPM))
    lag_max = min(lag_max, envelope.size - 1)
    if lag_max < lag_min:
        return None

    def corr_at(lag: int) -> float:
        if lag <= 0 or lag >= envelope.size:
            return 0.0
        return float(np.dot(envelope[:-lag], envelope[lag:]))

    lags = np.arange(lag_min, lag_max + 1)
    autocorr = np.array([corr_at(int(lag)) for lag in lags])
    r_max = autocorr.max()
    if r_max <= 0.0:
        return None

    def is_local_max(i: int) -> bool:
        left = autocorr[i - 1] if i > 0 else corr_at(int(lags[i]) - 1)
        right = autocorr[i + 1] if i < lags.size - 1 else corr_at(int(lags[i]) + 1)
        return autocorr[i] >= left and autocorr[i] >= right

    candidates = [
        i for i in range(lags.size)
        if autocorr[i] >= PEAK_KEEP_FRACTION * r_max and is_local_max(i)
    ]
    if not candidates:
        candidates = [int(np.argmax(autocorr))]
    best = candidates[0]  # smallest lag = fastest near-maximal tempo

    best_lag = int(lags[best])
    r_mid = autocorr[best]
    r_lo = autocorr[best - 1] if best > 0 else corr_at(best_lag - 1)
    r_hi = autocorr[best + 1] if best < lags.size - 1 else corr_at(best_lag + 1)
    denom = r_lo - 2.0 * r_mid + r_hi
    shift = 0.5 * (r_lo - r_hi) / denom if denom < 0 else 0.0
    refined_lag = best_lag + float(np.clip(shift, -0.5, 0.5))

    bpm = float(np.clip(60.0 * frame_rate / refined_lag, TEMPO_MIN_BPM, TEMPO_MAX_BPM))

    # a competing peak at roughly half or double the chosen lag marks the
    # classic octave ambiguity; it is flagged, never corrected
    ambiguous = False
    for i in candidates:
        if i == best:
            continue
        ratio = lags[i] / refined_lag
        if abs(ratio - 2.0) < 0.15 or abs(ratio - 0.5) < 0.08:
            ambiguous = True
    half_lag = int(round(refined_lag / 2.0))
    if half_lag >= lag_min and corr_at(half_lag) >= 0.8 * r_mid:
        ambiguous = True

    return TempoEstimate(bpm=bpm, octave_ambiguous=ambiguous)


def frame_feature_rows(clip: AudioClip) -> np.ndarray:
    """Per-frame feature rows [13 MFCC | 12 chroma | ZCR | centroid | rolloff].

    ZCR is computed on raw frames, spectral features on Hann-windowed ones.
    """
    raw = frame_signal(clip.samples)
    spectra = power_spectrum(raw * _HANN)

    mfccs = mfcc(spectra)
    chroma = np.atleast_2d(chromagram(spectra))

    count = raw.shape[0]
    rows = np.empty((count, NUM_MFCC + NUM_CHROMA + 3))
    rows[:, :NUM_MFCC] = mfccs
    rows[:, NUM_MFCC : NUM_MFCC + NUM_CHROMA] = chroma
    for i in range(count):
        rows[i, NUM_MFCC + NUM_CHROMA] = zero_crossing_rate(raw[i])
        centroid, rolloff = spectral_shape(spectra[i])
        rows[i, NUM_MFCC + NUM_CHROMA + 1] = centroid
        rows[i, NUM_MFCC + NUM_CHROMA + 2] = rolloff
    return rows


def extract_features(clip: AudioClip) -> np.ndarray:
    """The 57-value clip descriptor: column means, population stds, tempo.

    Pure and deterministic; NoTempo encodes as 0.0 in the last slot.
    """
    rows = frame_feature_rows(clip)
    means = rows.mean(axis=0)
    stds = rows.std(axis=0)  # population (denominator n)
    tempo = estimate_tempo(clip)
    tempo_bpm = 0.0 if tempo is None else tempo.bpm
    vector = np.concatenate([means, stds, [tempo_bpm]])
    assert vector.size == FEATURE_COUNT
    return vector


def features_to_csv_row(vector: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in vector)


def features_csv_header() -> str:
    return ",".join(FEATURE_LAYOUT)
