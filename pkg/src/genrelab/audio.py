"""Audio ingest: WAV decoding, normalization, and deterministic synthesis.

Every downstream stage works on :class:`AudioClip`: mono PCM, amplitudes in
[-1, 1], known sample rate. The canonical working format is 22050 Hz mono
with at most 30 s of material (center-truncated) and at least 3 s.

The mandatory input container is RIFF/WAVE with 16-bit signed PCM, 1 or 2
channels. Other codecs can be plugged in through ``register_decoder``
without touching the analysis code.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyAudio, MalformedContainer, TooShort, UnsupportedEncoding

CANONICAL_RATE = 22050
ANALYSIS_DURATION_S = 30.0
MIN_DURATION_S = 3.0

_INT16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    """Decoded mono audio: samples in [-1, 1] at a positive sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("AudioClip requires a non-empty 1-D sample array")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioClip samples must be finite")
        if samples.size and (samples.min() < -1.0 or samples.max() > 1.0):
            raise ValueError("AudioClip samples must lie in [-1.0, 1.0]")
        if int(self.sample_rate) <= 0:
            raise ValueError("AudioClip sample_rate must be positive")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


def decode_wav(raw: bytes) -> AudioClip:
    """Decode a RIFF/WAVE byte string holding 16-bit signed PCM.

    Stereo is mean-mixed to mono; integer samples are scaled by 1/32768.

    Raises MalformedContainer on truncated or invalid structure,
    UnsupportedEncoding for anything but 16-bit integer PCM in 1 or 2
    channels, and EmptyAudio when the data chunk holds zero frames.
    """
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedContainer("not a RIFF/WAVE container")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedContainer("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise MalformedContainer(
                    f"data chunk declares {chunk_size} bytes but only "
                    f"{len(body)} are present"
                )
            data = body
        # chunks are word-aligned: odd sizes carry a pad byte
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or data is None:
        raise MalformedContainer("missing fmt or data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1 or bits != 16:
        raise UnsupportedEncoding(
            f"only 16-bit PCM is supported (got format {audio_format}, {bits} bits)"
        )
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"only mono or stereo supported (got {channels} channels)")
    if sample_rate <= 0:
        raise MalformedContainer("sample rate must be positive")

    frame_bytes = 2 * channels
    if len(data) % frame_bytes:
        data = data[: len(data) - len(data) % frame_bytes]
    if not data:
        raise EmptyAudio("data chunk holds zero frames")

    ints = np.frombuffer(data, dtype="<i2").astype(np.float64)
    if channels == 2:
        ints = ints.reshape(-1, 2).mean(axis=1)
    return AudioClip(samples=ints / _INT16_SCALE, sample_rate=sample_rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Encode a clip as mono 16-bit PCM WAV.

    Quantization is round(x * 32768) clipped to the int16 range, so a
    decode of the result reproduces every sample within 1/32768.
    """
    ints = np.clip(np.rint(clip.samples * _INT16_SCALE), -32768, 32767).astype("<i2")
    data = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(data),
    )
    return header + data


# Pluggable decoders keyed by lowercase extension; WAV ships built in,
# compressed codecs (mp3, ...) can be registered by downstream code.
_DECODERS: dict[str, Callable[[bytes], AudioClip]] = {"wav": decode_wav}


def register_decoder(extension: str, decoder: Callable[[bytes], AudioClip]) -> None:
    _DECODERS[extension.lower().lstrip(".")] = decoder


def decode_auto(raw: bytes, filename: str = "") -> AudioClip:
    """Decode using the decoder registered for the filename's extension.

    Falls back to WAV when the extension is unknown or missing.
    """
    ext = filename.rsplit(".", 1)[-1].lower() if "." in filename else "wav"
    return _DECODERS.get(ext, decode_wav)(raw)


def normalize_clip(
    clip: AudioClip,
    target_rate: int = CANONICAL_RATE,
    duration_s: float = ANALYSIS_DURATION_S,
) -> AudioClip:
    """Resample to ``target_rate`` and bound duration to ``duration_s``.

    Clips longer than the bound are center-truncated (song intros are
    unrepresentative); clips between 3 s and the bound are kept whole.
    Resampling is linear interpolation, which keeps results reproducible
    bit-for-bit across platforms.

    Raises TooShort for inputs under 3 s.
    """
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    if clip.duration_s < MIN_DURATION_S:
        raise TooShort(
            f"clip is {clip.duration_s:.2f} s; at least {MIN_DURATION_S:.0f} s required"
        )

    samples = clip.samples
    if clip.sample_rate != target_rate:
        n_out = int(round(samples.size * target_rate / clip.sample_rate))
        t_out = np.arange(n_out) / target_rate
        t_in = np.arange(samples.size) / clip.sample_rate
        samples = np.interp(t_out, t_in, samples)

    n_target = int(round(duration_s * target_rate))
    if samples.size > n_target:
        offset = (samples.size - n_target) // 2
        samples = samples[offset : offset + n_target]
    return AudioClip(samples=samples, sample_rate=target_rate)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a deterministic synthetic clip.

    ``harmonic_profile`` lists (frequency Hz, relative amplitude) pairs;
    the sinusoid sum is amplitude-pulsed at ``tempo_bpm`` with a click-like
    exponential envelope. ``pulse_depth`` 0 disables pulsing (pure tone),
    1 is a full click train.
    """

    genre: int
    tempo_bpm: float
    harmonic_profile: Sequence[tuple[float, float]]
    noise_level: float
    duration_s: float
    pulse_depth: float = 1.0
    pulse_decay_s: float = 0.05

    def __post_init__(self):
        if not 40.0 <= self.tempo_bpm <= 200.0:
            raise ValueError("tempo_bpm must lie in [40, 200]")
        if not 0.0 <= self.noise_level <= 1.0:
            raise ValueError("noise_level must lie in [0, 1]")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if not 0.0 <= self.pulse_depth <= 1.0:
            raise ValueError("pulse_depth must lie in [0, 1]")
        if not self.harmonic_profile:
            raise ValueError("harmonic_profile must be non-empty")
        amps = [a for _, a in self.harmonic_profile]
        if any(a < 0 for a in amps) or not any(a > 0 for a in amps):
            raise ValueError("relative amplitudes must be non-negative with one positive")
        for freq, _ in self.harmonic_profile:
            if not 20.0 < freq < CANONICAL_RATE / 2:
                raise ValueError(f"frequency {freq} Hz outside (20, {CANONICAL_RATE / 2})")


def synthesize(spec: SynthSpec, seed: int, sample_rate: int = CANONICAL_RATE) -> AudioClip:
    """Render a SynthSpec to audio, bit-identical for a given (spec, seed).

    Output = sum of the profile sinusoids, pulsed at the requested tempo,
    plus uniform noise scaled by noise_level; peak-normalized to 0.9.
    """
    n = int(round(spec.duration_s * sample_rate))
    t = np.arange(n) / sample_rate

    tone = np.zeros(n)
    for freq, amp in spec.harmonic_profile:
        if amp > 0:
            tone += amp * np.sin(2.0 * np.pi * freq * t)

    if spec.pulse_depth > 0:
        beat_period = 60.0 / spec.tempo_bpm
        phase = np.mod(t, beat_period)
        pulse = np.exp(-phase / spec.pulse_decay_s)
        envelope = (1.0 - spec.pulse_depth) + spec.pulse_depth * pulse
    else:
        envelope = np.ones(n)

    rng = np.random.default_rng(seed)
    signal = tone * envelope + spec.noise_level * rng.uniform(-1.0, 1.0, n)

    peak = np.max(np.abs(signal))
    if peak > 0:
        signal = signal * (0.9 / peak)
    return AudioClip(samples=signal, sample_rate=sample_rate)
