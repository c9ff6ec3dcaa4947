import numpy as np
import pytest

from genrelab.audio import AudioClip, SynthSpec, synthesize
from genrelab.models import train_all


def make_tone(freq_hz: float, duration_s: float = 4.0, sample_rate: int = 22050,
              amplitude: float = 0.8) -> AudioClip:
    t = np.arange(int(duration_s * sample_rate)) / sample_rate
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq_hz * t),
                     sample_rate=sample_rate)


def make_click_track(bpm: float, duration_s: float = 30.0, seed: int = 11) -> AudioClip:
    spec = SynthSpec(
        genre=0,
        tempo_bpm=bpm,
        harmonic_profile=((220.0, 1.0), (440.0, 0.5)),
        noise_level=0.02,
        duration_s=duration_s,
    )
    return synthesize(spec, seed=seed)


def blob_dataset(rng: np.random.Generator, classes, per_class: int = 20,
                 dims: int = 57, spread: float = 0.25):
    """Well-separated Gaussian clusters in feature space, one per class."""
    centers = rng.normal(0.0, 3.0, size=(len(classes), dims))
    rows, labels = [], []
    for i, code in enumerate(classes):
        rows.append(centers[i] + spread * rng.normal(size=(per_class, dims)))
        labels += [code] * per_class
    return np.vstack(rows), np.array(labels, dtype=np.int64)


@pytest.fixture(scope="session")
def blob_bundle():
    """A bundle trained on separable synthetic features (3 genres)."""
    rng = np.random.default_rng(42)
    rows, labels = blob_dataset(rng, classes=[2, 8, 10], per_class=12)
    return train_all(rows, labels, seed=5), rows, labels
