"""genrelab: music-genre classification workbench.

Feature extraction (MFCC, chroma, ZCR, spectral shape, tempo), five
independently trained classifiers with a consensus view, an evaluation
protocol with a Green/Red success grid, and a labeling service for
human-in-the-loop retraining.
"""

__version__ = "0.1.0"

from .audio import AudioClip, SynthSpec, decode_wav, encode_wav, normalize_clip, synthesize
from .features import FEATURE_COUNT, FEATURE_LAYOUT, extract_features
from .genres import GENRES, genre_code, genre_name
from .models import ModelBundle, train_all

__all__ = [
    "AudioClip",
    "SynthSpec",
    "decode_wav",
    "encode_wav",
    "normalize_clip",
    "synthesize",
    "extract_features",
    "FEATURE_COUNT",
    "FEATURE_LAYOUT",
    "GENRES",
    "genre_code",
    "genre_name",
    "ModelBundle",
    "train_all",
]
