"""Canonical genre table.

Eleven genres, coded 0..10 in alphabetical order. The code<->name mapping is
fixed: stored bundles, history files and the HTTP API all rely on it.
"""

GENRES = (
    "Blues",
    "Classical",
    "Country",
    "Electronic",
    "Folk",
    "Hip-hop",
    "Jazz",
    "Metal",
    "Pop",
    "Reggae",
    "Rock",
)

NUM_GENRES = len(GENRES)

_CODE_BY_NAME = {name: code for code, name in enumerate(GENRES)}
# Accept a few spelling variants seen in the wild (manifests, user input).
_ALIASES = {
    "hiphop": "Hip-hop",
    "hip hop": "Hip-hop",
    "hip-hop": "Hip-hop",
}


def genre_code(name: str) -> int:
    """Return the stable integer code for a genre name.

    Matching is case-insensitive and tolerates common hyphen/space variants
    of Hip-hop. Raises ValueError for anything else.
    """
    if name in _CODE_BY_NAME:
        return _CODE_BY_NAME[name]
    folded = name.strip().lower()
    canonical = _ALIASES.get(folded, folded.capitalize())
    if canonical in _CODE_BY_NAME:
        return _CODE_BY_NAME[canonical]
    raise ValueError(f"unknown genre {name!r}; valid genres: {', '.join(GENRES)}")


def genre_name(code: int) -> str:
    """Return the canonical name for a genre code."""
    if not 0 <= code < NUM_GENRES:
        raise ValueError(f"genre code {code} out of range 0..{NUM_GENRES - 1}")
    return GENRES[code]


def is_valid_genre(name: str) -> bool:
    try:
        genre_code(name)
        return True
    except ValueError:
        return False
