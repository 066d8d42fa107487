"""Tokenization of marked-up documents and the stem-similarity function.

A document is treated as a plain sequence of lowercase word tokens with
markup removed; word positions are the list indices, so distances between
occurrences are measured in words.  Similarity between words is computed
from their longest common prefix, independent of any language-specific
stemmer.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from pathlib import Path

WordSeq = list[str]

# Letters and digits form tokens; underscore and punctuation split them.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Tag content that is code, not prose.
_NON_TEXT_TAGS = {"script", "style"}


class _TextExtractor(HTMLParser):
    """Collects the text content of a marked-up page, skipping script/style."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _NON_TEXT_TAGS:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in _NON_TEXT_TAGS and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth == 0:
            self.chunks.append(data)


def strip_markup(text: str) -> str:
    """Remove tags and decode entities, returning the bare text content."""
    extractor = _TextExtractor()
    extractor.feed(text)
    extractor.close()
    return " ".join(extractor.chunks)


def tokenize(raw: bytes | str, markup: bool = False, encoding: str = "utf-8") -> WordSeq:
    """Split text into lowercase word tokens, optionally stripping markup.

    Tokens are maximal runs of letters and digits; everything else is a
    separator.  Byte input is decoded strictly so that undecodable input
    fails with the offending offset rather than silently mangling words.
    """
    if isinstance(raw, bytes):
        text = raw.decode(encoding)  # UnicodeDecodeError carries the byte offset
    else:
        text = raw
    if markup:
        text = strip_markup(text)
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def common_stem(w1: str, w2: str) -> str:
    """Longest common prefix of two words."""
    limit = min(len(w1), len(w2))
    i = 0
    while i < limit and w1[i] == w2[i]:
        i += 1
    return w1[:i]


def sim(w1: str, w2: str) -> float:
    """Prefix similarity of w2 to the keyword w1, in [0, 1].

    Equals (|common prefix| / |w1|)^4.  Asymmetric: the first argument is
    the user keyword, so longer words that extend it score 1 while
    truncations are penalized.
    """
    if not w1:
        raise ValueError("similarity needs a nonempty keyword")
    return (len(common_stem(w1, w2)) / len(w1)) ** 4


class NoiseWordSet:
    """Set of stopwords; membership is exact string equality after lowercasing."""

    def __init__(self, words=()):
        self.words = {w.lower() for w in words}

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_file(cls, path) -> "NoiseWordSet":
        """Load one token per line; blank lines and '#' comments are skipped."""
        words = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                words.append(stripped)
        return cls(words)


_DEFAULT_NOISE_PATH = Path(__file__).parent / "data" / "stopwords_en.txt"


def default_noise_words() -> NoiseWordSet:
    """The English stopword list shipped with the package."""
    return NoiseWordSet.from_file(_DEFAULT_NOISE_PATH)
