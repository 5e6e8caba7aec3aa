"""Language identification via rank-order character n-gram profiles.

Classic out-of-place matching: each language gets a profile of its most
frequent 1..3-grams (built from the bundled seed texts), a query gets the
same treatment, and the language whose profile ranks the query's grams
most similarly wins.  A Unicode-script pre-filter narrows the candidate
set first, which makes Hangul/Greek/Cyrillic/kana inputs unambiguous and
keeps Han-script inputs a zh/ja decision.

Text with no alphabetic characters at all (digits, punctuation, emoji)
maps to ``"und"``, which callers treat as non-English.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter

from ..errors import EmptyTextError
from .base import DetectedLanguage, LanguageDetector
from .lang_seeds import SEED_TEXTS

PROFILE_SIZE = 300
_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

_SCRIPT_CANDIDATES = {
    "hangul": {"ko"},
    "greek": {"el"},
    "cyrillic": {"ru"},
    "kana": {"ja"},
    "han": {"zh", "ja"},
    "latin": {"en", "de", "fr", "es", "it", "pt", "nl"},
}


def _char_script(ch: str) -> str | None:
    code = ord(ch)
    if 0xAC00 <= code <= 0xD7AF or 0x1100 <= code <= 0x11FF:
        return "hangul"
    if 0x3040 <= code <= 0x30FF:
        return "kana"
    if 0x4E00 <= code <= 0x9FFF or 0x3400 <= code <= 0x4DBF:
        return "han"
    if 0x0370 <= code <= 0x03FF or 0x1F00 <= code <= 0x1FFF:
        return "greek"
    if 0x0400 <= code <= 0x04FF:
        return "cyrillic"
    if ch.isalpha() and unicodedata.name(ch, "").startswith("LATIN"):
        return "latin"
    return None


def ngram_profile(text: str, size: int = PROFILE_SIZE) -> dict[str, int]:
    """Rank map of the most frequent padded 1..3-grams of the text."""
    counts: Counter[str] = Counter()
    for word in _WORD_RE.findall(text.lower()):
        padded = f"_{word}_"
        for n in (1, 2, 3):
            for i in range(len(padded) - n + 1):
                counts[padded[i:i + n]] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:size]
    return {gram: pos for pos, (gram, _) in enumerate(ranked)}


def _out_of_place(query: dict[str, int], profile: dict[str, int]) -> int:
    penalty = PROFILE_SIZE
    return sum(abs(rank - profile[gram]) if gram in profile else penalty
               for gram, rank in query.items())


class NgramLanguageDetector(LanguageDetector):

    def __init__(self, seed_texts: dict[str, str] | None = None):
        seeds = seed_texts or SEED_TEXTS
        self._profiles = {lang: ngram_profile(text) for lang, text in seeds.items()}

    def detect(self, text: str) -> DetectedLanguage:
        if not text or not text.strip():
            raise EmptyTextError("cannot detect language of empty text")
        letters = [ch for ch in text if ch.isalpha()]
        if not letters:
            return DetectedLanguage("und", 1.0)

        scripts = Counter(s for ch in letters if (s := _char_script(ch)))
        if not scripts:
            return DetectedLanguage("und", 1.0)
        # kana is unique to Japanese even when Han characters dominate
        if scripts.get("kana"):
            return DetectedLanguage("ja", 1.0)
        dominant = scripts.most_common(1)[0][0]
        candidates = [lang for lang in _SCRIPT_CANDIDATES[dominant]
                      if lang in self._profiles]
        if len(candidates) == 1:
            return DetectedLanguage(candidates[0], 1.0)

        query = ngram_profile(text)
        distances = sorted((_out_of_place(query, self._profiles[lang]), lang)
                           for lang in candidates)
        best_dist, best_lang = distances[0]
        second_dist = distances[1][0] if len(distances) > 1 else best_dist + 1
        if second_dist <= 0:
            confidence = 1.0
        else:
            confidence = max(0.0, min(1.0, (second_dist - best_dist) / second_dist))
        return DetectedLanguage(best_lang, confidence)
