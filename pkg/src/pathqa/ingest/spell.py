"""Conservative lexicon-based spell correction for OCR text.

A token is corrected only when a unique lexicon word sits at the minimum
bounded edit distance; any tie means no change.  Clinical vocabulary is
protected by requiring the ontology terms to be part of the lexicon.
"""

from __future__ import annotations

from pathlib import Path

from ..kernels import levenshtein


def load_lexicon(path: str | Path) -> frozenset[str]:
    """One word per line, lowercased; blank lines ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def _best_correction(token: str, by_length: dict[int, list[str]], max_dist: int) -> str | None:
    best_dist = max_dist + 1
    best: str | None = None
    ambiguous = False
    n = len(token)
    for length in range(n - max_dist, n + max_dist + 1):
        for cand in by_length.get(length, ()):
            d = levenshtein(token, cand, max_dist)
            if d < best_dist:
                best_dist, best, ambiguous = d, cand, False
            elif d == best_dist and cand != best:
                ambiguous = True
    if best is None or ambiguous or best_dist > max_dist:
        return None
    return best


def _match_case(original: str, replacement: str) -> str:
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


class SpellCorrector:
    """Caches the length-partitioned lexicon and per-token decisions."""

    def __init__(self, lexicon: frozenset[str], max_edit_distance: int = 2):
        if not lexicon:
            raise ValueError("lexicon must be non-empty")
        self.lexicon = lexicon
        self.max_edit_distance = max_edit_distance
        self._by_length: dict[int, list[str]] = {}
        for word in sorted(lexicon):
            self._by_length.setdefault(len(word), []).append(word)
        self._cache: dict[str, str] = {}

    def correct_token(self, token: str) -> str:
        if not token.isalpha():
            return token
        lowered = token.lower()
        if lowered in self.lexicon:
            return token
        if lowered not in self._cache:
            best = _best_correction(lowered, self._by_length, self.max_edit_distance)
            self._cache[lowered] = best if best is not None else lowered
        corrected = self._cache[lowered]
        if corrected == lowered:
            return token
        return _match_case(token, corrected)

    def correct(self, text: str) -> str:
        return " ".join(self.correct_token(tok) for tok in text.split())


def spell_correct(text: str, lexicon: frozenset[str], max_edit_distance: int = 2) -> str:
    return SpellCorrector(lexicon, max_edit_distance).correct(text)
