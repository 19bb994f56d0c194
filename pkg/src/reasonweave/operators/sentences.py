"""Rule-based sentence segmentation for answer attribution.

Splits at terminal punctuation followed by whitespace and an uppercase or
opening character, with an abbreviation list protecting common cases. The
concatenation of units always equals the input modulo whitespace.
"""
from __future__ import annotations

import re

# lowercased tokens that end with '.' but do not end a sentence
ABBREVIATIONS = {
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.", "ca.", "approx.",
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.",
    "no.", "vol.", "fig.", "dept.", "est.", "min.", "max.",
    "u.s.", "u.k.", "u.n.", "a.m.", "p.m.",
}

_BOUNDARY_RE = re.compile(r"[.!?][\"')\]]*\s+(?=[A-Z0-9\"'(\[])")


def _last_word(text: str) -> str:
    parts = text.split()
    return parts[-1].lower() if parts else ""


def split_sentences(text: str) -> list[str]:
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        candidate = text[start:match.end()]
        word = _last_word(text[:match.end()].rstrip())
        if word in ABBREVIATIONS:
            continue
        stripped = candidate.strip()
        if stripped:
            sentences.append(stripped)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def first_sentence(text: str) -> str:
    sentences = split_sentences(text)
    return sentences[0] if sentences else text.strip()


def segment_answer(answer: str) -> list[tuple[int, str]]:
    """Split an answer into (id, sentence) units with 1-based sequential ids."""
    if not answer.strip():
        raise ValueError("answer must be non-empty")
    return list(enumerate(split_sentences(answer), start=1))
