"""Offset-preserving tokenizers.

Both tokenizers are total: any string, including control characters, yields a
list of non-overlapping tokens in increasing order whose text equals the slice
of the input they cover.
"""

from __future__ import annotations

import re
from typing import Callable, NamedTuple, Union

from .corpus import ClipseError


class Token(NamedTuple):
    start: int
    stop: int
    text: str


Tokenizer = Callable[[str], list[Token]]

# \w in a str pattern is str.isalnum() plus underscore; \s is str.isspace()
_WORDPUNCT = re.compile(r"\w+|[^\w\s]+")
_WHITESPACE = re.compile(r"\S+")

DEFAULT_TOKENIZER = "wordpunct"


class UnknownTokenizerError(ClipseError, KeyError):
    def __str__(self) -> str:
        return f"unknown tokenizer {self.args[0]!r}; available: {', '.join(sorted(TOKENIZERS))}"


def tokenize_wordpunct(text: str) -> list[Token]:
    """Split into maximal runs of word characters or of punctuation.

    >>> tokenize_wordpunct("MRN: 12345")
    [Token(start=0, stop=3, text='MRN'), Token(start=3, stop=4, text=':'), Token(start=5, stop=10, text='12345')]
    """
    return [Token(m.start(), m.end(), m.group()) for m in _WORDPUNCT.finditer(text)]


def tokenize_whitespace(text: str) -> list[Token]:
    """Split into maximal runs of non-whitespace."""
    return [Token(m.start(), m.end(), m.group()) for m in _WHITESPACE.finditer(text)]


TOKENIZERS: dict[str, Tokenizer] = {
    "wordpunct": tokenize_wordpunct,
    "whitespace": tokenize_whitespace,
}


def get_tokenizer(name: str = DEFAULT_TOKENIZER) -> Tokenizer:
    try:
        return TOKENIZERS[name]
    except KeyError:
        raise UnknownTokenizerError(name) from None


def resolve_tokenizer(tokenizer: Union[str, Tokenizer, None]) -> tuple[str, Tokenizer]:
    """Return ``(name, function)`` for a tokenizer given by name or callable."""
    if tokenizer is None:
        tokenizer = DEFAULT_TOKENIZER
    if isinstance(tokenizer, str):
        return tokenizer, get_tokenizer(tokenizer)
    for name, func in TOKENIZERS.items():
        if func is tokenizer:
            return name, func
    return getattr(tokenizer, "__qualname__", repr(tokenizer)), tokenizer
