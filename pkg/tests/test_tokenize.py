from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import oracle_tokens

from clipse.tokenize import (
    Token,
    UnknownTokenizerError,
    get_tokenizer,
    resolve_tokenizer,
    tokenize_whitespace,
    tokenize_wordpunct,
)


def spans(tokens: list[Token]) -> list[tuple[int, int, str]]:
    return [tuple(t) for t in tokens]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("MRN: 12345", [(0, 3, "MRN"), (3, 4, ":"), (5, 10, "12345")]),
        ("Dr. Smith", [(0, 2, "Dr"), (2, 3, "."), (4, 9, "Smith")]),
        ("", []),
        ("x--y", [(0, 1, "x"), (1, 3, "--"), (3, 4, "y")]),
        ("snake_case 3.5", [(0, 10, "snake_case"), (11, 12, "3"), (12, 13, "."), (13, 14, "5")]),
        ("café ?!", [(0, 4, "café"), (5, 7, "?!")]),
    ],
)
def test_wordpunct_examples(text, expected):
    assert spans(tokenize_wordpunct(text)) == expected


@pytest.mark.parametrize(
    "text, expected",
    [
        ("a  b", [(0, 1, "a"), (3, 4, "b")]),
        ("", []),
        ("Dr. Smith", [(0, 3, "Dr."), (4, 9, "Smith")]),
        ("\ttab\nnew", [(1, 4, "tab"), (5, 8, "new")]),
    ],
)
def test_whitespace_examples(text, expected):
    assert spans(tokenize_whitespace(text)) == expected


def test_registry():
    assert get_tokenizer("wordpunct") is tokenize_wordpunct
    assert get_tokenizer("whitespace") is tokenize_whitespace
    with pytest.raises(UnknownTokenizerError, match="bert"):
        get_tokenizer("bert")


def test_resolve_tokenizer_accepts_names_callables_and_none():
    assert resolve_tokenizer(None) == ("wordpunct", tokenize_wordpunct)
    assert resolve_tokenizer("whitespace") == ("whitespace", tokenize_whitespace)
    assert resolve_tokenizer(tokenize_whitespace) == ("whitespace", tokenize_whitespace)


text_strategy = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60)


@given(text_strategy)
def test_wordpunct_matches_oracle(text):
    assert spans(tokenize_wordpunct(text)) == oracle_tokens(text)


@given(text_strategy)
def test_tokens_are_ordered_slices_covering_non_space(text):
    for tokenize in (tokenize_wordpunct, tokenize_whitespace):
        tokens = tokenize(text)
        assert all(t.text == text[t.start : t.stop] and t.start < t.stop for t in tokens)
        assert all(a.stop <= b.start for a, b in zip(tokens, tokens[1:]))
        covered = [i for t in tokens for i in range(t.start, t.stop)]
        assert covered == [i for i, c in enumerate(text) if not c.isspace()]
