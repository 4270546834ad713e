import itertools

import pytest
from hypothesis import given, settings, strategies as st

from intercode import FOUR_ARY_BOOK, NOT_FOUND, ConfigurationError, ProtocolViolation, decode_block, encode_block, find_code
from intercode.channel import ERASED
from intercode.codes import Codebook, six_of_ten_book
from oracles import consistent_words, hamming_min

E = ERASED


def test_four_ary_map():
    assert encode_block((0, 1), FOUR_ARY_BOOK) == (0, 0, 0)
    assert encode_block((1, 1), FOUR_ARY_BOOK) == (0, 1, 1)
    assert encode_block((1, 0), FOUR_ARY_BOOK) == (1, 1, 0)
    assert encode_block((1, 2), FOUR_ARY_BOOK) == (1, 0, 1)
    with pytest.raises(ConfigurationError):
        encode_block((0, 0), FOUR_ARY_BOOK)


def test_decode_examples():
    assert decode_block((0, E, 0), FOUR_ARY_BOOK) == (0, 1)
    assert decode_block((E, E, 0), FOUR_ARY_BOOK) is ERASED
    assert decode_block((1, 1, 0), FOUR_ARY_BOOK) == (1, 0)


def test_decode_zero_match_is_a_hard_failure():
    with pytest.raises(ProtocolViolation):
        decode_block((1, 1, 1), FOUR_ARY_BOOK)


@pytest.mark.parametrize("book", [FOUR_ARY_BOOK, six_of_ten_book()], ids=["4-ary", "6of10"])
def test_decode_agrees_with_brute_force_on_every_erasure_mask(book):
    for msg in book.messages:
        word = encode_block(msg, book)
        assert decode_block(word, book) == msg
        for mask in itertools.product((False, True), repeat=book.length):
            received = tuple(E if m else b for m, b in zip(mask, word))
            matches = consistent_words([None if m else b for m, b in zip(mask, word)], book.words)
            got = decode_block(received, book)
            if len(matches) == 1:
                assert got == msg
            else:
                assert got is ERASED


def test_six_of_ten_survives_five_erasures():
    book = six_of_ten_book()
    for msg in book.messages:
        word = encode_block(msg, book)
        for where in itertools.combinations(range(10), 5):
            received = tuple(E if i in where else b for i, b in enumerate(word))
            assert decode_block(received, book) == msg


def test_find_code_examples():
    assert find_code(4, 3, 2).as_strings() == ["000", "011", "101", "110"]
    assert sorted(find_code(4, 3, 2).as_strings()) == sorted(FOUR_ARY_BOOK.as_strings())
    assert find_code(3, 2, 2) is NOT_FOUND
    book = find_code(6, 10, 6)
    assert len(book.words) == 6 and hamming_min(book.words) >= 6


def test_find_code_not_found_is_exhaustive():
    # brute force over every 3-subset of 2-bit words confirms the negative answer
    words = list(itertools.product((0, 1), repeat=2))
    assert all(hamming_min(c) < 2 for c in itertools.combinations(words, 3))


def test_find_code_is_lexicographically_first():
    # brute-force the first (4, 4, 2) code in lexicographic order of sorted word lists
    words = [tuple(int(c) for c in format(v, "04b")) for v in range(16)]
    first = next(c for c in itertools.combinations(words, 4) if hamming_min(c) >= 2)
    assert find_code(4, 4, 2).words == first


@settings(deadline=None)
@given(num=st.integers(2, 5), length=st.integers(1, 4), dist=st.integers(1, 4))
def test_find_code_agrees_with_brute_force(num, length, dist):
    words = list(itertools.product((0, 1), repeat=length))
    first = next((c for c in itertools.combinations(words, num) if hamming_min(c) >= dist), None)
    book = find_code(num, length, dist)
    assert (book is None) == (first is None)
    if book is not None:
        assert book.words == first


def test_find_code_length_limit():
    with pytest.raises(ConfigurationError):
        find_code(2, 17, 1)


def test_codebook_validates_distance():
    with pytest.raises(ConfigurationError):
        Codebook(((0, 0), (0, 1)), min_distance=2)
