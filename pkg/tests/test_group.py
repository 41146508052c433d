import pytest
from hypothesis import given, strategies as st

from bslab import group
from bslab.group import Generator, NormalForm, distortion_word, invert, multiply, normalize, parse_word

from oracles import affine_image, all_words, normal_form_affine

words = st.text(alphabet="aAbB", max_size=12)


def nf(p, q, r, n=2):
    return NormalForm(p, q, r, n)


@pytest.mark.parametrize(
    "text, n, expected",
    [
        ("abA", 2, (0, 2, 0)),
        ("", 3, (0, 0, 0)),
        ("Aba", 2, (1, 1, 1)),
        ("aabAA", 3, (0, 9, 0)),
        ("bAb", 2, (1, 3, 0)),
    ],
)
def test_normalize_examples(text, n, expected):
    assert normalize(parse_word(text), n) == NormalForm(*expected, n)


def test_no_b_power_for_conjugate_of_b():
    # a^-1 b a is x -> x + 1/2, which no b^q matches
    assert not normalize(parse_word("Aba"), 2).is_b_power


def test_rejects_small_n():
    with pytest.raises(ValueError):
        normalize(parse_word("ab"), 1)
    with pytest.raises(ValueError):
        NormalForm(0, 0, 0, 1)


def test_normal_form_invariant_enforced():
    with pytest.raises(ValueError):
        NormalForm(1, 4, 1, 2)
    with pytest.raises(ValueError):
        NormalForm(-1, 1, 0, 2)


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ((0, 1, 0), (0, 1, 0), (0, 2, 0)),
        ((0, 0, 1), (0, 1, 0), (0, 2, 1)),
        ((1, 1, 1), (1, 1, 1), (0, 1, 0)),
    ],
)
def test_multiply_examples(x, y, expected):
    assert multiply(nf(*x), nf(*y)) == nf(*expected)


def test_multiply_mismatched_n():
    with pytest.raises(ValueError):
        multiply(NormalForm(0, 1, 0, 2), NormalForm(0, 1, 0, 3))


@pytest.mark.parametrize(
    "x, expected",
    [((0, 0, 0), (0, 0, 0)), ((0, 5, 0), (0, -5, 0)), ((1, 1, 1), (1, -1, 1))],
)
def test_invert_examples(x, expected):
    assert invert(nf(*x)) == nf(*expected)


def test_distortion_word_examples():
    assert distortion_word(0, 2) == (Generator.b,)
    assert group.format_word(distortion_word(3, 2)) == "aaabAAA"
    assert normalize(distortion_word(3, 2), 2) == nf(0, 8, 0)
    assert normalize(distortion_word(10, 3), 3) == NormalForm(0, 59049, 0, 3)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_distortion_exact_up_to_64(n):
    for m in range(65):
        w = distortion_word(m, n)
        assert len(w) == 2 * m + 1
        assert normalize(w, n) == NormalForm(0, n**m, 0, n)


def test_distortion_huge_exponent_is_exact():
    q = normalize(distortion_word(200, 7), 7).q
    assert q == 7**200 and q.bit_length() > 500


@pytest.mark.parametrize("q, n", [(1, 2), (8, 2), (59049, 3), (1000, 10), (-77, 3), (12345, 2)])
def test_horner_word_represents_power(q, n):
    w = group.horner_word(q, n)
    assert normalize(w, n) == NormalForm(0, q, 0, n)


def test_distortion_length_of_powers():
    assert group.distortion_length(2**20, 2) == 41
    assert group.distortion_length(0, 2) == 0


def test_string_forms():
    assert str(nf(0, 2, 0)) == "b^2"
    assert str(nf(1, 1, 1)) == "a^-1 b^1 a^1"
    assert str(nf(0, 0, 0)) == "1"
    assert str(nf(3, 0, 0)) == "a^-3"
    with pytest.raises(ValueError):
        parse_word("abx")
    assert group.format_word(parse_word("a A b\tB")) == "aAbB"


@given(words, st.integers(2, 6))
def test_normalize_matches_affine_oracle(text, n):
    x = normalize(parse_word(text), n)
    assert normal_form_affine(x.p, x.q, x.r, n) == affine_image(text, n)


@given(words, words, st.integers(2, 5))
def test_multiply_is_concatenation(u, v, n):
    x, y = normalize(parse_word(u), n), normalize(parse_word(v), n)
    assert multiply(x, y) == normalize(parse_word(u + v), n)


@given(words, st.integers(2, 5))
def test_inverse_and_to_word(text, n):
    x = normalize(parse_word(text), n)
    assert multiply(x, invert(x)).is_identity
    assert multiply(invert(x), x).is_identity
    assert normalize(x.to_word(), n) == x


@given(words, st.integers(-6, 6))
def test_power_by_squaring(text, k):
    x = normalize(parse_word(text), 3)
    expected = group.identity(3)
    step = x if k >= 0 else invert(x)
    for _ in range(abs(k)):
        expected = multiply(expected, step)
    assert group.power(x, k) == expected


def test_exhaustive_short_words_n3():
    # smaller exhaustive sweep for a second n; the n=2 length-8 sweep is an acceptance criterion
    for w in all_words(5):
        x = normalize(parse_word(w), 3)
        assert normal_form_affine(x.p, x.q, x.r, 3) == affine_image(w, 3)
