from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwtqft.repcat import Mat, braiding, modified_dim, open_hopf_scalar, twist_scalar
from gwtqft.tangle import (
    ColourSpec,
    ModuleCache,
    ParseError,
    ProfileMismatch,
    evaluate,
    evaluate_cut,
    format_word,
    module_resolver,
    parse_word,
    validate_word,
    word,
)

HOPF = """
colour V = verma(2/5, 1/9; 0)
colour A = verma(1/3, 2/7; 0)
in V^
cup_l:A id     # a circle to the left of the strand, linking number +1
id x-
id x-
cap_r id
"""


def _run(text, data, cut=False):
    w = parse_word(text)
    res = module_resolver(data, w.colour_table)
    return evaluate_cut(w, res) if cut else evaluate(w, res).matrix


def test_parse_and_format_round_trip():
    w = parse_word(HOPF)
    assert parse_word(format_word(w)) == w
    assert [str(p) for p in w.slices[0]] == ["cup_l:A", "id"]


def test_repeat_count():
    w = parse_word("colour V = verma(1/3; 0)\nin V^ V^ V^\nid:3\n")
    assert len(w.slices[0]) == 3


@pytest.mark.parametrize("text, line, col", [
    ("colour V = verma(0, 1/0; 0)\n", 1, 20),
    ("colour V = verma(0, 1; 2)\n", 1, 23),
    ("colour V = verma(0, 1; 0)\nin V^\nid y+\n", 3, 4),
    ("colour V = verma(0, 1; 0)\nin V^\ncup_l id\n", 3, 1),
    ("colour V = blob(0, 1)\n", 1, 1),
])
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_word(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_profile_errors():
    with pytest.raises(ProfileMismatch) as e:
        validate_word(parse_word("colour V = verma(0, 1; 0)\nin V^\nx+\n"))
    assert e.value.slice_index == 1
    with pytest.raises(ProfileMismatch):
        validate_word(parse_word("colour V = verma(0, 1; 0)\nin V^ V^\ncap_r\n"))


def test_topology_of_hopf():
    topo = validate_word(parse_word(HOPF))
    assert len(topo.components) == 2
    assert topo.linking[0][1] == topo.linking[1][0] == 1
    assert [c.closed for c in topo.components] == [False, True]
    minus = validate_word(parse_word(HOPF.replace("x-", "x+")))
    assert minus.linking[0][1] == -1


def test_framing_from_twists_and_kinks():
    topo = validate_word(parse_word("colour V = verma(1/3, 1/5; 0)\nin V^\ntw+\ntw+\ntw-\n"))
    assert topo.linking[0][0] == 1


def test_single_crossing_of_open_strands(gl11):
    text = "colour V = verma(1/3, 1/5; 0)\ncolour W = verma(1/2, 1/7; 1)\nin V^ W^\nx+\n"
    w = parse_word(text)
    assert validate_word(w).linking[0][1] == Fraction(1, 2)
    res = module_resolver(gl11, w.colour_table)
    assert evaluate(w, res).matrix == braiding(res("V"), res("W")).matrix


def test_cut_hopf(gl11):
    a, b = (Fraction(1, 3), Fraction(2, 7)), (Fraction(2, 5), Fraction(1, 9))
    expected = modified_dim(gl11, b) * open_hopf_scalar(gl11, a, 0, b, 0)
    assert _run(HOPF, gl11, cut=True) == expected
    # the same link with the circle on the right
    right = "colour V = verma(2/5, 1/9; 0)\ncolour A = verma(1/3, 2/7; 0)\nin V^\nid cup_l:A\nx+ id\nx+ id\nid cap_r\n"
    assert _run(right, gl11, cut=True) == expected
    assert _run(HOPF.replace("x-", "x+"), gl11, cut=True) != expected


def test_cut_twist(gl11):
    lam = (0, Fraction(1, 3))
    got = _run("colour V = verma(0, 1/3; 0)\nin V^\ntw+\n", gl11, cut=True)
    assert got == modified_dim(gl11, lam) * twist_scalar(gl11, lam)


def test_closed_verma_circle_vanishes(gl11):
    for text in ("colour V = verma(0, 1/3; 0)\ncup_l:V\ncap_r\n", "colour V = verma(0, 1/3; 0)\ncup_r:V\ncap_l\n"):
        assert _run(text, gl11).is_zero()


def test_reidemeister_two(gl11):
    text = "colour V = verma(0, 1/3; 0)\ncolour W = verma(1/2, 1/5; 1)\nin V^ Wv\nx+\nx-\n"
    assert _run(text, gl11) == Mat.identity(4)


def test_cache_is_reused(gl11):
    w = parse_word(HOPF)
    cache = ModuleCache()
    res = module_resolver(gl11, w.colour_table)
    a = evaluate_cut(w, res, cache)
    b = evaluate_cut(w, res, cache)
    assert a == b


def test_builder_matches_parser():
    colours = {"V": ColourSpec("verma", (Fraction(2, 5), Fraction(1, 9)), 0),
               "A": ColourSpec("verma", (Fraction(1, 3), Fraction(2, 7)), 0)}
    built = word(["V^"], ["cup_l:A id", "id x-", "id x-", "cap_r id"], colours)
    assert built.slices == parse_word(HOPF).slices


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["x+", "x-", "tw+ id", "id tw-", "id id"]), max_size=6))
def test_braid_words_round_trip_and_invert(gl11, moves):
    head = "colour V = verma(1/3, 1/5; 0)\ncolour W = verma(1/4, 1/7; 0)\nin V^ V^\n"
    inverse = {"x+": "x-", "x-": "x+", "tw+ id": "tw- id", "id tw-": "id tw+", "id id": "id id"}
    text = head + "".join(m + "\n" for m in moves) + "".join(inverse[m] + "\n" for m in reversed(moves))
    w = parse_word(text)
    assert parse_word(format_word(w)) == w
    assert _run(text, gl11) == Mat.identity(4)
