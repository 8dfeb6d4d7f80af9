"""Bitstrings, bijection wrappers, iteration, and the exhaustive checker."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ibx.kernel import (
    Bijection,
    Bitstring,
    WidthMismatchError,
    add_const,
    builtin_bijections,
    cat_map,
    cat_pack,
    cat_unpack,
    check_bijection_exhaustive,
    from_permutation,
    identity,
    increment,
    iterate_bijection,
    pack_fields,
    rotate_left,
    unpack_fields,
)
from ibx.plb import apply_plb, riffle


def test_text_is_msb_first():
    b = Bitstring.from_text("110")
    assert (b.value, b.width) == (6, 3)
    assert b.to_text() == "110"


def test_bit_zero_is_least_significant():
    b = Bitstring(0b110, 3)
    assert b.bit(0) == 0
    assert b.bit(1) == 1
    assert b.bit(2) == 1
    assert b.bits == (0, 1, 1)


def test_value_must_fit_width():
    with pytest.raises(ValueError):
        Bitstring(8, 3)
    with pytest.raises(ValueError):
        Bitstring(-1, 3)


@given(st.integers(min_value=1, max_value=64).flatmap(
    lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))
))
def test_text_round_trip(wv):
    w, v = wv
    b = Bitstring(v, w)
    assert Bitstring.from_text(b.to_text()) == b


@given(st.lists(st.tuples(st.integers(0, 7), st.just(3)), max_size=6))
def test_pack_unpack_round_trip(fields):
    packed = pack_fields(fields)
    assert unpack_fields(packed, [w for _, w in fields]) == tuple(
        v for v, _ in fields
    )


def test_pack_is_msb_first():
    # (1, 2 bits) then (1, 1 bit) reads as the numeral 011.
    assert pack_fields([(1, 2), (1, 1)]) == 3
    assert pack_fields([(2, 2), (0, 1)]) == 4


def test_iterate_identity_large_n():
    x = Bitstring.from_text("0110")
    assert iterate_bijection(identity(4), 10**6, x) == x


def test_iterate_increment():
    # 6 + 3 mod 8 = 1.
    out = iterate_bijection(increment(3), 3, Bitstring.from_text("110"))
    assert out.to_text() == "001"


def test_iterate_zero_is_identity():
    f = cat_map(8)
    for v in range(1 << f.width):
        x = Bitstring(v, f.width)
        assert iterate_bijection(f, 0, x) == x


def test_iterate_width_mismatch():
    with pytest.raises(WidthMismatchError):
        iterate_bijection(identity(3), 1, Bitstring(0, 4))


def test_check_identity():
    assert check_bijection_exhaustive(identity(4)).ok


def test_check_constant_map_yields_collision_witness():
    f = Bijection(2, lambda v: 0, None, "zero")
    report = check_bijection_exhaustive(f)
    assert not report.ok
    a, b = report.witness
    assert a != b
    assert f.forward(a.value) == f.forward(b.value)


def test_check_riffle_wrapped_as_bijection():
    t = riffle(16)
    f = Bijection(4, lambda v: apply_plb(t, v), None, "riffle16")
    assert check_bijection_exhaustive(f).ok


def test_check_rejects_wide_inputs():
    f = Bijection(21, lambda b: b, lambda b: b, "wide")
    with pytest.raises(ValueError):
        check_bijection_exhaustive(f)


def test_check_catches_broken_backward():
    f = Bijection(2, increment(2).forward, increment(2).forward, "bad-inverse")
    report = check_bijection_exhaustive(f)
    assert not report.ok
    assert "inverse" in report.reason


def test_cat_map_origin_fixed():
    f = cat_map(5)
    origin = cat_pack(5, 0, 0)
    assert f.apply(origin) == origin


def test_cat_map_matches_matrix_and_fixes_out_of_domain():
    f = cat_map(5)
    for v in range(1 << f.width):
        x = Bitstring(v, f.width)
        a, b = cat_unpack(5, x)
        y = f.apply(x)
        if a < 5 and b < 5:
            assert cat_unpack(5, y) == ((2 * a + b) % 5, (a + b) % 5)
        else:
            assert y == x


def test_cat_map_inverse_exhaustive():
    assert check_bijection_exhaustive(cat_map(5)).ok
    assert check_bijection_exhaustive(cat_map(8)).ok


def test_add_const_wraps():
    f = add_const(3, 5)
    assert f.forward(6) == 3
    assert f.backward(3) == 6


def test_rotate_left_moves_msb_down():
    f = rotate_left(4)
    assert f.apply(Bitstring.from_text("1000")).to_text() == "0001"
    assert f.apply(Bitstring.from_text("0110")).to_text() == "1100"


def test_rotation_order_equals_width():
    f = rotate_left(5)
    for v in range(32):
        x = Bitstring(v, 5)
        assert iterate_bijection(f, 5, x) == x


def test_from_permutation_swap():
    f = from_permutation([1, 0, 2, 3], 2)
    assert f.forward(0) == 1
    assert f.backward(0) == 1
    assert check_bijection_exhaustive(f).ok


def test_from_permutation_rejects_non_permutation():
    with pytest.raises(ValueError):
        from_permutation([0, 0, 2, 3], 2)


def test_builtins_are_bijective():
    fs = builtin_bijections()
    assert len({f.label for f in fs}) == len(fs)
    for f in fs:
        if f.width <= 10:
            assert check_bijection_exhaustive(f).ok, f.label
