import numpy as np
import pytest
from hypothesis import given, strategies as st

from matmeans.errors import ParseError
from matmeans.matio import (
    format_matrix,
    format_witness,
    parse_entry,
    parse_matrix,
    parse_witness,
    read_witness,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_entry_roundtrip(re, im):
    from matmeans.matio import format_entry
    z = parse_entry(format_entry(complex(re, im)))
    assert z.real == re and (z.imag == im or (im == 0 and z.imag == 0))


def test_entry_forms():
    assert parse_entry("1.5") == 1.5
    assert parse_entry("-2-3i") == complex(-2, -3)
    assert parse_entry("1e-3+4.5e2i") == complex(1e-3, 450)


@pytest.mark.parametrize("bad", ["", "1+2", "nan", "inf", "infi", "1j", "abc", "1+2i3", "1_0", "1,5"])
def test_bad_entries(bad):
    with pytest.raises(ParseError):
        parse_entry(bad)


@given(st.integers(1, 6), st.integers(0, 2**32))
def test_matrix_roundtrip_is_exact(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) * 10.0 ** rng.integers(-30, 30) + 1j * rng.standard_normal((n, n))
    assert np.array_equal(parse_matrix(format_matrix(m)), m)


def test_matrix_errors():
    with pytest.raises(ParseError):
        parse_matrix("2\n1 0\n0\n")
    with pytest.raises(ParseError):
        parse_matrix("2\n1 0\n")
    with pytest.raises(ParseError):
        parse_matrix("x\n")
    with pytest.raises(ParseError):
        parse_matrix("1\n1\n2\n")


def test_witness_roundtrip(tmp_path):
    mats = {"A": np.eye(2), "B": np.array([[2.0, 1j], [-1j, 3.0]])}
    text = format_witness({"check_id": "trace_sharp", "spec": {"t": 0.1}}, mats)
    header, back = parse_witness(text)
    assert header["spec"]["t"] == 0.1
    assert list(back) == ["A", "B"] and np.array_equal(back["B"], mats["B"])
    path = tmp_path / "w.txt"
    path.write_text(text)
    assert read_witness(path)[0]["check_id"] == "trace_sharp"


@pytest.mark.parametrize("text", ["", "not json\n", "{}\nmatrix A\n1\n1\n", '{"check_id": "x"}\n',
                                  '{"check_id": "x"}\nmat A\n1\n1\n'])
def test_witness_errors(text):
    with pytest.raises(ParseError):
        parse_witness(text)


def test_missing_witness_file(tmp_path):
    with pytest.raises(ParseError):
        read_witness(tmp_path / "nope.txt")
