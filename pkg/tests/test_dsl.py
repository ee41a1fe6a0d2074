import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infdiv.arith import (Conv, ConvPower, Delta, Jordan, Mu, Mult, PointwisePower, Table, Xi,
                          affine_combo)
from infdiv.dsl import KEYWORDS, parse_fn_expr, to_expr
from infdiv.errors import ParseError, TableError
from infdiv.matrix import SymMatrix, build_matrix
from infdiv.matrix_io import emit_matrix, matrix_from_csv, matrix_from_json, read_matrix
from infdiv.sets import IntegerSet


def test_parse_examples():
    f = parse_fn_expr("conv(cpow(xi(1),2), mupow(1))")
    assert f == Conv(ConvPower(Xi(1), 2), ConvPower(Mu(), 1))
    assert f.multiplicative is Mult.YES
    g = parse_fn_expr("ppow(jordan(1.5), 0.5)")
    assert g == PointwisePower(Jordan(1.5), 0.5) and g.multiplicative is Mult.YES


def test_aliases_and_whitespace():
    assert parse_fn_expr("one") == Xi(0)
    assert parse_fn_expr("id") == Xi(1)
    assert parse_fn_expr("delta") == Delta()
    assert parse_fn_expr("mupow(3)") == parse_fn_expr("cpow(mu, 3)")
    assert parse_fn_expr("  conv ( id ,\n\tmu )  ") == Conv(Xi(1), Mu())


# (text, 1-based byte offset, expected tokens)
ERROR_CORPUS = [
    ("conv(xi(1)", 11, {","}),
    ("", 1, set(KEYWORDS)),
    ("foo", 1, set(KEYWORDS)),
    ("xi(", 4, {"number"}),
    ("xi(1.5", 7, {")"}),
    ("cpow(mu, 2.5)", 11, {")"}),
    ("mupow(x)", 7, {"integer"}),
    ("mu mu", 4, {"end of input"}),
    ("conv(mu,, mu)", 9, set(KEYWORDS)),
    ("ppow(id 0.5)", 9, {","}),
    ("table()", 7, {"path"}),
    ("  xi (2) )", 10, {"end of input"}),
    ("conv(µ, mu)", 6, set(KEYWORDS)),
    ("µ", 1, set(KEYWORDS)),
    ("xi(-1)", 4, {"number"}),
    ("xi(1e3)", 5, {")"}),
]


@pytest.mark.parametrize("text, offset, expected", ERROR_CORPUS)
def test_error_positions(text, offset, expected):
    with pytest.raises(ParseError) as info:
        parse_fn_expr(text)
    assert info.value.offset == offset
    assert set(info.value.expected) == expected


def test_offset_counts_bytes():
    # 'µ' is two bytes in UTF-8, so the stray token after it sits at byte 4
    with pytest.raises(ParseError) as info:
        parse_fn_expr("mu µ")
    assert info.value.offset == 4


def test_table_reference(tmp_path):
    p = tmp_path / "remark.json"
    p.write_text(json.dumps({"values": {"1": 0, "3": 0, "10": 3}, "default": 1}))
    f = parse_fn_expr("table(remark.json)", base_dir=tmp_path)
    assert isinstance(f, Table) and f.lookup(10) == 3 and f.source == "remark.json"
    assert parse_fn_expr(to_expr(f), base_dir=tmp_path) == f
    with pytest.raises(TableError, match="missing.json"):
        parse_fn_expr("conv(table(missing.json), mu)", base_dir=tmp_path)


def test_unprintable_nodes():
    with pytest.raises(ValueError):
        to_expr(affine_combo([(1.0, Mu())]), strict=True)
    with pytest.raises(ValueError):
        to_expr(Table.from_mapping({}, 1.0), strict=True)
    assert "affine" in str(affine_combo([(1.0, Mu())]))


_num = st.floats(0, 1e6, allow_nan=False, allow_infinity=False)
_leaf = st.one_of(st.just(Mu()), st.just(Delta()), st.builds(Xi, _num), st.builds(Jordan, _num))
_tree = st.recursive(_leaf, lambda t: st.one_of(
    st.builds(Conv, t, t),
    st.builds(ConvPower, t, st.integers(0, 20)),
    st.builds(PointwisePower, t, _num),
), max_leaves=8)


@given(_tree)
def test_round_trip(tree):
    text = to_expr(tree, strict=True)
    assert parse_fn_expr(text) == tree
    assert parse_fn_expr(text.replace(",", " ,\n")) == tree


@settings(max_examples=300)
@given(st.text(alphabet="convxipwmud(),. 0123456789tablejorn", max_size=30))
def test_grammar_totality(text):
    try:
        tree = parse_fn_expr(text)
    except ParseError as exc:
        assert 1 <= exc.offset <= len(text.encode()) + 1
        assert exc.expected
    except TableError:
        pass
    else:
        assert parse_fn_expr(to_expr(tree, strict=True)) == tree


# --- matrix files -----------------------------------------------------------

def _bits(a):
    return np.asarray(a, dtype=float).view(np.int64)


def test_emit_examples():
    assert emit_matrix(SymMatrix([[2.5]]), "csv") == "2.5\n"
    f = Table.from_mapping({1: 0.0, 3: 0.0, 10: 3.0}, 1.0)
    doc = json.loads(emit_matrix(build_matrix(f, IntegerSet.of([6, 10, 15]), "gcd"), "json"))
    assert doc["entries"] == [[1, 1, 0], [1, 3, 1], [0, 1, 1]]
    assert doc["n"] == 3 and doc["kind"] == "gcd" and doc["set"] == [6, 10, 15]


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_bit_exact(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(5, 5)) * 10.0 ** rng.integers(-30, 30, size=(5, 5))
    a = SymMatrix(np.triu(x) + np.triu(x, 1).T)
    assert np.array_equal(_bits(matrix_from_csv(emit_matrix(a, "csv")).entries), _bits(a.entries))
    assert np.array_equal(_bits(matrix_from_json(emit_matrix(a, "json")).entries), _bits(a.entries))


def test_read_matrix_files(tmp_path):
    a = build_matrix(Xi(0.3), IntegerSet.of([2, 3, 12]), "ratio")
    (tmp_path / "m.json").write_text(emit_matrix(a, "json"))
    (tmp_path / "m.csv").write_text(emit_matrix(a, "csv"))
    b = read_matrix(tmp_path / "m.json")
    assert b.fn == "xi(0.3)" and b.set == (2, 3, 12)
    assert np.array_equal(b.entries, read_matrix(tmp_path / "m.csv").entries)
