"""Unit tests for hypergraph and Gram matrix files."""

import numpy as np
import pytest

from hyperbisect.errors import GeometryError, ParseError
from hyperbisect.fileio import (
    dump_json,
    format_hypergraph,
    load_json,
    parse_hypergraph,
    read_gram,
    read_hypergraph,
    write_hypergraph,
)
from hyperbisect.hypergraph import Hypergraph, MixedHypergraph


def test_parse_with_comments_and_multiplicity():
    """Test comment lines, blank lines and the multiplicity suffix."""
    text = """# a small example
    5 3

    0 1 2
    # another comment
    2 3 4 x 3
    """
    h = parse_hypergraph(text.splitlines())
    assert h == Hypergraph(5, 3, [(0, 1, 2), (2, 3, 4)], [1, 3])


def test_format_writes_multiplicity():
    """Test the canonical text layout."""
    h = Hypergraph(4, 2, [(0, 1), (2, 3)], [1, 2])
    assert format_hypergraph(h) == '4 2\n0 1\n2 3 x 2\n'


@pytest.mark.parametrize('name', ['h.txt', 'h.txt.gz'])
def test_text_file(tmp_path, name, fano):
    """Test writing and reading plain and gzip files."""
    path = str(tmp_path / name)
    write_hypergraph(fano, path)
    assert read_hypergraph(path) == fano


def test_json_file(tmp_path):
    """Test the JSON export of a mixed hypergraph."""
    h = MixedHypergraph(6, [(0, 1), (2, 3, 4)], [2, 1], max_size=4)
    path = str(tmp_path / 'h.json')
    dump_json(h, path)
    assert load_json(path) == h


@pytest.mark.parametrize(
    'text, lineno',
    [
        (['4 2', '0 1', '0 a'], 3),
        (['4 2', '0 1 2'], 2),
        (['4 2', '0 9'], 2),
        (['4 2', '0 1 x y'], 2),
        (['four two'], 1),
        (['# only a comment'], 0),
    ],
)
def test_parse_errors(text, lineno):
    """Test that parse errors carry the offending line number."""
    with pytest.raises(ParseError) as err:
        parse_hypergraph(text, path='h.txt')
    assert err.value.lineno == lineno
    assert str(err.value).startswith(f"h.txt:{lineno}:")


def test_parse_mixed_header():
    """Test the mixed header."""
    h = parse_hypergraph(['5 mixed 3', '0 1', '2 3 4'])
    assert isinstance(h, MixedHypergraph)
    assert h.r == 3


def test_read_gram(tmp_path):
    """Test a valid Gram matrix and the three rejections."""
    path = tmp_path / 'gram.txt'
    path.write_text('1 0.5\n0.5 1\n')
    assert np.allclose(read_gram(str(path)), [[1, 0.5], [0.5, 1]])

    path.write_text('1 0.5\n0.4 1\n')
    with pytest.raises(GeometryError, match='symmetric'):
        read_gram(str(path))

    path.write_text('2 0\n0 1\n')
    with pytest.raises(GeometryError, match='unit diagonal'):
        read_gram(str(path))

    path.write_text('1 0 0\n0 1 0\n')
    with pytest.raises(GeometryError, match='square'):
        read_gram(str(path))
