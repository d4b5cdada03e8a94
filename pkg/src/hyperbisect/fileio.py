"""
Reading and writing hypergraphs

Canonical text format:

    # comment lines start with '#'
    n r                  (or: n mixed maxr)
    0 1 2
    3 4 5 x 2            (optional 'x k' multiplicity suffix)

Vertex indices are 0-based. Paths ending in '.gz' are read and written
through gzip. A JSON export mirrors the same fields for tooling.

"""

import gzip
import json
import logging

import numpy as np

from .errors import GeometryError, HypergraphError, ParseError
from .hypergraph import Hypergraph, MixedHypergraph

MIXED = 'mixed'
MULT = 'x'


def _open(path: str, mode: str):
    if str(path).endswith('.gz'):
        return gzip.open(path, mode + 't')
    return open(path, mode)


def _parse_header(path: str, lineno: int, tokens: list) -> tuple:
    try:
        if len(tokens) == 3 and tokens[1] == MIXED:
            return int(tokens[0]), MIXED, int(tokens[2])
        if len(tokens) == 2:
            return int(tokens[0]), None, int(tokens[1])
    except ValueError:
        pass
    raise ParseError(
        path, lineno, f"expected header 'n r' or 'n {MIXED} maxr', got {' '.join(tokens)!r}",
    )


def _parse_edge(path: str, lineno: int, tokens: list) -> tuple:
    mult = 1
    if len(tokens) >= 2 and tokens[-2] == MULT:
        try:
            mult = int(tokens[-1])
        except ValueError:
            raise ParseError(path, lineno, f"bad multiplicity {tokens[-1]!r}")
        tokens = tokens[:-2]
    try:
        edge = tuple(int(tok) for tok in tokens)
    except ValueError:
        raise ParseError(path, lineno, f"non-integer vertex in {' '.join(tokens)!r}")
    return edge, mult


def parse_hypergraph(lines, path: str = '<string>'):
    """
    Parse the canonical text format

    Arguments:
        lines (Iterable[str]) : Text lines

    Keyword arguments:
        path (str) : Name used in error messages

    Returns:
        Hypergraph | MixedHypergraph

    Raises:
        ParseError : With the offending line number

    """

    header = None
    edges = []
    mults = []
    linenos = []
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith('#'):
            continue
        if header is None:
            header = _parse_header(path, lineno, tokens)
            continue
        edge, mult = _parse_edge(path, lineno, tokens)
        edges.append(edge)
        mults.append(mult)
        linenos.append(lineno)

    if header is None:
        raise ParseError(path, 0, 'missing header line')

    n, kind, r = header
    # Validate edge by edge so errors point at a line
    for edge, mult, lineno in zip(edges, mults, linenos):
        try:
            if kind == MIXED:
                MixedHypergraph(n, [edge], [mult], max_size=r)
            else:
                Hypergraph(n, r, [edge], [mult])
        except HypergraphError as err:
            raise ParseError(path, lineno, str(err)) from err

    if kind == MIXED:
        return MixedHypergraph(n, edges, mults, max_size=r)
    return Hypergraph(n, r, edges, mults)


def read_hypergraph(path: str):
    """
    Load a hypergraph from the canonical text format

    Arguments:
        path (str) : File to read; '.gz' files are decompressed

    Returns:
        Hypergraph | MixedHypergraph

    """

    logging.getLogger(__name__).debug("Reading hypergraph from %s", path)
    with _open(path, 'r') as fid:
        return parse_hypergraph(fid, path=str(path))


def format_hypergraph(h) -> str:
    """Canonical text for a hypergraph"""

    if isinstance(h, MixedHypergraph):
        lines = [f"{h.n} {MIXED} {h.r}"]
    else:
        lines = [f"{h.n} {h.r}"]
    for edge, mult in h.items():
        line = ' '.join(map(str, edge))
        if mult != 1:
            line += f" {MULT} {mult}"
        lines.append(line)
    return '\n'.join(lines) + '\n'


def write_hypergraph(h, path: str) -> None:
    """
    Save a hypergraph in the canonical text format

    Arguments:
        h (Hypergraph | MixedHypergraph) : Hypergraph to save
        path (str) : Output file; '.gz' files are compressed

    """

    logging.getLogger(__name__).debug("Writing %r to %s", h, path)
    with _open(path, 'w') as fid:
        fid.write(format_hypergraph(h))


def to_dict(h) -> dict:
    """Structured export mirroring the text format fields"""

    return {
        'kind': h.kind,
        'n': h.n,
        'r': h.r,
        'edges': [list(e) for e in h.edges],
        'multiplicities': list(h.multiplicities),
    }


def from_dict(data: dict):
    if data.get('kind') == MIXED:
        return MixedHypergraph(
            data['n'],
            data['edges'],
            data.get('multiplicities'),
            max_size=data['r'],
        )
    return Hypergraph(
        data['n'], data['r'], data['edges'], data.get('multiplicities'),
    )


def dump_json(h, path: str) -> None:
    with _open(path, 'w') as fid:
        json.dump(to_dict(h), fid, indent=4)


def load_json(path: str):
    with _open(path, 'r') as fid:
        return from_dict(json.load(fid))


def read_gram(path: str, tol: float = 1e-9) -> np.ndarray:
    """
    Load a Gram matrix for the half-space estimator

    The file holds a square, symmetric, whitespace-separated matrix with
    unit diagonal.

    """

    try:
        gram = np.loadtxt(path, ndmin=2, comments='#')
    except ValueError as err:
        raise GeometryError(f"{path}: unreadable Gram matrix: {err}") from err

    if gram.shape[0] != gram.shape[1]:
        raise GeometryError(f"{path}: Gram matrix is not square {gram.shape}")
    if not np.allclose(gram, gram.T, atol=tol):
        raise GeometryError(f"{path}: Gram matrix is not symmetric")
    if not np.allclose(np.diag(gram), 1.0, atol=tol):
        raise GeometryError(f"{path}: Gram matrix must have unit diagonal")
    return gram
