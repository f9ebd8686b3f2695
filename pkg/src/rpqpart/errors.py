"""Exception hierarchy shared across the package."""


class RpqPartError(Exception):
    """Base class for all package errors."""


# graph construction and lookup

class GraphError(RpqPartError):
    pass


class DuplicateVertexId(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class UnknownVertex(GraphError):
    pass


class PartitionCountExceedsVertices(GraphError):
    pass


# query parsing, expansion and workload tracking

class RpqSyntaxError(RpqPartError):
    """Malformed query text; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExpansionOverflow(RpqPartError):
    pass


class NonMonotoneTimestamp(RpqPartError):
    pass


# pattern trie

class TrieError(RpqPartError):
    pass


class MissingFrequency(TrieError):
    pass


class ZeroProbabilityPrefix(TrieError):
    pass


# transition matrix

class MatrixError(RpqPartError):
    pass


class NotATriePrefix(MatrixError):
    pass


class DisconnectedPath(MatrixError):
    pass


class MissingPrefixRow(MatrixError):
    pass


class VertexIsSafe(MatrixError):
    pass


class VertexUnscored(MatrixError):
    pass


class ZeroTotalMass(MatrixError):
    pass


# swapping

class SwapError(RpqPartError):
    pass


class CandidateIsSafe(SwapError):
    pass


class NoExternalNeighbors(SwapError):
    pass
