# models/code_instance.py
from dataclasses import dataclass, field

import numpy as np

from models.code_params import DerivedParams
from utils.config import GENERATOR_ID, SCHEME_ALIGNMENT, SCHEME_SCALAR
from utils.errors import DimensionMismatch, Inadmissible, UnknownNode
from utils.field_linalg import DiagonalMatrix


@dataclass(frozen=True)
class NodeRole:
    """Systematic(l) stores information unit l; Parity(i) stores the i-th coded mixture."""
    kind: str
    index: int

    @property
    def is_systematic(self):
        return self.kind == 'systematic'

    def __str__(self):
        return f"{'Systematic' if self.is_systematic else 'Parity'}({self.index})"


class InformationUnit:
    """
    One of the k equal parts of the source.

    Args:
        index (int): Unit index l in 1..k
        data: FieldArray of shape (alpha_sub,) or (alpha_sub, stripes)
    """

    def __init__(self, index, data):
        self.index = index
        self.data = data

    def __repr__(self):
        return f"InformationUnit(index={self.index}, shape={self.data.shape})"


class StoredBlock:
    """
    Content held by one node.

    Args:
        node_id (int): Node id in 1..n
        role (NodeRole): Systematic or parity role
        data: FieldArray of shape (alpha_sub,) or (alpha_sub, stripes)
    """

    __hash__ = None

    def __init__(self, node_id, role, data):
        self.node_id = node_id
        self.role = role
        self.data = data

    def __eq__(self, other):
        if not isinstance(other, StoredBlock):
            return NotImplemented
        return (self.node_id == other.node_id and self.role == other.role
                and self.data.shape == other.data.shape and np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"StoredBlock(node_id={self.node_id}, role={self.role}, shape={self.data.shape})"


@dataclass(frozen=True)
class SubsetCheck:
    subset: tuple
    rank: int
    full_rank: int
    systematic_count: int

    @property
    def passed(self):
        return self.rank == self.full_rank


@dataclass(frozen=True)
class MdsReport:
    """Outcome of the full-rank check of every k-subset, in lexicographic subset order."""
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def summary(self):
        return f"{sum(check.passed for check in self.checks)}/{len(self.checks)}"

    def by_systematic_count(self):
        """Group outcomes by how many systematic nodes the data collector contacts."""
        groups = {}
        for check in self.checks:
            passed, total = groups.get(check.systematic_count, (0, 0))
            groups[check.systematic_count] = (passed + check.passed, total + 1)
        return dict(sorted(groups.items()))

    def to_records(self):
        return [
            {
                'subset': ','.join(str(node) for node in check.subset),
                'systematic': check.systematic_count,
                'rank': check.rank,
                'full_rank': check.full_rank,
                'passed': check.passed,
            }
            for check in self.checks
        ]


@dataclass(frozen=True)
class NodeRankCheck:
    """
    Rank conditions of one (failed node, helper set) pair.

    interference_ranks maps each interfering basis node to the rank of its
    stacked interference matrix; unaligned_dim is the dimension it would span
    without alignment.
    """
    node: int
    helpers: tuple
    basis: tuple
    desired_rank: int
    alpha_sub: int
    containment: bool
    primed_nonzero: bool
    interference_ranks: dict = field(default_factory=dict)
    unaligned_dim: int = 0
    reason: str = ''

    @property
    def passed(self):
        return self.desired_rank == self.alpha_sub and self.containment and self.primed_nonzero

    @property
    def failed_condition(self):
        if self.reason:
            return self.reason
        if self.desired_rank != self.alpha_sub:
            return 'repair-rank'
        if not self.containment:
            return 'containment'
        if not self.primed_nonzero:
            return 'primed-nonzero'
        return None


@dataclass(frozen=True)
class RankReport:
    checks: tuple

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def per_node(self):
        nodes = {}
        for check in self.checks:
            nodes[check.node] = nodes.get(check.node, True) and check.passed
        return dict(sorted(nodes.items()))

    def summary(self):
        nodes = self.per_node()
        return f"{sum(nodes.values())}/{len(nodes)}"

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def to_records(self):
        return [
            {
                'node': check.node,
                'helpers': ','.join(str(h) for h in check.helpers),
                'basis': ','.join(str(b) for b in check.basis),
                'desired_rank': check.desired_rank,
                'alpha_sub': check.alpha_sub,
                'max_interference_rank': max(check.interference_ranks.values(), default=0),
                'unaligned_dim': check.unaligned_dim,
                'containment': check.containment,
                'passed': check.passed,
            }
            for check in self.checks
        ]


class CodeInstance:
    """
    A concrete code: parameters plus the diagonal encoding submatrices G_l^(i).

    The submatrices are stored together as a FieldArray of shape
    (n-k, k, alpha_sub); entry [i-1, l-1] is the diagonal of G_l^(i).

    Args:
        params (CodeParams): Code parameters
        coefficients: FieldArray of shape (n-k, k, alpha_sub), all entries non-zero
        scheme (str): 'alignment' for random vector-linear codes, 'scalar' for the fixed (4,2) code
        generator (str): Id of the generator that produced the coefficients
        attempt (int): Construction attempt that produced them
    """

    __hash__ = None

    def __init__(self, params, coefficients, scheme=SCHEME_ALIGNMENT, generator=GENERATOR_ID, attempt=0):
        self.params = params
        self.derived = DerivedParams.from_params(params)
        expected = (params.parity_count, params.k, self.derived.alpha_sub)
        if tuple(coefficients.shape) != expected:
            raise DimensionMismatch(f"Expected coefficient shape {expected}, got {tuple(coefficients.shape)}")
        if type(coefficients) is not params.field:
            coefficients = params.field(np.asarray(coefficients.view(np.ndarray)) % params.q)
        if np.count_nonzero(coefficients.view(np.ndarray)) != coefficients.size:
            raise Inadmissible("Every diagonal entry of every encoding submatrix must be non-zero")
        self.coefficients = coefficients
        self.scheme = scheme
        self.generator = generator
        self.attempt = attempt
        self.mds_report = None
        self.rank_report = None

    @property
    def field(self):
        return self.params.field

    @property
    def n(self):
        return self.params.n

    @property
    def k(self):
        return self.params.k

    @property
    def d(self):
        return self.params.d

    @property
    def alpha_sub(self):
        return self.derived.alpha_sub

    @property
    def is_scalar(self):
        return self.scheme == SCHEME_SCALAR

    @property
    def verified(self):
        return (self.mds_report is not None and self.mds_report.passed
                and self.rank_report is not None and self.rank_report.passed)

    @property
    def nodes(self):
        return list(range(1, self.n + 1))

    def check_node(self, node):
        if not 1 <= node <= self.n:
            raise UnknownNode(f"Node {node} is not in 1..{self.n}")
        return node

    def role(self, node):
        self.check_node(node)
        if node <= self.k:
            return NodeRole('systematic', node)
        return NodeRole('parity', node - self.k)

    def submatrix(self, i, l):
        """Encoding submatrix G_l^(i) of parity i for unit l (both 1-based)."""
        return DiagonalMatrix(self.coefficients[i - 1, l - 1])

    @property
    def submatrices(self):
        return {
            (i, l): self.submatrix(i, l)
            for i in range(1, self.params.parity_count + 1)
            for l in range(1, self.k + 1)
        }

    def encoding_rows(self, node):
        """
        Diagonals of the row block of ``node`` over the original units.

        Returns:
            FieldArray of shape (k, alpha_sub): row l-1 is the diagonal of the
            block multiplying unit l (identity/zero for systematic nodes).
        """
        role = self.role(node)
        if role.is_systematic:
            rows = self.field.Zeros((self.k, self.alpha_sub))
            rows[role.index - 1] = self.field.Ones(self.alpha_sub)
            return rows
        return self.coefficients[role.index - 1]

    def composite(self, nodes):
        """
        Blocked composite matrix of a node list.

        Returns:
            FieldArray of shape (alpha_sub, len(nodes), k)
        """
        stacked = np.stack([self.encoding_rows(node) for node in nodes], axis=0)
        return self.field(np.ascontiguousarray(np.transpose(stacked.view(np.ndarray), (2, 0, 1))))

    def __eq__(self, other):
        if not isinstance(other, CodeInstance):
            return NotImplemented
        return (self.params == other.params and self.scheme == other.scheme
                and self.generator == other.generator and self.attempt == other.attempt
                and np.array_equal(self.coefficients, other.coefficients))

    def __repr__(self):
        p = self.params
        return (f"CodeInstance(n={p.n}, k={p.k}, d={p.d}, m={p.m}, q={p.q}, seed={p.seed}, "
                f"attempt={self.attempt}, scheme={self.scheme})")
