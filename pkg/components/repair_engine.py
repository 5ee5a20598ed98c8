# components/repair_engine.py
"""
Interference-alignment repair.

Parity-like helpers project their block onto the columns of V, basis helpers
onto the columns of Vbar. Every interference term inside a parity download is
an exact column of Vbar, found by incrementing one exponent, so it is removed
by lookup and subtraction. What is left is a square system in the failed
node's content.

Parity nodes are repaired by rebasing: the contents of a chosen k-node basis
containing the failed node become the new information units, and every other
node is re-expressed over them with (still diagonal) primed submatrices.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from models.code_instance import NodeRankCheck, RankReport, StoredBlock
from utils.errors import (DimensionMismatch, Inadmissible, RankDeficient, Singular, SingularBasis,
                          UnknownNode, WrongHelperShape)
from utils.field_linalg import DiagonalMatrix, blocked_inverse, blocked_to_dense, mat_rank, mat_solve

logger = logging.getLogger(__name__)


def enumerate_exponents(N, R):
    """All exponent vectors in {1..R}^N, lexicographic; N = 0 yields the single empty vector."""
    if N < 0 or R < 1:
        raise ValueError(f"Need N >= 0 and R >= 1, got N={N}, R={R}")
    return list(itertools.product(range(1, R + 1), repeat=N))


def exponent_index(vector, R):
    """Position of a 1-based exponent vector in the lexicographic order over {1..R}^N."""
    index = 0
    for entry in vector:
        index = index * R + (entry - 1)
    return index


def gamma_formula(k, d, m):
    """
    Repair bandwidth of the alignment scheme in capacity units.

    (k-1)·((m+1)/m)^N + (d-k+1) with N = (k-1)(d-k+1); decreases in m towards d.
    """
    if k < 1 or d < k or m < 1:
        raise Inadmissible(f"Need 1 <= k <= d and m >= 1, got k={k}, d={d}, m={m}")
    exponents = (k - 1) * (d - k + 1)
    return (k - 1) * Fraction(m + 1, m) ** exponents + (d - k + 1)


@dataclass
class ProjectionSet:
    """
    Projection matrices of one repair.

    Column e of V (resp. Vbar) is (prod_j generators[j]^e_j)·w for exponent
    vectors over {1..m} (resp. {1..m+1}). ``increment[j][c]`` is the Vbar
    column equal to generators[j] applied to V column c.
    """
    V: object
    Vbar: object
    generators: tuple
    base: object
    m: int
    exponents: np.ndarray
    increment: np.ndarray

    @property
    def N(self):
        return len(self.generators)

    def column(self, vector):
        return self.V[:, exponent_index(vector, self.m)]

    def bar_column(self, vector):
        return self.Vbar[:, exponent_index(vector, self.m + 1)]

    def check_containment(self):
        """Exact check that every generator maps every V column onto its incremented Vbar column."""
        return all(
            np.array_equal(generator @ self.V, self.Vbar[:, self.increment[j]])
            for j, generator in enumerate(self.generators)
        )


def build_projection_sets(generators, m, dim=None, field=None):
    """
    Build V and Vbar from the ordered interference generators.

    Args:
        generators (list): N DiagonalMatrix values of a common dimension
        m (int): Subsymbol granularity
        dim, field: Needed only when there are no generators

    Returns:
        ProjectionSet
    """
    generators = tuple(generators)
    if generators:
        dim = generators[0].dim
        field = generators[0].field
        for generator in generators:
            if generator.dim != dim:
                raise DimensionMismatch(f"Generators of dimension {generator.dim} and {dim} cannot be mixed")
    elif dim is None or field is None:
        raise DimensionMismatch("Without generators the dimension and field must be given")

    # Vbar columns: every product of generator powers 1..m+1 applied to the all-ones vector
    span = m + 1
    base = field.Ones(dim)
    columns = base.reshape(1, dim)
    for generator in generators:
        powers = np.stack([generator.power(e).diag.view(np.ndarray) for e in range(1, span + 1)])
        columns = (columns[:, np.newaxis, :] * field(powers)[np.newaxis, :, :]).reshape(-1, dim)
    vbar = columns.T

    # V is the sub-grid with every exponent <= m; increment[j] bumps exponent j by one
    N = len(generators)
    if N:
        exponents = np.array(enumerate_exponents(N, m), dtype=np.int64)
        weights = span ** np.arange(N - 1, -1, -1, dtype=np.int64)
        in_bar = (exponents - 1) @ weights
        increment = np.stack([in_bar + weights[j] for j in range(N)])
    else:
        exponents = np.zeros((1, 0), dtype=np.int64)
        in_bar = np.zeros(1, dtype=np.int64)
        increment = np.zeros((0, 1), dtype=np.int64)

    return ProjectionSet(
        V=vbar[:, in_bar],
        Vbar=vbar,
        generators=generators,
        base=base,
        m=m,
        exponents=exponents,
        increment=increment,
    )


@dataclass
class RebasedView:
    """
    The code re-expressed over the contents of a k-node basis.

    ``transform`` is the blocked composite matrix of the basis (shape
    (alpha_sub, k, k)) and ``inverse`` its inverse. ``primed_rows[x]`` holds,
    for a non-basis node x, the diagonals of its primed submatrices, one row
    per basis slot.
    """
    code: object
    basis: tuple
    transform: object
    inverse: object
    primed_rows: dict
    primed_units: list = field(default=None)

    def slot(self, node):
        return self.basis.index(node)

    def primed_submatrix(self, node, slot):
        return DiagonalMatrix(self.primed_rows[node][slot])

    @property
    def primed_submatrices(self):
        """(non-basis node, 1-based basis slot) -> DiagonalMatrix."""
        return {
            (node, slot + 1): self.primed_submatrix(node, slot)
            for node in sorted(self.primed_rows)
            for slot in range(len(self.basis))
        }

    def dense_transform(self):
        return blocked_to_dense(self.transform)

    def dense_inverse(self):
        return blocked_to_dense(self.inverse)

    def has_zero_entries(self):
        return any(np.count_nonzero(rows.view(np.ndarray)) < rows.size for rows in self.primed_rows.values())

    def reencode(self, basis_blocks):
        """Rebuild every non-basis block from the basis contents through the primed submatrices."""
        units = [basis_blocks[node] for node in self.basis]
        blocks = {}
        for node, rows in self.primed_rows.items():
            total = self.code.field.Zeros(units[0].shape)
            for slot, unit in enumerate(units):
                total += DiagonalMatrix(rows[slot]) @ unit
            blocks[node] = total
        return blocks


def _check_nodes(code, nodes):
    for node in nodes:
        if not 1 <= node <= code.n:
            raise UnknownNode(f"Node {node} is not in 1..{code.n}")


def systematic_view(code):
    """View whose basis is the systematic nodes: primed submatrices are the originals."""
    basis = tuple(range(1, code.k + 1))
    eye = code.field.Zeros((code.alpha_sub, code.k, code.k))
    for l in range(code.k):
        eye[:, l, l] = code.field.Ones(code.alpha_sub)
    rows = {code.k + i: code.coefficients[i - 1] for i in range(1, code.params.parity_count + 1)}
    return RebasedView(code=code, basis=basis, transform=eye, inverse=eye.copy(), primed_rows=rows)


def rebase(code, basis, blocks=None):
    """
    Make ``basis`` virtually systematic.

    Args:
        code (CodeInstance): The code
        basis (iterable): k node ids; slots follow ascending id
        blocks (dict, optional): node id -> content; when given, the basis
            contents are kept as the primed units

    Raises:
        SingularBasis: repeated ids, wrong size, or a singular composite
    """
    basis = tuple(basis)
    if len(set(basis)) != len(basis):
        raise SingularBasis(f"Basis {basis} repeats a node, its composite matrix is singular")
    if len(basis) != code.k:
        raise SingularBasis(f"Basis needs {code.k} nodes, got {len(basis)}")
    _check_nodes(code, basis)
    basis = tuple(sorted(basis))

    # Systematic basis needs no inversion
    if basis == tuple(range(1, code.k + 1)):
        view = systematic_view(code)
    else:
        transform = code.composite(basis)
        try:
            inverse = blocked_inverse(transform)
        except Singular as exc:
            raise SingularBasis(f"Basis {basis}: {exc}") from None
        # Primed rows of node x: its encoding rows times the inverse, coordinate by coordinate
        primed_rows = {}
        for node in code.nodes:
            if node in basis:
                continue
            rows = code.encoding_rows(node)
            primed = code.field.Zeros((code.k, code.alpha_sub))
            for slot in range(code.k):
                for l in range(code.k):
                    primed[slot] += rows[l] * inverse[:, l, slot]
            primed_rows[node] = primed
        view = RebasedView(code=code, basis=basis, transform=transform, inverse=inverse, primed_rows=primed_rows)

    if view.has_zero_entries():
        logger.warning("Basis %s has primed submatrices with zero diagonal entries", basis)
    if blocks is not None:
        view.primed_units = [blocks[node] for node in basis]
    return view


def choose_basis(code, failed, helpers):
    """The failed node plus the first k-1 helpers, systematic ids first, ascending."""
    preferred = sorted(helpers, key=lambda node: (not code.params.is_systematic(node), node))
    return tuple(sorted((failed,) + tuple(preferred[:code.k - 1])))


def canonical_helpers(code, failed):
    """
    Default helper set of ``failed``: the d lowest-id survivors.

    Construction and the cluster policy both verify and repair with this set,
    so a canonical rank report covers every repair the cluster makes by default.
    """
    return tuple(node for node in code.nodes if node != failed)[:code.d]


@dataclass
class RepairResult:
    """
    Outcome of one repair.

    ``downloads`` counts subsymbols per helper and per stripe; gamma_measured
    is their total in capacity units (subsymbols / m^N).
    """
    failed: int
    helpers: tuple
    restored: StoredBlock
    downloads: dict
    gamma_measured: Fraction
    basis: tuple = ()
    payloads: dict = field(default_factory=dict)
    stripes: int = 1

    @property
    def total_downloads(self):
        return sum(self.downloads.values())


def _validate_helpers(code, failed, helpers):
    helpers = tuple(helpers)
    _check_nodes(code, (failed,) + helpers)
    if failed in helpers:
        raise WrongHelperShape(f"Helpers {helpers} contain the failed node {failed}")
    if len(set(helpers)) != len(helpers):
        raise WrongHelperShape(f"Helpers {helpers} repeat a node")
    if len(helpers) != code.d:
        raise WrongHelperShape(f"Repair needs d={code.d} helpers, got {len(helpers)}")
    return helpers


def _as_columns(code, data):
    if isinstance(data, StoredBlock):
        data = data.data
    if type(data) is not code.field:
        data = code.field(np.mod(np.asarray(data, dtype=np.int64), code.params.q))
    if data.shape[0] != code.alpha_sub:
        raise DimensionMismatch(f"Block has {data.shape[0]} rows, expected {code.alpha_sub}")
    return data.reshape(code.alpha_sub, -1)


def _repair_in_view(code, view, failed, helpers, blocks):
    failed_slot = view.slot(failed)
    basis_helpers = [node for node in view.basis if node != failed]
    parity_helpers = sorted(node for node in helpers if node not in view.basis)
    interfering = [slot for slot in range(code.k) if slot != failed_slot]

    # Helper contents, as columns of stripes
    missing = [node for node in helpers if node not in blocks]
    if missing:
        raise WrongHelperShape(f"No content supplied for helpers {missing}")
    first = blocks[helpers[0]]
    vector = np.ndim(first.data if isinstance(first, StoredBlock) else first) == 1
    contents = {node: _as_columns(code, blocks[node]) for node in helpers}

    # Generators are ordered parity helper first, then interfering slot
    generators = [view.primed_submatrix(x, slot) for x in parity_helpers for slot in interfering]
    projections = build_projection_sets(generators, code.params.m, dim=code.alpha_sub, field=code.field)

    # Downloads
    payloads = {}
    for node in parity_helpers:
        payloads[node] = projections.V.T @ contents[node]
    for node in basis_helpers:
        payloads[node] = projections.Vbar.T @ contents[node]

    # interference of slot s inside parity column c is the basis helper's Vbar download at increment[j][c]
    cleaned = []
    desired = []
    for a, node in enumerate(parity_helpers):
        equations = payloads[node].copy()
        for b, slot in enumerate(interfering):
            j = a * len(interfering) + b
            equations -= payloads[view.basis[slot]][projections.increment[j]]
        cleaned.append(equations)
        desired.append((view.primed_submatrix(node, failed_slot) @ projections.V).T)

    # Solve the square desired system for the failed content
    try:
        restored = mat_solve(np.concatenate(desired, axis=0), np.concatenate(cleaned, axis=0))
    except Singular as exc:
        raise RankDeficient(f"Desired system for node {failed} is rank deficient: {exc}") from None

    downloads = {node: int(payloads[node].shape[0]) for node in helpers}
    stripes = restored.shape[1]
    if vector:
        restored = restored.reshape(-1)
    logger.debug("Repaired node %d from %s via basis %s, downloads %s", failed, helpers, view.basis, downloads)
    return RepairResult(
        failed=failed,
        helpers=tuple(helpers),
        restored=StoredBlock(failed, code.role(failed), restored),
        downloads=downloads,
        gamma_measured=Fraction(sum(downloads.values()), code.derived.B),
        basis=view.basis,
        payloads=payloads,
        stripes=stripes,
    )


def repair_systematic(code, failed, helpers, blocks):
    """
    Repair systematic node ``failed`` from the other k-1 systematic nodes and d-k+1 parity nodes.

    Args:
        code (CodeInstance): Verified code
        failed (int): Systematic node id
        helpers (iterable): d helper ids of the stated shape
        blocks (dict): helper id -> content (FieldArray or StoredBlock)

    Returns:
        RepairResult
    """
    helpers = _validate_helpers(code, failed, helpers)
    if not code.params.is_systematic(failed):
        raise WrongHelperShape(f"Node {failed} is not systematic")
    systematic = [node for node in helpers if code.params.is_systematic(node)]
    if len(systematic) != code.k - 1:
        raise WrongHelperShape(f"Need {code.k - 1} systematic helpers, got {len(systematic)}")
    return _repair_in_view(code, systematic_view(code), failed, helpers, blocks)


def repair_node(code, failed, helpers, blocks):
    """
    Repair any node from any d survivors by rebasing onto {failed} plus k-1 helpers.

    The restored primed unit of the failed slot is the failed node's content.
    """
    helpers = _validate_helpers(code, failed, helpers)
    basis = choose_basis(code, failed, helpers)
    logger.debug("Node %d repair: helpers %s, basis %s", failed, helpers, basis)
    view = rebase(code, basis)
    return _repair_in_view(code, view, failed, helpers, blocks)


def check_repair_ranks(code, failed, helpers, views=None):
    """
    Rank conditions for one (failed, helper-set) pair.

    Args:
        views (dict, optional): basis -> RebasedView cache shared across calls

    Returns:
        NodeRankCheck
    """
    helpers = _validate_helpers(code, failed, helpers)
    basis = choose_basis(code, failed, helpers)
    try:
        if views is not None and basis in views:
            view = views[basis]
        else:
            view = rebase(code, basis)
            if views is not None:
                views[basis] = view
    except SingularBasis:
        return NodeRankCheck(node=failed, helpers=helpers, basis=basis, desired_rank=0,
                             alpha_sub=code.alpha_sub, containment=False, primed_nonzero=False,
                             reason='singular-basis')

    failed_slot = view.slot(failed)
    parity_helpers = sorted(node for node in helpers if node not in view.basis)
    interfering = [slot for slot in range(code.k) if slot != failed_slot]
    generators = [view.primed_submatrix(x, slot) for x in parity_helpers for slot in interfering]
    projections = build_projection_sets(generators, code.params.m, dim=code.alpha_sub, field=code.field)

    # Every primed block the repair touches must be free of zero entries
    used = generators + [view.primed_submatrix(x, failed_slot) for x in parity_helpers]
    primed_nonzero = not any(matrix.has_zero() for matrix in used)

    # Desired signal must be full rank; interference ranks are recorded for the report
    desired = np.concatenate([view.primed_submatrix(x, failed_slot) @ projections.V for x in parity_helpers], axis=1)
    interference_ranks = {}
    for slot in interfering:
        stacked = np.concatenate([view.primed_submatrix(x, slot) @ projections.V for x in parity_helpers], axis=1)
        interference_ranks[view.basis[slot]] = mat_rank(stacked)

    check = NodeRankCheck(
        node=failed,
        helpers=helpers,
        basis=view.basis,
        desired_rank=mat_rank(desired),
        alpha_sub=code.alpha_sub,
        containment=projections.check_containment(),
        primed_nonzero=primed_nonzero,
        interference_ranks=interference_ranks,
        unaligned_dim=len(parity_helpers) * projections.V.shape[1],
    )
    logger.debug("Rank check node %d helpers %s: desired %d/%d passed=%s",
                 failed, helpers, check.desired_rank, code.alpha_sub, check.passed)
    return check


def verify_repair_ranks(code, helper_sets='canonical', workers=1):
    """
    Verify the repair rank conditions of every node.

    Args:
        helper_sets (str): 'canonical' checks each node's d lowest-id survivors;
            'all' checks every d-subset of its survivors
        workers (int): Threads; report order is node order then helper-set order

    Returns:
        RankReport
    """
    if helper_sets not in ('canonical', 'all'):
        raise ValueError(f"Unknown helper-set mode: {helper_sets}")
    # (failed, helpers) pairs in node order
    pairs = []
    for node in code.nodes:
        survivors = [other for other in code.nodes if other != node]
        if helper_sets == 'all':
            pairs += [(node, helpers) for helpers in itertools.combinations(survivors, code.d)]
        else:
            pairs.append((node, canonical_helpers(code, node)))

    # Rebased views are cached per basis on the serial path only
    views = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(lambda pair: check_repair_ranks(code, *pair), pairs))
    else:
        checks = [check_repair_ranks(code, node, helpers, views) for node, helpers in pairs]
    return RankReport(checks=tuple(checks))
