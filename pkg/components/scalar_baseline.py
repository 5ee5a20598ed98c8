# components/scalar_baseline.py
"""
The fixed (4,2) exact-repair MDS code over GF(5).

Node 1 stores a = (a1, a2), node 2 stores b = (b1, b2), node 3 stores
A1·a + B1·b and node 4 stores A2·a + B2·b. Each of the three survivors sends a
single GF(5) symbol during repair, so a repair downloads 3 symbols.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from components.code_core import encode, verify_code
from components.repair_engine import RepairResult, rebase, systematic_view
from models.code_instance import CodeInstance, NodeRankCheck, RankReport, StoredBlock
from models.code_params import CodeParams
from utils.config import EXPLICIT_GENERATOR, SCHEME_SCALAR
from utils.errors import RankDeficient, Singular, UnknownNode, WrongHelperShape
from utils.field_linalg import DiagonalMatrix, field_matrix, mat_rank, mat_solve, prime_field

logger = logging.getLogger(__name__)

SCALAR_Q = 5


@dataclass(frozen=True)
class Scalar42Code:
    """Encoding submatrices (as diagonals) and the repair projection vector."""
    q: int = SCALAR_Q
    A1: tuple = (1, 2)
    B1: tuple = (1, 1)
    A2: tuple = (2, 1)
    B2: tuple = (1, 1)
    v: tuple = (1, 1)

    def matrix(self, name):
        return DiagonalMatrix(prime_field(self.q)(list(getattr(self, name))))

    @property
    def projection(self):
        return prime_field(self.q)(list(self.v))

    def rank_conditions(self):
        """
        Ranks of the two desired-signal matrices.

        Returns:
            dict: 'node1' -> rank[A1·B1^-1·v, A2·B2^-1·v],
                  'node2' -> rank[B1·A1^-1·v, B2·A2^-1·v]; both must be 2
        """
        A1, B1, A2, B2 = (self.matrix(name) for name in ('A1', 'B1', 'A2', 'B2'))
        v = self.projection
        node1 = np.stack([A1 @ (B1.inverse() @ v), A2 @ (B2.inverse() @ v)], axis=1)
        node2 = np.stack([B1 @ (A1.inverse() @ v), B2 @ (A2.inverse() @ v)], axis=1)
        return {'node1': mat_rank(node1), 'node2': mat_rank(node2)}


def build_42(verify=True):
    """
    The (4,2) code and its CodeInstance embedding (n=4, k=2, d=3, m=1, q=5).

    Returns:
        tuple: (Scalar42Code, CodeInstance)
    """
    scalar = Scalar42Code()
    params = CodeParams(n=4, k=2, d=3, m=1, q=scalar.q, seed=0)
    coefficients = field_matrix(prime_field(scalar.q), [
        [scalar.A1, scalar.B1],
        [scalar.A2, scalar.B2],
    ])
    code = CodeInstance(params, coefficients, scheme=SCHEME_SCALAR, generator=EXPLICIT_GENERATOR)
    if verify:
        verify_code(code)
    return scalar, code


def encode_42(a, b, code=None):
    """Encode the two information units (a1, a2) and (b1, b2)."""
    if code is None:
        _, code = build_42(verify=False)
    field = code.field
    return encode(code, [field_matrix(field, a), field_matrix(field, b)])


def _scalar_view(code, failed):
    """Basis view for a repair of ``failed``: the identity for nodes 1, 2 and the (3,4) rebase otherwise."""
    view = systematic_view(code) if failed in (1, 2) else rebase(code, (3, 4))
    other = next(node for node in view.basis if node != failed)
    return view, other


def _projections(code, view, failed, other):
    """
    Projection vector and desired-signal row of every parity-like survivor.

    Returns:
        dict: node -> (projection, desired row)
    """
    v = code.field.Ones(code.alpha_sub)
    failed_slot, other_slot = view.slot(failed), view.slot(other)
    projections = {}
    for node in sorted(view.primed_rows):
        projection = view.primed_submatrix(node, other_slot).inverse() @ v
        projections[node] = (projection, view.primed_submatrix(node, failed_slot) @ projection)
    return projections


def repair_42(failed, survivor_blocks, code=None):
    """
    Repair one node of the (4,2) code from its three survivors.

    Systematic repairs project every survivor onto v, after undoing the
    interfering unit's submatrix at the parity nodes. Parity repairs first
    remap nodes 3 and 4 into the basis (primed units), which turns nodes 1
    and 2 into parity-like nodes, then apply the same procedure.

    Args:
        failed (int): Node id in 1..4
        survivor_blocks (dict): node id -> 2-subsymbol content of every survivor

    Returns:
        RepairResult: one downloaded symbol per survivor
    """
    if code is None:
        _, code = build_42(verify=False)
    if failed not in (1, 2, 3, 4):
        raise UnknownNode(f"The (4,2) code has no node {failed}")
    survivors = tuple(node for node in range(1, 5) if node != failed)
    if tuple(sorted(survivor_blocks)) != survivors:
        raise WrongHelperShape(f"Repair of node {failed} needs exactly the survivors {survivors}")

    view, other = _scalar_view(code, failed)
    v = code.field.Ones(code.alpha_sub)

    first = survivor_blocks[survivors[0]]
    vector = np.ndim(first.data if isinstance(first, StoredBlock) else first) == 1
    contents = {}
    for node, block in survivor_blocks.items():
        data = block.data if isinstance(block, StoredBlock) else block
        if type(data) is not code.field:
            data = field_matrix(code.field, data)
        contents[node] = data.reshape(code.alpha_sub, -1)

    payloads = {other: v @ contents[other]}
    rows = []
    cleaned = []
    for node, (projection, row) in _projections(code, view, failed, other).items():
        payloads[node] = projection @ contents[node]
        cleaned.append(payloads[node] - payloads[other])
        rows.append(row)

    try:
        restored = mat_solve(np.stack(rows), np.stack(cleaned))
    except Singular as exc:
        raise RankDeficient(f"(4,2) repair of node {failed} failed: {exc}") from None
    if vector:
        restored = restored.reshape(-1)

    ordered = {node: payloads[node] for node in survivors}
    logger.debug("(4,2) repair of node %d downloads %s", failed,
                 {node: [int(x) for x in values] for node, values in ordered.items()})
    return RepairResult(
        failed=failed,
        helpers=survivors,
        restored=StoredBlock(failed, code.role(failed), restored),
        downloads={node: 1 for node in survivors},
        gamma_measured=Fraction(len(survivors), code.derived.B),
        basis=view.basis,
        payloads=ordered,
        stripes=restored.shape[1] if restored.ndim == 2 else 1,
    )


def verify_scalar_ranks(code):
    """
    Rank conditions of the (4,2) repair procedure for all four nodes.

    After projection every parity-like survivor leaves the same interference
    v from the other basis unit, so each interference rank is 1.

    Returns:
        RankReport
    """
    checks = []
    for failed in code.nodes:
        view, other = _scalar_view(code, failed)
        projections = _projections(code, view, failed, other)
        rows = np.stack([row for _, row in projections.values()])
        interference = np.stack([
            view.primed_submatrix(node, view.slot(other)) @ projection
            for node, (projection, _) in projections.items()
        ])
        checks.append(NodeRankCheck(
            node=failed,
            helpers=tuple(node for node in code.nodes if node != failed),
            basis=view.basis,
            desired_rank=mat_rank(rows),
            alpha_sub=code.alpha_sub,
            containment=True,
            primed_nonzero=not view.has_zero_entries(),
            interference_ranks={other: mat_rank(interference)},
            unaligned_dim=len(projections),
        ))
    return RankReport(checks=tuple(checks))
