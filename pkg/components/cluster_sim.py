# components/cluster_sim.py
"""
Simulated storage cluster: byte ingestion, encoded placement on n nodes,
single-failure injection, repair orchestration, data-collector reads and
traffic metrics.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from components.code_core import cutset_point, decode, encode
from components.repair_engine import repair_node
from components.scalar_baseline import repair_42
from models.cluster_state import EVENT_KINDS, IngestHeader, NodeState, TraceRecord
from utils.config import PACKING_LIMIT
from utils.errors import (AlreadyFailed, BadSubset, DoubleFailure, FieldTooSmall, NoFailure, ParseError,
                          WrongHelperShape)
from utils.file_utils import bytes_to_subsymbols, subsymbols_to_bytes

logger = logging.getLogger(__name__)


def lowest_id_policy(cluster, failed):
    """Default helper policy: the d lowest-id Live nodes."""
    return tuple(cluster.live_nodes()[:cluster.code.d])


def explicit_policy(helpers):
    """Helper policy that always answers with the given ids."""
    helpers = tuple(helpers)
    return lambda cluster, failed: helpers


class Cluster:
    """
    n simulated nodes holding the encoded blocks of one payload.

    Mutation is single-writer; concurrent readers should work on ``snapshot()``.

    Args:
        code (CodeInstance): The code in use
        blocks (list): n StoredBlocks, node 1 first
        header (IngestHeader, optional): Present when the payload came from bytes
        stripes (int): Columns per block
    """

    def __init__(self, code, blocks, header=None, stripes=1):
        self.code = code
        self.nodes = {block.node_id: NodeState(block.node_id, block) for block in blocks}
        self.header = header
        self.stripes = stripes
        self.epoch = 0
        self.trace = []

    @classmethod
    def from_units(cls, code, units):
        """Encode raw information units (any field size) and place them, without a byte header."""
        blocks = encode(code, units)
        stripes = 1 if blocks[0].data.ndim == 1 else blocks[0].data.shape[1]
        cluster = cls(code, blocks, stripes=stripes)
        cluster._record('ingest', tuple(cluster.nodes))
        return cluster

    def _record(self, event, nodes, transfers=None, gamma=None):
        self.epoch += 1
        record = TraceRecord(epoch=self.epoch, event=event, nodes=tuple(nodes),
                             transfers=dict(transfers or {}), gamma=gamma, stripes=self.stripes)
        self.trace.append(record)
        logger.info("epoch %d: %s %s", self.epoch, event, list(nodes))
        return record

    def live_nodes(self):
        return [node for node in sorted(self.nodes) if self.nodes[node].is_live]

    def failed_nodes(self):
        return [node for node in sorted(self.nodes) if not self.nodes[node].is_live]

    def blocks(self):
        return {node: state.block for node, state in self.nodes.items() if state.is_live}

    def fail(self, node):
        """Mark ``node`` Failed and drop its block; only one failure may be outstanding."""
        self.code.check_node(node)
        if not self.nodes[node].is_live:
            raise AlreadyFailed(f"Node {node} has already failed")
        if self.failed_nodes():
            raise DoubleFailure(f"Node {self.failed_nodes()[0]} is still failed; only one failure is supported")
        self.nodes[node].mark_failed()
        self._record('fail', (node,))
        return self

    def run_repair(self, policy=None, helpers=None):
        """
        Rebuild the failed node onto a newcomer.

        Args:
            policy (callable, optional): (cluster, failed) -> helper ids; defaults to lowest_id_policy
            helpers (iterable, optional): Explicit helper ids, overriding the policy

        Returns:
            RepairResult
        """
        failed_nodes = self.failed_nodes()
        if not failed_nodes:
            raise NoFailure("No node has failed")
        failed = failed_nodes[0]
        if helpers is None:
            helpers = (policy or lowest_id_policy)(self, failed)
        helpers = tuple(helpers)
        dead = [node for node in helpers if node not in self.nodes or not self.nodes[node].is_live]
        if dead:
            raise WrongHelperShape(f"Helpers {dead} are not Live")

        contents = {node: self.nodes[node].block.data for node in helpers}
        if self.code.is_scalar:
            result = repair_42(failed, contents, code=self.code)
        else:
            result = repair_node(self.code, failed, helpers, contents)

        self.nodes[failed].restore(result.restored)
        self._record('repair', (failed,) + result.helpers, result.downloads, result.gamma_measured)
        return result

    def read_units(self, subset):
        """Decode the information units from k Live nodes."""
        subset = tuple(subset)
        if len(subset) != self.code.k or len(set(subset)) != self.code.k:
            raise BadSubset(f"A read needs {self.code.k} distinct nodes, got {subset}")
        for node in subset:
            if node not in self.nodes or not self.nodes[node].is_live:
                raise BadSubset(f"Node {node} is not Live")
        units = decode(self.code, {node: self.nodes[node].block.data for node in subset})
        self._record('dc_read', subset, {node: self.code.alpha_sub for node in subset})
        return units

    def dc_read(self, subset):
        """Read the original bytes back from k Live nodes."""
        if self.header is None:
            raise ParseError("This cluster holds raw units without an ingest header; use read_units")
        units = self.read_units(subset)
        return unpack_units(self.code, units)

    def snapshot(self):
        """Independent copy for concurrent readers."""
        copy = Cluster(self.code, [], header=self.header, stripes=self.stripes)
        for node, state in self.nodes.items():
            block = state.block
            copy.nodes[node] = NodeState(node, block, state.status)
        copy.epoch = self.epoch
        copy.trace = list(self.trace)
        return copy

    def same_state(self, other):
        """True when both clusters hold the same statuses and block contents."""
        if sorted(self.nodes) != sorted(other.nodes):
            return False
        for node, state in self.nodes.items():
            theirs = other.nodes[node]
            if state.status is not theirs.status:
                return False
            if state.block is not None and state.block != theirs.block:
                return False
        return True

    def trace_lines(self):
        return '\n'.join(record.to_json() for record in self.trace) + '\n'

    @classmethod
    def replay(cls, code, payload, records):
        """
        Re-ingest ``payload`` and re-apply the fail/repair/read events of ``records``.

        Args:
            payload: bytes for byte clusters, or a list of units for unit clusters
        """
        cluster = ingest(payload, code) if isinstance(payload, (bytes, bytearray)) else cls.from_units(code, payload)
        for record in records:
            if record.event == 'fail':
                cluster.fail(record.nodes[0])
            elif record.event == 'repair':
                cluster.run_repair(helpers=record.nodes[1:])
            elif record.event == 'dc_read':
                cluster.read_units(record.nodes)
        return cluster


def ingest(data, code):
    """
    Split bytes into k information units and place their encoding on n Live nodes.

    The payload is the IngestHeader followed by the bytes, packed two bytes per
    subsymbol and zero-padded to whole stripes of k·alpha_sub subsymbols.
    """
    if code.params.q <= PACKING_LIMIT:
        raise FieldTooSmall(f"Byte packing needs q > {PACKING_LIMIT}, got q={code.params.q}")
    header = IngestHeader(length=len(data))
    symbols = bytes_to_subsymbols(header.to_bytes() + bytes(data))

    stripe = code.k * code.alpha_sub
    stripes = max(1, math.ceil(symbols.size / stripe))
    padded = np.zeros(stripes * stripe, dtype=np.int64)
    padded[:symbols.size] = symbols
    layout = padded.reshape(stripes, code.k, code.alpha_sub)
    units = [code.field(np.ascontiguousarray(layout[:, l, :].T)) for l in range(code.k)]

    cluster = Cluster(code, encode(code, units), header=header, stripes=stripes)
    cluster._record('ingest', tuple(cluster.nodes))
    logger.info("Ingested %d bytes as %d stripe(s) of %d subsymbols", len(data), stripes, stripe)
    return cluster


def unpack_units(code, units):
    """Inverse of the ingest packing: units back to the original bytes."""
    stacked = np.stack([np.asarray(unit.view(np.ndarray)).reshape(code.alpha_sub, -1) for unit in units])
    symbols = np.transpose(stacked, (2, 0, 1)).reshape(-1)
    payload = subsymbols_to_bytes(symbols)
    header = IngestHeader.from_bytes(payload)
    return payload[IngestHeader.SIZE:IngestHeader.SIZE + header.length]


@dataclass
class MetricsReport:
    """Per-event totals and per-repair bandwidth against the cutset bound."""
    totals: pd.DataFrame
    repairs: pd.DataFrame
    cutset_gamma: object

    @property
    def total_transfers(self):
        return int(self.totals['subsymbols'].sum())

    def to_text(self):
        lines = ["Events:", self.totals.to_string()]
        if not self.repairs.empty:
            lines += ["", "Repairs:", self.repairs.to_string(index=False)]
        return '\n'.join(lines)


def metrics_report(cluster):
    """Summarize a cluster's trace with pandas."""
    code = cluster.code
    cutset = cutset_point(code.n, code.k, code.d, code.derived.M_units)
    events = pd.DataFrame(
        [
            {
                'event': record.event,
                'epoch': record.epoch,
                'subsymbols': sum(record.transfers.values()) * record.stripes,
            }
            for record in cluster.trace
        ],
        columns=['event', 'epoch', 'subsymbols'],
    )
    totals = (
        events.groupby('event')
        .agg(count=('epoch', 'size'), subsymbols=('subsymbols', 'sum'))
        .reindex(list(EVENT_KINDS), fill_value=0)
    )

    repairs = pd.DataFrame(
        [
            {
                'epoch': record.epoch,
                'failed': record.nodes[0],
                'helpers': ','.join(str(node) for node in record.nodes[1:]),
                'subsymbols_per_stripe': sum(record.transfers.values()),
                'gamma': str(record.gamma),
                'gamma_units': float(record.gamma),
                'cutset_gamma': str(cutset.gamma),
                'naive_gamma': str(cutset.naive_gamma),
            }
            for record in cluster.trace
            if record.event == 'repair'
        ],
        columns=['epoch', 'failed', 'helpers', 'subsymbols_per_stripe', 'gamma', 'gamma_units',
                 'cutset_gamma', 'naive_gamma'],
    )
    return MetricsReport(totals=totals, repairs=repairs, cutset_gamma=cutset.gamma)
