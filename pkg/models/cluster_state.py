# models/cluster_state.py
import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from utils.config import ZERO_PAD_SCHEME
from utils.errors import ParseError

EVENT_KINDS = ('ingest', 'fail', 'repair', 'dc_read')


class NodeStatus(Enum):
    LIVE = 'Live'
    FAILED = 'Failed'


class NodeState:
    """
    State of one simulated node.

    Args:
        node_id (int): Node id in 1..n
        block (StoredBlock, optional): Content, absent while Failed
    """

    def __init__(self, node_id, block=None, status=NodeStatus.LIVE):
        self.node_id = node_id
        self.status = status
        self.block = block

    @property
    def is_live(self):
        return self.status is NodeStatus.LIVE

    def mark_failed(self):
        self.status = NodeStatus.FAILED
        self.block = None

    def restore(self, block):
        self.status = NodeStatus.LIVE
        self.block = block

    def to_dict(self):
        return {
            'id': self.node_id,
            'status': self.status.value,
            'rows': None if self.block is None else int(self.block.data.shape[0]),
        }


@dataclass(frozen=True)
class IngestHeader:
    """Prefix of every ingested payload: original byte length and padding scheme."""
    length: int
    padding: int = ZERO_PAD_SCHEME

    FORMAT = '<QH'
    SIZE = struct.calcsize('<QH')

    def to_bytes(self):
        return struct.pack(self.FORMAT, self.length, self.padding)

    @classmethod
    def from_bytes(cls, data):
        if len(data) < cls.SIZE:
            raise ParseError("Payload is shorter than its ingest header")
        length, padding = struct.unpack(cls.FORMAT, bytes(data[:cls.SIZE]))
        if padding != ZERO_PAD_SCHEME:
            raise ParseError(f"Unknown padding scheme {padding}")
        if length > len(data) - cls.SIZE:
            raise ParseError(f"Header announces {length} bytes but only {len(data) - cls.SIZE} follow")
        return cls(length=length, padding=padding)


@dataclass
class TraceRecord:
    """
    One cluster event.

    ``transfers`` maps a source node to the subsymbols it sent per stripe;
    ``gamma`` is the repair bandwidth in capacity units (repairs only).
    """
    epoch: int
    event: str
    nodes: tuple
    transfers: dict = field(default_factory=dict)
    gamma: Fraction = None
    stripes: int = 1

    def to_dict(self):
        return {
            'epoch': self.epoch,
            'event': self.event,
            'nodes': list(self.nodes),
            'transfers': {str(node): count for node, count in sorted(self.transfers.items())},
            'gamma': None if self.gamma is None else str(self.gamma),
            'stripes': self.stripes,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if data.get('event') not in EVENT_KINDS:
            raise ParseError(f"Unknown trace event: {data.get('event')!r}")
        return cls(
            epoch=int(data['epoch']),
            event=data['event'],
            nodes=tuple(int(node) for node in data['nodes']),
            transfers={int(node): int(count) for node, count in data.get('transfers', {}).items()},
            gamma=None if data.get('gamma') is None else Fraction(data['gamma']),
            stripes=int(data.get('stripes', 1)),
        )

    @classmethod
    def from_json(cls, line):
        try:
            return cls.from_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"Malformed trace record: {exc}") from exc
