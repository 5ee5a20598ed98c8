# components/code_core.py
"""
Code parameterization, random construction of the diagonal encoding
submatrices with verify-and-resample, encoding, decoding from any k nodes,
MDS verification, the cutset point, and the descriptor text format.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from models.code_instance import CodeInstance, InformationUnit, MdsReport, StoredBlock, SubsetCheck
from models.code_params import CodeParams, CutsetPoint, DerivedParams, check_admissible
from utils.config import EXPLICIT_GENERATOR, GENERATOR_ID, SCHEME_ALIGNMENT, Settings
from utils.errors import BadSubset, ConstructionFailed, Inadmissible, LengthMismatch, ParseError
from utils.field_linalg import blocked_inverse, blocked_rank
from utils.file_utils import format_descriptor, parse_descriptor

logger = logging.getLogger(__name__)


def derive_params(params):
    """Sizes implied by ``params``; raises Inadmissible for inadmissible (n, k, d)."""
    return DerivedParams.from_params(params)


def cutset_point(n, k, d, M):
    """
    Storage cost, repair bandwidth and per-link bandwidth at the minimum-storage point.

    Args:
        n, k, d (int): Code parameters
        M: File size in capacity units (int or Fraction)

    Returns:
        CutsetPoint: alpha = M/k, gamma = (M/k)·d/(d-k+1), beta = gamma/d, exact
    """
    check_admissible(n, k, d)
    M = Fraction(M)
    if M <= 0:
        raise Inadmissible(f"File size must be positive, got {M}")
    alpha = M / k
    gamma = alpha * d / (d - k + 1)
    return CutsetPoint(k=k, d=d, M=M, alpha=alpha, gamma=gamma, beta=gamma / d)


def draw_coefficients(params, attempt):
    """
    Draw every diagonal entry i.i.d. uniform from {1, ..., q-1}.

    The stream is a Philox counter-based generator keyed by (seed, attempt),
    so the same pair always reproduces the same submatrices.
    """
    derived = DerivedParams.from_params(params)
    bit_generator = np.random.Philox(np.random.SeedSequence([params.seed, attempt]))
    rng = np.random.Generator(bit_generator)
    shape = (params.parity_count, params.k, derived.alpha_sub)
    return params.field(rng.integers(1, params.q, size=shape, dtype=np.int64))


def verify_mds(code, workers=1):
    """
    Check that every k-subset of nodes has a full-rank composite matrix.

    Failures are reported, not raised. Subsets are listed in lexicographic
    order whatever the number of worker threads.
    """
    subsets = list(itertools.combinations(code.nodes, code.k))
    full_rank = code.k * code.alpha_sub

    def check(subset):
        rank = blocked_rank(code.composite(subset))
        logger.debug("MDS subset %s rank %d/%d", subset, rank, full_rank)
        return SubsetCheck(
            subset=subset,
            rank=rank,
            full_rank=full_rank,
            systematic_count=sum(code.params.is_systematic(node) for node in subset),
        )

    # pool.map keeps subset order
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(check, subsets))
    else:
        checks = [check(subset) for subset in subsets]
    return MdsReport(checks=tuple(checks))


def verify_code(code, helper_sets='canonical', workers=1):
    """
    Run MDS and repair-rank verification and attach both reports to ``code``.

    The rank checks are skipped when the MDS check already failed.

    Returns:
        str or None: name of the first failing condition
    """
    from components.repair_engine import verify_repair_ranks
    from components.scalar_baseline import verify_scalar_ranks

    # MDS first, then the repair rank conditions
    code.mds_report = verify_mds(code, workers=workers)
    if not code.mds_report.passed:
        code.rank_report = None
        return 'mds'
    # The scalar baseline has its own projection-vector rank conditions
    if code.is_scalar:
        code.rank_report = verify_scalar_ranks(code)
    else:
        code.rank_report = verify_repair_ranks(code, helper_sets=helper_sets, workers=workers)
    if not code.rank_report.passed:
        return code.rank_report.failures[0].failed_condition
    return None


def try_attempt(params, attempt, helper_sets='canonical', workers=1):
    """Build and verify the instance of one (seed, attempt) pair without resampling."""
    code = CodeInstance(params, draw_coefficients(params, attempt), attempt=attempt)
    failed = verify_code(code, helper_sets=helper_sets, workers=workers)
    return code, failed


def construct_code(params, max_attempts=None, helper_sets='canonical', workers=1):
    """
    Construct a verified code, resampling on verification failure.

    Args:
        params (CodeParams): Admissible parameters
        max_attempts (int, optional): Defaults to the configured 32
        helper_sets (str): 'canonical' or 'all', forwarded to verify_repair_ranks
        workers (int): Threads used by verification

    Returns:
        CodeInstance: an instance whose MDS and repair-rank reports pass

    Raises:
        ConstructionFailed: when every attempt fails
    """
    params.validate()
    if max_attempts is None:
        max_attempts = Settings.from_env().max_attempts

    # Draw, verify, and resample with the next attempt counter on failure
    failed = None
    for attempt in range(max_attempts):
        code, failed = try_attempt(params, attempt, helper_sets=helper_sets, workers=workers)
        if failed is None:
            logger.info("Constructed (%d,%d,%d) m=%d q=%d seed=%d at attempt %d",
                        params.n, params.k, params.d, params.m, params.q, params.seed, attempt)
            return code
        logger.warning("Attempt %d for seed %d failed %s; resampling", attempt, params.seed, failed)

    raise ConstructionFailed(
        f"No verified code after {max_attempts} attempts (last failure: {failed})",
        last_condition=failed,
        attempts=max_attempts,
    )


def _field_data(code, data):
    if isinstance(data, InformationUnit) or isinstance(data, StoredBlock):
        data = data.data
    if type(data) is code.field:
        return data
    return code.field(np.mod(np.asarray(data, dtype=np.int64), code.params.q))


def encode(code, units):
    """
    Encode k information units into n stored blocks.

    Node l stores unit l verbatim; node k+i stores sum_l G_l^(i)·w_l, which is
    elementwise because every G is diagonal. Units may carry several stripes as
    columns.
    """
    if len(units) != code.k:
        raise LengthMismatch(f"Expected {code.k} information units, got {len(units)}")
    data = [_field_data(code, unit) for unit in units]
    shape = data[0].shape
    for unit in data:
        if unit.shape[0] != code.alpha_sub or unit.shape != shape:
            raise LengthMismatch(f"Units must all have {code.alpha_sub} rows and equal shape, got {unit.shape}")

    # Systematic nodes, then one parity block per parity node
    blocks = [StoredBlock(l, code.role(l), data[l - 1]) for l in range(1, code.k + 1)]
    for i in range(1, code.params.parity_count + 1):
        parity = code.field.Zeros(shape)
        for l in range(code.k):
            parity += code.submatrix(i, l + 1) @ data[l]
        blocks.append(StoredBlock(code.k + i, code.role(code.k + i), parity))
    return blocks


def decode(code, node_blocks):
    """
    Recover the k information units from the blocks of any k nodes.

    Args:
        code (CodeInstance): The code
        node_blocks (dict): node id -> block data (or StoredBlock)

    Returns:
        list: k FieldArrays, unit 1 first
    """
    nodes = sorted(node_blocks)
    if len(nodes) != code.k or len(set(nodes)) != code.k:
        raise BadSubset(f"Decoding needs exactly {code.k} distinct nodes, got {nodes}")
    for node in nodes:
        code.check_node(node)
    data = [_field_data(code, node_blocks[node]) for node in nodes]

    if all(code.params.is_systematic(node) for node in nodes):
        return data

    # Invert the composite per coordinate and apply it to the stacked blocks
    inverse = blocked_inverse(code.composite(nodes))
    stacked = np.stack([block.view(np.ndarray) for block in data], axis=0)
    stacked = code.field(stacked)
    units = code.field.Zeros(stacked.shape)
    for t in range(code.alpha_sub):
        units[:, t] = inverse[t] @ stacked[:, t]
    return [units[l] for l in range(code.k)]


@dataclass(frozen=True)
class FieldSurvey:
    """First-attempt construction outcomes over a seed range."""
    params: CodeParams
    records: tuple

    @property
    def success_rate(self):
        if not self.records:
            return 0.0
        return sum(record['first_attempt_passed'] for record in self.records) / len(self.records)

    @property
    def failures(self):
        return sum(not record['first_attempt_passed'] for record in self.records)


def survey_field_size(n, k, d, m, q, seeds, workers=1):
    """
    Measure how often the first construction attempt verifies, seed by seed.

    Returns:
        FieldSurvey: one record per seed with the failing condition, if any
    """
    records = []
    for seed in seeds:
        params = CodeParams(n=n, k=k, d=d, m=m, q=q, seed=seed).validate()
        _, failed = try_attempt(params, 0, workers=workers)
        records.append({'seed': seed, 'first_attempt_passed': failed is None, 'failed_condition': failed or ''})
    survey = FieldSurvey(params=CodeParams(n=n, k=k, d=d, m=m, q=q), records=tuple(records))
    logger.info("Field survey q=%d: %.1f%% first-attempt success over %d seeds",
                q, 100 * survey.success_rate, len(records))
    return survey


def describe_code(code, explicit=None):
    """
    Render a code as descriptor text.

    Seeded codes are written as (generator, seed, attempt) only unless
    ``explicit`` is set; explicitly built codes always carry their diagonals.
    """
    if explicit is None:
        explicit = code.generator != GENERATOR_ID
    fields = {
        'scheme': code.scheme,
        'n': code.n,
        'k': code.k,
        'd': code.d,
        'm': code.params.m,
        'q': code.params.q,
        'generator': code.generator,
        'seed': code.params.seed,
        'attempt': code.attempt,
    }
    diagonals = None
    if explicit:
        diagonals = {
            (i, l): [int(value) for value in code.coefficients[i - 1, l - 1]]
            for i in range(1, code.params.parity_count + 1)
            for l in range(1, code.k + 1)
        }
    return format_descriptor(fields, diagonals)


def load_code(text, verify=True, helper_sets='canonical'):
    """
    Rebuild a CodeInstance from descriptor text.

    Raises:
        ParseError: malformed or truncated text
        VersionMismatch: unsupported descriptor version
        Inadmissible: well-formed text naming inadmissible parameters
    """
    fields, diagonals = parse_descriptor(text)
    # Inadmissible parameters keep their own error; anything else malformed is a ParseError
    try:
        params = CodeParams.from_dict(fields).validate()
        attempt = int(fields.get('attempt', 0))
    except Inadmissible:
        raise
    except (KeyError, ValueError) as exc:
        raise ParseError(f"Invalid descriptor parameters: {exc}") from exc
    generator = fields['generator']
    scheme = fields.get('scheme', SCHEME_ALIGNMENT)

    # Coefficients come from the diagonal section or are redrawn from (seed, attempt)
    derived = DerivedParams.from_params(params)
    if diagonals is not None:
        coefficients = params.field.Zeros((params.parity_count, params.k, derived.alpha_sub))
        expected = {(i, l) for i in range(1, params.parity_count + 1) for l in range(1, params.k + 1)}
        if set(diagonals) != expected:
            raise ParseError("Diagonal section does not list every (parity, unit) pair exactly once")
        for (i, l), values in diagonals.items():
            if len(values) != derived.alpha_sub:
                raise ParseError(f"Diagonal ({i},{l}) has {len(values)} entries, expected {derived.alpha_sub}")
            if any(not 0 < value < params.q for value in values):
                raise ParseError(f"Diagonal ({i},{l}) has entries outside 1..q-1")
            coefficients[i - 1, l - 1] = params.field(values)
    elif generator == GENERATOR_ID:
        coefficients = draw_coefficients(params, attempt)
    elif generator == EXPLICIT_GENERATOR:
        raise ParseError("Explicit descriptor is missing its diagonal section")
    else:
        raise ParseError(f"Unknown generator: {generator}")

    code = CodeInstance(params, coefficients, scheme=scheme, generator=generator, attempt=attempt)
    if verify:
        verify_code(code, helper_sets=helper_sets)
    return code
