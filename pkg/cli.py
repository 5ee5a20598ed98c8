# cli.py
"""
Command-line front end: construct, verify, simulate, sweep, demo42 and survey.

Exit status is 0 when every verification of the invocation passed, 1 on a
failed verification or domain error, and 2 on usage errors.
"""
import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd

from components.cluster_sim import Cluster, ingest, metrics_report
from components.code_core import construct_code, cutset_point, describe_code, survey_field_size
from components.data_loader import DataLoader
from components.results_export import BandwidthSweep, ResultsExporter
from components.scalar_baseline import build_42, encode_42, repair_42
from models.code_params import CodeParams
from utils.config import PACKING_LIMIT, Settings, configure_logging
from utils.errors import CodeError, Inadmissible
from utils.file_utils import write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def node_list(text):
    """Parse '1,2,5' into (1, 2, 5)."""
    try:
        return tuple(int(part) for part in text.split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None


def int_range(text):
    """Parse 'a:b' (inclusive) or a single integer into a list."""
    try:
        if ':' in text:
            start, stop = (int(part) for part in text.split(':', 1))
            values = list(range(start, stop + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 1:4, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def _add_code_args(parser, settings, required=True):
    parser.add_argument('--n', type=int, required=required)
    parser.add_argument('--k', type=int, required=required)
    parser.add_argument('--d', type=int, required=required)
    parser.add_argument('--m', type=int, default=1)
    parser.add_argument('--q', type=int, default=settings.field_modulus)
    parser.add_argument('--seed', type=int, default=0)


def build_parser(settings=None):
    settings = settings or Settings.from_env()
    parser = argparse.ArgumentParser(prog='msr-codes', description="Exact-repair MSR storage codes")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    parser.add_argument('--workers', type=int, default=settings.workers, help="verification threads")
    sub = parser.add_subparsers(dest='command', required=True)

    construct = sub.add_parser('construct', help="construct and verify a code")
    _add_code_args(construct, settings, required=False)
    construct.add_argument('--out', help="descriptor path (stdout when omitted)")
    construct.add_argument('--max-attempts', type=int, default=settings.max_attempts)
    construct.add_argument('--all-helper-sets', action='store_true')
    construct.add_argument('--explicit', action='store_true', help="write every diagonal entry")
    construct.add_argument('--scalar-baseline', action='store_true', help="the fixed (4,2) GF(5) code")

    verify = sub.add_parser('verify', help="verify a descriptor")
    verify.add_argument('--descriptor', required=True)
    verify.add_argument('--all-helper-sets', action='store_true')
    verify.add_argument('--format', choices=('table', 'records'), default='table')

    simulate = sub.add_parser('simulate', help="ingest, fail, repair and read back")
    simulate.add_argument('--descriptor', required=True)
    simulate.add_argument('--file', help="payload to ingest (seeded random data when omitted)")
    simulate.add_argument('--size', type=int, default=4096, help="random payload size in bytes")
    simulate.add_argument('--seed', type=int, default=0, help="seed of the random payload")
    simulate.add_argument('--fail', type=int, required=True)
    simulate.add_argument('--helpers', type=node_list)
    simulate.add_argument('--trace', help="write the trace as JSON lines")
    simulate.add_argument('--format', choices=('table', 'records'), default='table')
    simulate.add_argument('--csv', help="write the per-repair metrics as CSV")

    sweep = sub.add_parser('sweep', help="repair bandwidth against m")
    sweep.add_argument('--k', type=int, required=True)
    sweep.add_argument('--d', type=int, required=True)
    sweep.add_argument('--m-range', type=int_range, default=[1, 2, 3, 4])
    sweep.add_argument('--plot', help="write a PNG plot")
    sweep.add_argument('--csv', help="write the table as CSV")

    sub.add_parser('demo42', help="walk through the (4,2) GF(5) code")

    survey = sub.add_parser('survey', help="first-attempt construction success over seeds")
    _add_code_args(survey, settings)
    survey.add_argument('--seeds', type=int_range, default=list(range(0, 20)))
    survey.add_argument('--csv')
    return parser


def _emit(text, path=None):
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _summary(code):
    rank = code.rank_report.summary() if code.rank_report is not None else "skipped"
    return f"MDS {code.mds_report.summary()}, repair-ranks {rank}"


def cmd_construct(args):
    if args.scalar_baseline:
        _, code = build_42()
    else:
        if None in (args.n, args.k, args.d):
            raise Inadmissible("construct needs --n, --k and --d (or --scalar-baseline)")
        params = CodeParams(n=args.n, k=args.k, d=args.d, m=args.m, q=args.q, seed=args.seed).validate()
        helper_sets = 'all' if args.all_helper_sets else 'canonical'
        code = construct_code(params, max_attempts=args.max_attempts, helper_sets=helper_sets, workers=args.workers)
    _emit(describe_code(code, explicit=args.explicit or None), args.out)
    print(f"attempts used: {code.attempt + 1}")
    print(_summary(code))
    return EXIT_OK if code.verified else EXIT_FAILED


def cmd_verify(args):
    code, name = DataLoader().load_descriptor(
        args.descriptor, helper_sets='all' if args.all_helper_sets else 'canonical')
    exporter = ResultsExporter()
    if args.format == 'records':
        for record in code.mds_report.to_records():
            print(json.dumps({'check': 'mds', **record}, sort_keys=True))
        if code.rank_report is not None:
            for record in code.rank_report.to_records():
                print(json.dumps({'check': 'repair-rank', **record}, sort_keys=True))
    else:
        print(f"{name}: {code!r}")
        print(exporter.format_table(exporter.mds_by_systematic_count(code.mds_report)))
        if code.rank_report is not None:
            print(exporter.format_table(exporter.rank_table(code.rank_report)))
    print(_summary(code))
    return EXIT_OK if code.verified else EXIT_FAILED


def _random_payload(code, args):
    rng = np.random.default_rng(args.seed)
    if code.params.q > PACKING_LIMIT:
        return rng.bytes(args.size)
    return [code.field(rng.integers(0, code.params.q, size=code.alpha_sub)) for _ in range(code.k)]


def cmd_simulate(args):
    loader = DataLoader()
    code, _ = loader.load_descriptor(args.descriptor, verify=False)
    if args.file:
        payload, _ = loader.load_payload(args.file)
    else:
        payload = _random_payload(code, args)

    if isinstance(payload, bytes):
        cluster = ingest(payload, code)
    else:
        cluster = Cluster.from_units(code, payload)

    original = cluster.nodes[code.check_node(args.fail)].block
    cluster.fail(args.fail)
    result = cluster.run_repair(helpers=args.helpers)
    exact = result.restored == original

    subset = cluster.live_nodes()[:code.k]
    if isinstance(payload, bytes):
        read_ok = cluster.dc_read(subset) == payload
    else:
        read_ok = all(np.array_equal(got, want) for got, want in zip(cluster.read_units(subset), payload))

    cutset = cutset_point(code.n, code.k, code.d, code.derived.M_units)
    print(f"restored: {'exact' if exact else 'MISMATCH'}, γ={result.gamma_measured} units (cutset {cutset.gamma})")
    print(f"read-back from {list(subset)}: {'exact' if read_ok else 'MISMATCH'}")

    report = metrics_report(cluster)
    if args.format == 'records':
        sys.stdout.write(ResultsExporter().trace_records(cluster))
    else:
        print(report.to_text())
    if args.trace:
        write_text(args.trace, ResultsExporter().trace_records(cluster))
    if args.csv:
        data, _ = ResultsExporter().export_csv(report.repairs, args.csv)
        with open(args.csv, 'wb') as f:
            f.write(data)
    return EXIT_OK if exact and read_ok else EXIT_FAILED


def cmd_sweep(args):
    sweep = BandwidthSweep.compute(args.k, args.d, args.m_range)
    exporter = ResultsExporter()
    table = sweep.to_frame()
    print(exporter.format_table(table))
    print(f"monotone: {'yes' if sweep.is_monotone else 'NO'}")
    if args.csv:
        data, _ = exporter.export_csv(table, args.csv)
        with open(args.csv, 'wb') as f:
            f.write(data)
    if args.plot:
        exporter.save_figure(exporter.sweep_figure(sweep), args.plot)
    return EXIT_OK if sweep.is_monotone else EXIT_FAILED


def cmd_demo42(args):
    scalar, code = build_42()
    print(describe_code(code), end='')
    print(f"rank conditions: {scalar.rank_conditions()}")
    a, b = (1, 2), (3, 4)
    blocks = encode_42(a, b, code=code)
    for block in blocks:
        print(f"node {block.node_id} ({block.role}): {[int(x) for x in block.data]}")
    ok = True
    for failed in code.nodes:
        survivors = {block.node_id: block.data for block in blocks if block.node_id != failed}
        result = repair_42(failed, survivors, code=code)
        downloads = [int(result.payloads[node][0]) for node in result.helpers]
        restored = [int(x) for x in result.restored.data]
        exact = result.restored == blocks[failed - 1]
        ok = ok and exact
        print(f"repair node {failed}: downloads {downloads} from {list(result.helpers)} -> {restored} "
              f"({'exact' if exact else 'MISMATCH'}, γ={result.gamma_measured})")
    print(_summary(code))
    return EXIT_OK if ok and code.verified else EXIT_FAILED


def cmd_survey(args):
    survey = survey_field_size(args.n, args.k, args.d, args.m, args.q, args.seeds, workers=args.workers)
    exporter = ResultsExporter()
    table = pd.DataFrame(list(survey.records))
    print(exporter.format_table(table))
    print(f"first-attempt success: {survey.success_rate:.1%} ({survey.failures} failure(s) over {len(table)} seeds)")
    if args.csv:
        data, _ = exporter.export_csv(table, args.csv)
        with open(args.csv, 'wb') as f:
            f.write(data)
    return EXIT_OK


COMMANDS = {
    'construct': cmd_construct,
    'verify': cmd_verify,
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    'demo42': cmd_demo42,
    'survey': cmd_survey,
}


def main(argv=None):
    settings = Settings.from_env()
    args = build_parser(settings).parse_args(argv)
    configure_logging('DEBUG' if args.verbose else settings.log_level)
    try:
        return COMMANDS[args.command](args)
    except Inadmissible as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
