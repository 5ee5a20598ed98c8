# tests/test_results_export.py
from fractions import Fraction

from components.cluster_sim import ingest
from components.results_export import BandwidthSweep, ResultsExporter
from models.cluster_state import TraceRecord


def test_sweep_table_values():
    sweep = BandwidthSweep.compute(3, 4, range(1, 5))
    table = sweep.to_frame()
    assert list(table['m']) == [1, 2, 3, 4]
    assert list(table['gamma'][:2]) == ['34', '97/8']
    assert table['gamma_minus_d'][0] == '30'
    assert table['gamma_decimal'][1] == '12.125000'
    assert sweep.is_monotone


def test_sweep_approaches_cutset():
    sweep = BandwidthSweep.compute(3, 4, [64, 1, 8])
    assert [m for m, _ in sweep.gammas] == [1, 8, 64]
    assert sweep.gammas[-1][1] - 4 <= Fraction(13, 100)


def test_sweep_without_interference_is_constant():
    sweep = BandwidthSweep.compute(1, 3, range(1, 6))
    assert set(sweep.to_frame()['gamma']) == {'3'}
    assert sweep.is_monotone


def test_reports_as_tables(code_634):
    exporter = ResultsExporter()
    grouped = exporter.mds_by_systematic_count(code_634.mds_report)
    assert list(grouped['systematic_nodes']) == [0, 1, 2, 3]
    assert list(grouped['subsets']) == [1, 9, 9, 1]
    assert len(exporter.rank_table(code_634.rank_report)) == 6
    assert 'subset' in exporter.format_table(exporter.mds_table(code_634.mds_report))


def test_csv_export_and_plot(tmp_path):
    exporter = ResultsExporter()
    sweep = BandwidthSweep.compute(3, 4, range(1, 4))
    data, name = exporter.export_csv(sweep.to_frame(), 'sweep')
    assert name == 'sweep.csv'
    assert data.decode().splitlines()[0] == 'm,gamma,gamma_decimal,gamma_minus_d,gamma_minus_d_decimal'
    path = exporter.save_figure(exporter.sweep_figure(sweep), tmp_path / 'sweep.png')
    assert path.stat().st_size > 0


def test_trace_records_are_json_lines(code_634):
    cluster = ingest(b'trace me' * 20, code_634)
    cluster.fail(6)
    cluster.run_repair()
    lines = ResultsExporter().trace_records(cluster).splitlines()
    records = [TraceRecord.from_json(line) for line in lines]
    assert [record.event for record in records] == ['ingest', 'fail', 'repair']
    assert [record.epoch for record in records] == [1, 2, 3]
    assert records[-1].nodes[0] == 6
