# components/results_export.py
from dataclasses import dataclass
from fractions import Fraction

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from components.repair_engine import gamma_formula  # noqa: E402

DECIMALS = 6


def _decimal(value):
    return f"{float(value):.{DECIMALS}f}"


@dataclass(frozen=True)
class BandwidthSweep:
    """
    Repair bandwidth over a range of m for fixed (k, d).

    Args:
        k, d (int): Code parameters
        gammas (tuple): (m, exact gamma) pairs in increasing m
    """
    k: int
    d: int
    gammas: tuple

    @classmethod
    def compute(cls, k, d, m_values):
        m_values = sorted(set(int(m) for m in m_values))
        return cls(k=k, d=d, gammas=tuple((m, gamma_formula(k, d, m)) for m in m_values))

    @property
    def is_monotone(self):
        """Gamma never increases with m, and strictly decreases whenever there is interference to align."""
        values = [gamma for _, gamma in self.gammas]
        if self.k == 1:
            return all(a == b for a, b in zip(values, values[1:]))
        return all(a > b for a, b in zip(values, values[1:]))

    def to_frame(self):
        rows = []
        for m, gamma in self.gammas:
            excess = gamma - Fraction(self.d)
            rows.append({
                'm': m,
                'gamma': str(gamma),
                'gamma_decimal': _decimal(gamma),
                'gamma_minus_d': str(excess),
                'gamma_minus_d_decimal': _decimal(excess),
            })
        return pd.DataFrame(rows, columns=['m', 'gamma', 'gamma_decimal', 'gamma_minus_d', 'gamma_minus_d_decimal'])


class ResultsExporter:
    """
    Renders verification reports, sweeps and traces as tables, CSV, JSON lines and plots.
    """

    def mds_table(self, report):
        return pd.DataFrame(report.to_records())

    def mds_by_systematic_count(self, report):
        """One row per number of systematic nodes in the subset."""
        rows = [
            {'systematic_nodes': count, 'subsets': total, 'passed': passed}
            for count, (passed, total) in report.by_systematic_count().items()
        ]
        return pd.DataFrame(rows, columns=['systematic_nodes', 'subsets', 'passed'])

    def rank_table(self, report):
        return pd.DataFrame(report.to_records())

    def format_table(self, frame):
        """Aligned text for terminals; empty frames render as a single marker line."""
        if frame.empty:
            return "(no rows)"
        return frame.to_string(index=False)

    def trace_records(self, cluster):
        """The cluster trace as JSON lines, one event per line."""
        return cluster.trace_lines()

    def export_csv(self, frame, filename):
        """
        Export a table as CSV for a download button or a file.

        Args:
            frame (DataFrame): Table to export
            filename (str): Base filename, with or without extension

        Returns:
            tuple: (bytes, filename)
        """
        if not filename.endswith('.csv'):
            filename += '.csv'
        return frame.to_csv(index=False).encode(), filename

    def sweep_figure(self, sweep):
        """Gamma against m, with the cutset value d as a reference line."""
        fig, ax = plt.subplots(figsize=(6, 4))
        ms = [m for m, _ in sweep.gammas]
        ax.plot(ms, [float(gamma) for _, gamma in sweep.gammas], marker='o', label='repair bandwidth')
        ax.axhline(sweep.d, color='grey', linestyle='--', label=f'cutset ({sweep.d} units)')
        ax.set_xlabel('m')
        ax.set_ylabel('gamma (units)')
        ax.set_yscale('log')
        ax.set_title(f'Repair bandwidth, k={sweep.k}, d={sweep.d}')
        ax.legend()
        fig.tight_layout()
        return fig

    def save_figure(self, fig, path):
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return path
