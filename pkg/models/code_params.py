# models/code_params.py
from dataclasses import dataclass
from fractions import Fraction

from utils.config import DEFAULT_FIELD_MODULUS
from utils.errors import Inadmissible
from utils.field_linalg import prime_field


def check_admissible(n, k, d):
    """Raise Inadmissible unless 1 <= k < n and k <= d <= n-1."""
    if not 1 <= k < n:
        raise Inadmissible(f"Need 1 <= k < n, got n={n}, k={k}")
    if not k <= d <= n - 1:
        raise Inadmissible(f"Need k <= d <= n-1, got n={n}, k={k}, d={d}")


@dataclass(frozen=True)
class CodeParams:
    """
    Parameters of an (n, k, d) exact-repair MDS code with subsymbol granularity m.

    Args:
        n (int): Node count
        k (int): Data (systematic) nodes
        d (int): Repair degree, helpers contacted per repair
        m (int): Subsymbol granularity
        q (int): Prime field modulus
        seed (int): 64-bit reproducibility seed
    """
    n: int
    k: int
    d: int
    m: int = 1
    q: int = DEFAULT_FIELD_MODULUS
    seed: int = 0

    def validate(self):
        check_admissible(self.n, self.k, self.d)
        if self.m < 1:
            raise Inadmissible(f"Subsymbol granularity m must be >= 1, got {self.m}")
        if not 0 <= self.seed < 2 ** 64:
            raise Inadmissible(f"Seed must fit in 64 unsigned bits, got {self.seed}")
        prime_field(self.q)
        return self

    @property
    def field(self):
        return prime_field(self.q)

    @property
    def parity_count(self):
        return self.n - self.k

    def is_systematic(self, node):
        return 1 <= node <= self.k

    def to_dict(self):
        return {'n': self.n, 'k': self.k, 'd': self.d, 'm': self.m, 'q': self.q, 'seed': self.seed}

    @classmethod
    def from_dict(cls, data):
        return cls(
            n=int(data['n']),
            k=int(data['k']),
            d=int(data['d']),
            m=int(data.get('m', 1)),
            q=int(data.get('q', DEFAULT_FIELD_MODULUS)),
            seed=int(data.get('seed', 0)),
        )


@dataclass(frozen=True)
class DerivedParams:
    """
    Sizes implied by CodeParams.

    N is the number of interference generators (k-1)(d-k+1), B = m^N the number
    of subsymbols per unit symbol, and a node stores alpha_sub = (d-k+1)·B
    subsymbols.
    """
    N: int
    B: int
    alpha_sub: int
    unit_len: int
    M_sub: int
    M_units: int
    alpha_units: int

    @classmethod
    def from_params(cls, params):
        params.validate()
        alpha_units = params.d - params.k + 1
        exponents = (params.k - 1) * alpha_units
        per_unit = params.m ** exponents
        alpha_sub = alpha_units * per_unit
        return cls(
            N=exponents,
            B=per_unit,
            alpha_sub=alpha_sub,
            unit_len=alpha_sub,
            M_sub=params.k * alpha_sub,
            M_units=params.k * alpha_units,
            alpha_units=alpha_units,
        )

    def to_dict(self):
        return {
            'N': self.N,
            'B': self.B,
            'alpha_sub': self.alpha_sub,
            'unit_len': self.unit_len,
            'M_sub': self.M_sub,
            'M_units': self.M_units,
        }


@dataclass(frozen=True)
class CutsetPoint:
    """Minimum-storage point of the storage/bandwidth tradeoff, in capacity units."""
    k: int
    d: int
    M: Fraction
    alpha: Fraction
    gamma: Fraction
    beta: Fraction

    @property
    def naive_gamma(self):
        """Bandwidth of conventional MDS repair: download the whole file."""
        return self.M

    @property
    def reduction_factor(self):
        return self.naive_gamma / self.gamma

    def to_dict(self):
        return {
            'alpha': str(self.alpha),
            'gamma': str(self.gamma),
            'beta': str(self.beta),
            'naive_gamma': str(self.naive_gamma),
            'reduction_factor': str(self.reduction_factor),
        }
