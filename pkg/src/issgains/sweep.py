"""Resolution sweep: per-n spectral constants, Cauchy/supremum aggregation
and the CSV table of the convergence study."""

import os
from dataclasses import dataclass

import numpy as np

from .fattorini import PathSpec
from .gains import frac_control_norm, growth_bound, sector_bound
from .systems import GridSpec, WeightedSpace, build_heat_dirichlet

__all__ = [
    "SweepRecord",
    "LimitEstimate",
    "CSV_HEADER",
    "DEFAULT_SCHEDULE",
    "run_sweep",
    "aggregate",
    "emit_csv",
]

CSV_HEADER = "n,omegan,Dn,AnalphaBnnorm"
DEFAULT_SCHEDULE = (250, 500, 1000, 2000, 4000)


@dataclass(frozen=True)
class SweepRecord:
    n: int
    omega_n: float
    d_n: float
    frac_norm_n: float

    def __post_init__(self):
        for value in (self.omega_n, self.d_n, self.frac_norm_n):
            if not np.isfinite(value):
                raise ValueError(f"non-finite sweep record at n = {self.n}")


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    last_delta: float
    converged: bool
    rule: str


def run_sweep(n_schedule, a: float, alpha: float, path: PathSpec,
              weight_exponent: int = 2, input_norm: str = "max") -> list:
    """One record per resolution: decay rate, resolvent constant and the
    fractional control-operator norm."""
    schedule = list(n_schedule)
    if not schedule:
        raise ValueError("empty resolution schedule")
    if any(m >= n for m, n in zip(schedule, schedule[1:])) or any(n < 2 for n in schedule):
        raise ValueError("schedule must be strictly increasing with every n >= 2")
    records = []
    for n in schedule:
        space = WeightedSpace(GridSpec(n), weight_exponent=weight_exponent, input_norm=input_norm)
        sys = build_heat_dirichlet(n, a, space)
        gb = growth_bound(sys)
        sb = sector_bound(sys, path)
        frac = frac_control_norm(sys, alpha)
        records.append(SweepRecord(n=n, omega_n=gb.omega, d_n=sb.d, frac_norm_n=frac))
    return records


def aggregate(records, tol_omega: float, tol_frac: float,
              mu_p: float = 1.0, mu_e: float = 1.0):
    """Limits for the sweep: terminal values with a Cauchy check for omega
    and the fractional norm, mu-scaled supremum for the resolvent constant."""
    records = list(records)
    if len(records) < 2:
        raise ValueError("need at least 2 records to aggregate")
    omega_delta = abs(records[-1].omega_n - records[-2].omega_n)
    frac_delta = abs(records[-1].frac_norm_n - records[-2].frac_norm_n)
    omega_hat = LimitEstimate(value=records[-1].omega_n, last_delta=omega_delta,
                              converged=omega_delta <= tol_omega, rule="last_value")
    d_sup = max(r.d_n for r in records)
    d_hat = LimitEstimate(value=mu_p * mu_e * d_sup, last_delta=0.0,
                          converged=True, rule="supremum")
    frac_limit = LimitEstimate(value=records[-1].frac_norm_n, last_delta=frac_delta,
                               converged=frac_delta <= tol_frac, rule="last_value")
    return omega_hat, d_hat, frac_limit


def _fmt(value: float) -> str:
    return np.format_float_positional(value, precision=10, unique=False,
                                      fractional=False, trim="k")


def emit_csv(records, destination) -> int:
    """Write the sweep table; floats carry 10 significant digits.

    Returns the number of bytes written.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    lines = [CSV_HEADER]
    for r in records:
        lines.append(f"{r.n},{_fmt(r.omega_n)},{_fmt(r.d_n)},{_fmt(r.frac_norm_n)}")
    payload = ("\n".join(lines) + "\n").encode("ascii")
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(destination)), exist_ok=True)
        with open(destination, "wb") as fh:
            fh.write(payload)
    return len(payload)
