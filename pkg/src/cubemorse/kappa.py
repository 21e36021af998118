"""Sublinear gauges and their numerical validation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

KINDS = ("constant_one", "log_power", "power", "table")


class KappaError(ValueError):
    def __init__(self, message: str, witness: float | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SublinearFunction:
    """A gauge ``t -> kappa(t)`` on ``[0, inf)``.

    kinds:
      * ``constant_one``: 1
      * ``log_power``: ``log2(2 + t) ** param``
      * ``power``: ``(1 + t) ** param``
      * ``table``: piecewise-linear through ``table`` (t, value) rows,
        extended past the last row with the last slope

    ``exponent`` raises the whole thing to a power (see :func:`power`).
    """

    kind: str
    param: float = 1.0
    table: tuple[tuple[float, float], ...] = field(default=(), repr=False)
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KappaError(f"unknown gauge kind {self.kind!r}")
        if self.kind == "power" and not 0 < self.param < 1:
            raise KappaError("power gauge needs an exponent in (0, 1)")
        if self.kind == "log_power" and self.param < 1:
            raise KappaError("log_power gauge needs p >= 1")
        if self.kind == "table":
            ts = [r[0] for r in self.table]
            if len(ts) < 2 or ts[0] != 0 or any(b <= a for a, b in zip(ts, ts[1:])):
                raise KappaError("table gauge needs >= 2 rows with strictly increasing t starting at 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant_one":
            v = np.ones_like(t)
        elif self.kind == "log_power":
            v = np.log2(2.0 + t) ** self.param
        elif self.kind == "power":
            v = (1.0 + t) ** self.param
        else:
            tab = np.array(self.table, dtype=float)
            v = np.interp(t, tab[:, 0], tab[:, 1])
            slope = (tab[-1, 1] - tab[-2, 1]) / (tab[-1, 0] - tab[-2, 0])
            beyond = t > tab[-1, 0]
            v = np.where(beyond, tab[-1, 1] + slope * (t - tab[-1, 0]), v)
        if self.exponent != 1.0:
            v = v ** self.exponent
        return v if v.ndim else float(v)

    @property
    def label(self) -> str:
        base = {
            "constant_one": "one",
            "log_power": f"log:{self.param:g}",
            "power": f"pow:{self.param:g}",
            "table": f"table[{len(self.table)}]",
        }[self.kind]
        return base if self.exponent == 1.0 else f"({base})^{self.exponent:g}"

    def to_json(self) -> dict:
        d = {"kind": self.kind, "param": self.param, "exponent": self.exponent, "label": self.label}
        if self.kind == "table":
            d["table"] = [list(r) for r in self.table]
        return d


ONE = SublinearFunction("constant_one")
SQRT = SublinearFunction("power", 0.5)
LOG2 = SublinearFunction("log_power", 1.0)


def power(kappa: SublinearFunction, p: float) -> SublinearFunction:
    """Pointwise ``kappa ** p``; callers should re-run :func:`validate_kappa`."""
    if p <= 0:
        raise KappaError("power needs p > 0")
    return replace(kappa, exponent=kappa.exponent * p)


def linear_table(t_max: float = 10.0) -> SublinearFunction:
    """``1 + t`` as a table gauge; handy as a known non-sublinear input."""
    return SublinearFunction("table", table=((0.0, 1.0), (float(t_max), 1.0 + t_max)))


def load_table(path: str | Path) -> SublinearFunction:
    rows = np.loadtxt(path, ndmin=2)
    if rows.shape[1] != 2:
        raise KappaError("table file must have two columns")
    return SublinearFunction("table", table=tuple((float(a), float(b)) for a, b in rows))


def parse_kappa(spec: str) -> SublinearFunction:
    """``one | sqrt | log2 | log:p | pow:s | table:FILE``."""
    aliases = {"one": ONE, "sqrt": SQRT, "log2": LOG2}
    if spec in aliases:
        return aliases[spec]
    kind, _, arg = spec.partition(":")
    if kind == "log":
        return SublinearFunction("log_power", float(arg or 1))
    if kind == "pow":
        return SublinearFunction("power", float(arg))
    if kind == "table":
        return load_table(arg)
    raise KappaError(f"cannot parse gauge {spec!r}; expected one|sqrt|log2|log:p|pow:s|table:FILE")


def sample_grid(horizon: float, points: int = 400) -> np.ndarray:
    """0 plus a geometric grid from 1e-3 to ``horizon``."""
    return np.concatenate([[0.0], np.geomspace(1e-3, horizon, points)])


@dataclass
class KappaReport:
    valid: bool
    at_least_one: bool
    nondecreasing: bool
    concave_tail: bool
    concave_everywhere: bool
    sublinear_ratio: float
    tolerance: float
    horizon: float
    witness: float | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def validate_kappa(
    kappa: SublinearFunction, horizon: float = 1e6, tolerance: float = 0.01, points: int = 400
) -> KappaReport:
    """Check the gauge properties on a geometric sample grid.

    Requirements: kappa >= 1 and nondecreasing on the grid, concave on the
    tail ``t >= sqrt(horizon)``, and ``kappa(horizon) / horizon <= tolerance``.
    Whole-grid concavity is reported but not required: ``log2(2+t)**3`` bends
    the wrong way below t ~ 5.4 yet is a standard sublinear gauge.
    """
    if horizon <= 0:
        raise KappaError("horizon must be positive")
    t = sample_grid(horizon, points)
    v = np.asarray(kappa(t), dtype=float)
    eps = 1e-9 * np.maximum(1.0, np.abs(v))

    def first_bad(mask) -> float | None:
        bad = np.flatnonzero(mask)
        return float(t[bad[0]]) if len(bad) else None

    w_one = first_bad(v < 1.0 - eps)
    w_mono = first_bad(np.concatenate([[False], np.diff(v) < -eps[1:]]))
    slopes = np.diff(v) / np.diff(t)
    rising = np.diff(slopes) > 1e-9 * np.maximum(1.0, np.abs(slopes[1:]))
    tail = t[1:-1] >= np.sqrt(horizon)
    w_conc_tail = first_bad(np.concatenate([[False], rising & tail, [False]]))
    concave_all = not rising.any()
    ratio = float(v[-1] / t[-1])

    reasons = []
    witness = None
    for ok, w, why in (
        (w_one is None, w_one, "kappa < 1"),
        (w_mono is None, w_mono, "kappa decreases"),
        (w_conc_tail is None, w_conc_tail, "kappa not concave on the tail"),
        (ratio <= tolerance, float(horizon), "kappa(T)/T above tolerance"),
    ):
        if not ok:
            reasons.append(why)
            witness = w if witness is None else witness
    return KappaReport(
        valid=not reasons,
        at_least_one=w_one is None,
        nondecreasing=w_mono is None,
        concave_tail=w_conc_tail is None,
        concave_everywhere=concave_all,
        sublinear_ratio=ratio,
        tolerance=tolerance,
        horizon=float(horizon),
        witness=witness,
        reason="; ".join(reasons),
    )


def require_valid(kappa: SublinearFunction, **kw) -> KappaReport:
    rep = validate_kappa(kappa, **kw)
    if not rep.valid:
        raise KappaError(f"gauge {kappa.label} rejected: {rep.reason}", rep.witness)
    return rep


def sublinear_constants(
    kappa: SublinearFunction, d0: float, horizon: float = 1e6, points: int = 2000
) -> tuple[float, float]:
    """Sampled constants ``(D1, D2)`` with ``D1 k(x) <= k(y) <= D2 k(x)``.

    Ranges over ``|x - y| <= d0 * k(x)``.  Since k is nondecreasing the
    extremes over y sit at the ends of that window, so each sampled x costs
    two evaluations.
    """
    if d0 < 0:
        raise KappaError("D0 must be nonnegative")
    x = sample_grid(horizon, points)
    kx = np.asarray(kappa(x), dtype=float)
    lo = np.maximum(0.0, x - d0 * kx)
    hi = x + d0 * kx
    return float(np.min(kappa(lo) / kx)), float(np.max(kappa(hi) / kx))
