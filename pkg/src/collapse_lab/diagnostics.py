"""Profiling the volume/injectivity ratio along a collapsing sequence and classifying it."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DomainError
from .geometry import (
    DEFAULT_SAMPLES,
    BergerSphere,
    FlatTorus,
    Member,
    ball_volume,
)
from .gh import epsilon_net
from .rules import Rule, parse_rule

Family = Literal["torus", "berger"]
PROFILE_COLUMNS = ("index", "inj", "vol_ball", "ratio", "diam")

DEFAULT_THRESHOLD = 0.1
DEFAULT_FIT_TOLERANCE = 0.2
DECAY_SLOPE = -0.5
MIN_ROWS = 5


class ProfileError(DomainError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"index {index}: {cause}")
        self.index = index


@dataclass(frozen=True)
class SequenceSpec:
    family: Family
    rule: str
    index_range: tuple[int, int]
    r: float
    volume_mode: Literal["exact", "monte_carlo"] = "exact"
    samples: int = DEFAULT_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if self.family not in ("torus", "berger"):
            raise DomainError(f"unknown family {self.family!r}")
        lo, hi = self.index_range
        if lo < 1 or hi < lo:
            raise DomainError(f"index range {self.index_range} is empty")
        if not self.r > 0:
            raise DomainError(f"ball radius must be positive, got {self.r!r}")
        if self.volume_mode not in ("exact", "monte_carlo"):
            raise DomainError(f"unknown volume mode {self.volume_mode!r}")
        parsed = parse_rule(self.rule)
        if self.family == "berger" and len(parsed) != 1:
            raise DomainError("a Berger rule gives exactly one parameter (the fibre scale)")
        object.__setattr__(self, "index_range", (int(lo), int(hi)))

    @property
    def parsed_rule(self) -> Rule:
        return parse_rule(self.rule)

    @property
    def indices(self) -> range:
        return range(self.index_range[0], self.index_range[1] + 1)

    def member(self, i: int) -> Member:
        params = self.parsed_rule(i)
        try:
            if self.family == "torus":
                return FlatTorus(params)
            return BergerSphere(params[0])
        except DomainError as exc:
            raise ProfileError(i, exc) from exc


@dataclass(frozen=True)
class ProfileRow:
    index: int
    inj: float
    vol_ball: float
    ratio: float
    diam: float


@dataclass(frozen=True)
class CollapseProfile:
    rows: tuple[ProfileRow, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows])

    def to_dict(self) -> dict:
        return {"rows": [asdict(row) for row in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CollapseProfile":
        return cls(tuple(ProfileRow(**row) for row in data["rows"]))

    @classmethod
    def from_json(cls, text: str) -> "CollapseProfile":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for row in self.rows:
            w.writerow([row.index] + [format_float(getattr(row, c)) for c in PROFILE_COLUMNS[1:]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CollapseProfile":
        reader = csv.DictReader(io.StringIO(text))
        return cls(
            tuple(
                ProfileRow(int(r["index"]), *(float(r[c]) for c in PROFILE_COLUMNS[1:]))
                for r in reader
            )
        )


def format_float(x: float) -> str:
    """17 significant digits, '.' decimal point, independent of locale."""
    return format(float(x), ".17g")


class VerdictKind(str, enum.Enum):
    NON_COLLAPSING = "NON_COLLAPSING"
    CODIM_AT_MOST_ONE = "CODIM_AT_MOST_ONE"
    CODIM_AT_LEAST_TWO = "CODIM_AT_LEAST_TWO"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CollapseVerdict:
    kind: VerdictKind
    inf_ratio: float
    decay_exponent: float | None
    fit_rms: float | None
    min_inj: float
    threshold: float
    fit_tolerance: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CollapseVerdict":
        data = dict(data)
        data["kind"] = VerdictKind(data["kind"])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "CollapseVerdict":
        return cls.from_dict(json.loads(text))


def _index_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def profile(spec: SequenceSpec) -> CollapseProfile:
    """Evaluate inj, vol(B_r), their ratio and the diameter for each index of the sequence."""
    rows = []
    for i in spec.indices:
        M = spec.member(i)
        try:
            vol = ball_volume(
                M, spec.r, spec.volume_mode, samples=spec.samples, seed=_index_seed(spec.seed, i)
            )
        except DomainError as exc:
            raise ProfileError(i, exc) from exc
        inj = M.injectivity_radius
        rows.append(ProfileRow(i, inj, vol, vol / inj, M.diameter))
    return CollapseProfile(tuple(rows))


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of log y against log x and the RMS residual."""
    lx, ly = np.log(x), np.log(y)
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def classify(
    prof: CollapseProfile,
    threshold: float = DEFAULT_THRESHOLD,
    fit_tolerance: float = DEFAULT_FIT_TOLERANCE,
) -> CollapseVerdict:
    """Sort a finite profile into the collapse trichotomy.

    Order of tests: injectivity radius bounded below -> non-collapsing; ratio
    decaying like a power of the index (clean log-log fit, slope <= -1/2) ->
    codimension >= 2; ratio bounded below by ``threshold`` -> codimension <= 1;
    otherwise inconclusive.
    """
    if len(prof.rows) < MIN_ROWS:
        raise DomainError(f"classification needs at least {MIN_ROWS} rows, got {len(prof.rows)}")
    idx = prof.column("index").astype(float)
    ratio = prof.column("ratio")
    inj = prof.column("inj")
    inf_ratio = float(ratio.min())
    min_inj = float(inj.min())

    slope = rms = None
    if np.all(ratio > 0) and len(np.unique(idx)) > 1:
        slope, rms = _loglog_fit(idx, ratio)
    decay = None if slope is None else -slope

    if min_inj >= threshold * math.pi:
        kind = VerdictKind.NON_COLLAPSING
    elif slope is not None and slope <= DECAY_SLOPE and rms <= fit_tolerance:
        kind = VerdictKind.CODIM_AT_LEAST_TWO
    elif inf_ratio >= threshold:
        kind = VerdictKind.CODIM_AT_MOST_ONE
    else:
        kind = VerdictKind.INCONCLUSIVE
    return CollapseVerdict(kind, inf_ratio, decay, rms, min_inj, threshold, fit_tolerance)


@dataclass(frozen=True)
class DimensionEstimate:
    dimension: float
    eps: tuple[float, ...]
    net_sizes: tuple[int, ...]
    covering_radii: tuple[float, ...]


def estimate_limit_dimension_detail(
    spec: SequenceSpec, eps_grid: Sequence[float], seed: int = 0
) -> DimensionEstimate:
    eps = [float(e) for e in eps_grid]
    if len(eps) < 3:
        raise DomainError("need at least 3 scales")
    if any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise DomainError("scales must be positive and strictly decreasing")
    M = spec.member(spec.index_range[1])
    nets = [epsilon_net(M, e, seed=seed) for e in eps]
    sizes = np.array([len(n) for n in nets], dtype=float)
    slope = float(np.polyfit(np.log(1.0 / np.array(eps)), np.log(sizes), 1)[0])
    return DimensionEstimate(
        slope, tuple(eps), tuple(int(s) for s in sizes), tuple(n.covering_radius for n in nets)
    )


def estimate_limit_dimension(spec: SequenceSpec, eps_grid: Sequence[float], seed: int = 0) -> float:
    """Box-counting slope of log(net size) against log(1/eps) on the last member of the sequence."""
    return estimate_limit_dimension_detail(spec, eps_grid, seed).dimension
