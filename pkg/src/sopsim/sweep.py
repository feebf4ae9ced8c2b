"""Declarative parameter sweeps and figure-reproduction presets.

A sweep is described by one TOML file (see `default_config_toml`), runs one
scheme/regime over exactly one axis (destination SNR, eavesdropper SNR, or
secrecy rate) and emits a deterministic CSV: identical spec plus identical
seed gives byte-identical output.  Numeric failure in a cell marks that row
and the run continues; rows whose estimate saw fewer than 20 events carry a
low-confidence status instead of being suppressed.

CSV schema (UTF-8, comma-separated, one header row, `#` comments carrying
the spec hash and seed):

    axis_value_db | axis_value_bpcu, scheme, regime, method, value,
    std_err, n, seed, status, variant

`std_err`, `n` and `seed` are empty for analytic rows; `variant` labels the
member of a curve family (e.g. "M=4") and is empty for plain sweeps.  The
first column is named for the axis unit: dB for SNR axes, bpcu for the
secrecy-rate axis.  Values are printed with 17 significant digits so a
round-trip parse reproduces every float exactly.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import LinkBudget
from .montecarlo import (
    Estimate,
    SimConfig,
    simulate_sop_csi,
    simulate_sop_nocsi,
)
from .reliability import GncParams, nc_outage
from .secrecy import (
    GNC_CSI_METHODS,
    GNC_NOCSI_METHODS,
    SecrecyRates,
    sop_df_csi,
    sop_df_nocsi,
    sop_dt_csi,
    sop_dt_nocsi,
    sop_gnc_csi,
    sop_gnc_nocsi,
    sop_nocsi_compose,
)

__all__ = [
    "SweepSpec",
    "SweepError",
    "AxisSpec",
    "load_sweep_spec",
    "parse_sweep_spec",
    "run_sweep",
    "rows_to_csv",
    "reproduce_figure",
    "figure_spec",
    "FIGURE_IDS",
    "default_config_toml",
    "CSV_COLUMNS",
]

SCHEMES = ("DT", "DF", "NC", "GNC")
REGIMES = ("csi", "nocsi")
AXES = ("gd", "ge", "rs")

CSV_COLUMNS = (
    "axis_value",  # renamed per axis unit when written
    "scheme",
    "regime",
    "method",
    "value",
    "std_err",
    "n",
    "seed",
    "status",
    "variant",
)

_ANALYTIC_METHODS = {
    ("DT", "csi"): ("closed_form",),
    ("DT", "nocsi"): ("closed_form",),
    ("DF", "csi"): ("closed_form",),
    ("DF", "nocsi"): ("closed_form",),
    ("NC", "nocsi"): ("closed_form",),
    ("GNC", "csi"): GNC_CSI_METHODS,
    ("GNC", "nocsi"): GNC_NOCSI_METHODS,
}

# Schemes whose SOP has a defined event/sampling model per regime.
_SIMULATABLE = {
    ("DT", "csi"),
    ("DF", "csi"),
    ("GNC", "csi"),
    ("DT", "nocsi"),
    ("DF", "nocsi"),
    ("GNC", "nocsi"),
}


class SweepError(ValueError):
    """Invalid sweep specification; `payload` is machine-readable."""

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = {"error": message, **payload}


@dataclass(frozen=True)
class AxisSpec:
    variable: str  # gd | ge | rs
    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if self.variable not in AXES:
            raise SweepError(f"axis variable must be one of {AXES}", got=self.variable)
        if self.step <= 0.0 or self.stop < self.start:
            raise SweepError(
                "axis grid must be strictly increasing",
                start=self.start,
                stop=self.stop,
                step=self.step,
            )

    def values(self) -> List[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(count)]

    @property
    def unit(self) -> str:
        return "bpcu" if self.variable == "rs" else "db"


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    regime: str
    methods: Sequence[str]
    axis: AxisSpec
    gd_db: Optional[float] = None
    ge_db: Optional[float] = None
    secrecy_rate: Optional[float] = None
    total_rate: Optional[float] = None
    equivocation_rate: Optional[float] = None
    params: Optional[GncParams] = None
    sim: Optional[SimConfig] = None
    output: Optional[str] = None
    variant: str = ""

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise SweepError(f"scheme must be one of {SCHEMES}", got=self.scheme)
        if self.regime not in REGIMES:
            raise SweepError(f"regime must be one of {REGIMES}", got=self.regime)
        if not self.methods:
            raise SweepError("methods must be non-empty")
        allowed = set(_ANALYTIC_METHODS.get((self.scheme, self.regime), ())) | {"simulated"}
        if (self.scheme, self.regime) not in _ANALYTIC_METHODS:
            raise SweepError(
                f"scheme {self.scheme} is not defined in the {self.regime} regime",
                scheme=self.scheme,
                regime=self.regime,
            )
        for m in self.methods:
            if m not in allowed:
                raise SweepError(
                    f"method {m!r} is not available for {self.scheme}/{self.regime}",
                    allowed=sorted(allowed),
                )
        if "simulated" in self.methods:
            if (self.scheme, self.regime) not in _SIMULATABLE:
                raise SweepError(
                    f"no simulation model is defined for {self.scheme}/{self.regime}"
                )
            if self.sim is None:
                raise SweepError("method 'simulated' requires a [sim] table")
        if self.scheme == "GNC" and self.params is None:
            raise SweepError("scheme GNC requires a [gnc] table")
        # Exactly one sweep axis; the other quantities must be fixed.
        if self.axis.variable != "gd" and self.gd_db is None:
            raise SweepError("fixed gd_db is required unless gd is the axis")
        if self.axis.variable != "ge" and self.ge_db is None:
            raise SweepError("fixed ge_db is required unless ge is the axis")
        if self.regime == "csi":
            if self.axis.variable != "rs" and self.secrecy_rate is None:
                raise SweepError("csi regime requires rates.secrecy_rate")
        else:
            if self.equivocation_rate is None:
                raise SweepError("nocsi regime requires rates.equivocation_rate")
            if self.axis.variable != "rs" and self.total_rate is None:
                raise SweepError("nocsi regime requires rates.total_rate")

    def rates_at(self, axis_value: float) -> SecrecyRates:
        if self.regime == "csi":
            rs = axis_value if self.axis.variable == "rs" else self.secrecy_rate
            return SecrecyRates.csi(rs)
        if self.axis.variable == "rs":
            return SecrecyRates.no_csi(axis_value + self.equivocation_rate, self.equivocation_rate)
        return SecrecyRates.no_csi(self.total_rate, self.equivocation_rate)

    def budgets_at(self, axis_value: float) -> tuple[LinkBudget, LinkBudget]:
        gd_db = axis_value if self.axis.variable == "gd" else self.gd_db
        ge_db = axis_value if self.axis.variable == "ge" else self.ge_db
        return LinkBudget.from_db(gd_db), LinkBudget.from_db(ge_db)


def parse_sweep_spec(data: dict, default_workers: int = 1) -> SweepSpec:
    """Build a validated SweepSpec from a parsed TOML mapping."""
    try:
        axis_tbl = data["axis"]
        axis = AxisSpec(
            variable=axis_tbl["variable"],
            start=float(axis_tbl["start"]),
            stop=float(axis_tbl["stop"]),
            step=float(axis_tbl["step"]),
        )
    except KeyError as exc:
        raise SweepError(f"missing axis field {exc.args[0]!r}") from exc

    rates_tbl = data.get("rates", {})
    fixed = data.get("fixed", {})
    gnc_tbl = data.get("gnc")
    params = None
    if gnc_tbl is not None:
        params = GncParams(
            sources=int(gnc_tbl.get("sources", 2)),
            broadcast_frames=int(gnc_tbl["broadcast_frames"]),
            parity_frames=int(gnc_tbl["parity_frames"]),
        )
    sim_tbl = data.get("sim")
    sim = None
    if sim_tbl is not None:
        sim = SimConfig(
            samples=int(sim_tbl["samples"]),
            seed=int(sim_tbl["seed"]),
            mode=sim_tbl.get("mode", "event_level"),
            coupling=sim_tbl.get("coupling", "eve_perfect_intersource"),
            workers=int(sim_tbl.get("workers", default_workers)),
        )
    try:
        return SweepSpec(
            scheme=data["scheme"],
            regime=data["regime"],
            methods=tuple(data["methods"]),
            axis=axis,
            gd_db=fixed.get("gd_db"),
            ge_db=fixed.get("ge_db"),
            secrecy_rate=rates_tbl.get("secrecy_rate"),
            total_rate=rates_tbl.get("total_rate"),
            equivocation_rate=rates_tbl.get("equivocation_rate"),
            params=params,
            sim=sim,
            output=data.get("output"),
        )
    except KeyError as exc:
        raise SweepError(f"missing required field {exc.args[0]!r}") from exc


def load_sweep_spec(path: str, default_workers: int = 1) -> SweepSpec:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise SweepError(f"invalid TOML: {exc}") from exc
    return parse_sweep_spec(data, default_workers=default_workers)


# --------------------------------------------------------------------------
# Row computation
# --------------------------------------------------------------------------


@dataclass
class Row:
    axis_value: float
    scheme: str
    regime: str
    method: str
    value: Optional[float]
    std_err: Optional[float]
    n: Optional[int]
    seed: Optional[int]
    status: str
    variant: str


def _analytic_value(
    spec: SweepSpec, method: str, rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget
) -> float:
    scheme, regime = spec.scheme, spec.regime
    if scheme == "DT":
        return sop_dt_csi(rates, gd, ge) if regime == "csi" else sop_dt_nocsi(rates, gd, ge).total
    if scheme == "DF":
        return sop_df_csi(rates, gd, ge) if regime == "csi" else sop_df_nocsi(rates, gd, ge).total
    if scheme == "NC":
        # Generic no-CSI union over the dedicated NC reliability outage,
        # evaluated at both receivers.
        reliability = nc_outage(rates.total_rate, gd)
        decoded_at_eve = 1.0 - nc_outage(rates.equivocation_rate, ge)
        return sop_nocsi_compose(reliability, decoded_at_eve).total
    if regime == "csi":
        return sop_gnc_csi(rates, gd, ge, spec.params, method)
    return sop_gnc_nocsi(rates, gd, ge, spec.params, method).total


def _simulated_estimate(
    spec: SweepSpec, rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget
) -> Estimate:
    cfg = spec.sim
    if spec.regime == "csi":
        mode = "inverse_transform" if spec.scheme == "GNC" else "event_level"
        cfg = replace(cfg, mode=mode)
        return simulate_sop_csi(spec.scheme, rates, gd, ge, spec.params, cfg)
    cfg = replace(cfg, mode="event_level")
    return simulate_sop_nocsi(spec.scheme, rates, gd, ge, spec.params, cfg).total


def run_sweep(spec: SweepSpec) -> List[Row]:
    """Evaluate every (grid point, method) cell of the sweep, in grid order."""
    rows: List[Row] = []
    for axis_value in spec.axis.values():
        for method in spec.methods:
            rows.append(_run_cell(spec, axis_value, method))
    return rows


def _run_cell(spec: SweepSpec, axis_value: float, method: str) -> Row:
    base = dict(
        axis_value=axis_value,
        scheme=spec.scheme,
        regime=spec.regime,
        method=method,
        variant=spec.variant,
    )
    try:
        rates = spec.rates_at(axis_value)
        gd, ge = spec.budgets_at(axis_value)
        if method == "simulated":
            est = _simulated_estimate(spec, rates, gd, ge)
            status = "low_confidence" if est.low_confidence else "ok"
            return Row(
                **base,
                value=est.p_hat,
                std_err=est.std_err,
                n=est.n,
                seed=est.seed,
                status=status,
            )
        value = _analytic_value(spec, method, rates, gd, ge)
        return Row(**base, value=value, std_err=None, n=None, seed=None, status="ok")
    except Exception as exc:  # emit the failed cell, keep the run alive
        return Row(
            **base,
            value=None,
            std_err=None,
            n=None,
            seed=None,
            status=f"error:{type(exc).__name__}",
        )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def rows_to_csv(rows: Sequence[Row], axis_unit: str, meta: dict) -> str:
    """Render rows as the documented CSV, with `#` metadata comment lines."""
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    header = list(CSV_COLUMNS)
    header[0] = f"axis_value_{axis_unit}"
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(
            ",".join(
                (
                    _fmt(r.axis_value),
                    r.scheme,
                    r.regime,
                    r.method,
                    _fmt(r.value),
                    _fmt(r.std_err),
                    _fmt(r.n),
                    _fmt(r.seed),
                    r.status,
                    r.variant,
                )
            )
            + "\n"
        )
    return buf.getvalue()


def spec_hash(payload: dict) -> str:
    """Stable hash of the fully-resolved sweep description."""
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def write_sweep_csv(specs: Sequence[SweepSpec], path: str) -> str:
    """Run one or more sweeps (a curve family) and write a single CSV."""
    axis_units = {s.axis.unit for s in specs}
    if len(axis_units) != 1:
        raise SweepError("all sweeps of one artifact must share the axis unit")
    rows: List[Row] = []
    for s in specs:
        rows.extend(run_sweep(s))
    seeds = sorted({s.sim.seed for s in specs if s.sim is not None})
    meta = {
        "generator": "sopsim",
        "spec_hash": spec_hash([_spec_payload(s) for s in specs]),
        "seed": seeds[0] if seeds else "",
    }
    text = rows_to_csv(rows, axis_units.pop(), meta)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def _spec_payload(spec: SweepSpec) -> dict:
    payload = {
        "scheme": spec.scheme,
        "regime": spec.regime,
        "methods": list(spec.methods),
        "axis": [spec.axis.variable, spec.axis.start, spec.axis.stop, spec.axis.step],
        "gd_db": spec.gd_db,
        "ge_db": spec.ge_db,
        "rates": [spec.secrecy_rate, spec.total_rate, spec.equivocation_rate],
        "variant": spec.variant,
    }
    if spec.params is not None:
        payload["gnc"] = [
            spec.params.sources,
            spec.params.broadcast_frames,
            spec.params.parity_frames,
        ]
    if spec.sim is not None:
        payload["sim"] = [spec.sim.samples, spec.sim.seed, spec.sim.mode, spec.sim.coupling]
    return payload


# --------------------------------------------------------------------------
# Figure-reproduction presets
# --------------------------------------------------------------------------

FIGURE_IDS = tuple(f"fig{i}" for i in range(3, 11))

_DEFAULT_FIGURE_SEED = 20260810
_GNC22 = dict(sources=2, broadcast_frames=2, parity_frames=2)


def figure_spec(
    figure_id: str, samples: int = 10**6, seed: int = _DEFAULT_FIGURE_SEED, workers: int = 1
) -> List[SweepSpec]:
    """Sweep family reproducing one published curve set.

    Presets fix the scheme parameters and rate/SNR points of the figure;
    only the sample budget, seed and worker count are adjustable.
    """
    if figure_id not in FIGURE_IDS:
        raise SweepError(f"unknown figure id {figure_id!r}", known=list(FIGURE_IDS))
    builder = _FIGURES[figure_id]
    return builder(samples, seed, workers)


def _sim(samples: int, seed: int, workers: int, **kw) -> SimConfig:
    return SimConfig(samples=samples, seed=seed, workers=workers, **kw)


def _gd_axis(lo=0.0, hi=40.0, step=2.0) -> AxisSpec:
    return AxisSpec("gd", lo, hi, step)


def _fig3(samples, seed, workers):
    # Partial CSI vs destination SNR; secrecy rate 0.5, eavesdropper 10 dB.
    axis = _gd_axis()
    common = dict(regime="csi", axis=axis, ge_db=10.0, secrecy_rate=0.5)
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(scheme="DT", methods=("closed_form",), **common),
        SweepSpec(scheme="DF", methods=("closed_form",), **common),
        SweepSpec(
            scheme="GNC",
            methods=("closed_form", "asymptotic", "simulated"),
            params=p222,
            sim=sim,
            **common,
        ),
    ]


def _fig4(samples, seed, workers):
    # Partial CSI, eavesdropper SNR family {5, 10, 15} dB.
    axis = _gd_axis()
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(
            scheme="GNC",
            regime="csi",
            methods=("closed_form", "simulated"),
            axis=axis,
            ge_db=ge,
            secrecy_rate=0.5,
            params=p222,
            sim=sim,
            variant=f"ge={ge:.0f}dB",
        )
        for ge in (5.0, 10.0, 15.0)
    ]


def _fig5(samples, seed, workers):
    # Partial CSI vs secrecy rate at gd = 40 dB, ge = 10 dB.
    axis = AxisSpec("rs", 0.1, 4.0, 0.1)
    common = dict(regime="csi", axis=axis, gd_db=40.0, ge_db=10.0)
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(scheme="DT", methods=("closed_form",), **common),
        SweepSpec(scheme="DF", methods=("closed_form",), **common),
        SweepSpec(
            scheme="GNC",
            methods=("closed_form", "simulated"),
            params=p222,
            sim=sim,
            **common,
        ),
    ]


def _fig6(samples, seed, workers):
    # Partial CSI, source-count family M in {2, 4, 8, 16} with k1 = k2 = 2.
    axis = _gd_axis()
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(
            scheme="GNC",
            regime="csi",
            methods=("closed_form", "simulated"),
            axis=axis,
            ge_db=10.0,
            secrecy_rate=0.5,
            params=GncParams(sources=m, broadcast_frames=2, parity_frames=2),
            sim=sim,
            variant=f"M={m}",
        )
        for m in (2, 4, 8, 16)
    ]


def _fig7(samples, seed, workers):
    # No CSI vs destination SNR; R = 3, RE = 2, eavesdropper 2 dB.
    axis = _gd_axis()
    common = dict(
        regime="nocsi", axis=axis, ge_db=2.0, total_rate=3.0, equivocation_rate=2.0
    )
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(scheme="DT", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(scheme="DF", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(
            scheme="GNC",
            methods=("exact_2src", "approx", "floor", "max_approx", "simulated"),
            params=p222,
            sim=sim,
            **common,
        ),
    ]


def _fig8(samples, seed, workers):
    # No CSI vs eavesdropper SNR at gd = 30 dB.
    axis = AxisSpec("ge", -10.0, 20.0, 2.0)
    common = dict(
        regime="nocsi", axis=axis, gd_db=30.0, total_rate=3.0, equivocation_rate=2.0
    )
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(scheme="DT", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(scheme="DF", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(
            scheme="GNC",
            methods=("exact_2src", "max_approx", "simulated"),
            params=p222,
            sim=sim,
            **common,
        ),
    ]


def _fig9(samples, seed, workers):
    # No CSI vs secrecy rate with RE = 2 fixed (R = rs + RE), gd = 40 dB.
    axis = AxisSpec("rs", 0.1, 3.0, 0.1)
    common = dict(
        regime="nocsi", axis=axis, gd_db=40.0, ge_db=2.0, equivocation_rate=2.0
    )
    p222 = GncParams(**_GNC22)
    sim = _sim(samples, seed, workers)
    return [
        SweepSpec(scheme="DT", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(scheme="DF", methods=("closed_form", "simulated"), sim=sim, **common),
        SweepSpec(
            scheme="GNC",
            methods=("exact_2src", "max_approx", "simulated"),
            params=p222,
            sim=sim,
            **common,
        ),
    ]


def _fig10(samples, seed, workers):
    # No CSI, source-count family; exact composition and the event-level
    # simulation are two-source constructs, so M > 2 members carry the
    # high-SNR approximation and floor curves only.
    axis = _gd_axis()
    sim = _sim(samples, seed, workers)
    specs = []
    for m in (2, 4, 8, 16):
        methods = (
            ("exact_2src", "approx", "floor", "max_approx", "simulated")
            if m == 2
            else ("approx", "floor", "max_approx")
        )
        specs.append(
            SweepSpec(
                scheme="GNC",
                regime="nocsi",
                methods=methods,
                axis=axis,
                ge_db=2.0,
                total_rate=3.0,
                equivocation_rate=2.0,
                params=GncParams(sources=m, broadcast_frames=2, parity_frames=2),
                sim=sim if m == 2 else None,
                variant=f"M={m}",
            )
        )
    return specs


_FIGURES: dict[str, Callable[[int, int, int], List[SweepSpec]]] = {
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10": _fig10,
}


def reproduce_figure(
    figure_id: str,
    out_path: str,
    samples: int = 10**6,
    seed: int = _DEFAULT_FIGURE_SEED,
    workers: int = 1,
) -> str:
    """Run the preset sweep family of one figure and write its CSV."""
    specs = figure_spec(figure_id, samples=samples, seed=seed, workers=workers)
    return write_sweep_csv(specs, out_path)


def default_config_toml() -> str:
    """Fully-commented default sweep spec; every default is explicit."""
    return """\
# sopsim sweep specification (TOML)

scheme = "GNC"            # DT | DF | NC | GNC
regime = "csi"            # csi | nocsi
# Analytic methods by scheme/regime:
#   DT, DF              -> closed_form
#   NC (nocsi only)     -> closed_form  (union over the NC reliability outage)
#   GNC csi             -> closed_form | quadrature | asymptotic
#   GNC nocsi           -> exact_2src | approx | floor | max_approx
# plus "simulated" wherever an event/sampling model exists (not NC).
methods = ["closed_form", "simulated"]
output = "sweep.csv"      # overridable with --out

[axis]                    # exactly one sweep axis
variable = "gd"           # gd | ge | rs
start = 0.0               # dB for gd/ge, bpcu for rs
stop = 40.0
step = 2.0

[rates]
secrecy_rate = 0.5        # csi regime
# total_rate = 3.0        # nocsi regime (with equivocation_rate)
# equivocation_rate = 2.0 # for an rs axis in the nocsi regime, total_rate
#                         # is derived per point as rs + equivocation_rate

[fixed]                   # values for whatever the axis does not sweep
ge_db = 10.0
# gd_db = 30.0

[gnc]                     # required for scheme = "GNC"
sources = 2
broadcast_frames = 2
parity_frames = 2

[sim]                     # required when "simulated" is in methods
samples = 1000000
seed = 20260810
workers = 1               # default also settable via SOPSIM_WORKERS
mode = "event_level"      # forced per scheme/regime; GNC csi uses
                          # inverse_transform automatically
coupling = "eve_perfect_intersource"  # or shared_intersource
"""
