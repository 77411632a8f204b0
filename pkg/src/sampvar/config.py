"""Run configuration: one flat document with a nested ``process`` block.

Example (JSON)::

    {
      "process": {"kind": "markov", "states": [0, 1],
                  "transition": [[0.9, 0.1], [0.2, 0.8]], "initial": "stationary"},
      "n": 8,
      "expansion": "gram-charlier", "order": 4,
      "grid_min": 0.0, "grid_max": 2.0, "grid_points": 201,
      "seed": 7, "draws": 100000,
      "rel_tol": 1e-10, "abs_tol": 1e-12,
      "format": "json"
    }

Process kinds and their keys:

``iid``
    ``distribution: "normal"`` with ``sigma`` (and optional ``mean``), or
    ``values`` + ``probs`` for a discrete marginal, or ``raw_moments``.
``gaussian-ar1``
    ``phi`` and either ``innovation_sd`` or the stationary ``variance``.
``gaussian-stationary``
    ``autocovariance``: ``[gamma(0), gamma(1), ...]``.
``markov``
    ``states``, ``transition`` and ``initial`` (a vector or ``"stationary"``).
``constant``
    ``value``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .process import (
    MAX_FINITE_ATOMS,
    FiniteJoint,
    GaussianStationary,
    IIDProcess,
    ProcessModel,
    iid_to_finite_joint,
    markov_to_finite_joint,
)

__all__ = ["ConfigError", "RunConfig", "OUTPUTS", "PROCESS_KINDS", "load_config"]

OUTPUTS = ("cumulants", "moments", "density", "cdf", "validate", "simulate", "chisq-check")
PROCESS_KINDS = ("iid", "gaussian-ar1", "gaussian-stationary", "markov", "constant")
FORMATS = ("json", "csv")
ENGINES = ("moment", "cumulant", "both")


class ConfigError(ValueError):
    """Unparseable or inconsistent configuration."""


@dataclass
class RunConfig:
    process: dict[str, Any]
    n: int
    output: str = "cumulants"
    expansion: str = "gram-charlier"
    order: int | None = None
    max_order: int | None = None
    engine: str = "both"
    grid_min: float | None = None
    grid_max: float | None = None
    grid_points: int = 201
    seed: int = 0
    draws: int = 100_000
    streams: int = 16
    workers: int | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    shift_tol: float = 1e-9
    chisq_tol: float = 1e-10
    format: str = "json"
    out: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        kind = self.process.get("kind") if isinstance(self.process, dict) else None
        if kind not in PROCESS_KINDS:
            raise ConfigError(f"process.kind must be one of {PROCESS_KINDS}, got {kind!r}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ConfigError("n must be an integer >= 2")
        if self.output not in OUTPUTS:
            raise ConfigError(f"output must be one of {OUTPUTS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if self.expansion not in ("gram-charlier", "edgeworth"):
            raise ConfigError("expansion must be 'gram-charlier' or 'edgeworth'")
        if self.order is not None:
            allowed = (0, 3, 4, 6) if self.expansion == "gram-charlier" else (1, 2)
            if self.order not in allowed:
                raise ConfigError(f"{self.expansion} order must be one of {allowed}")
        if self.max_order is not None:
            if self.max_order not in (1, 2, 3, 4):
                raise ConfigError("max_order must be 1..4")
            if self.n < 2 * self.max_order:
                raise ConfigError(
                    f"precondition violated: kappa_{self.max_order} needs n >= {2 * self.max_order} (n = {self.n})"
                )
        if self.output in ("density", "cdf") and self.grid_points < 2:
            raise ConfigError("grid_points must be >= 2 for grid outputs")
        if self.output in ("density", "cdf") and self.needed_cumulant_order() > self.max_cumulant_order():
            raise ConfigError(
                f"precondition violated: {self.expansion} order {self.order} needs kappa_"
                f"{self.needed_cumulant_order()}, which needs n >= {2 * self.needed_cumulant_order()} (n = {self.n})"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.draws < 1 or self.streams < 1:
            raise ConfigError("draws and streams must be positive")

    def max_cumulant_order(self) -> int:
        return self.max_order if self.max_order is not None else min(4, self.n // 2)

    def needed_cumulant_order(self) -> int:
        if self.order is None:
            return 2
        if self.expansion == "gram-charlier":
            return {0: 2, 3: 3, 4: 4, 6: 3}[self.order]
        return {1: 3, 2: 4}[self.order]

    # -- provenance ---------------------------------------------------------

    def canonical(self) -> dict[str, Any]:
        data = asdict(self)
        data.pop("out", None)
        data.pop("workers", None)
        return data

    def sha256(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    # -- process construction ----------------------------------------------

    @property
    def kind(self) -> str:
        return self.process["kind"]

    def _get(self, key: str, default: Any = None) -> Any:
        if key in self.process:
            return self.process[key]
        if default is None:
            raise ConfigError(f"process kind {self.kind!r} needs key {key!r}")
        return default

    def is_iid_normal(self) -> bool:
        p = self.process
        return (self.kind == "iid" and p.get("distribution") == "normal") or (
            self.kind == "gaussian-ar1" and float(p.get("phi", 1.0)) == 0.0
        )

    def normal_sigma(self) -> float:
        if self.kind == "iid":
            return float(self.process.get("sigma", 1.0))
        return math.sqrt(self._ar1_params()[2])

    def _ar1_params(self) -> tuple[float, float, float]:
        phi = float(self._get("phi"))
        if not -1 < phi < 1:
            raise ConfigError("gaussian-ar1 needs |phi| < 1")
        if "innovation_sd" in self.process:
            sd = float(self.process["innovation_sd"])
        elif "variance" in self.process:
            sd = math.sqrt(float(self.process["variance"]) * (1 - phi * phi))
        else:
            sd = 1.0
        return phi, sd, sd * sd / (1 - phi * phi)

    def ar1_params(self) -> tuple[float, float]:
        """``(phi, innovation_sd)`` for simulation; i.i.d. normal is phi = 0."""
        if self.kind == "gaussian-ar1":
            phi, sd, _ = self._ar1_params()
            return phi, sd
        if self.is_iid_normal():
            return 0.0, float(self.process.get("sigma", 1.0))
        raise ConfigError(f"simulate supports gaussian-ar1 or iid normal, not {self.kind!r}")

    def build_model(self) -> ProcessModel:
        """The model used by the symmetric-moment engine."""
        p, kind = self.process, self.kind
        try:
            if kind == "iid":
                if p.get("distribution") == "normal":
                    return IIDProcess.normal(float(p.get("sigma", 1.0)), float(p.get("mean", 0.0)))
                if "values" in p:
                    return IIDProcess.discrete(p["values"], p["probs"])
                if "raw_moments" in p:
                    return IIDProcess(tuple(p["raw_moments"]))
                raise ConfigError("iid process needs distribution, values/probs or raw_moments")
            if kind == "gaussian-ar1":
                phi, sd, _ = self._ar1_params()
                return GaussianStationary.ar1(phi, sd)
            if kind == "gaussian-stationary":
                return GaussianStationary(list(self._get("autocovariance")))
            if kind == "markov":
                return markov_to_finite_joint(
                    self._get("states"), self._get("transition"), p.get("initial", "stationary"), self.n
                )
            if kind == "constant":
                return IIDProcess.constant(float(self._get("value")))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {kind} process: {exc}") from exc
        raise ConfigError(f"unknown process kind {kind!r}")

    def finite_model(self) -> FiniteJoint | None:
        """Explicit path law when the process has finite support, else None."""
        model = self.build_model()
        if isinstance(model, FiniteJoint):
            return model
        if isinstance(model, IIDProcess) and model.support is not None:
            if len(model.support[0]) ** self.n <= MAX_FINITE_ATOMS:
                return iid_to_finite_joint(model, self.n)
        return None


_FIELDS = {f for f in RunConfig.__dataclass_fields__ if f != "extra"}


def load_config(source, **overrides) -> RunConfig:
    """Read a JSON config from a path, a JSON string or a mapping.

    Keyword overrides (``None`` values ignored) replace top-level keys.
    """
    if isinstance(source, dict):
        data = dict(source)
    else:
        text = str(source)
        path = Path(text)
        try:
            if not text.lstrip().startswith("{") and path.exists():
                text = path.read_text()
            data = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "process" not in data or "n" not in data:
        raise ConfigError("config needs 'process' and 'n'")
    known = {k: v for k, v in data.items() if k in _FIELDS}
    extra = {k: v for k, v in data.items() if k not in _FIELDS}
    try:
        return RunConfig(**known, extra=extra)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
