"""Run configuration: flat ``key=value`` files parsed into a validated manifest.

Lines are ``key=value`` with ``#`` comments and blank lines ignored.  Every
key must belong to the vocabulary of the manifest's ``kind``; unknown or
misplaced keys are hard errors, as are out-of-domain values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .stepper import SolverConfig

__all__ = ["ConfigError", "RunManifest", "parse_config", "KINDS"]

KINDS = ("convergence", "simulate", "window", "amplification")


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, missing key, or bad value)."""


@dataclass
class RunManifest:
    """Validated description of one experiment."""

    kind: str
    alpha: float
    order: int = 4
    eps: Optional[float] = None
    dt: Optional[float] = None
    t_end: Optional[float] = None
    sizes: Optional[tuple[int, ...]] = None
    levels: int = 4
    extrapolate: bool = False
    seed: int = 0
    ic_scale: Optional[float] = None
    ic_offset: Optional[float] = None
    initial: str = "random"
    initial_file: Optional[str] = None
    snapshots: tuple[float, ...] = ()
    variant: str = "as-computed"
    betas: Optional[tuple[float, ...]] = None
    amp_m: Optional[int] = None
    phases: int = 256

    @property
    def dims(self) -> int:
        if self.sizes is None:
            raise ConfigError("manifest has no grid")
        return len(self.sizes)

    def solver_config(self, source=None, extrapolate: Optional[bool] = None) -> SolverConfig:
        if self.sizes is None or self.dt is None or self.t_end is None or self.eps is None:
            raise ConfigError(f"kind '{self.kind}' does not define a solver run")
        return SolverConfig(
            alpha=self.alpha,
            eps=self.eps,
            dt=self.dt,
            t_end=self.t_end,
            sizes=self.sizes,
            spatial_order=self.order,
            extrapolate=self.extrapolate if extrapolate is None else extrapolate,
            source=source,
            seed=self.seed,
        )


# key -> (kinds that accept it, required for those kinds?)
_COMMON = {"kind", "alpha", "order"}
_KEYS = {
    "kind": KINDS,
    "alpha": KINDS,
    "order": KINDS,
    "eps": ("convergence", "simulate", "window"),
    "dt": ("convergence", "simulate"),
    "t_end": ("convergence", "simulate"),
    "mx": ("convergence", "simulate", "window"),
    "my": ("convergence", "simulate", "window"),
    "mz": ("convergence", "simulate", "window"),
    "levels": ("convergence",),
    "extrapolate": ("simulate",),
    "seed": ("simulate",),
    "ic_scale": ("simulate",),
    "ic_offset": ("simulate",),
    "initial": ("simulate",),
    "initial_file": ("simulate",),
    "snapshots": ("simulate",),
    "variant": ("window",),
    "betas": ("amplification",),
    "m": ("amplification",),
    "phases": ("amplification",),
}
_REQUIRED = {
    "convergence": ("alpha", "eps", "dt", "t_end", "mx"),
    "simulate": ("alpha", "eps", "dt", "t_end", "mx"),
    "window": ("alpha", "eps", "mx"),
    "amplification": ("alpha", "betas", "m"),
}


def _parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        pairs[key] = value
    return pairs


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {value!r}") from exc


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer: {value!r}") from exc


def _to_bool(key: str, value: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ConfigError(f"{key}: expected true or false, got {value!r}")


def parse_config(text: str) -> RunManifest:
    """Parse and validate a config file's content into a :class:`RunManifest`."""
    pairs = _parse_pairs(text)
    if "kind" not in pairs:
        raise ConfigError("missing required key 'kind'")
    kind = pairs["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind: must be one of {', '.join(KINDS)}; got {kind!r}")
    for key in pairs:
        if key not in _KEYS:
            raise ConfigError(f"unknown key '{key}'")
        if kind not in _KEYS[key]:
            raise ConfigError(f"key '{key}' is not valid for kind '{kind}'")
    for key in _REQUIRED[kind]:
        if key not in pairs:
            raise ConfigError(f"missing required key '{key}' for kind '{kind}'")

    alpha = _to_float("alpha", pairs["alpha"])
    if not 1.0 < alpha <= 2.0:
        raise ConfigError(f"alpha: must be in (1, 2], got {alpha}")
    order = _to_int("order", pairs["order"]) if "order" in pairs else 4
    if order not in (2, 4):
        raise ConfigError(f"order: must be 2 or 4, got {order}")

    manifest = RunManifest(kind=kind, alpha=alpha, order=order)

    if "eps" in pairs:
        manifest.eps = _to_float("eps", pairs["eps"])
        if manifest.eps <= 0.0:
            raise ConfigError(f"eps: must be positive, got {manifest.eps}")
    if "mx" in pairs:
        sizes = [_to_int("mx", pairs["mx"])]
        if "my" in pairs:
            sizes.append(_to_int("my", pairs["my"]))
        else:
            sizes.append(sizes[0])
        if "mz" in pairs:
            sizes.append(_to_int("mz", pairs["mz"]))
        for key, m in zip(("mx", "my", "mz"), sizes):
            if m < 2:
                raise ConfigError(f"{key}: must be >= 2, got {m}")
        manifest.sizes = tuple(sizes)
    if "dt" in pairs:
        manifest.dt = _to_float("dt", pairs["dt"])
        if manifest.dt <= 0.0:
            raise ConfigError(f"dt: must be positive, got {manifest.dt}")
    if "t_end" in pairs:
        manifest.t_end = _to_float("t_end", pairs["t_end"])
        if manifest.t_end < 0.0:
            raise ConfigError(f"t_end: must be non-negative, got {manifest.t_end}")
    if "levels" in pairs:
        manifest.levels = _to_int("levels", pairs["levels"])
        if manifest.levels < 1:
            raise ConfigError(f"levels: must be >= 1, got {manifest.levels}")
    if "extrapolate" in pairs:
        manifest.extrapolate = _to_bool("extrapolate", pairs["extrapolate"])
    if "seed" in pairs:
        manifest.seed = _to_int("seed", pairs["seed"])
        if manifest.seed < 0:
            raise ConfigError(f"seed: must be non-negative, got {manifest.seed}")
    if "ic_scale" in pairs:
        manifest.ic_scale = _to_float("ic_scale", pairs["ic_scale"])
    if "ic_offset" in pairs:
        manifest.ic_offset = _to_float("ic_offset", pairs["ic_offset"])
    if "initial" in pairs:
        if pairs["initial"] not in ("random", "file"):
            raise ConfigError(f"initial: must be random or file, got {pairs['initial']!r}")
        manifest.initial = pairs["initial"]
    if "initial_file" in pairs:
        manifest.initial_file = pairs["initial_file"]
    if "snapshots" in pairs:
        try:
            manifest.snapshots = tuple(
                float(part) for part in pairs["snapshots"].split(",") if part.strip()
            )
        except ValueError as exc:
            raise ConfigError("snapshots: expected comma-separated times") from exc
        if any(t < 0.0 for t in manifest.snapshots):
            raise ConfigError("snapshots: times must be non-negative")
    if "variant" in pairs:
        if pairs["variant"] not in ("as-computed", "as-printed"):
            raise ConfigError(
                f"variant: must be as-computed or as-printed, got {pairs['variant']!r}"
            )
        manifest.variant = pairs["variant"]
    if "betas" in pairs:
        try:
            manifest.betas = tuple(float(p) for p in pairs["betas"].split())
        except ValueError as exc:
            raise ConfigError("betas: expected space-separated numbers") from exc
        if not 1 <= len(manifest.betas) <= 3:
            raise ConfigError("betas: expected 1 to 3 per-axis values")
    if "m" in pairs:
        manifest.amp_m = _to_int("m", pairs["m"])
        if manifest.amp_m < 2:
            raise ConfigError(f"m: must be >= 2, got {manifest.amp_m}")
    if "phases" in pairs:
        manifest.phases = _to_int("phases", pairs["phases"])
        if manifest.phases < 1:
            raise ConfigError(f"phases: must be >= 1, got {manifest.phases}")

    _validate_kind(manifest)
    return manifest


def _validate_kind(manifest: RunManifest) -> None:
    kind = manifest.kind
    if kind in ("convergence", "simulate"):
        ratio = manifest.t_end / manifest.dt
        n = round(ratio)
        if abs(ratio - n) > 1e-9 * max(1.0, abs(ratio)):
            raise ConfigError(f"t_end/dt = {ratio} is not an integer step count")
        if kind == "convergence" and n % 2 != 0 and n > 0:
            raise ConfigError(
                f"convergence needs an even base step count for extrapolation, got N={n}"
            )
        if kind == "simulate":
            if manifest.extrapolate and n % 2 != 0:
                raise ConfigError(f"extrapolate=true needs an even step count, got N={n}")
            if manifest.initial == "random":
                if manifest.ic_scale is None or manifest.ic_offset is None:
                    raise ConfigError("random initial data needs ic_scale and ic_offset")
            elif manifest.initial_file is None:
                raise ConfigError("initial=file needs initial_file")
            for t in manifest.snapshots:
                if t > manifest.t_end * (1.0 + 1e-12):
                    raise ConfigError(f"snapshots: time {t} is beyond t_end={manifest.t_end}")
