"""Flat ``key = value`` experiment configuration."""

import math
from dataclasses import asdict, dataclass, fields
from importlib import resources

from .errors import ConfigError, DomainError
from .spectral import SpectralModel

MODEL_NAMES = ("matern", "ou", "fou", "tabulated")


@dataclass
class ExperimentConfig:
    model: str = "ou"
    sigma2: float = 1.0
    matern_alpha: float | None = None
    ou_gamma: float | None = None
    hurst: float | None = None
    table: str | None = None
    atoms: bool = False
    dispersion_alpha: float = 3.0
    # K = [t_min, t_max] x [x_min, x_max]
    t_min: float = 0.0
    t_max: float = 1.0
    x_min: float = 0.0
    x_max: float = 1.0
    nt: int = 11
    nx: int = 11
    beta: float = 0.15
    phi: str = "quadratic"
    phi_alpha: float = 2.0
    c_eta: float = 1.0
    coeff_kind: str = "gaussian"
    seed: int = 20240101
    reps: int = 2000
    modes: int = 256
    tol: float = 1e-4
    quad_tol: float = 1e-8
    mc_sigma: float = 3.0
    n_v: int = 40
    workers: int = 1
    output: str = "run"

    def validate(self):
        if self.model not in MODEL_NAMES:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODEL_NAMES}", field="model")
        need = {"matern": "matern_alpha", "ou": "ou_gamma", "fou": "hurst", "tabulated": "table"}[self.model]
        if getattr(self, need) is None:
            raise ConfigError(f"model '{self.model}' requires '{need}'", field=need)
        if self.t_min < 0:
            raise ConfigError("time must be nonnegative", field="t_min")
        if self.t_max < self.t_min:
            raise ConfigError("t_max must be >= t_min", field="t_max")
        if self.x_max < self.x_min:
            raise ConfigError("x_max must be >= x_min", field="x_max")
        for name in ("tol", "quad_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError("tolerances must be positive", field=name)
        for name in ("nt", "nx", "reps", "modes", "workers", "n_v"):
            if getattr(self, name) < 1:
                raise ConfigError("must be a positive integer", field=name)
        if not self.dispersion_alpha > 1:
            raise ConfigError("must exceed 1", field="dispersion_alpha")
        if not 0 < self.beta <= 1:
            raise ConfigError("must lie in (0, 1]", field="beta")
        if self.phi not in ("quadratic", "power"):
            raise ConfigError("expected 'quadratic' or 'power'", field="phi")
        if self.coeff_kind not in ("gaussian", "rademacher", "uniform"):
            raise ConfigError("expected gaussian, rademacher or uniform", field="coeff_kind")
        return self

    def spectral_model(self):
        try:
            if self.model == "matern":
                return SpectralModel.matern(self.matern_alpha, self.sigma2)
            if self.model == "ou":
                return SpectralModel.ornstein_uhlenbeck(self.ou_gamma)
            if self.model == "fou":
                return SpectralModel.fractional_ou(self.hurst, self.sigma2)
            return SpectralModel.from_csv(self.table, atoms=self.atoms)
        except DomainError as exc:
            raise ConfigError(str(exc), field="model") from exc

    def resolved(self):
        """Parameters that define the experiment (the output location is excluded)."""
        d = asdict(self)
        d.pop("output")
        d.pop("workers")
        return d


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(name, raw, line=None):
    kind = _TYPES[name]
    raw = raw.strip()
    try:
        if "bool" in str(kind):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if "int" in str(kind) and "float" not in str(kind):
            return int(raw)
        if "float" in str(kind):
            if raw.lower() in ("none", ""):
                return None
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError(raw)
            return v
        return None if raw.lower() == "none" else raw
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r}", field=name, line=line) from None


def parse_config(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = ExperimentConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError("unknown key", field=key, line=lineno)
        setattr(cfg, key, _coerce(key, value, lineno))
    return cfg


def apply_overrides(cfg, pairs):
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in _TYPES:
            raise ConfigError("unknown key", field=key)
        setattr(cfg, key, _coerce(key, value))
    return cfg


def load_config(path=None):
    if path is None:
        text = resources.files("airyfield").joinpath("configs/ou_default.cfg").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_config(text)
