import json
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Optional

from ..exceptions import ConfigException, DiffTomoException
from ..geometry.families import __supported_family__, make_path
from ..geometry.path import ExperimentPath
from ..geometry.samples import __supported_x_grid__
from ..scattering.phantom import Phantom, __supported_generator__, make_phantom

__supported_method__ = ['bp', 'bp-sym', 'inverse-ndft', 'oracle']


def _reject_unknown(cls, data: Dict, where: str):
    if not isinstance(data, dict):
        raise ConfigException(message=f'{where or "config"} has to be a JSON object')
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigException(message=f'unknown key "{where}{key}"')


def _positive(value, where: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigException(message=f'"{where}" has to be a number, got {value!r}')
    if integer and int(value) != value:
        raise ConfigException(message=f'"{where}" has to be an integer, got {value}')
    if not value > 0:
        raise ConfigException(message=f'"{where}" has to be positive, got {value}')
    return int(value) if integer else float(value)


@dataclass
class CGConfig:
    tol: float = 1e-6
    max_iter: int = 500
    real_constraint: bool = False

    @classmethod
    def from_dict(cls, data: Dict) -> 'CGConfig':
        _reject_unknown(cls, data, 'cg.')
        out = cls(**data)
        out.tol = _positive(out.tol, 'cg.tol')
        out.max_iter = _positive(out.max_iter, 'cg.max_iter', integer=True)
        out.real_constraint = bool(out.real_constraint)
        return out


@dataclass
class IndicatrixConfig:
    Q: int = 128
    N_est: Optional[int] = None
    sym: bool = False
    # share of hit nodes allowed at Card = 0; 0 rejects any
    zero_limit: float = 0.25

    @classmethod
    def from_dict(cls, data: Dict) -> 'IndicatrixConfig':
        _reject_unknown(cls, data, 'indicatrix.')
        out = cls(**data)
        out.Q = _positive(out.Q, 'indicatrix.Q', integer=True)
        if out.N_est is not None:
            out.N_est = _positive(out.N_est, 'indicatrix.N_est', integer=True)
        out.sym = bool(out.sym)
        if isinstance(out.zero_limit, bool) or not isinstance(out.zero_limit, (int, float)) \
                or not 0 <= out.zero_limit < 1:
            raise ConfigException(message=f'"indicatrix.zero_limit" has to lie in [0, 1), got {out.zero_limit!r}')
        out.zero_limit = float(out.zero_limit)
        return out


@dataclass
class ExperimentConfig:
    """
    A complete experiment: grid, sampling, path, phantom and reconstruction
    method. Defaults fill every optional section.
    """
    dim: int
    P: int
    M: int
    N: int
    r_M: float
    path: Dict
    phantom: Optional[Dict] = None
    x_grid: str = 'uniform'
    method: str = 'bp'
    cg: CGConfig = field(default_factory=CGConfig)
    indicatrix: IndicatrixConfig = field(default_factory=IndicatrixConfig)
    seed: int = 0
    noise: float = 0.0

    @classmethod
    def from_dict(cls, data: Dict) -> 'ExperimentConfig':
        _reject_unknown(cls, data, '')
        for key in ('dim', 'P', 'M', 'N', 'r_M', 'path'):
            if key not in data:
                raise ConfigException(message=f'missing key "{key}"')
        data = dict(data)
        data['cg'] = CGConfig.from_dict(data.get('cg', {}))
        data['indicatrix'] = IndicatrixConfig.from_dict(data.get('indicatrix', {}))
        config = cls(**data)
        config._validate()
        return config

    def _validate(self):
        if self.dim not in (2, 3):
            raise ConfigException(message=f'"dim" has to be 2 or 3, got {self.dim}')
        self.P = _positive(self.P, 'P', integer=True)
        self.M = _positive(self.M, 'M', integer=True)
        self.N = _positive(self.N, 'N', integer=True)
        self.r_M = _positive(self.r_M, 'r_M')
        if self.x_grid not in __supported_x_grid__:
            raise ConfigException(message=f'"x_grid" has to be one of {__supported_x_grid__}, got {self.x_grid!r}')
        if self.method not in __supported_method__:
            raise ConfigException(message=f'"method" has to be one of {__supported_method__}, got {self.method!r}')
        if not isinstance(self.path, dict) or self.path.get('family') not in __supported_family__:
            raise ConfigException(message=f'"path.family" has to be one of {__supported_family__}')
        if self.phantom is not None:
            if not isinstance(self.phantom, dict):
                raise ConfigException(message='"phantom" has to be a JSON object')
            generators = [c.get('generator') for c in self.phantom.get('components', [self.phantom])]
            for generator in generators:
                if generator not in __supported_generator__:
                    raise ConfigException(message=f'"phantom.generator" has to be one of {__supported_generator__}, got {generator!r}')
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigException(message=f'"seed" has to be an integer, got {self.seed!r}')
        if isinstance(self.noise, bool) or not isinstance(self.noise, (int, float)) or self.noise < 0:
            raise ConfigException(message=f'"noise" has to be non-negative, got {self.noise}')

    @property
    def n_est(self) -> int:
        """Time samples for the indicatrix estimator, 4 N unless configured."""
        return self.indicatrix.N_est or 4 * self.N

    def build_path(self) -> ExperimentPath:
        try:
            return make_path(self.path, dim=self.dim)
        except DiffTomoException as e:
            raise ConfigException(message=f'invalid path: {e.message}')

    def build_phantom(self) -> Phantom:
        if self.phantom is None:
            raise ConfigException(message='config has no "phantom" section')
        return make_phantom(self.phantom, self.dim, self.P, self.r_M)

    def to_dict(self) -> Dict:
        return asdict(self)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigException(message=f'{path} is not valid JSON: {e}')
    except OSError as e:
        raise ConfigException(message=f'cannot read {path}: {e}')
    return ExperimentConfig.from_dict(data)
