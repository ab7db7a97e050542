import json
import logging
import os
from dataclasses import dataclass, fields, replace

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s-%(filename)s:%(funcName)s:%(lineno)d:%(levelname)s:%(message)s'
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

ENV_PREFIX = 'FOCKOP_'
CONFIG_FILE_VAR = 'FOCKOP_CONFIG'

# geometric t grid used by the default ray, 2**6 ... 2**12
T_LO = 64
T_HI = 4096

# smallest number of samples a log-log fit accepts
MIN_FIT_SAMPLES = 4

# trial bound for the oracle's upper incomplete gamma tail search
MAX_TAIL_STEPS = 200

OUT_FORMATS = ('json', 'table', 'csv')


@dataclass(frozen=True)
class Settings:
    seed: int = 20240607
    samples: int = 10_000_000
    chunk: int = 1_000_000
    quad_tol: float = 1e-12
    tail_fraction: float = 1e-16
    fit_tol: float = 0.05
    ratio_window: float = 0.02
    jobs: int = 1


def _coerce(name: str, raw):
    kind = type(getattr(Settings(), name))
    try:
        return kind(raw)
    except (TypeError, ValueError) as e:
        raise ValueError(f'Invalid value {raw!r} for setting "{name}": {e}')


def get_settings(env=None) -> Settings:
    """
    Build the effective settings. Precedence, lowest first: defaults, the JSON file named by
    FOCKOP_CONFIG, FOCKOP_<NAME> environment variables.
    @param env: mapping used instead of os.environ (tests)
    @return: Settings
    """
    env = os.environ if env is None else env
    overrides = {}
    config_path = env.get(CONFIG_FILE_VAR)
    if config_path:
        with open(config_path) as f:
            file_values = json.load(f)
        known = {f.name for f in fields(Settings)}
        for key, value in file_values.items():
            if key not in known:
                logger.warning(f'Ignoring unknown setting "{key}" in {config_path}')
                continue
            overrides[key] = _coerce(key, value)
        logger.debug(f'loaded {len(overrides)} setting(s) from {config_path}')
    for f in fields(Settings):
        raw = env.get(f'{ENV_PREFIX}{f.name.upper()}')
        if raw not in ('', None):
            overrides[f.name] = _coerce(f.name, raw)
    return replace(Settings(), **overrides)
