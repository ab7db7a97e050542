import json

import pytest

from fockop.config import Settings, get_settings


def test_defaults():
    settings = get_settings({})
    assert settings == Settings()
    assert settings.seed == 20240607
    assert settings.samples == 10_000_000


def test_env_overrides():
    settings = get_settings({'FOCKOP_SEED': '3', 'FOCKOP_FIT_TOL': '0.1', 'FOCKOP_JOBS': ''})
    assert settings.seed == 3
    assert settings.fit_tol == 0.1
    assert settings.jobs == 1


def test_config_file_below_env(tmp_path):
    path = tmp_path / 'fockop.json'
    path.write_text(json.dumps({'seed': 9, 'samples': 1000, 'colour': 'blue'}))
    settings = get_settings({'FOCKOP_CONFIG': str(path)})
    assert (settings.seed, settings.samples) == (9, 1000)
    settings = get_settings({'FOCKOP_CONFIG': str(path), 'FOCKOP_SEED': '4'})
    assert (settings.seed, settings.samples) == (4, 1000)


def test_invalid_value():
    with pytest.raises(ValueError):
        get_settings({'FOCKOP_SAMPLES': 'many'})
