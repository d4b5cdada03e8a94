import logging
import os
import json

from . import APPDIR, SETTINGS_FILE

DEFAULTS = {
    'trials': 200,
    'alpha': 0.05,
    'mode': 'greedy',
    'seed': 0,
    'threads': None,
    'degree_factor': 8,
    'format': 'human',
}


def load_settings(path: str | None = None) -> dict:
    """
    Load run defaults from the settings JSON file

    The file is created with DEFAULTS on first use. Keys missing from an
    older file are filled in from DEFAULTS.

    Keyword arguments:
        path (str) : Settings file; defaults to SETTINGS_FILE

    Returns:
        dict: Settings data loaded from JSON file

    """

    path = path or SETTINGS_FILE
    if not os.path.isfile(path):
        settings = dict(DEFAULTS)
        try:
            save_settings(settings, path)
        except OSError as err:
            logging.getLogger(__name__).info(
                'Could not write default settings to %s: %s', path, err,
            )
        return settings

    logging.getLogger(__name__).debug(
        'Loading settings from %s', path,
    )
    with open(path, 'r') as fid:
        settings = json.load(fid)
    return {**DEFAULTS, **settings}


def save_settings(settings: dict, path: str | None = None) -> None:
    """
    Save dict to JSON file

    Arguments:
        settings (dict): Settings to save to JSON file

    Keyword arguments:
        path (str) : Settings file; defaults to SETTINGS_FILE

    """

    path = path or SETTINGS_FILE
    logging.getLogger(__name__).debug(
        'Saving settings to %s', path,
    )
    os.makedirs(os.path.dirname(path) or APPDIR, exist_ok=True)
    with open(path, 'w') as fid:
        json.dump(settings, fid, indent=4)
