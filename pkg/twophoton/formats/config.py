"""
Handles reading the run configuration file given with ``--config-file``.

A configuration file holds the settings shared by every command (units,
seed, threads, output, grid, numerics) and at most one command block
(``analytic``, ``spontaneous``, ``condensate`` or ``stream``). Values on
the command line override the file. See ``config.example.yaml`` next to
this module for an annotated example.
"""

import os
from os.path import join as pjoin

from ..core.common import HBAR_UEV_PS
from .marked_yaml import load_yaml_from_file, validate_yaml, raw_tree, ValidationError

COMMAND_BLOCKS = ('analytic', 'spontaneous', 'condensate', 'stream')

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": True, "minimum": 0}
_non_negative = {"type": "number", "minimum": 0}


def _block(properties, required=()):
    block = {"type": "object", "properties": properties, "additionalProperties": False}
    if required:
        block["required"] = list(required)
    return block


config_schema = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "title": "twophoton run configuration schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "units": {"enum": ["natural", "physical"]},
        "gamma_a_ueV": _positive,
        "gamma_a_per_ps": _positive,
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},

        "grid": _block({
            "omega_min": _number,
            "omega_max": _number,
            "points": {"type": "integer", "minimum": 1},
        }),

        "numerics": _block({
            "truncation_tolerance": _positive,
            "lambda_start": _positive,
            "lambda_levels": {"type": "integer", "minimum": 2},
            "richardson_tolerance": _positive,
            "epsilon": _positive,
            "moment_order": {"type": "integer", "minimum": 2},
        }),

        "analytic": _block({
            "gamma_phi": _non_negative,
            "Gamma": _positive,
        }),

        "spontaneous": _block({
            "state": _block({
                "kind": {"enum": ["thermal", "coherent", "fock", "mixture"]},
                "value": _non_negative,
                "weight": {"type": "number", "minimum": 0, "maximum": 1},
            }, required=["kind", "value"]),
            "gamma_phi": _non_negative,
            "Gamma": _positive,
            "model": {"type": "string"},
            "mode": {"type": "string"},
        }),

        "condensate": _block({
            "gamma_a": _positive,
            "gamma_b": _non_negative,
            "P_b": _non_negative,
            "P_ba": _non_negative,
            "Gamma": _positive,
            "tau_max": _positive,
            "tau_points": {"type": "integer", "minimum": 2},
        }),

        "stream": _block({
            "emitter": _block({
                "kind": {"enum": ["decaying-coherent", "decaying-thermal", "mixture",
                                  "displaced-thermal"]},
                "n0": _non_negative,
                "gamma_a": _positive,
                "gamma_phi": _non_negative,
                "weight": {"type": "number", "minimum": 0, "maximum": 1},
            }),
            "detector": _block({
                "time_resolution": _positive,
                "energy_resolution": _positive,
                "frame_span_time": _positive,
                "frame_span_energy": _positive,
                "pixel_step_energy": _positive,
            }),
            "frames": {"type": "integer", "minimum": 1},
            "window_width": _positive,
            "tau_window": _positive,
            "blocks": {"type": "integer", "minimum": 1},
            "resamples": {"type": "integer", "minimum": 0},
        }),
    },
}


class RunConfig(object):
    """
    A validated configuration document

    `command` names the command block present, or is ``None``;
    `block` holds its settings (empty when absent).
    """

    def __init__(self, doc=None, filename=None):
        doc = raw_tree(doc or {})
        self.filename = filename
        self.doc = doc
        present = [key for key in COMMAND_BLOCKS if key in doc]
        self.command = present[0] if present else None
        self.block = dict(doc.get(self.command, {})) if self.command else {}
        self.units = doc.get('units', 'natural')
        self.gamma_a_ueV = doc.get('gamma_a_ueV')
        if self.gamma_a_ueV is None and 'gamma_a_per_ps' in doc:
            self.gamma_a_ueV = HBAR_UEV_PS * doc['gamma_a_per_ps']
        self.seed = doc.get('seed', 0)
        self.threads = doc.get('threads', 1)
        self.output = doc.get('output')
        self.grid = dict(doc.get('grid', {}))
        self.numerics = dict(doc.get('numerics', {}))

    def section(self, name):
        """Settings of command block `name`; empty unless it is the one in the file"""
        return dict(self.block) if name == self.command else {}

    def to_tree(self):
        return dict(self.doc)


def _check_config(doc):
    present = [key for key in COMMAND_BLOCKS if key in doc]
    if len(present) > 1:
        raise ValidationError(doc[present[1]], 'only one command block may be given, found %s'
                              % ', '.join(present))
    if 'gamma_a_ueV' in doc and 'gamma_a_per_ps' in doc:
        raise ValidationError(doc['gamma_a_per_ps'],
                              'give the unit rate as gamma_a_ueV or gamma_a_per_ps, not both')
    if doc.get('units') == 'physical' and not ('gamma_a_ueV' in doc or 'gamma_a_per_ps' in doc):
        raise ValidationError(doc['units'], 'physical units need gamma_a_ueV or gamma_a_per_ps')
    grid = doc.get('grid', {})
    if 'omega_min' in grid and 'omega_max' in grid and not grid['omega_min'] < grid['omega_max']:
        raise ValidationError(grid, 'grid omega_min must be below omega_max')


def load_config_file(filename, logger):
    """
    Load a run configuration file and validate it.
    """
    doc = load_yaml_from_file(filename)
    if doc is None:
        doc = {}
    validate_yaml(doc, config_schema)
    _check_config(doc)
    config = RunConfig(doc, filename)
    logger.debug('loaded %s (command block: %s)', filename, config.command)
    return config


def get_config_example_filename():
    return pjoin(os.path.dirname(__file__), 'config.example.yaml')
