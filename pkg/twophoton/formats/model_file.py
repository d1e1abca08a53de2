"""
Model definition files

A model file is a YAML (or JSON) tree naming the modes, their
truncations and the Hamiltonian and collapse terms in the operator
grammar of :mod:`twophoton.core.operators`::

    modes: [a, b]
    truncation: {a: 12, b: 4}
    collapse:
      - {operator: a, rate: 1.0}
      - {operator: ad*b, rate: 10.0}

This is the tree written by :meth:`LindbladModel.to_tree`, so models
round-trip through :func:`write_model_file`.
"""

import json

from ..core.common import ModelError, json_formatting_options
from ..core.fock import FockSpace, LindbladModel
from ..core.fileutils import atomic_write
from .marked_yaml import load_yaml_from_file, marked_yaml_load, validate_yaml, ValidationError


def _term(value_key):
    return {
        "type": "object",
        "properties": {"operator": {"type": "string"}, value_key: {"type": "number"}},
        "required": ["operator", value_key],
        "additionalProperties": False,
    }


model_schema = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "title": "twophoton model file schema",
    "type": "object",
    "properties": {
        "modes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "truncation": {
            "oneOf": [
                {"type": "array", "items": {"type": "integer", "minimum": 0}},
                {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
            ]
        },
        "hamiltonian": {"type": "array", "items": _term("coefficient")},
        "collapse": {"type": "array", "items": _term("rate")},
    },
    "required": ["modes", "truncation"],
    "additionalProperties": False,
}


def model_from_tree(doc):
    """A :class:`LindbladModel` from a (marked) document

    Problems found by the model classes are reported at the position of
    the offending entry.
    """
    validate_yaml(doc, model_schema)
    try:
        space = FockSpace(doc['modes'], doc['truncation'])
    except ModelError as e:
        raise ValidationError(doc['modes'], str(e), e)
    terms = {}
    for key, value_key in (('hamiltonian', 'coefficient'), ('collapse', 'rate')):
        terms[key] = []
        for entry in doc.get(key, []):
            try:
                LindbladModel(space, **{key + '_terms': [(entry['operator'], entry[value_key])]})
            except ModelError as e:
                raise ValidationError(entry, str(e), e)
            terms[key].append((str(entry['operator']), float(entry[value_key])))
    return LindbladModel(space, terms['hamiltonian'], terms['collapse'])


def load_model_file(filename):
    return model_from_tree(load_yaml_from_file(filename))


def loads_model(text, filecaption='<model>'):
    return model_from_tree(marked_yaml_load(text, filecaption))


def write_model_file(filename, model):
    with atomic_write(filename) as f:
        json.dump(model.to_tree(), f, **json_formatting_options)
        f.write('\n')
