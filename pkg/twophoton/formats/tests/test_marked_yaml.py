from ..marked_yaml import (marked_yaml_load, validate_yaml, copy_dict_node, dict_node,
                           ValidationError, ExpectedKeyMissingError)
from ...core.test.utils import assert_raises


def test_marked_yaml():
    def loc(obj):
        return (obj.start_mark.line, obj.start_mark.column, obj.end_mark.line, obj.end_mark.column)

    d = marked_yaml_load(  # note: test very sensitive to whitespace in string below
    '''\
    modes:
      [a, b, {c: 1.5}]
    collapse:
      rate: 2''')

    assert d == {'modes': ['a', 'b', {'c': 1.5}], 'collapse': {'rate': 2}}
    assert loc(d['modes'][2]['c']) == (1, 17, 1, 20)
    assert loc(d) == (0, 4, 3, 13)
    assert loc(d['modes']) == (1, 6, 1, 22)

    assert isinstance(d['modes'][0], str)
    assert isinstance(d['modes'][2]['c'], float)
    assert isinstance(d['collapse']['rate'], int)
    assert isinstance(d, dict)
    assert isinstance(d['modes'], list)


def test_null_and_bool_stay_plain():
    d = marked_yaml_load('a: null\nb: true\n')
    assert d['a'] is None
    assert d['b'] is True


def test_missing_key():
    d = marked_yaml_load('a: 1\n', 'model.yaml')
    with assert_raises(KeyError) as r:
        d['b']
    assert isinstance(r.exc_val, ExpectedKeyMissingError)
    assert str(r.exc_val) == 'model.yaml, line 1: expected key "b" not found'


def test_syntax_error():
    with assert_raises(ValidationError) as r:
        marked_yaml_load('a: 1\nb: [c, d\n', 'bad.yaml')
    assert str(r.exc_val).startswith('bad.yaml, line ')
    assert r.exc_val.wrapped is not None


def test_validate_points_at_value():
    schema = {'type': 'object', 'properties': {'rate': {'type': 'number', 'minimum': 0}}}
    doc = marked_yaml_load('name: x\nrate: -1\n', 'rates.yaml')
    validate_yaml(marked_yaml_load('rate: 3\n'), schema)
    with assert_raises(ValidationError) as r:
        validate_yaml(doc, schema)
    assert str(r.exc_val).startswith('rates.yaml, line 2: -1 ')


def test_copy_dict_node():
    d = marked_yaml_load('a: {b: 1}\n')
    c = copy_dict_node(d['a'])
    assert isinstance(c, dict_node)
    assert c == {'b': 1} and c is not d['a']
    assert c.start_mark is d['a'].start_mark
    assert type(copy_dict_node({'b': 1})) is dict
