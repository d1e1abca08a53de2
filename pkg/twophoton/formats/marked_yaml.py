"""
A PyYAML loader subclass that annotates positions in the source, so
that configuration and model files can be validated with messages
pointing at a file and line.

The loader is based on `SafeConstructor`, i.e., the behaviour of
`yaml.safe_load`, but in addition:

 - Every dict/list/str/int/float is replaced with
   dict_node/list_node/str_node/int_node/float_node, which subclass
   the builtin to add the attributes `start_mark` and `end_mark`. (See
   the yaml.error module for the `Mark` class.)

 - Booleans and nulls stay plain ``bool`` and ``None`` and carry no mark;
   errors about them point at the enclosing mapping.

"""

import yaml
from yaml.error import Mark
from yaml.reader import Reader
from yaml.scanner import Scanner
from yaml.parser import Parser
from yaml.composer import Composer
from yaml.resolver import Resolver
from yaml.constructor import SafeConstructor
import jsonschema


def _find_mark(doc):
    """Traverse a document to try to find a start_mark attribute"""
    if hasattr(doc, 'start_mark'):
        return doc.start_mark
    elif isinstance(doc, dict):
        for key, value in doc.items():
            mark = _find_mark(key) or _find_mark(value)
            if mark:
                return mark
    elif isinstance(doc, list):
        for item in doc:
            mark = _find_mark(item)
            if mark:
                return mark
    return None


def text_mark(filename, line):
    """A mark for line `line` (1-based) of a plain text file"""
    return Mark(filename, 0, line - 1, 0, None, None)


class ValidationError(Exception):
    def __init__(self, mark, message=None, wrapped=None):
        if not isinstance(mark, Mark):
            mark = _find_mark(mark)
        self.mark = mark
        self.message = message
        self.wrapped = wrapped

    def __str__(self):
        loc = '<unknown location>' if self.mark is None else '%s, line %d' % (self.mark.name, self.mark.line + 1)
        return '%s: %s' % (loc, self.message)


class ExpectedKeyMissingError(KeyError, ValidationError):
    def __init__(self, mark, message, **kw):
        KeyError.__init__(self, message)
        ValidationError.__init__(self, mark, message, **kw)

    def __str__(self):
        return ValidationError.__str__(self)


def create_node_class(cls, name=None):
    mutable = cls in (list, dict)

    class node_class(cls):
        def __new__(klass, x, start_mark, end_mark):
            return cls.__new__(klass) if mutable else cls.__new__(klass, x)

        def __init__(self, x, start_mark, end_mark):
            if mutable:
                cls.__init__(self, x)
            self.start_mark = start_mark
            self.end_mark = end_mark

    node_class.__name__ = name if name else '%s_node' % cls.__name__
    return node_class


list_node = create_node_class(list)
int_node = create_node_class(int)
float_node = create_node_class(float)
str_node = create_node_class(str)


class dict_node(create_node_class(dict)):
    def __getitem__(self, key):
        try:
            return dict.__getitem__(self, key)
        except KeyError:
            raise ExpectedKeyMissingError(self, 'expected key "%s" not found' % key)


def copy_dict_node(d):
    """
    Makes a copy of the dict `d`, preserving dict_node status if it is a dict_node,
    otherwise returning a dict.
    """
    if isinstance(d, dict_node):
        return dict_node(d, d.start_mark, d.end_mark)
    else:
        return dict(d)


class NodeConstructor(SafeConstructor):
    # The base constructors first yield an empty object and fill it in
    # when iterated again; exhausting the generator gives the full object.
    def construct_yaml_map(self, node):
        obj, = SafeConstructor.construct_yaml_map(self, node)
        return dict_node(obj, node.start_mark, node.end_mark)

    def construct_yaml_seq(self, node):
        obj, = SafeConstructor.construct_yaml_seq(self, node)
        return list_node(obj, node.start_mark, node.end_mark)

    def construct_yaml_str(self, node):
        obj = SafeConstructor.construct_scalar(self, node)
        assert isinstance(obj, str)
        return str_node(obj, node.start_mark, node.end_mark)

    def construct_yaml_int(self, node):
        obj = SafeConstructor.construct_yaml_int(self, node)
        return int_node(obj, node.start_mark, node.end_mark)

    def construct_yaml_float(self, node):
        obj = SafeConstructor.construct_yaml_float(self, node)
        return float_node(obj, node.start_mark, node.end_mark)


NodeConstructor.add_constructor(
        'tag:yaml.org,2002:map',
        NodeConstructor.construct_yaml_map)

NodeConstructor.add_constructor(
        'tag:yaml.org,2002:seq',
        NodeConstructor.construct_yaml_seq)

NodeConstructor.add_constructor(
        'tag:yaml.org,2002:str',
        NodeConstructor.construct_yaml_str)

NodeConstructor.add_constructor(
        'tag:yaml.org,2002:int',
        NodeConstructor.construct_yaml_int)

NodeConstructor.add_constructor(
        'tag:yaml.org,2002:float',
        NodeConstructor.construct_yaml_float)


class MarkedLoader(Reader, Scanner, Parser, Composer, NodeConstructor, Resolver):
    def __init__(self, stream, filecaption=None):
        Reader.__init__(self, stream)
        if filecaption is not None:
            self.name = filecaption
        Scanner.__init__(self)
        Parser.__init__(self)
        Composer.__init__(self)
        NodeConstructor.__init__(self)
        Resolver.__init__(self)


def marked_yaml_load(stream, filecaption=None):
    loader = MarkedLoader(stream, filecaption)
    try:
        return loader.get_single_data()
    except yaml.MarkedYAMLError as e:
        raise ValidationError(e.problem_mark, ' '.join(filter(None, [e.context, e.problem])), e)
    finally:
        loader.dispose()


def load_yaml_from_file(filename, filecaption=None):
    with open(filename) as file_stream:
        return marked_yaml_load(file_stream, filecaption)


def validate_yaml(doc, schema):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        mark = _find_mark(e.instance) or _find_mark(doc)
        raise ValidationError(mark, e.message, e)


def raw_tree(doc):
    """
    Converts a document consisting of subclasses of
    str/dict/list/etc. to raw str/dict/list/etc.

    >>> doc = marked_yaml_load('{rate: 0.5, modes: [a], dense: true}')
    >>> type(doc['rate']).__name__, type(raw_tree(doc)['rate']).__name__
    ('float_node', 'float')
    """
    if doc is None or isinstance(doc, bool):
        return doc
    elif isinstance(doc, str):
        return str(doc)
    elif isinstance(doc, int):
        return int(doc)
    elif isinstance(doc, float):
        return float(doc)
    elif isinstance(doc, dict):
        return dict(((raw_tree(key), raw_tree(value)) for key, value in doc.items()))
    elif isinstance(doc, (list, tuple)):
        return [raw_tree(child) for child in doc]
    else:
        raise TypeError('document contains illegal type %r' % type(doc))
