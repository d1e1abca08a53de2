import copy
import io

import numpy as np

from .. import hasher
from .utils import assert_raises


def test_prune_nohash():
    doc = {'a': [[{'nohash_threads': [1, 2, 3]},
                  1, True, False, None, 2.3, 'asdf']],
           'nohash_threads': True}
    doc_copy = copy.deepcopy(doc)
    assert {'a': [[{}, 1, True, False, None, 2.3, 'asdf']]} == hasher.prune_nohash(doc)
    # check we didn't change anything in original
    assert doc == doc_copy


def test_hash_document_rejects_nan():
    with assert_raises(ValueError):
        hasher.hash_document('model', {'rate': float('nan')})


def test_hash_document_is_stable_under_key_order():
    a = hasher.hash_document('model', {'modes': ['a'], 'collapse': [{'operator': 'a', 'rate': 1.0}]})
    b = hasher.hash_document('model', {'collapse': [{'rate': 1.0, 'operator': 'a'}], 'modes': ['a']})
    assert a == b
    assert len(a) == 32
    assert a != hasher.hash_document('model', {'modes': ['a'], 'collapse': []})


def test_hash_document_ignores_nohash_keys():
    doc = {'modes': ['a'], 'truncation': [4]}
    assert hasher.hash_document('model', doc) == \
        hasher.hash_document('model', dict(doc, nohash_threads=8))


class Sink(object):
    def __init__(self):
        self.buf = io.BytesIO()

    def update(self, x):
        self.buf.write(x)

    def getvalue(self):
        return self.buf.getvalue()


def assert_serialize(expected, doc):
    sink = Sink()
    serializer = hasher.DocumentSerializer(sink)
    serializer.update(doc)
    assert expected == sink.getvalue()


def test_serialization():
    assert_serialize(b'D2:' b'B1:a' b'I1:3' b'B1:b' b'I1:4', {'a': 3, 'b': 4})
    assert_serialize(b'B1:a', u'a')
    assert_serialize(b'B2:\xc2\x99', u'\x99')
    assert_serialize(b'R\x00\x00\x00\x00\x00\x00\n@', 3.25)
    assert_serialize(b'I1:1', 1)
    assert_serialize(b'T', True)
    assert_serialize(b'L3:TFN', [True, False, None])
    assert_serialize(b'L2:' b'I1:1' b'I1:2', [1, 2])
    assert_serialize(b'L2:' b'I1:1' b'I1:2', (1, 2))
    assert_serialize(b'D2:B1:aI1:3B1:bD1:B1:cL2:I1:1I1:2', {'a': 3, 'b': {'c': [1, 2]}})


def test_array_serialization_includes_shape():
    a = np.arange(6.0)
    assert hasher.Hasher(a).format_digest() != hasher.Hasher(a.reshape(2, 3)).format_digest()
    assert hasher.Hasher(a).format_digest() == hasher.Hasher(a.copy()).format_digest()


def test_unsupported_types():
    with assert_raises(TypeError):
        hasher.Hasher({1, 2})
    with assert_raises(NotImplementedError):
        hasher.Hasher({1: 'a'})
