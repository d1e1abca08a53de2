"""
:mod:`twophoton.core.hasher` -- Provenance digests
===================================================

Output files carry a digest of the model and parameters that produced
them (the ``model_id`` header), and correlation outputs carry the
digest of the frame set they were computed from. Both use the
functions below.

"""

import json
import hashlib
import base64
import struct

import numpy as np

hash_type = hashlib.sha256


def hash_document(doctype, doc):
    """
    Computes a hash from a JSON-like document: compact JSON with sorted
    keys, prefixed by ``{doctype}|``, hashed with sha256. Keys starting
    with ``nohash_`` are left out (see :func:`prune_nohash`).

    Floats are serialized with their shortest round-trip ``repr``, so
    the same parameters always give the same id; ``0.5`` and ``1/2``
    are the same float and hash alike.

    >>> hash_document('model', {'rate': 0.5}) == hash_document('model', {'rate': 1 / 2})
    True
    >>> hash_document('model', {'rate': 0.5}) == hash_document('grid', {'rate': 0.5})
    False
    """
    serialized = json.dumps(prune_nohash(doc), indent=None, sort_keys=True, separators=(',', ':'),
                            ensure_ascii=True, allow_nan=False)
    h = hash_type((doctype + '|').encode('ascii'))
    h.update(serialized.encode('utf-8'))
    return format_digest(h)


def prune_nohash(doc):
    """
    Returns a copy of the document with every key/value-pair whose key
    starts with ``'nohash_'`` removed. Used for header fields such as
    the thread count that must not change the model id.
    """
    if isinstance(doc, (int, bool, float, str)) or doc is None:
        r = doc
    elif isinstance(doc, dict):
        r = {}
        for key, value in doc.items():
            assert isinstance(key, str)
            if not key.startswith('nohash_'):
                r[key] = prune_nohash(value)
    elif isinstance(doc, (list, tuple)):
        r = [prune_nohash(child) for child in doc]
    else:
        raise TypeError('document contains illegal type %r' % type(doc))
    return r


def argsort(seq):
    return sorted(range(len(seq)), key=seq.__getitem__)


class DocumentSerializer(object):
    """
    Stable type-tagged serialization of nested objects into a stream

    Each object is emitted with an envelope giving its type and its
    length (items for containers, bytes for buffers), so that two
    different documents cannot produce the same stream. Dict keys must
    be strings and are emitted in sorted order. NumPy arrays are
    emitted with dtype and shape followed by their raw bytes.

    Parameters
    ----------

    wrapped : object
        `wrapped.update` is called with ``bytes`` (the API of the
        ``hashlib`` hashers)
    """
    def __init__(self, wrapped):
        self._wrapped = wrapped

    def update(self, x):
        w = self._wrapped
        if isinstance(x, (bytes, bytearray, memoryview)):
            x = bytes(x)
            w.update(b'B%d:' % len(x))
            w.update(x)
        elif isinstance(x, str):
            self.update(x.encode('UTF-8'))
        elif x is True:
            w.update(b'T')
        elif x is False:
            w.update(b'F')
        elif x is None:
            w.update(b'N')
        elif isinstance(x, float):
            w.update(b'R')
            w.update(struct.pack('<d', x))
        elif isinstance(x, int):
            s = str(x).encode('ascii')
            w.update(b'I%d:' % len(s))
            w.update(s)
        elif isinstance(x, np.ndarray):
            header = '%s%r' % (x.dtype.str, x.shape)
            w.update(b'A')
            self.update(header)
            self.update(np.ascontiguousarray(x).tobytes())
        elif isinstance(x, (list, tuple)):
            w.update(b'L%d:' % len(x))
            for child in x:
                self.update(child)
        elif isinstance(x, dict):
            w.update(b'D%d:' % len(x))
            keys = list(x.keys())
            for key in keys:
                if not isinstance(key, str):
                    raise NotImplementedError('hashing of dict with non-string key')
            for i in argsort(keys):
                self.update(keys[i])
                self.update(x[keys[i]])
        elif isinstance(x, set):
            raise TypeError('sets not supported')
        else:
            raise TypeError('cannot serialize object of type %r' % type(x))


class Hasher(DocumentSerializer):
    """
    Cryptographically hashes buffers, arrays or nested objects.
    See :class:`DocumentSerializer` for the stream format.
    """
    def __init__(self, x=None):
        DocumentSerializer.__init__(self, hash_type())
        if x is not None:
            self.update(x)

    def digest(self):
        return self._wrapped.digest()

    def format_digest(self):
        return format_digest(self._wrapped)


def format_digest(hasher):
    """The standard text encoding of digests::

        base64.b32encode(hasher.digest()[:20]).decode('ascii').lower()

    Parameters
    ----------
    hasher : hasher object
        An object with a `digest` method (a :class:`Hasher` or
        an object from the :mod:`hashlib` module)
    """
    return base64.b32encode(hasher.digest()[:20]).decode('ascii').lower()
