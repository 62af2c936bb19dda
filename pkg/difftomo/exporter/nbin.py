"""
NBIN: a one-line UTF-8 JSON header followed by a raw little-endian payload.

    {"dtype": "f64" | "c128", "shape": [...], "order": "row-major", "meta": {...}}\n
    <payload>

Complex payloads are interleaved (re, im) float64 pairs.
"""
import json
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import NbinException

DTYPES = {
    'f64': np.dtype('<f8'),
    'c128': np.dtype('<c16')
}


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def encode_nbin(
        array,
        meta: Optional[Dict] = None
) -> bytes:
    array = np.asarray(array)
    tag = 'c128' if np.iscomplexobj(array) else 'f64'
    header = {
        'dtype': tag,
        'shape': list(array.shape),
        'order': 'row-major',
        'meta': _jsonable(meta or {})
    }
    line = json.dumps(header, ensure_ascii=False, separators=(',', ':'))
    if '\n' in line:
        raise NbinException(message='header must fit on one line')
    payload = np.ascontiguousarray(array, dtype=DTYPES[tag]).tobytes(order='C')
    return line.encode('utf-8') + b'\n' + payload


def decode_nbin(blob: bytes) -> Tuple[np.ndarray, Dict]:
    end = blob.find(b'\n')
    if end < 0:
        raise NbinException(message='missing header line')
    try:
        header = json.loads(blob[:end].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise NbinException(message=f'malformed header: {e}')
    for key in ('dtype', 'shape', 'order'):
        if key not in header:
            raise NbinException(message=f'header lacks "{key}"')
    if header['dtype'] not in DTYPES:
        raise NbinException(message=f'unknown dtype {header["dtype"]}')
    if header['order'] != 'row-major':
        raise NbinException(message=f'unsupported order {header["order"]}')
    dtype = DTYPES[header['dtype']]
    shape = tuple(int(n) for n in header['shape'])
    payload = blob[end + 1:]
    expected = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    if len(payload) != expected:
        raise NbinException(message=f'payload has {len(payload)} bytes, expected {expected}')
    array = np.frombuffer(payload, dtype=dtype).reshape(shape).copy()
    return array, header.get('meta', {})


def write_nbin(
        path: str,
        array,
        meta: Optional[Dict] = None
) -> str:
    try:
        with open(path, 'wb') as f:
            f.write(encode_nbin(array, meta))
    except OSError as e:
        raise NbinException(message=f'cannot write {path}: {e}')
    return path


def read_nbin(path: str) -> Tuple[np.ndarray, Dict]:
    try:
        with open(path, 'rb') as f:
            blob = f.read()
    except OSError as e:
        raise NbinException(message=f'cannot read {path}: {e}')
    return decode_nbin(blob)
