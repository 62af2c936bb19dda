import numpy as np

from ..exceptions import NbinException, ParamException


def to_gray(values) -> np.ndarray:
    """Linear min-max rescale of the real part to 0..255; constant images map to 0."""
    values = np.real(np.asarray(values)).astype(float)
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.round(255 * (values - lo) / (hi - lo)).astype(np.uint8)


def write_pgm(path: str, values) -> str:
    """8-bit binary (P5) preview; 3D arrays are cut through the middle of the last axis."""
    values = np.asarray(values)
    if values.ndim == 3:
        values = values[..., values.shape[-1] // 2]
    if values.ndim != 2:
        raise ParamException(message=f'PGM needs a 2D image, got shape {values.shape}')
    gray = to_gray(values)
    rows, cols = gray.shape
    try:
        with open(path, 'wb') as f:
            f.write(f'P5\n{cols} {rows}\n255\n'.encode('ascii'))
            f.write(gray.tobytes())
    except OSError as e:
        raise NbinException(message=f'cannot write {path}: {e}')
    return path
