import numpy as np

from ..coverage import GridSpec, IndicatrixField
from ..exceptions import NbinException
from ..exporter.nbin import read_nbin
from ..recon import Volume
from ..scattering.forward import Sinogram
from ..scattering.phantom import Phantom

__supported_kind__ = ['phantom', 'sinogram', 'indicatrix', 'volume']


class Parser:
    """Rebuild a pipeline artifact from an NBIN file written by ``Result.convert``."""

    def __init__(self, source_path: str):
        self.source_path = source_path

    def __repr__(self):
        return f'<{self.__class__.__name__}> {self.source_path}'

    def parser(self, expected: str = None):
        """
        Parameters
        ----------
        expected: str
            Optional kind the file has to contain.

        Returns
        -------
        Phantom, Sinogram, IndicatrixField or Volume
        """
        array, meta = read_nbin(self.source_path)
        kind = meta.get('kind')
        if kind not in __supported_kind__:
            raise NbinException(message=f'{self.source_path} holds no known artifact (kind={kind})')
        if expected and kind != expected:
            raise NbinException(message=f'{self.source_path} holds a {kind}, expected a {expected}')
        try:
            return getattr(self, f'_to_{kind}')(array, meta)
        except KeyError as e:
            raise NbinException(message=f'{self.source_path} lacks header field {e}')

    @staticmethod
    def _to_phantom(array, meta):
        return Phantom(array, meta['r_M'], meta['support_radius'], meta.get('info'))

    @staticmethod
    def _to_sinogram(array, meta):
        return Sinogram(
            array,
            meta['times'],
            np.asarray(meta['x_unit'], dtype=float).reshape(-1, array.ndim - 1),
            meta['valid'],
            meta['r_M'],
            meta['x_grid'],
            meta.get('info')
        )

    @staticmethod
    def _to_indicatrix(array, meta):
        grid = GridSpec(**meta['grid'])
        return IndicatrixField(grid, np.rint(array.real).astype(np.int64), sym=bool(meta['sym']))

    @staticmethod
    def _to_volume(array, meta):
        info = dict(meta.get('info') or {})
        info.pop('method', None)
        return Volume(array, meta['r_M'], meta['method'], info)
