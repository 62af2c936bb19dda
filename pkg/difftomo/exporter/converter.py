import os
from os.path import exists, join
from typing import List, Tuple

import numpy as np

from ..coverage import IndicatrixField
from ..exceptions import ConverterException
from ..metrics import MetricReport
from ..recon import Volume
from ..scattering.forward import Sinogram
from ..scattering.phantom import Phantom
from ._standard import _to_csv, _to_json
from .nbin import write_nbin
from .pgm import write_pgm

__supported_format__ = {
    'phantom': ['nbin', 'pgm'],
    'sinogram': ['nbin'],
    'indicatrix': ['nbin', 'pgm'],
    'volume': ['nbin', 'pgm', 'csv'],
    'metrics': ['json']
}


def kind_of(artifact) -> str:
    if isinstance(artifact, Phantom):
        return 'phantom'
    if isinstance(artifact, Sinogram):
        return 'sinogram'
    if isinstance(artifact, IndicatrixField):
        return 'indicatrix'
    if isinstance(artifact, Volume):
        return 'volume'
    if isinstance(artifact, (list, tuple)) and all(isinstance(a, MetricReport) for a in artifact):
        return 'metrics'
    raise ConverterException(message=f'Do not support exporting {type(artifact).__name__}')


def to_payload(artifact) -> Tuple[np.ndarray, dict]:
    """Array and header metadata that describe an artifact completely."""
    kind = kind_of(artifact)
    if kind == 'phantom':
        return artifact.values, {
            'kind': kind,
            'r_M': artifact.r_M,
            'support_radius': artifact.support_radius,
            'info': artifact.meta
        }
    if kind == 'sinogram':
        return artifact.data, {
            'kind': kind,
            'r_M': artifact.r_M,
            'x_grid': artifact.x_grid,
            'times': artifact.times,
            'x_unit': artifact.x_unit,
            'valid': artifact.valid,
            'info': artifact.meta
        }
    if kind == 'indicatrix':
        return artifact.values.astype(float), {
            'kind': kind,
            'grid': artifact.grid.to_dict(),
            'sym': artifact.sym
        }
    if kind == 'volume':
        return artifact.values, {
            'kind': kind,
            'r_M': artifact.r_M,
            'method': artifact.method,
            'info': artifact.meta
        }
    raise ConverterException(message=f'{kind} has no array payload')


class Result:
    """One pipeline artifact and the file formats it can be exported to."""

    def __init__(self,
                 artifact,
                 name: str
                 ):
        self.artifact = artifact
        self.kind = kind_of(artifact)
        self.name = name

    def __str__(self):
        return f"Result(kind={self.kind}, name={self.name})"

    def __repr__(self):
        return self.__str__()

    @property
    def supported_format(self) -> List[str]:
        return __supported_format__[self.kind]

    def convert(self, format: str, export_folder: str) -> str:
        """
        Write the artifact in the given format.

        Parameters
        ----------
        format: str
            One of ``supported_format``.
        export_folder: str
            Created when missing.

        Returns
        -------
        str
            The written file.
        """
        format = format.lower()
        if format not in self.supported_format:
            raise ConverterException(
                message=f'Do not support {self.kind} to {format}. Supported formats: {self.supported_format}'
            )
        if not exists(export_folder):
            os.makedirs(export_folder, exist_ok=True)
        target = join(export_folder, f'{self.name}.{format}')
        if format == 'nbin':
            array, meta = to_payload(self.artifact)
            return write_nbin(target, array, meta)
        if format == 'pgm':
            return write_pgm(target, self.artifact.values)
        if format == 'json':
            return _to_json({'reports': [r.to_dict() for r in self.artifact]}, target)
        # csv: residual history of an iterative reconstruction
        residuals = self.artifact.meta.get('residuals')
        if residuals is None:
            raise ConverterException(message=f'{self.artifact.method} volume has no residual history')
        normal = self.artifact.meta.get('normal_residuals', [None] * len(residuals))
        rows = [(k, r, n) for k, (r, n) in enumerate(zip(residuals, normal))]
        return _to_csv(rows, ('iteration', 'residual', 'normal_residual'), target)
