import logging
from typing import Dict, List, Optional

from .coverage import GridSpec, IndicatrixField, coverage_mask
from .exceptions import ConverterException
from .geometry.path import ExperimentPath
from .importer.config import ExperimentConfig
from .metrics import MetricReport, compare
from .recon import Volume, backpropagate, backpropagate_sym, fY_oracle, inverse_ndft_reconstruct
from .scattering.fdt import born_sinogram
from .scattering.forward import Sinogram, add_noise, forward_ndft
from .scattering.phantom import Phantom

logger = logging.getLogger(__name__)


class Experiment:
    """
    One configured diffraction-tomography experiment, tying path, phantom,
    simulation, coverage and reconstruction together.
    """

    def __init__(
            self,
            config: ExperimentConfig,
            threads: int = 1,
            progress: bool = False
    ):
        self.config = config
        self.threads = threads
        self.progress = progress
        self._path = None

    def __str__(self):
        return f"<{self.__class__.__name__}> family={self.config.path.get('family')}, method={self.config.method}"

    def __repr__(self):
        return self.__str__()

    def show_attrs(
            self,
            blocks=None
    ) -> Dict:
        """
        Get the configuration as a plain dict.

        Parameters
        ----------
        blocks: List
            Keys you don't need.

        Returns
        -------
        Dict
        """
        blocks = blocks or []
        return {k: v for k, v in self.config.to_dict().items() if k not in blocks}

    @property
    def path(self) -> ExperimentPath:
        if self._path is None:
            self._path = self.config.build_path()
        return self._path

    def phantom(self) -> Phantom:
        return self.config.build_phantom()

    def simulate(
            self,
            phantom: Phantom,
            oracle: bool = False
    ) -> Sinogram:
        """
        Simulate Born data; ``oracle`` uses the direct quadrature instead of the
        NDFT. Noise from the config is added with the config seed.
        """
        c = self.config
        if oracle:
            sino = born_sinogram(phantom, self.path, c.M, c.N, c.r_M, c.x_grid, progress=self.progress)
        else:
            sino = forward_ndft(phantom, self.path, c.M, c.N, c.r_M, c.x_grid, threads=self.threads)
        if c.noise > 0:
            sino = add_noise(sino, c.noise, c.seed)
        return sino

    def grid(self) -> GridSpec:
        return GridSpec.for_path(self.path, self.config.indicatrix.Q)

    def indicatrix(self, sym: Optional[bool] = None) -> IndicatrixField:
        sym = self.config.indicatrix.sym if sym is None else sym
        return coverage_mask(self.path, self.grid(), sym=sym, N=self.config.n_est, progress=self.progress)

    def coverage(self, sym: Optional[bool] = None) -> IndicatrixField:
        """The indicatrix thresholded to a 0/1 coverage mask."""
        field = self.indicatrix(sym)
        return IndicatrixField(field.grid, field.mask(), sym=field.sym)

    def reconstruct(
            self,
            sino: Optional[Sinogram] = None,
            indicatrix: Optional[IndicatrixField] = None,
            phantom: Optional[Phantom] = None
    ) -> Volume:
        """
        Run the configured method. 'oracle' needs the phantom and projects it on
        the coverage; the other methods need the sinogram. A missing indicatrix
        is estimated (with sym for 'bp-sym').
        """
        c = self.config
        method = c.method
        if method == 'oracle':
            if phantom is None:
                raise ConverterException(message='method "oracle" needs the phantom')
            return fY_oracle(phantom, indicatrix or self.indicatrix(sym=False))
        if sino is None:
            raise ConverterException(message=f'method "{method}" needs a sinogram')
        if method == 'bp':
            return backpropagate(
                sino, self.path, c.P, indicatrix or self.indicatrix(sym=False), c.r_M, self.threads,
                zero_limit=c.indicatrix.zero_limit
            )
        if method == 'bp-sym':
            return backpropagate_sym(
                sino, self.path, c.P, indicatrix or self.indicatrix(sym=True), c.r_M, self.threads,
                zero_limit=c.indicatrix.zero_limit
            )
        if method == 'inverse-ndft':
            return inverse_ndft_reconstruct(
                sino, self.path, c.P, c.r_M,
                tol=c.cg.tol, max_iter=c.cg.max_iter, real_constraint=c.cg.real_constraint,
                threads=self.threads, progress=self.progress
            )
        raise ConverterException(message=f'Do not support method "{method}"')

    @staticmethod
    def compare(
            reference,
            volumes: Dict
    ) -> List[MetricReport]:
        """
        PSNR and SSIM of every volume against the reference, best PSNR first.
        Phantoms, volumes and plain arrays are accepted on both sides.
        """
        values = {name: getattr(v, 'values', v) for name, v in volumes.items()}
        return compare(getattr(reference, 'values', reference), values)
