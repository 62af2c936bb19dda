import json
import math
from typing import Dict, List

import numpy as np
from skimage.metrics import structural_similarity

from .exceptions import ParamException

PSNR_CAP = 300.0


def _pair(reference, candidate):
    # metrics act on the real part
    reference = np.real(np.asarray(reference)).astype(float)
    candidate = np.real(np.asarray(candidate)).astype(float)
    if reference.shape != candidate.shape:
        raise ParamException(message=f'shapes differ: {reference.shape} vs {candidate.shape}')
    peak = float(reference.max() - reference.min())
    return reference, candidate, peak


def psnr(
        reference,
        candidate
) -> float:
    """10 log10(peak^2 / MSE) with peak = max - min of the reference; +inf for identical arrays."""
    reference, candidate, peak = _pair(reference, candidate)
    mse = float(np.mean((reference - candidate) ** 2))
    if mse == 0:
        return math.inf
    if peak == 0:
        raise ParamException(message='reference is constant')
    return 10 * math.log10(peak * peak / mse)


def ssim(
        reference,
        candidate
) -> float:
    """Mean SSIM with an 11 x 11 Gaussian window (sigma 1.5) and the reference's peak."""
    reference, candidate, peak = _pair(reference, candidate)
    if min(reference.shape) < 11:
        raise ParamException(message=f'SSIM needs at least 11 samples per axis, got {reference.shape}')
    if peak == 0:
        raise ParamException(message='reference is constant')
    return float(structural_similarity(
        reference, candidate,
        data_range=peak,
        gaussian_weights=True,
        sigma=1.5,
        use_sample_covariance=False
    ))


class MetricReport:
    __slots__ = ['name', 'psnr_db', 'ssim', 'mse']

    def __init__(self, name, psnr_db, ssim, mse):
        self.name = name
        self.psnr_db = psnr_db
        self.ssim = ssim
        self.mse = mse

    def __repr__(self):
        return f'<{self.__class__.__name__}> {self.name}: PSNR={self.psnr_db:.2f} dB, SSIM={self.ssim:.4f}'

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'psnr_db': min(self.psnr_db, PSNR_CAP),
            'ssim': self.ssim,
            'mse': self.mse
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def report(
        reference,
        candidate,
        name: str = ''
) -> MetricReport:
    ref, cand, _ = _pair(reference, candidate)
    return MetricReport(name, psnr(ref, cand), ssim(ref, cand), float(np.mean((ref - cand) ** 2)))


def compare(
        reference,
        candidates: Dict[str, np.ndarray]
) -> List[MetricReport]:
    """Reports for every candidate, best PSNR first."""
    reports = [report(reference, values, name) for name, values in candidates.items()]
    return sorted(reports, key=lambda r: r.psnr_db, reverse=True)
