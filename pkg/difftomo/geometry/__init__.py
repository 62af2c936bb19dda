from .path import ExperimentPath, PathPiece
from .families import make_path, angle_rotation_path, two_scan_path, dual_axis_path, rotation_2d
from .transform import kappa, hemisphere_h, transform_T, transform_Tsym, jacobian_det, jacobian_det_fd
from .samples import FrequencySamples, transverse_grid
