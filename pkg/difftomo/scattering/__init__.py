from .phantom import Phantom, make_phantom
from .green import green_function, plane_wave
from .forward import Sinogram, born_forward_direct, forward_ndft, rytov_to_born, add_noise
from .fdt import generalized_fdt_rhs, fdt_check, detector_line, transverse_transform, born_sinogram
