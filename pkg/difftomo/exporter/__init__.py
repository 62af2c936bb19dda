from .converter import Result, to_payload
from .nbin import read_nbin, write_nbin, encode_nbin, decode_nbin
from .pgm import write_pgm
