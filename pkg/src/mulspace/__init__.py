"""Fourier multipliers, dyadic and uniform frequency decompositions, and
function-space norms on periodic FFT grids."""

__version__ = "0.1.0"

from .errors import QuadratureError, ValidationError
from .grid import (FREQUENCY, SPACE, Grid, GridFunction, SampledSymbol, Symbol, default_grid,
                   forward_transform, inverse_transform, lp_norm, make_grid, sample)
from .partitions import build_dyadic_partition, build_uniform_partition, partition_defect
from .norms import (NormSpec, NormValue, Window, besov_norm, flq_norm, gaussian_window, hardy_norm,
                    herz_norm, modulation_norm, sobolev_norm, stft_modulation_norm)
from .multiplier import (apply_multiplier, condition_report, extract_piece, hormander_integral,
                         kernel_diagnostics, mihlin_sup)
from .fixtures import Band, EnsembleSpec, make_ensemble, parse_symbol, symbol_catalog
from .verify import atom_transfer_ratio, equivalence_ratio, operator_norm_l2
