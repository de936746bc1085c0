"""gaborlab: numerical laboratory for Gabor analysis of tau-quantized operators.

Discretizes the short-time Fourier transform, Gabor frames, tau-Wigner and
Born-Jordan distributions, tau-pseudodifferential Gabor matrices, weighted
modulation/Besov norms, and the machinery to measure super-polynomial
off-diagonal Gabor matrix decay and its uniformity in tau.
"""

from .phase_space import (Grid, SampledSignal, PhaseSpacePoint, Lattice,
                          WeightSpec, weight_eval, check_moderate, tf_shift,
                          snap_to_grid, t_tau, j_rot, j_rot_inv,
                          invert_change_of_variables, forward_transform,
                          inverse_transform, bracket, bracket_point, kahan_sum)
from .windows import (AnalyticWindow, GaussianWindow, PolyGaussianWindow,
                      gaussian_window, poly_gaussian_window)
from .stft import (PhaseSpaceArray, FrameReport, stft, adjoint_stft,
                   reconstruct, frame_bounds)
from .wigner import (Quadrature, gauss_legendre, tau_wigner, born_jordan_dist,
                     wigner_covariance_check)
from .symbols import (SymbolSpec, SeminormReport, constant, bracket_power,
                      separable_x, separable_omega, trig, chirp, profile_gauss,
                      profile_cos, profile_sin, eval_symbol, eval_symbol_grid,
                      seminorm, finite_difference_crosscheck, parse_symbol)
from .quantization import (GaborMatrix, RouteDeviation, gabor_matrix_direct,
                           gabor_matrix_stft, born_jordan_matrix,
                           apply_operator, route_deviation, reference_entry,
                           sample_symbol)
from .norms import (LatticeArray, PartitionOfUnity, EmbeddingReport,
                    weighted_seq_norm, modulation_norm_stft,
                    freq_uniform_decomp, modulation_norm_decomp, besov_norm,
                    check_embedding, cube_partition, dyadic_partition)
from .decay import (DecayReport, TauSweepReport, BJDecayReport, envelope,
                    envelope_norm, decay_order_fit, verify_th34, tau_sweep,
                    bj_decay_check)
from .signals import signal_family, make_signal, SIGNAL_NAMES

__version__ = "0.1.0"
