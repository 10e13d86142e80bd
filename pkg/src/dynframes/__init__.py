"""Dynamical-sampling frames, Carleson sequences and H^2 interpolation."""

__version__ = "0.1.0"

from .disc import (DiscSequence, carleson_infimum, pseudohyperbolic_distance,
                   validate_disc_sequence)
from .errors import *  # noqa: F401,F403
from .frames import (FrameBoundEstimate, FrameOperatorMatrix, IteratedSystem, SynthesisMatrix,
                     VectorSystem, analyze, build_synthesis, frame_bounds,
                     frame_operator_closed_form, frame_operator_truncated, generate_fixture,
                     reconstruct, representation_residual, select_order,
                     shift_domination_constant, synthesize)
from .hardy import PolyFunction, min_norm_interpolant, phi_lambda, surjectivity_probe
from .sequences import (SequenceSpec, admissibility_check, carleson_lower_bound, generate,
                        ratio_condition_constant)
from .tensor import (TensorCoefficients, TensorSystem, frame_trend_experiment,
                     kron_frame_operator, tensor_carleson_infimum, tensor_frame_bounds,
                     tensor_synthesis_apply)
