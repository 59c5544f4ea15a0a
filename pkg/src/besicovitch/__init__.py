"""Numerical toolkit for generalised Besicovitch almost periodic functions."""

from .core import (Domain, Field, LimsupEstimate, QuadSpec, Window, WindowFamily,
                   geometric_schedule, grid_field, limsup_estimate, make_window,
                   make_window_sweep)
from .luxemburg import (VariableExponent, embedding_constant_check, holder_product_norm,
                        luxemburg_norm, modular)
from .seminorm import (Gauge, SeminormReport, WeightProfile, WindowWeight,
                       besicovitch_bounded, m_p_seminorm, pseudometric_d, weighted_residual)
from .trigpoly import (SpectrumScan, TrigPolynomial, fejer_kernel, fit_polynomial,
                       mean_over_set, mean_value, periodic_component, spectrum_scan)
from .classify import (ClassReport, ShiftSequenceSet, almost_period_search, besicovitch_continuity,
                       classify_besicovitch, doss_residual, nemytskii, normality_check)
from .dosscond import (bohr_average_null_test, condition_A_residual, condition_B_functional,
                       periodize, shift_average, truncate_field)
from .operators import (GreenSpec, KernelSpec, convolve_on_grid, gaussian_semigroup, green_solution,
                        heat_evolution, hypothesis_check_conv, infinite_convolution,
                        semilinear_fixed_point)
from .expr import ExpressionError, expression_field, parse_expression
from .gallery import GALLERY_IDS, gallery_get, gallery_manifest, gallery_verify

__version__ = "0.1.0"
