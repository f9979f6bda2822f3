"""Signed-distance-function classifiers.

Labels are turned into estimates of the signed distance to the class
boundary, a linear or Gaussian-kernel model is regressed on those estimates,
and the sign of the model classifies new points.
"""

from .dataset import (DataError, Dataset, Metric, correlation_weights, distance, interdistance_stat,
                      load_csv, write_csv)
from .kernel_sdf import KernelModel, fit_kernel, gram, iterate_kernel, predict_kernel
from .linear_sdf import LinearModel, fit_linear, iterate_linear, normalize, predict_linear
from .modelselect import CvConfig, CvResult, cross_validate, loocv, sigma_heuristic
from .sdf_estimate import SdfEstimates, initial_estimates, midpoint_refine
from .synthdata import (LinearProblemKind, checkerboard_label, gen_checkerboard_grid, gen_checkerboard_train,
                        gen_linear)

__version__ = "0.1.0"
