"""
The 4 x 4 checkerboard
======================

A nonlinear problem: Gaussian-kernel regression of the midpoint estimates,
with the kernel width and smoothing parameter picked by 5-fold
cross-validation on the training set. Saves a picture of the decision
function if matplotlib is installed.
"""

import numpy as np

from sdfclass import CvConfig, cross_validate, fit_kernel, gen_checkerboard_grid, gen_checkerboard_train
from sdfclass.sdf_estimate import estimate

train = gen_checkerboard_train(1000, seed=3)
grid = gen_checkerboard_grid(200)

# sigma grid as multiples of the mean pairwise distance of the training set
cv = CvConfig(sigma_grid=[0.1, 0.15, 0.2, 0.25], gamma_grid=[1e-2, 1e-3, 1e-4], folds=5, seed=0,
              sigma_relative_to="mean")
res = cross_validate(train, None, cv)
print("cv accuracy table (rows sigma factor, cols gamma):")
print(np.round(res.table, 3))
print(f"chosen sigma={res.best_sigma:.3f} gamma={res.best_gamma:g}")

model = fit_kernel(train.points, estimate(train).b, res.best_sigma, res.best_gamma)
values = model.decision_function(grid.points)
print("grid accuracy: %.4f" % np.mean(model.predict(grid.points) == grid.labels))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    img = values.reshape(200, 200).T
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(img, origin="lower", extent=(0, 4, 0, 4), cmap="RdBu")
    ax.contour(np.linspace(0, 4, 200), np.linspace(0, 4, 200), img, levels=[0], colors="k")
    ax.set_title("estimated signed distance, zero level in black")
    fig.savefig("checkerboard.png", dpi=100)
    print("wrote checkerboard.png")
