"""
Signed distance estimates and the linear classifier
===================================================

Two classes separated by the line x2 = 0. The true signed distance of a
point to the boundary is just its second coordinate, so we can see how good
the label-only estimates are before fitting anything.
"""

import numpy as np

from sdfclass import gen_linear, initial_estimates, iterate_linear, midpoint_refine, normalize
from sdfclass.synthdata import linear_true_sdf

data = gen_linear("uniform", 200, seed=1)
truth = linear_true_sdf(data.points)

# distance to the nearest point of the other class: correct sign, but too large
est = initial_estimates(data)
print("every |b_i| bounds the true distance:", bool(np.all(np.abs(truth) <= np.abs(est.b))))

# halving towards the partner point roughly centres the boundary
ref = midpoint_refine(est)
print("mean |error| initial  : %.4f" % np.mean(np.abs(est.b - truth)))
print("mean |error| midpoint : %.4f" % np.mean(np.abs(ref.b - truth)))

# least-squares plane through the estimates, then the projection iteration
test = gen_linear("uniform", 4000, seed=2)
for iterations in (0, 5):
    model = normalize(iterate_linear(data, iterations=iterations))
    acc = np.mean(model.predict(test.points) == test.labels)
    print(f"iterations={iterations}: w={np.round(model.w, 4)}, c={model.c:+.4f}, test accuracy {acc:.4f}")
