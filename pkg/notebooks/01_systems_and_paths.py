"""
Parametric systems and single homotopy paths
============================================

A family is a list of terms whose coefficients are affine-linear in the
parameters.  Fixing the parameters gives a square system; two parameter
points and a pair of unit complex numbers give a homotopy between them.
"""

import numpy as np

from monodromy.families import dense_family
from monodromy.polysys import build_homotopy, create_seed_pair, random_complex
from monodromy.tracker import newton_refine, track_path

rng = np.random.default_rng(0)

# Two generic quadrics in two unknowns: every coefficient is a parameter.
F = dense_family([2, 2]).system
print("variables", F.num_vars, "parameters", F.num_params, "terms", F.num_terms)

# A seed pair: pick x0 first, then solve the linear conditions on p.
p0, x0 = create_seed_pair(F, rng)
S0 = F.specialize(p0)
print("residual of the seed point:", S0.residual(x0))

# Track x0 to a fresh random parameter point.
p1 = random_complex(rng, F.num_params)
gammas = np.exp(2j * np.pi * rng.random(2))
H = build_homotopy(F, p0, p1, *gammas)
out = track_path(H, x0)
print("status:", out.status.value, "steps:", out.steps)
print("endpoint:", out.endpoint)

# Newton at the target confirms the endpoint is a regular root.
polished = newton_refine(F.specialize(p1), out.endpoint, 1e-12, 5)
print("converged:", polished.converged, "residual:", polished.residual)

# Tracking back along the reversed homotopy returns to the seed.
back = track_path(H.reversed(), out.endpoint)
print("round trip error:", np.abs(back.endpoint - x0).max())
