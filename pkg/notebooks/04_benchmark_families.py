"""
Benchmark families
==================

Cyclic roots, Katsura, a 3-player Nash game, a small reaction network and
dense systems, each with its known generic solution count where one exists.
"""

import numpy as np

from monodromy.families import parse_family

for name in ("cyclic:5", "cyclic:7", "katsura:6", "nash:3x3", "crn-small", "dense:2,3"):
    fam = parse_family(name, np.random.default_rng(0))
    F = fam.system
    print(f"{fam.label:10s} vars={F.num_vars:2d} params={F.num_params:3d} "
          f"terms={F.num_terms:4d} count={fam.count} ({fam.count_source})")

# The reaction network has more equations than unknowns; it is squared by a
# random complex combination, which is kept for reproducibility.
crn = parse_family("crn-small", np.random.default_rng(0)).system
print("squaring matrix shape:", crn.squaring_matrix.shape)
print("original equations:", crn.unsquared.num_equations)
