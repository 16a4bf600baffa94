"""Curves containing Z/r x Z/rs, and why m | N alone does not guarantee it."""

from curvesmith.construct import SubgroupSpec, subgroup_construct
from curvesmith.curve import group_structure
from curvesmith.errors import SubgroupVerificationFailed

for p, r, s in [(1009, 2, 3), (10009, 3, 2), (269, 1, 4)]:
    res = subgroup_construct(p, SubgroupSpec(r, s))
    gs = group_structure(res.curve, res.order)
    print(f"p = {p}, (r, s) = ({r}, {s}): N = {res.order.N}, E = Z/{gs.n1} x Z/{gs.n2}")

# Picking the trace from divisibility only lands on Z/2 x Z/122 here.
try:
    subgroup_construct(269, SubgroupSpec(1, 4), select_structure=False)
except SubgroupVerificationFailed as exc:
    print("divisibility-only choice:", exc)
