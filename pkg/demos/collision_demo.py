"""How much the x-map of [m] shrinks the set of x-coordinates."""

from curvesmith.collision import measure
from curvesmith.construct import cm_construct
from curvesmith.curve import group_structure

p = 4001
for m in (2, 3, 4, 6, 8):
    E = cm_construct(p, m).curve
    rep = measure(E, m)
    gs = group_structure(E)
    print(
        f"m = {m}: E = Z/{gs.n1} x Z/{gs.n2}, |X| = {rep.domain_size}, |f(X)| = {rep.image_size}, "
        f"p/m = {p / m:.0f}, collisions = {rep.collision_count}, map degree = {rep.degree}"
    )
