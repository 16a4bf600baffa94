"""Build a curve over F_1009 whose order is divisible by 5 with the CM route, step by step."""

from curvesmith.classpoly import hilbert_class_poly
from curvesmith.construct import cm_construct, validate_certificate
from curvesmith.curve import count_points_exhaustive
from curvesmith.polyfp import reduce_mod_p, roots_of_split

p, m = 1009, 5
res = cm_construct(p, m)
c = res.certificate
print(f"p = {p}, m = {m}")
print(f"auxiliary prime v = {c.v}, trace t = {c.t} (t = {c.crt_residue} mod {c.crt_modulus})")
print(f"t^2 - 4p = {c.t * c.t - 4 * p} = {c.u}^2 * ({c.D})")

H = hilbert_class_poly(c.D)
print(f"H_{c.D} has degree {H.degree} and {H.bit_size()} coefficient bits")
roots = roots_of_split(reduce_mod_p(H.coeffs, p))
print(f"its roots mod {p}: {roots}")

print(f"chosen curve y^2 = x^3 + {res.curve.a} x + {res.curve.b}, j = {res.j}")
N = count_points_exhaustive(res.curve).N
print(f"recounted order {N} = {m} * {N // m}")
print("certificate valid:", validate_certificate(p, m, res))
