"""Look for a smooth m in [M, 2M] together with a curve whose order it divides."""

from curvesmith.construct import smooth_pair
from curvesmith.modmath import factor_full

p, M = 1000003, 300
pair = smooth_pair(p, M, seed=1)
factors = " * ".join(f"{q}^{e}" if e > 1 else str(q) for q, e in factor_full(pair.m).factors)
print(f"p = {p}, M = {M}, smoothness bound y = {pair.y}")
print(f"found m = {pair.m} = {factors} after {pair.trials} random curves")
E = pair.result.curve
print(f"curve y^2 = x^3 + {E.a} x + {E.b} has {pair.result.order.N} points")
