"""Chern character transport and the operation c on line-bundle classes.

Run with ``python3 demos/riemann_roch.py``.
"""

from morava_kit.fgl import TheoryDescriptor
from morava_kit.rr import ch_transport, integrality_report, line_bundle_classes, operation_c, witt_hom_C

K21 = TheoryDescriptor("morava", 2, 1)
x, y = line_bundle_classes(K21, ["x", "y"], 3)

for name, alpha in [("x", x), ("x*y", x * y), ("x + y", x + y), ("x^2 + x*y", x**2 + x * y)]:
    print(f"alpha = {name}")
    print(f"  ch(alpha)  = {ch_transport(alpha)}")
    print(f"  c(alpha)   = {operation_c(alpha)}")
    print(f"  integral   : {all(ok for ok, _ in integrality_report(alpha).values())}")

# C is additive for the Witt group structure, not for ordinary addition
lhs = witt_hom_C(x + y)
rhs = witt_hom_C(x) + witt_hom_C(y)
print(f"C(x + y) = C(x) +_W C(y): {lhs == rhs}")
