"""Morava formal group laws, the morphism phi and the Witt sum polynomials.

Run with ``python3 demos/morava_laws.py``.
"""

from morava_kit.fgl import check_fgl_axioms, morava_fgl, phi_morphism
from morava_kit.witt import morava_ghost, sigma_integrality, sigma_polynomials

for p, n in [(2, 1), (3, 1), (2, 2)]:
    q = p**n
    F = morava_fgl(p, n, q + 2)
    print(f"K({n}) at p = {p}:")
    print(f"  F(x, y)  = {F.F}")
    print(f"  axioms   : {'ok' if check_fgl_axioms(F).passed else 'FAILED'}")
    print(f"  phi(t)   = {phi_morphism(p, n, 2 * q)}")

    # the first p^n - 1 sum polynomials are additive; the p^n-th carries the correction
    g = morava_ghost(p, n, q)
    print(f"  S_{q}      = {sigma_polynomials(g)[q - 1]}")
    ok = all(r[1] for r in sigma_integrality(morava_ghost(p, n, q + p), p))
    print(f"  S_1..S_{q + p} p-integral: {ok}")
    print()
