"""Euler characteristics and motivic decompositions of split quadrics by localization.

Run with ``python3 demos/quadric_motives.py``.
"""

from morava_kit.fgl import TheoryDescriptor
from morava_kit.quadric import (
    NotAUnitError,
    QuadricSpec,
    euler_char_projector,
    euler_characteristic,
    neza_matrix,
    tate_decomposition,
    verify_decomposition,
)

CHOW = TheoryDescriptor("chow")
K0 = TheoryDescriptor("k0")
K21 = TheoryDescriptor("morava", 2, 1)

for l in (2, 3):
    print(f"Q^{2 * l - 2}:")
    for desc in (CHOW, K0, K21):
        chi = euler_characteristic(QuadricSpec(l, desc)).constant_term()
        print(f"  chi in {desc.label:12s} = {chi}")

    dec = tate_decomposition(QuadricSpec(l, CHOW))
    rep = verify_decomposition(dec)
    print(f"  Chow motive = {dec.summary()}  (orthogonal idempotents: {rep['orthogonal']}, sum = diagonal: {rep['complete']})")

    try:
        euler_char_projector(QuadricSpec(l, K0))
        print("  K0: chi^-1 (1 x 1) is a projector")
    except NotAUnitError as exc:
        print(f"  K0: {exc}")

M, det = neza_matrix(QuadricSpec(2, K0))
print(f"three-term assembly on Q x Q at l = 2: rank {len(M)}, determinant {det}")
