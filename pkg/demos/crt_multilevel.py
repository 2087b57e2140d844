"""
==========================================
CRT coordinates and multistage decoding
==========================================

Z_12 is secretly Z_4 x Z_3.  The same isomorphism that splits the ring
splits a mod-12 lattice into prime-power levels, and a relay can decode
one small level at a time instead of one big alphabet.
"""

from latcf import (
    CrtMap,
    LatticePair,
    LinearCode,
    PrimeField,
    construction_pi_a,
    multistage_roundtrip,
)

# the isomorphism Z_12 -> Z_4 x Z_3 and its inverse M
crt = CrtMap([4, 3])
print("q =", crt.q, " moduli =", crt.moduli)
print("residues of 0..11:")
for a in range(12):
    print(f"  {a:2d} -> {crt.sigma(a)}")

# M is the inverse: pick residues, get the unique integer back
coords = (3, 2)
a = crt.forward(coords)
print("forward", coords, "->", a, " sigma back ->", crt.sigma(a))

# decompose writes any integer as M(residues) + q * quotient
for value in (17, -5):
    residues, quot = crt.decompose(value)
    print(f"{value} = M{residues} + {crt.q} * {quot}")

# ---------------------------------------------------------------------------
# multistage: decode the mod-2 level and the mod-3 level separately

fine = construction_pi_a(
    [LinearCode(PrimeField(2), [[1, 1]]), LinearCode(PrimeField(3), [[1, 1]])]
)
pair = LatticePair(fine)
crt6 = fine.map

a = [1, 2]  # integer relay coefficients
messages = [
    [(1,), (2,)],  # source 1: level-2 message 1, level-3 message 2
    [(0,), (1,)],  # source 2
]
print("\nsources (level-2 msg, level-3 msg):", messages, " coefficients a =", a)

per_level = multistage_roundtrip(pair, messages, a)
print("decoded per level:", per_level)

# reassemble with M and compare against doing everything mod 6 at once
reassembled = crt6.forward((per_level[0][0], per_level[1][0]))
single = 0
for ak, (w2, w3) in zip(a, messages):
    single = (single + ak * crt6.forward((w2[0], w3[0]))) % 6
print("M(level decodes) =", reassembled, "  direct mod-6 function =", single)
assert reassembled == single
