"""Lattices built from linear codes.

Every real-ambient lattice here has the shape M(C_1 x ... x C_L) + q Z^N,
where the levels are codes over Z/m_l Z for pairwise-coprime prime powers
m_l with product q, and M applies the CRT reconstruction coordinatewise.
The single-code constructions (one prime, one prime power) and the
multi-level ones differ only in how the levels are assembled, so
membership, enumeration and quantization share one code path.  Complex-
ambient lattices replace q Z^N by the N-fold product of a prime ideal of
a quadratic integer ring.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .algebra import (
    ChainRing,
    CrtMap,
    PrimeField,
    PrimeIdeal,
    QuadInt,
    factorize,
    residue_field_map,
)
from .codes import LinearCode, NestedCodeChain, codebook, contains_codeword, lift_chain_to_ring_code

_BOX_CAP = 10**6
_COSET_CAP = 10**6


class LatticeDescriptor:
    """One constructed lattice: levels of codes plus the tiling modulus.

    kind is one of "A", "D", "piA", "piD", "A_OK".  For real lattices q
    is the integer coarse modulus and map the CrtMap over the level
    moduli; for A_OK q is the prime ideal and map the residue field map.
    """

    def __init__(self, kind, N, codes, crt=None, ideal=None, chain=None, levels=None):
        self.kind = kind
        self.N = int(N)
        self.codes = tuple(codes)
        self.chain = chain
        self.levels = levels
        if ideal is not None:
            self.ambient = "complex"
            self.ideal = ideal
            self.map = residue_field_map(ideal)
            self.q = ideal
            self.moduli = None
        else:
            self.ambient = "real"
            self.ideal = None
            self.map = crt
            self.moduli = crt.moduli
            self.q = crt.q
        self._cosets = None

    def __repr__(self):
        tail = f"ideal={self.ideal!r}" if self.ambient == "complex" else f"q={self.q}"
        return f"LatticeDescriptor({self.kind}, N={self.N}, {tail})"


class LatticePair:
    """Nested pair: fine lattice plus the coarse tiling lattice q Z^N
    (or the ideal power for complex ambient), optionally scaled so the
    coarse cell matches a transmit power budget."""

    def __init__(self, fine: LatticeDescriptor, coarse: LatticeDescriptor | None = None,
                 scale: float = 1.0):
        if coarse is None:
            coarse = _zero_code_version(fine)
        self.fine = fine
        self.coarse = coarse
        self.scale = float(scale)
        self.q = fine.q

    def __repr__(self):
        return f"LatticePair(fine={self.fine!r}, scale={self.scale})"


def _zero_code_version(lat: LatticeDescriptor) -> LatticeDescriptor:
    zero_codes = [LinearCode(c.alphabet, [], N=lat.N) for c in lat.codes]
    if lat.ambient == "complex":
        return LatticeDescriptor(lat.kind, lat.N, zero_codes, ideal=lat.ideal)
    return LatticeDescriptor(lat.kind, lat.N, zero_codes, crt=lat.map)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def construction_a(code: LinearCode) -> LatticeDescriptor:
    """C + p Z^N for a code over a prime field."""
    if not isinstance(code.alphabet, PrimeField):
        raise ValueError("construction A needs a code over a prime field")
    return LatticeDescriptor("A", code.N, [code], crt=CrtMap([code.alphabet.p]))


def construction_d(chain: NestedCodeChain, L: int) -> LatticeDescriptor:
    """p^L Z^N plus all sums of p^(l-1)-scaled level-l codewords.

    Realized through the chain-ring lift: the unreduced real sums over
    the nested codebooks span exactly the Z_{p^L} code generated by the
    lifted rows, tiled by p^L Z^N.
    """
    if L < 1:
        raise ValueError("need at least one level")
    if L > chain.levels:
        raise ValueError(f"L={L} exceeds chain depth {chain.levels}")
    lifted = lift_chain_to_ring_code(chain, L)
    return LatticeDescriptor(
        "D", chain.N, [lifted], crt=CrtMap([chain.p**L]), chain=chain, levels=L
    )


def construction_pi_a(codes) -> LatticeDescriptor:
    """CRT-combined lattice from codes over distinct prime fields."""
    codes = list(codes)
    if not codes:
        raise ValueError("need at least one code")
    primes = []
    for c in codes:
        if not isinstance(c.alphabet, PrimeField):
            raise ValueError("every level must be a prime-field code")
        primes.append(c.alphabet.p)
    if len(set(primes)) != len(primes):
        raise ValueError(f"primes must be distinct, got {primes}")
    if len({c.N for c in codes}) != 1:
        raise ValueError("levels have unequal block lengths")
    return LatticeDescriptor("piA", codes[0].N, codes, crt=CrtMap(primes))


def construction_pi_d(q: int, codes) -> LatticeDescriptor:
    """CRT-combined lattice from chain-ring codes, one per prime-power
    factor of q (codes listed in ascending prime order)."""
    if q < 2:
        raise ValueError("q must be at least 2")
    codes = list(codes)
    factors = factorize(q)
    if len(codes) != len(factors):
        raise ValueError(f"q={q} has {len(factors)} prime-power factors, got {len(codes)} codes")
    for c, (p, e) in zip(codes, factors):
        A = c.alphabet
        ok = (isinstance(A, PrimeField) and e == 1 and A.p == p) or (
            isinstance(A, ChainRing) and (A.p, A.e) == (p, e)
        )
        if not ok:
            raise ValueError(f"code alphabet {A!r} does not match factor {p}^{e}")
    if len({c.N for c in codes}) != 1:
        raise ValueError("levels have unequal block lengths")
    return LatticeDescriptor("piD", codes[0].N, codes, crt=CrtMap([p**e for p, e in factors]))


def construction_a_ok(code: LinearCode, ideal: PrimeIdeal) -> LatticeDescriptor:
    """M(C) + ideal^N inside C^N, M the residue-field section."""
    if code.alphabet.size != ideal.residue_size:
        raise ValueError(
            f"code alphabet size {code.alphabet.size} != residue size {ideal.residue_size}"
        )
    return LatticeDescriptor("A_OK", code.N, [code], ideal=ideal)


# ---------------------------------------------------------------------------
# membership / enumeration
# ---------------------------------------------------------------------------


def contains(lat: LatticeDescriptor, v) -> bool:
    """True iff the per-level reductions of v are all codewords."""
    if len(v) != lat.N:
        raise ValueError(f"vector length {len(v)} != N={lat.N}")
    if lat.ambient == "complex":
        ring = lat.ideal.ring
        xs = [ring.coerce(x) for x in v]
        sigma = tuple(lat.map.to_field(x) for x in xs)
        return contains_codeword(lat.codes[0], sigma)
    w = []
    for x in v:
        if isinstance(x, float):
            if not x.is_integer():
                raise ValueError(f"non-integer entry {x}")
            x = int(x)
        w.append(int(x))
    return all(
        contains_codeword(code, [x % m for x in w])
        for code, m in zip(lat.codes, lat.moduli)
    )


def enumerate_box(lat: LatticeDescriptor, bounds) -> list:
    """All lattice points with coordinates in the inclusive bounds.

    bounds is one (lo, hi) pair for every coordinate or a per-coordinate
    list; for complex lattices the pair bounds both integer coordinates
    of each entry.  Scans through `contains`, so it doubles as a test
    oracle only when checked against an independent construction.
    """
    if len(bounds) == 2 and isinstance(bounds[0], (int, float)):
        bounds = [tuple(bounds)] * lat.N
    bounds = [(int(lo), int(hi)) for lo, hi in bounds]
    if len(bounds) != lat.N:
        raise ValueError("need one bound pair per coordinate")
    if any(hi < lo for lo, hi in bounds):
        raise ValueError("empty bounds")
    sides = [hi - lo + 1 for lo, hi in bounds]
    count = math.prod(sides)
    if lat.ambient == "complex":
        count = count**2
    if count > _BOX_CAP:
        raise ValueError(f"box holds {count} points, cap is {_BOX_CAP}")
    if lat.ambient == "complex":
        ring = lat.ideal.ring
        ranges = []
        for lo, hi in bounds:
            ranges.append([ring.element(a, b) for a in range(lo, hi + 1) for b in range(lo, hi + 1)])
        return [pt for pt in itertools.product(*ranges) if contains(lat, pt)]
    out = []
    for pt in itertools.product(*[range(lo, hi + 1) for lo, hi in bounds]):
        if contains(lat, pt):
            out.append(tuple(pt))
    return out


# ---------------------------------------------------------------------------
# quantization / reduction
# ---------------------------------------------------------------------------


def _coset_reps(lat: LatticeDescriptor):
    """All codebook cosets as integer representatives in [0, q)^N."""
    if lat._cosets is None:
        books = [list(codebook(c)) for c in lat.codes]
        total = math.prod(len(b) for b in books)
        if total > _COSET_CAP:
            raise ValueError(f"{total} cosets exceed the enumeration cap")
        reps = np.empty((total, lat.N), dtype=np.int64)
        for i, combo in enumerate(itertools.product(*books)):
            reps[i] = lat.map.forward_vec([np.array(c) for c in combo])
        lat._cosets = reps
    return lat._cosets


def quantize(lat: LatticeDescriptor, y):
    """A nearest lattice point to y, exact for the coset structure.

    Rounds (y - rep)/q per coset and keeps the global minimizer; distance
    ties go to the candidate with lexicographically smallest coordinates
    (coordinate ties round down, which is the lexicographic choice).
    """
    if lat.ambient == "complex":
        return _quantize_complex(lat, y)
    y = np.asarray(y, dtype=float)
    if y.shape != (lat.N,):
        raise ValueError(f"expected shape ({lat.N},), got {y.shape}")
    reps = _coset_reps(lat)
    q = lat.q
    steps = np.ceil((y[None, :] - reps) / q - 0.5)
    cands = reps + q * steps.astype(np.int64)
    d2 = ((cands - y[None, :]) ** 2).sum(axis=1)
    dmin = float(d2.min())
    tol = 1e-9 * max(1.0, dmin)
    tied = np.flatnonzero(d2 <= dmin + tol)
    best = min(tied, key=lambda i: tuple(cands[i]))
    return cands[best].copy()


def _reduced_ideal_basis(ideal: PrimeIdeal):
    u, v = ideal.basis()
    zu, zv = u.to_complex(), v.to_complex()
    while True:
        if abs(zu) > abs(zv):
            u, v, zu, zv = v, u, zv, zu
        mu = round((zv * zu.conjugate()).real / abs(zu) ** 2)
        if mu == 0:
            return u, v
        v = v - u * mu
        zv = v.to_complex()


def _nearest_ideal_point(ideal: PrimeIdeal, w: complex) -> QuadInt:
    u, v = _reduced_ideal_basis(ideal)
    zu, zv = u.to_complex(), v.to_complex()
    B = np.array([[zu.real, zv.real], [zu.imag, zv.imag]])
    x = np.linalg.solve(B, np.array([w.real, w.imag]))
    k1, k2 = int(np.floor(x[0])), int(np.floor(x[1]))
    best = None
    for d1 in range(-1, 3):
        for d2 in range(-1, 3):
            cand = u * (k1 + d1) + v * (k2 + d2)
            dist = abs(cand.to_complex() - w)
            key = (round(dist, 12), cand.a, cand.b)
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def _quantize_complex(lat: LatticeDescriptor, y):
    y = np.asarray(y, dtype=complex)
    if y.shape != (lat.N,):
        raise ValueError(f"expected shape ({lat.N},), got {y.shape}")
    rm = lat.map
    best = None
    for cw in codebook(lat.codes[0]):
        reps = [rm.to_ring(c) for c in cw]
        cand = [r + _nearest_ideal_point(lat.ideal, yj - r.to_complex())
                for r, yj in zip(reps, y)]
        d2 = sum(abs(c.to_complex() - yj) ** 2 for c, yj in zip(cand, y))
        key = (round(d2, 9),) + tuple(x for c in cand for x in (c.a, c.b))
        if best is None or key < best[0]:
            best = (key, cand)
    return tuple(best[1])


def mod_coarse(pair: LatticePair, v):
    """Reduce v into the half-open fundamental cell of the coarse lattice.

    Over a real lattice a complex input reduces its two real parts
    independently (the simulator sends one real lattice point per part).
    """
    if pair.fine.ambient == "complex":
        return _mod_coarse_complex(pair, v)
    v = np.asarray(v)
    cell = pair.q * pair.scale
    if np.iscomplexobj(v):
        return np.mod(v.real, cell) + 1j * np.mod(v.imag, cell)
    return np.mod(v.astype(float), cell)


def _mod_coarse_complex(pair: LatticePair, v):
    v = np.asarray(v, dtype=complex)
    u, w = _reduced_ideal_basis(pair.fine.ideal)
    zu, zw = u.to_complex(), w.to_complex()
    B = np.array([[zu.real, zw.real], [zu.imag, zw.imag]]) * pair.scale
    out = np.empty_like(v)
    for j, vj in enumerate(v):
        x = np.linalg.solve(B, np.array([vj.real, vj.imag]))
        frac = x - np.floor(x)
        re, im = B @ frac
        out[j] = complex(re, im)
    return out
