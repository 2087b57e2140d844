"""Lattices built from linear codes, and a desk-scale compute-and-forward
simulator on top of them.

The pieces, bottom to top:

- `algebra`: prime fields, chain rings Z_{p^e}, small extension fields,
  the CRT ring isomorphism, and quadratic integer rings with prime-ideal
  factorization and residue-field maps.
- `codes`: linear codes over those alphabets, nested chains of codes
  sharing a generator basis, and the lift of a chain to a chain-ring code.
- `lattices`: five constructions turning codes into lattices, plus
  membership, enumeration, nearest-point quantization, and the coarse
  modulo operation.
- `cfsim`: the compute-and-forward rate formula, exhaustive coefficient
  search, and a deterministic Monte Carlo relay simulator.
- `cli`: `latcf construct|member|rate|search|simulate`.
"""

from .algebra import (
    ChainRing,
    CrtMap,
    GaloisField,
    PrimeField,
    PrimeIdeal,
    QuadraticRing,
    ResidueFieldMap,
    build_crt_map,
    factor_rational_prime,
    kronecker_at_prime,
    make_quadratic_ring,
    residue_field_map,
)
from .cfsim import (
    BestCoefficients,
    ChannelRealization,
    SimConfig,
    SourceState,
    TrialRecord,
    best_coefficients,
    computation_rate,
    decode_function,
    encode_source,
    make_pair,
    mmse_alpha,
    multistage_roundtrip,
    relay_process,
    run_trials,
)
from .codes import (
    LinearCode,
    NestedCodeChain,
    build_nested_chain,
    contains_codeword,
    encode,
    lift_chain_to_ring_code,
)
from .lattices import (
    LatticeDescriptor,
    LatticePair,
    construction_a,
    construction_a_ok,
    construction_d,
    construction_pi_a,
    construction_pi_d,
    contains,
    enumerate_box,
    mod_coarse,
    quantize,
)

__version__ = "0.1.0"

__all__ = [
    "BestCoefficients",
    "ChainRing",
    "ChannelRealization",
    "CrtMap",
    "GaloisField",
    "LatticeDescriptor",
    "LatticePair",
    "LinearCode",
    "NestedCodeChain",
    "PrimeField",
    "PrimeIdeal",
    "QuadraticRing",
    "ResidueFieldMap",
    "SimConfig",
    "SourceState",
    "TrialRecord",
    "best_coefficients",
    "build_crt_map",
    "build_nested_chain",
    "computation_rate",
    "construction_a",
    "construction_a_ok",
    "construction_d",
    "construction_pi_a",
    "construction_pi_d",
    "contains",
    "contains_codeword",
    "decode_function",
    "encode",
    "encode_source",
    "enumerate_box",
    "factor_rational_prime",
    "kronecker_at_prime",
    "lift_chain_to_ring_code",
    "make_pair",
    "make_quadratic_ring",
    "mmse_alpha",
    "mod_coarse",
    "multistage_roundtrip",
    "quantize",
    "relay_process",
    "residue_field_map",
    "run_trials",
]
