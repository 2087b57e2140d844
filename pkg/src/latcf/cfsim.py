"""Desk-scale compute-and-forward simulation.

K sources transmit dithered nested-lattice codewords over a complex
AWGN channel; each of M relays scales its observation, removes the
dithers, quantizes to the fine lattice and maps the result to a linear
function of the source messages.  Real lattices carry one point per
real part, so a complex symbol transports two independent messages.

Power convention: transmit symbols are uniform over the coarse cell
[0, q*scale)^2 per complex dimension with scale = sqrt(P/(q^2/6)), so
their centered variance is exactly P.  The deterministic cell offset is
known at the relays and does not count as noise.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import ChainRing, QuadraticRing
from .codes import encode as encode_codeword
from .codes import solve_encoding
from .lattices import LatticePair, contains, mod_coarse, quantize

_SEARCH_HARD_CAP = 5 * 10**6


# ---------------------------------------------------------------------------
# computation rate and coefficient search
# ---------------------------------------------------------------------------


def computation_rate(h, a, P: float) -> float:
    """Achievable rate log2+(1/(|a|^2 - P|h*a|^2/(1+P|h|^2))) in bits
    per complex channel use; +inf when the inner term vanishes (a
    proportional to h at working precision)."""
    if P <= 0:
        raise ValueError("P must be positive")
    h = np.asarray(h, dtype=complex)
    av = _coeffs_to_complex(a)
    if h.shape != av.shape:
        raise ValueError(f"h and a have different lengths {h.shape} vs {av.shape}")
    na = float(np.vdot(av, av).real)
    if na == 0.0:
        raise ValueError("a must be nonzero")
    nh = float(np.vdot(h, h).real)
    cross = np.vdot(h, av)
    inner = na - P * abs(cross) ** 2 / (1.0 + P * nh)
    if inner <= 1e-15 * na:
        return math.inf
    return max(0.0, -math.log2(inner))


def _coeffs_to_complex(a) -> np.ndarray:
    out = []
    for x in a:
        out.append(x.to_complex() if hasattr(x, "to_complex") else complex(x))
    return np.array(out, dtype=complex)


class BestCoefficients(NamedTuple):
    a: tuple
    rate: float
    truncated: bool


def best_coefficients(h, P: float, ring="Z", max_norm_cap=None) -> BestCoefficients:
    """Exhaustive rate maximization over nonzero coefficient vectors with
    squared norm below 1 + P|h|^2 (larger norms cannot beat rate 0).

    ring selects the coefficient alphabet: "Z" for rational integers,
    "Zi" for Gaussian integers, or a QuadraticRing with d < 0.  Rate ties
    prefer the smaller norm, then componentwise smaller magnitude with
    nonnegative entries winning their sign flips.  If max_norm_cap trims
    the norm bound the result is flagged truncated.
    """
    h = np.asarray(h, dtype=complex)
    if not np.any(h):
        raise ValueError("h must be nonzero")
    if P <= 0:
        raise ValueError("P must be positive")
    nh = float(np.vdot(h, h).real)
    bound = 1.0 + P * nh
    truncated = False
    if max_norm_cap is not None and bound > max_norm_cap:
        bound = float(max_norm_cap)
        truncated = True
    if ring == "Z":
        return _search_z(h, P, nh, bound, truncated)
    if ring == "Zi":
        return _search_zi(h, P, nh, bound, truncated)
    if isinstance(ring, QuadraticRing):
        return _search_ok(h, P, nh, bound, truncated, ring)
    raise ValueError(f"unsupported coefficient ring {ring!r}")


def _rate_vector(cand, n2, h, P, nh):
    cross = cand @ np.conj(h)
    inner = n2 - P * np.abs(cross) ** 2 / (1.0 + P * nh)
    with np.errstate(divide="ignore"):
        rates = np.maximum(0.0, -np.log2(np.maximum(inner, 1e-300)))
    rates[inner <= 1e-15 * n2] = math.inf
    return rates


def _component_key(x):
    if isinstance(x, complex):
        re, im = x.real, x.imag
        return (abs(re), 0 if re >= 0 else 1, abs(im), 0 if im >= 0 else 1)
    return (abs(x), 0 if x >= 0 else 1)


def _pick(cands, n2, rates):
    top = np.flatnonzero(rates == rates.max())
    best = min(
        top,
        key=lambda i: (n2[i], tuple(_component_key(x) for x in cands[i].tolist())),
    )
    return cands[best], float(rates[best])


def _search_z(h, P, nh, bound, truncated):
    K = len(h)
    B = int(math.floor(math.sqrt(bound)))
    if (2 * B + 1) ** K > _SEARCH_HARD_CAP:
        raise ValueError("search space too large; lower max_norm_cap")
    axes = [np.arange(-B, B + 1)] * K
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, K)
    n2 = (grid * grid).sum(axis=1)
    keep = (n2 > 0) & (n2 <= bound)
    cands, n2 = grid[keep], n2[keep]
    rates = _rate_vector(cands.astype(float), n2.astype(float), h, P, nh)
    a, rate = _pick(cands, n2, rates)
    return BestCoefficients(tuple(int(x) for x in a), rate, truncated)


def _search_zi(h, P, nh, bound, truncated):
    K = len(h)
    B = int(math.floor(math.sqrt(bound)))
    if (2 * B + 1) ** (2 * K) > _SEARCH_HARD_CAP:
        raise ValueError("search space too large; lower max_norm_cap")
    axes = [np.arange(-B, B + 1)] * (2 * K)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * K)
    n2 = (grid * grid).sum(axis=1)
    keep = (n2 > 0) & (n2 <= bound)
    grid, n2 = grid[keep], n2[keep]
    cands = grid[:, :K] + 1j * grid[:, K:]
    rates = _rate_vector(cands, n2.astype(float), h, P, nh)
    a, rate = _pick(cands, n2, rates)
    return BestCoefficients(tuple(complex(x) for x in a), rate, truncated)


def _search_ok(h, P, nh, bound, truncated, ring):
    if ring.d > 0:
        raise ValueError("coefficient search needs an imaginary quadratic ring")
    # per-component candidates with norm below the bound
    comps = []
    ymax = int(math.floor(math.sqrt(4.0 * bound / abs(ring.d))))
    for y in range(-ymax, ymax + 1):
        half = math.sqrt(bound)
        lo = int(math.floor(-y / 2 - half)) if ring.xi_is_half else int(math.floor(-half))
        hi = int(math.ceil(-y / 2 + half)) if ring.xi_is_half else int(math.ceil(half))
        for x in range(lo, hi + 1):
            el = ring.element(x, y)
            if el.norm() <= bound:
                comps.append(el)
    K = len(h)
    if len(comps) ** K > _SEARCH_HARD_CAP:
        raise ValueError("search space too large; lower max_norm_cap")
    best = None
    for combo in itertools.product(comps, repeat=K):
        n2 = sum(c.norm() for c in combo)
        if n2 == 0 or n2 > bound:
            continue
        rate = computation_rate(h, combo, P)
        key = (-rate, n2, tuple((abs(c.a), 0 if c.a >= 0 else 1, abs(c.b), 0 if c.b >= 0 else 1) for c in combo))
        if best is None or key < best[0]:
            best = (key, combo, rate)
    if best is None:
        raise ValueError("empty search space; raise max_norm_cap")
    return BestCoefficients(tuple(best[1]), best[2], truncated)


# ---------------------------------------------------------------------------
# protocol pieces
# ---------------------------------------------------------------------------


@dataclass
class ChannelRealization:
    K: int
    M: int
    H: np.ndarray
    P: float


@dataclass
class SourceState:
    """message is caller bookkeeping; t and u live at signal scale."""

    message: object
    t: np.ndarray
    u: np.ndarray


class RelayOutput(NamedTuple):
    y_prime: np.ndarray
    alpha: complex
    noise_var_analytic: float


class FunctionDecode(NamedTuple):
    t_eq: np.ndarray
    functions: tuple  # per real part, per level: decoded message vector or None
    ok: bool


def encode_source(state: SourceState, pair: LatticePair) -> np.ndarray:
    """Transmit signal (t - u) mod coarse."""
    t = np.asarray(state.t)
    u = np.asarray(state.u)
    _require_fine_point(pair, t)
    return mod_coarse(pair, t - u)


def _require_fine_point(pair: LatticePair, t):
    if pair.fine.ambient != "real":
        raise ValueError("the transmit pipeline works on real-ambient lattices")
    for part in ([t.real, t.imag] if np.iscomplexobj(t) else [t]):
        coords = np.asarray(part, dtype=float) / pair.scale
        rounded = np.round(coords)
        if np.max(np.abs(coords - rounded)) > 1e-6:
            raise ValueError("t is not a scaled lattice point")
        if not contains(pair.fine, rounded.astype(np.int64)):
            raise ValueError("t fails fine-lattice membership")


def mmse_alpha(h, a, P: float) -> complex:
    """Minimizer of |alpha|^2 + P|alpha*h - a|^2."""
    h = np.asarray(h, dtype=complex)
    av = _coeffs_to_complex(a)
    return complex(P * np.vdot(h, av) / (1.0 + P * float(np.vdot(h, h).real)))


def relay_process(y, a, dithers, h, P, pair: LatticePair, alpha_mode="mmse") -> RelayOutput:
    """(alpha*y + sum_k a_k u_k) mod coarse, plus the analytic variance
    of the effective noise alpha*z + sum_k (alpha*h_k - a_k) x_k."""
    h = np.asarray(h, dtype=complex)
    av = _coeffs_to_complex(a)
    if alpha_mode == "mmse":
        alpha = mmse_alpha(h, a, P)
    elif alpha_mode == "unit":
        alpha = 1.0 + 0.0j
    else:
        raise ValueError(f"unknown alpha_mode {alpha_mode!r}")
    noise_var = abs(alpha) ** 2 + P * float(np.sum(np.abs(alpha * h - av) ** 2))
    acc = alpha * np.asarray(y, dtype=complex)
    for ak, uk in zip(av, dithers):
        acc = acc + ak * np.asarray(uk)
    return RelayOutput(mod_coarse(pair, acc), alpha, noise_var)


def decode_function(y_prime, pair: LatticePair, a) -> FunctionDecode:
    """Quantize to the fine lattice, reduce mod coarse, then read the
    per-level codewords off and invert the encodings.

    A failed inversion (reduction is not a codeword, possible only
    through numeric damage given the exact quantizer) is reported, not
    raised.
    """
    fine = pair.fine
    if fine.ambient != "real":
        raise ValueError("function decoding works on real-ambient lattices")
    y_prime = np.asarray(y_prime)
    parts = [y_prime.real, y_prime.imag] if np.iscomplexobj(y_prime) else [y_prime]
    ok = True
    part_funcs = []
    eq_parts = []
    for v in parts:
        pt = quantize(fine, np.asarray(v, dtype=float) / pair.scale)
        pt = np.mod(pt, fine.q)
        eq_parts.append(pt)
        levels = []
        for code, m in zip(fine.codes, fine.moduli):
            w = solve_encoding(code, [int(x) % m for x in pt])
            if w is None:
                ok = False
                levels.append(None)
            else:
                levels.append(tuple(w))
        part_funcs.append(tuple(levels))
    if np.iscomplexobj(y_prime):
        t_eq = (eq_parts[0] + 1j * eq_parts[1]) * pair.scale
    else:
        t_eq = eq_parts[0] * pair.scale
    return FunctionDecode(t_eq, tuple(part_funcs), ok)


def function_coefficients(a, moduli):
    """Per-level reductions b^l_k = a_k mod m_l."""
    return tuple(tuple(int(ak) % m for ak in a) for m in moduli)


def combined_message(code, b_level, messages):
    """The linear function sum_k b_k * w_k in the code's message space."""
    A = code.alphabet
    out = [A.zero] * code.n
    for bk, wk in zip(b_level, messages):
        bk = int(bk) % A.size
        for i, wi in enumerate(wk):
            out[i] = A.add(out[i], A.mul(bk, int(wi) % A.size))
    return tuple(out)


def multistage_roundtrip(pair: LatticePair, messages, a):
    """Noiseless level-by-level roundtrip over a multi-prime lattice.

    messages[k][l] is source k's level-l message vector; returns the
    tuple of decoded per-level functions, computed by combining the
    sources with integer weights a, reducing mod q, and decoding each
    prime level on its own.
    """
    fine = pair.fine
    if fine.ambient != "real":
        raise ValueError("needs a real-ambient lattice")
    if any(isinstance(c.alphabet, ChainRing) and c.alphabet.e > 1 for c in fine.codes):
        raise ValueError("levels must be prime fields")
    if len(a) != len(messages) or not messages:
        raise ValueError("one coefficient per source")
    crt = fine.map
    points = []
    for w_levels in messages:
        if len(w_levels) != len(fine.codes):
            raise ValueError(f"need {len(fine.codes)} level messages per source")
        words = [
            np.array(encode_codeword(code, w), dtype=np.int64)
            for code, w in zip(fine.codes, w_levels)
        ]
        points.append(crt.forward_vec(words))
    t_eq = np.mod(sum(int(ak) * pt for ak, pt in zip(a, points)), crt.q)
    out = []
    for code, m in zip(fine.codes, crt.moduli):
        w = solve_encoding(code, [int(x) % m for x in t_eq])
        if w is None:
            raise ArithmeticError("noiseless reduction left the codebook")
        out.append(tuple(w))
    return tuple(out)


# ---------------------------------------------------------------------------
# Monte Carlo harness
# ---------------------------------------------------------------------------


@dataclass
class SimConfig:
    pair: LatticePair
    K: int
    M: int
    P: float
    alpha_mode: str = "mmse"
    multistage: bool = False
    fixed_H: np.ndarray | None = None
    noiseless: bool = False
    max_norm_cap: float | None = None


@dataclass
class TrialRecord:
    trial: int
    relay: int
    a: tuple
    rate_bits: float
    alpha: complex
    noise_var_analytic: float
    noise_var_emp: float
    decode_ok: int
    zero_divisor_flag: int


def make_pair(fine, P: float) -> LatticePair:
    """Nested pair scaled so transmit symbols have variance P."""
    return LatticePair(fine, scale=math.sqrt(P / (fine.q**2 / 6.0)))


def run_trials(config: SimConfig, trials: int, seed: int):
    """Independent Monte Carlo trials, deterministic in (config, seed).

    Each trial seeds its own generator from (seed, trial), so records
    are identical no matter how many workers LATCF_THREADS allows.
    """
    _check_config(config)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cache = {}
    workers = int(os.environ.get("LATCF_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(
                pool.map(lambda t: _one_trial(config, seed, t, cache), range(trials))
            )
    else:
        batches = [_one_trial(config, seed, t, cache) for t in range(trials)]
    return [rec for batch in batches for rec in batch]


def _check_config(config: SimConfig):
    if config.pair.fine.ambient != "real":
        raise ValueError("simulation supports real-ambient lattices")
    if config.K < 1 or config.M < 1:
        raise ValueError("need K >= 1 sources and M >= 1 relays")
    if config.P <= 0:
        raise ValueError("P must be positive")
    if config.alpha_mode not in ("mmse", "unit"):
        raise ValueError(f"unknown alpha_mode {config.alpha_mode!r}")
    if config.fixed_H is not None:
        H = np.asarray(config.fixed_H, dtype=complex)
        if H.shape != (config.M, config.K):
            raise ValueError(f"fixed_H must be {config.M}x{config.K}")
        if not np.all(np.isfinite(H)):
            raise ValueError("fixed_H must be finite")


def _one_trial(config: SimConfig, seed: int, trial: int, cache: dict):
    rng = np.random.default_rng([seed, trial])
    pair = config.pair
    fine = pair.fine
    K, M, P = config.K, config.M, config.P
    N = fine.N
    cell = fine.q * pair.scale

    if config.fixed_H is not None:
        H = np.asarray(config.fixed_H, dtype=complex)
    else:
        H = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / math.sqrt(2)

    # messages: per source, per level, one vector for each real part
    messages = []
    for _ in range(K):
        per_level = []
        for code in fine.codes:
            wre = rng.integers(0, code.alphabet.size, size=code.n)
            wim = rng.integers(0, code.alphabet.size, size=code.n)
            per_level.append((tuple(int(x) for x in wre), tuple(int(x) for x in wim)))
        messages.append(per_level)

    dithers = [
        rng.uniform(0.0, cell, size=N) + 1j * rng.uniform(0.0, cell, size=N)
        for _ in range(K)
    ]
    if config.noiseless:
        Z = np.zeros((M, N), dtype=complex)
    else:
        Z = (rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))) / math.sqrt(2)

    crt = fine.map
    X = np.empty((K, N), dtype=complex)
    for k in range(K):
        point_parts = []
        for part in (0, 1):
            words = [
                np.array(encode_codeword(code, messages[k][li][part]), dtype=np.int64)
                for li, code in enumerate(fine.codes)
            ]
            point_parts.append(crt.forward_vec(words))
        t = (point_parts[0] + 1j * point_parts[1]) * pair.scale
        X[k] = encode_source(SourceState(messages[k], t, dithers[k]), pair)

    Y = H @ X + Z

    mean_x = cell / 2.0 * (1 + 1j)  # deterministic offset of the coarse cell
    records = []
    for m in range(M):
        h = H[m]
        if config.noiseless:
            a = tuple(int(x) for x in np.round(h.real))
            rate = computation_rate(h, a, P) if any(a) else 0.0
            truncated = False
        else:
            key = (tuple(np.round(h, 12)), P)
            if key not in cache:
                cache[key] = best_coefficients(h, P, max_norm_cap=config.max_norm_cap)
            a, rate, truncated = cache[key]
        if not any(a):
            raise ValueError("relay coefficient vector is zero")

        out = relay_process(Y[m], a, dithers, h, P, pair, alpha_mode=config.alpha_mode)
        av = np.array(a, dtype=complex)
        z_eq = (out.alpha * h - av) @ X + out.alpha * Z[m]
        offset = np.sum(out.alpha * h - av) * mean_x
        noise_var_emp = float(np.mean(np.abs(z_eq - offset) ** 2))

        # the half-open cell gives every x_k the known mean cell/2*(1+1j);
        # its deterministic contribution to the effective noise scales with
        # the cell, so it must come off before quantizing
        decode = decode_function(mod_coarse(pair, out.y_prime - offset), pair, a)
        b_levels = function_coefficients(a, fine.moduli)
        ok = decode.ok
        if ok:
            for part in (0, 1):
                pt = decode.t_eq.real if part == 0 else decode.t_eq.imag
                coords = np.round(pt / pair.scale).astype(np.int64)
                for li, (code, mmod) in enumerate(zip(fine.codes, fine.moduli)):
                    want = encode_codeword(
                        code,
                        combined_message(
                            code, b_levels[li], [msg[li][part] for msg in messages]
                        ),
                    )
                    got = tuple(int(x) % mmod for x in coords)
                    if got != want:
                        ok = False
        zflag = 0
        for (mm, code), b_l in zip(zip(fine.moduli, fine.codes), b_levels):
            A = code.alphabet
            if isinstance(A, ChainRing) and A.e > 1:
                if any(b != 0 and b % A.p == 0 for b in b_l):
                    zflag = 1
        records.append(
            TrialRecord(
                trial=trial,
                relay=m,
                a=tuple(int(x) for x in a),
                rate_bits=rate,
                alpha=complex(out.alpha),
                noise_var_analytic=out.noise_var_analytic,
                noise_var_emp=noise_var_emp,
                decode_ok=int(ok),
                zero_divisor_flag=zflag,
            )
        )
    return records
