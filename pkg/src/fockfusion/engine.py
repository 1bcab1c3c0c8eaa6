"""Monte Carlo kernels for the bucket walk, JIT-compiled when available.

Every kernel here is written once and compiled conditionally: with numba
installed (and FOCKFUSION_NUMBA not set to 0) the functions are wrapped in
@njit; otherwise the same code objects run as plain Python over numpy
scalars. The two paths are bit-identical because all integer state lives in
np.uint64/np.int64 and the RNG constants are pre-bound as np.uint64 module
globals (mixing a numpy scalar with a bare Python int would promote to
float64 and break the wraparound arithmetic).

The pure-Python path relies on numpy's wrapping overflow for uint64
scalars, which emits RuntimeWarnings; callers wrap kernel invocations in
np.errstate(over="ignore"). See simulate.run.

The RNG is splitmix64: a 64-bit counter stream with a bijective finalizer,
chosen because it is stateless per draw (trivially reproducible), passes
BigCrush, and needs only arithmetic that numba and numpy share exactly.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "JIT_ENABLED",
    "MASK64",
    "rng_next",
    "rng_uniform",
    "derive_seed",
    "walk",
    "reduce_walk",
    "BALANCED",
    "MODESTY",
    "RANDOM",
    "FRUGAL",
]

BALANCED, MODESTY, RANDOM, FRUGAL = 0, 1, 2, 3

MASK64 = (1 << 64) - 1


def _resolve_jit() -> bool:
    flag = os.environ.get("FOCKFUSION_NUMBA", "").strip().lower()
    if flag in {"0", "false", "off", "no"}:
        return False
    if flag in {"1", "true", "on", "yes"}:
        import numba  # noqa: F401  # fail loudly when forced on

        return True
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


JIT_ENABLED = _resolve_jit()

if JIT_ENABLED:
    from numba import njit as _njit

    def _kernel(fn):
        return _njit(cache=True)(fn)

else:

    def _kernel(fn):
        return fn


U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@_kernel
def rng_next(state):
    """Advance the splitmix64 state and return (state, 64 random bits)."""
    state = state + _GOLD
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return state, z


@_kernel
def rng_uniform(state):
    """Advance the state and return (state, uniform double in [0, 1))."""
    state, z = rng_next(state)
    return state, np.float64(z >> _S11) * _INV53


def derive_seed(master: int, index: int) -> int:
    """Deterministic child seed for stream `index` of a master seed.

    Pure-Python (masked int) splitmix64 finalizer over master + (index+1)
    deltas, so child streams never collide with the master stream itself.
    """
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@_kernel
def reduce_walk(state, start, target, p_tap, max_ops):
    """Trim a Fock state photon by photon with a weak tap beamsplitter.

    Each operation mixes the current state with vacuum at stay probability
    1 - p_tap and detects the tapped mode, removing k ~ Binomial(current,
    p_tap) photons. Stops at the target, on overshoot below it, or at
    max_ops.

    Returns:
        (state, ops, final) with final possibly below target on overshoot.
    """
    cur = start
    ops = 0
    while cur > target and ops < max_ops:
        k = 0
        for _ in range(cur):
            state, uu = rng_uniform(state)
            if uu < p_tap:
                k += 1
        ops += 1
        cur -= k
    return state, ops, cur


@_kernel
def walk(
    seed,
    steps,
    burn_in,
    d,
    strategy,
    recycled,
    x,
    d_prime,
    cdf,
    p_above,
    counts,
    harvest_by_size,
    batch_harvest,
    batch_size,
    stats,
    state_out,
):
    """Run `steps` fusion operations of the bucket Markov process.

    One step selects a pair by `strategy`, samples the detected photon
    number from the pair's precomputed outcome CDF, and updates the
    buckets; products of at least d photons are harvested (removed and
    counted) immediately. Bucket sizes therefore never exceed d-1, and the
    infinite source bucket `x` taps a fresh state only when no stored
    state of that size is available.

    Mutates counts, harvest_by_size, batch_harvest, stats ([0] harvested
    after burn-in, [1] photons drawn from the source, [2] detected,
    [3] discarded by non-recycled steps) and writes the final RNG state to
    state_out[0]. CDF rows are indexed (m*d + n)*2*d + s for m >= n.
    """
    state = U64(seed)
    stride = 2 * d
    n_batches = batch_harvest.shape[0]
    half_prime = d_prime // 2
    cand = np.empty(d, np.int64)

    for t in range(steps):
        # -- pair selection ------------------------------------------------
        if strategy == 0 or strategy == 3:
            kb = d - 1
            while kb >= 1:
                if counts[kb] >= 2 or kb == x:
                    break
                kb -= 1
            m_sel = kb
            n_sel = kb
            if strategy == 3 and kb > half_prime:
                # Equal pair would overshoot d'. Take the available pair
                # inside [d, d'] with the best chance of reaching d.
                best_val = -1.0
                bm = -1
                bn = -1
                for a in range(d - 1, 0, -1):
                    if counts[a] < 1 and a != x:
                        continue
                    for b in range(a, 0, -1):
                        if a + b > d_prime or a + b < d:
                            continue
                        if a == b:
                            ok = counts[a] >= 2 or a == x
                        else:
                            ok = (counts[b] >= 1 or b == x) and (
                                counts[a] >= 1 or a == x
                            )
                        if ok and p_above[a * d + b] > best_val:
                            best_val = p_above[a * d + b]
                            bm = a
                            bn = b
                if bm >= 1:
                    m_sel = bm
                    n_sel = bn
                else:
                    # No pair reaches the window: largest total below d.
                    bs = -1
                    for a in range(d - 1, 0, -1):
                        if counts[a] < 1 and a != x:
                            continue
                        for b in range(a, 0, -1):
                            if a + b >= d or a + b <= bs:
                                continue
                            if a == b:
                                ok = counts[a] >= 2 or a == x
                            else:
                                ok = (counts[b] >= 1 or b == x) and (
                                    counts[a] >= 1 or a == x
                                )
                            if ok:
                                bs = a + b
                                bm = a
                                bn = b
                    if bm >= 1:
                        m_sel = bm
                        n_sel = bn
                    else:
                        m_sel = x
                        n_sel = x
        elif strategy == 1:
            km = d - 1
            while km >= 1:
                if counts[km] >= 1 or km == x:
                    break
                km -= 1
            m_sel = km
            n_sel = x
        else:
            ncand = 0
            for k in range(1, d):
                if counts[k] >= 1 or k == x:
                    cand[ncand] = k
                    ncand += 1
            state, u1 = rng_uniform(state)
            i1 = np.int64(u1 * ncand)
            if i1 >= ncand:
                i1 = ncand - 1
            k1 = cand[i1]
            ncand = 0
            for k in range(1, d):
                left = counts[k] - 1 if k == k1 else counts[k]
                if left >= 1 or k == x:
                    cand[ncand] = k
                    ncand += 1
            state, u2 = rng_uniform(state)
            i2 = np.int64(u2 * ncand)
            if i2 >= ncand:
                i2 = ncand - 1
            m_sel = k1
            n_sel = cand[i2]

        # -- consume inputs (stored states first, then the source) ---------
        if counts[m_sel] > 0:
            counts[m_sel] -= 1
        else:
            stats[1] += m_sel
        if counts[n_sel] > 0:
            counts[n_sel] -= 1
        else:
            stats[1] += n_sel

        # -- sample the detected photon number ------------------------------
        if m_sel >= n_sel:
            base = (m_sel * d + n_sel) * stride
        else:
            base = (n_sel * d + m_sel) * stride
        tot = m_sel + n_sel
        state, uu = rng_uniform(state)
        s = tot
        for si in range(tot + 1):
            if uu < cdf[base + si]:
                s = si
                break

        # -- bucket update and harvest --------------------------------------
        stats[2] += s
        size = tot - s
        if recycled == 0 and s > 0:
            stats[3] += size
        elif size >= d:
            harvest_by_size[size] += 1
            if t >= burn_in:
                stats[0] += 1
                bi = (t - burn_in) // batch_size
                if bi < n_batches:
                    batch_harvest[bi] += 1
        else:
            counts[size] += 1

    state_out[0] = state
