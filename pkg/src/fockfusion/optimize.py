"""Reflectivity optimization for every fusion objective, with cached tables.

Each objective is a continuous function of eta on [0, 1]. The optimizer is
deliberately deterministic: a coarse grid locates every near-optimal
bracket, golden-section search refines each one, and exact ties resolve
toward the smaller reflectivity. Completed tables are memoized in process
and persisted to versioned text files because the simulator looks entries
up millions of times.
"""

from __future__ import annotations

import math
import operator
import os
from dataclasses import dataclass, replace

from .errors import DomainError
from .probabilities import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    p_sub,
    subtraction_distribution,
)

__all__ = [
    "EtaObjective",
    "EtaTableEntry",
    "RECYCLED_GROW",
    "NONRECYCLED_ZERO_LOSS",
    "frugal_above",
    "frugal_below",
    "objective_value",
    "optimize_eta",
    "build_table",
    "default_cache_dir",
]

GRID_STEP = 1e-3
REFINE_TOL = 1e-8
# Grid maxima within this of the best are all refined, so symmetric twin
# peaks (the m = n objectives have two) both reach the tie-break.
NEAR_TIE = 1e-6
VALUE_TIE = 1e-9
TABLE_VERSION = 1
MAX_TABLE_SIDE = 64

_KINDS = (
    "recycled-grow",
    "nonrecycled-zero-loss",
    "frugal-above-target",
    "frugal-below-target",
)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EtaObjective:
    """A named objective over eta for one fusion pair.

    Attributes:
        kind: One of recycled-grow, nonrecycled-zero-loss,
            frugal-above-target, frugal-below-target.
        d: Target photon number; required by the two frugal kinds.
    """

    kind: str
    d: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown objective kind {self.kind!r}")
        if self.kind.startswith("frugal"):
            if self.d is None or operator.index(self.d) < 2:
                raise DomainError(f"{self.kind} requires a target d >= 2")
        elif self.d is not None:
            raise DomainError(f"{self.kind} takes no target")

    def label(self) -> str:
        return self.kind if self.d is None else f"{self.kind}(d={self.d})"


RECYCLED_GROW = EtaObjective("recycled-grow")
NONRECYCLED_ZERO_LOSS = EtaObjective("nonrecycled-zero-loss")


def frugal_above(d: int) -> EtaObjective:
    """Objective: probability that one fusion yields at least d photons."""
    return EtaObjective("frugal-above-target", d)


def frugal_below(d: int) -> EtaObjective:
    """Objective: expected increase of the maximum photon number."""
    return EtaObjective("frugal-below-target", d)


@dataclass(frozen=True)
class EtaTableEntry:
    """Optimal reflectivity and objective value for one (m, n) pair."""

    m: int
    n: int
    eta_opt: float
    p_opt: float
    objective: EtaObjective


def _validate_pair(obj: EtaObjective, m: int, n: int) -> tuple[int, int]:
    m = operator.index(m)
    n = operator.index(n)
    if m < 1 or n < 1:
        raise DomainError(f"fusion inputs must hold at least one photon, got {m}, {n}")
    if obj.kind == "frugal-above-target" and m + n < obj.d:
        raise DomainError(
            f"frugal-above-target(d={obj.d}) needs m+n >= d, got m+n={m + n}"
        )
    if obj.kind == "frugal-below-target" and m + n >= obj.d:
        raise DomainError(
            f"frugal-below-target(d={obj.d}) needs m+n < d, got m+n={m + n}"
        )
    return m, n


def objective_value(
    obj: EtaObjective,
    m: int,
    n: int,
    eta: float,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> float:
    """Evaluate one objective at a given reflectivity.

    recycled-grow sums outcomes that beat both inputs (s < min(m, n));
    nonrecycled-zero-loss keeps only s = 0; frugal-above-target(d) is the
    probability of producing at least d photons; frugal-below-target(d)
    weights each outcome by the gain of the maximum photon number. The top
    term of the frugal-below sum has zero weight and is skipped.

    Args:
        obj: The objective.
        m: First input photon number, >= 1.
        n: Second input photon number, >= 1.
        eta: Reflectivity in [0, 1].
        policy: Precision policy for the underlying distribution.

    Returns:
        The objective value (a probability except for frugal-below-target,
        which lies in [0, min(m, n)]).

    Raises:
        DomainError: If the pair violates the objective's window.
    """
    m, n = _validate_pair(obj, m, n)
    if obj.kind == "nonrecycled-zero-loss":
        return p_sub(0, m, n, eta, policy=policy)
    dist = subtraction_distribution(m, n, eta, policy=policy)
    if obj.kind == "recycled-grow":
        return float(math.fsum(dist.probs[: min(m, n)]))
    if obj.kind == "frugal-above-target":
        return float(math.fsum(dist.probs[: m + n - obj.d + 1]))
    lo = min(m, n)
    return float(math.fsum((lo - s) * dist.probs[s] for s in range(lo)))


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def _speed_policy(policy: PrecisionPolicy) -> PrecisionPolicy:
    # Grid scans tolerate float-path noise up to the largest tabulated
    # pairs; the reported p_opt is recomputed under the caller's policy.
    return replace(policy, switch_threshold=max(policy.switch_threshold, 130))


def optimize_eta(
    obj: EtaObjective,
    m: int,
    n: int,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    grid_step: float = GRID_STEP,
    refine_tol: float = REFINE_TOL,
) -> EtaTableEntry:
    """Globally maximize one objective over eta in [0, 1].

    A coarse grid (step `grid_step`) locates every local maximum within
    NEAR_TIE of the best grid value; each bracket is refined by
    golden-section search to |delta eta| <= `refine_tol`; value ties within
    VALUE_TIE break toward the smaller eta. The reported p_opt is
    re-evaluated at eta_opt under the caller's precision policy.

    Args:
        obj: Objective to maximize.
        m: First input photon number.
        n: Second input photon number.
        policy: Precision policy for the final objective value.
        grid_step: Coarse grid spacing in eta.
        refine_tol: Bracket width at which refinement stops.

    Returns:
        The table entry with eta_opt and p_opt.
    """
    m, n = _validate_pair(obj, m, n)
    fast = _speed_policy(policy)

    def f(eta: float) -> float:
        return objective_value(obj, m, n, eta, policy=fast)

    steps = round(1.0 / grid_step)
    etas = [i * grid_step for i in range(steps + 1)]
    etas[-1] = 1.0
    vals = [f(e) for e in etas]
    best = max(vals)
    tie_floor = best - max(NEAR_TIE, NEAR_TIE * abs(best))

    candidates = []
    for i, v in enumerate(vals):
        if v < tie_floor:
            continue
        left = vals[i - 1] if i > 0 else -math.inf
        right = vals[i + 1] if i + 1 < len(vals) else -math.inf
        if v >= left and v >= right:
            candidates.append(i)

    refined = []
    for i in candidates:
        lo = etas[max(i - 1, 0)]
        hi = etas[min(i + 1, len(etas) - 1)]
        refined.append(_golden_max(f, lo, hi, refine_tol))
    refined_best = max(v for _, v in refined)
    eta_opt = min(e for e, v in refined if v >= refined_best - VALUE_TIE)
    p_opt = objective_value(obj, m, n, eta_opt, policy=policy)
    return EtaTableEntry(m, n, eta_opt, p_opt, obj)


def default_cache_dir() -> str | None:
    """Resolve the table cache directory (env override, else ~/.cache)."""
    env = os.environ.get("FOCKFUSION_CACHE")
    if env == "":
        return None
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "fockfusion")


def _pair_in_window(obj: EtaObjective, m: int, n: int) -> bool:
    if obj.kind == "frugal-above-target":
        return m + n >= obj.d
    if obj.kind == "frugal-below-target":
        return m + n < obj.d
    return True


def _table_filename(
    obj: EtaObjective, max_m: int, max_n: int, grid_step: float, refine_tol: float
) -> str:
    tag = obj.kind if obj.d is None else f"{obj.kind}-d{obj.d}"
    return (
        f"eta-table-v{TABLE_VERSION}_{tag}_{max_m}x{max_n}"
        f"_g{grid_step:g}_r{refine_tol:g}.txt"
    )


def _write_table(
    path: str,
    obj: EtaObjective,
    max_m: int,
    max_n: int,
    grid_step: float,
    refine_tol: float,
    table: dict[tuple[int, int], EtaTableEntry],
) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"# fockfusion eta table v{TABLE_VERSION}\n")
        fh.write(
            f"# objective={obj.label()} max_m={max_m} max_n={max_n} "
            f"grid_step={grid_step!r} refine_tol={refine_tol!r}\n"
        )
        fh.write("# columns: m n eta_opt p_opt\n")
        for (m, n), e in sorted(table.items()):
            fh.write(f"{m} {n} {e.eta_opt!r} {e.p_opt!r}\n")
    os.replace(tmp, path)


def _read_table(
    path: str,
    obj: EtaObjective,
    max_m: int,
    max_n: int,
    grid_step: float,
    refine_tol: float,
) -> dict[tuple[int, int], EtaTableEntry] | None:
    try:
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError:
        return None
    if len(lines) < 3 or lines[0] != f"# fockfusion eta table v{TABLE_VERSION}":
        return None
    expect = (
        f"# objective={obj.label()} max_m={max_m} max_n={max_n} "
        f"grid_step={grid_step!r} refine_tol={refine_tol!r}"
    )
    if lines[1] != expect:
        return None
    table: dict[tuple[int, int], EtaTableEntry] = {}
    for line in lines[3:]:
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            return None
        m, n = int(parts[0]), int(parts[1])
        table[(m, n)] = EtaTableEntry(m, n, float(parts[2]), float(parts[3]), obj)
    wanted = sum(
        _pair_in_window(obj, m, n)
        for m in range(1, max_m + 1)
        for n in range(1, max_n + 1)
    )
    if len(table) != wanted:
        return None
    return table


def _scan_superset(
    directory: str,
    obj: EtaObjective,
    max_m: int,
    max_n: int,
    grid_step: float,
    refine_tol: float,
) -> dict[tuple[int, int], EtaTableEntry] | None:
    """Serve a table request from any cached file with larger extents.

    Entries are per-pair, so an M x N table contains every smaller table
    with the same objective and tolerances; slicing avoids re-optimizing
    the same pairs for each target size.
    """
    tag = obj.kind if obj.d is None else f"{obj.kind}-d{obj.d}"
    prefix = f"eta-table-v{TABLE_VERSION}_{tag}_"
    suffix = f"_g{grid_step:g}_r{refine_tol:g}.txt"
    try:
        names = os.listdir(directory)
    except OSError:
        return None
    for name in sorted(names):
        if not (name.startswith(prefix) and name.endswith(suffix)):
            continue
        extents = name[len(prefix) : -len(suffix)]
        fields = extents.split("x")
        if len(fields) != 2 or not all(f.isdigit() for f in fields):
            continue
        big_m, big_n = int(fields[0]), int(fields[1])
        if big_m < max_m or big_n < max_n or (big_m, big_n) == (max_m, max_n):
            continue
        full = _read_table(
            os.path.join(directory, name), obj, big_m, big_n, grid_step, refine_tol
        )
        if full is None:
            continue
        return {
            (m, n): e for (m, n), e in full.items() if m <= max_m and n <= max_n
        }
    return None


_MEMO: dict[tuple, dict[tuple[int, int], EtaTableEntry]] = {}


def build_table(
    obj: EtaObjective,
    max_m: int,
    max_n: int,
    *,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    cache_dir: str | None = None,
    use_cache: bool = True,
    grid_step: float = GRID_STEP,
    refine_tol: float = REFINE_TOL,
) -> dict[tuple[int, int], EtaTableEntry]:
    """Optimal-reflectivity table for all pairs m <= max_m, n <= max_n.

    Pairs outside a frugal objective's window are omitted. Tables load from
    the on-disk cache when a file with matching objective and tolerances
    covers the requested extents (larger cached tables are sliced), and are
    written back (atomically) after a build.

    Args:
        obj: Objective to tabulate.
        max_m: Largest first input, <= 64.
        max_n: Largest second input, <= 64.
        policy: Precision policy for reported p_opt values.
        cache_dir: Cache directory; defaults to $FOCKFUSION_CACHE or
            ~/.cache/fockfusion. Set use_cache=False to skip both reading
            and writing.
        use_cache: Whether to consult the in-process memo and disk cache.
        grid_step: Coarse grid spacing.
        refine_tol: Golden-section stopping width.

    Returns:
        Mapping (m, n) -> EtaTableEntry.
    """
    max_m = operator.index(max_m)
    max_n = operator.index(max_n)
    if not 1 <= max_m <= MAX_TABLE_SIDE or not 1 <= max_n <= MAX_TABLE_SIDE:
        raise DomainError(
            f"table extents must lie in [1, {MAX_TABLE_SIDE}], got {max_m}, {max_n}"
        )
    memo_key = (obj, max_m, max_n, grid_step, refine_tol)
    if use_cache and memo_key in _MEMO:
        return _MEMO[memo_key]

    path = None
    if use_cache:
        directory = cache_dir if cache_dir is not None else default_cache_dir()
        if directory:
            path = os.path.join(
                directory, _table_filename(obj, max_m, max_n, grid_step, refine_tol)
            )
            cached = _read_table(path, obj, max_m, max_n, grid_step, refine_tol)
            if cached is None:
                cached = _scan_superset(
                    directory, obj, max_m, max_n, grid_step, refine_tol
                )
            if cached is not None:
                _MEMO[memo_key] = cached
                return cached

    table = {}
    for m in range(1, max_m + 1):
        for n in range(1, max_n + 1):
            if _pair_in_window(obj, m, n):
                table[(m, n)] = optimize_eta(
                    obj, m, n, policy=policy, grid_step=grid_step, refine_tol=refine_tol
                )
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        _write_table(path, obj, max_m, max_n, grid_step, refine_tol, table)
    if use_cache:
        _MEMO[memo_key] = table
    return table
