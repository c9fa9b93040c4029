"""Framelet symbols (masks), modulation and polyphase matrices, and the
grid-sweep checkers that certify tight-frame and orthogonality conditions.

A mask with coefficients h_k and stride t evaluates as

    m(xi) = q**-0.5 * sum_k h_k * conj(chi_{k*t}(xi)),

finitely supported, hence constant on cosets of B^s once its support fits
below q^s.  Sweeping the depth-s grid therefore checks the defining matrix
identities exactly on all of the ring of integers, not just on samples.

Stride-q masks serve as "integral periodic" symbols (polyphase components,
paraunitary entries).  Their symbol value carries no q**-0.5 factor; use
``eval_symbol`` for that convention.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DepthError, ParameterError
from .galois import FieldParams, field_tables
from .localfield import (
    FieldElement,
    chi_n,
    fe_prime_power,
    grid_digits,
    grid_point,
    index_add,
    lf_add,
    lf_mul,
    u_map,
)

DEFAULT_MATRIX_TOL = 1e-10
DEFAULT_CASCADE_TOL = 1e-8


def _is_power_of(value: int, base: int) -> bool:
    if value < 1:
        return False
    while value % base == 0:
        value //= base
    return value == 1


@dataclass(frozen=True)
class Mask:
    """Finite complex coefficient sequence on the index lattice stride*N0."""

    params: FieldParams
    coeffs: np.ndarray
    stride: int = 1

    def __post_init__(self):
        if self.stride != 1 and not _is_power_of(self.stride, self.params.q):
            raise ParameterError(f"stride must be a power of q, got {self.stride}")
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.ndim != 1:
            raise ParameterError("coefficients must be one-dimensional")
        nz = np.nonzero(coeffs)[0]
        coeffs = coeffs[: nz[-1] + 1].copy() if nz.size else np.zeros(0, dtype=np.complex128)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self):
        return len(self.coeffs)

    @property
    def max_index(self) -> int:
        """Largest occupied index on the integer lattice (-1 for the zero mask)."""
        return (len(self.coeffs) - 1) * self.stride if len(self.coeffs) else -1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def to_json(self, role: str | None = None) -> dict:
        obj = {
            "stride": self.stride,
            "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs],
        }
        if role is not None:
            obj = {"role": role, **obj}
        return obj

    @classmethod
    def from_json(cls, params: FieldParams, obj: dict) -> "Mask":
        try:
            coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]], dtype=np.complex128)
            return cls(params, coeffs, int(obj.get("stride", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"bad mask object: {exc}") from exc


def zero_mask(params: FieldParams, stride: int = 1) -> Mask:
    return Mask(params, np.zeros(0), stride)


def delta_mask(params: FieldParams, value: complex = 1.0, slot: int = 0, stride: int = 1) -> Mask:
    coeffs = np.zeros(slot + 1, dtype=np.complex128)
    coeffs[slot] = value
    return Mask(params, coeffs, stride)


@dataclass(frozen=True)
class FilterBank:
    """A refinement mask plus wavelet masks over shared field parameters."""

    params: FieldParams
    m0: Mask
    wavelets: tuple

    def __post_init__(self):
        wavelets = tuple(self.wavelets)
        for m in (self.m0, *wavelets):
            if m.params != self.params:
                raise ParameterError("all masks of a bank must share field parameters")
        object.__setattr__(self, "wavelets", wavelets)

    @property
    def masks(self) -> tuple:
        return (self.m0, *self.wavelets)

    @property
    def n_wavelets(self) -> int:
        return len(self.wavelets)

    @property
    def max_index(self) -> int:
        return max(m.max_index for m in self.masks)

    def to_json(self) -> dict:
        return {
            "field": self.params.to_json(),
            "masks": [self.m0.to_json(role="m0")]
            + [m.to_json(role="wavelet") for m in self.wavelets],
        }

    @classmethod
    def from_json(cls, obj: dict, *, require_normalized: bool = True) -> "FilterBank":
        try:
            params = FieldParams.from_json(obj["field"])
            m0 = None
            wavelets = []
            for mobj in obj["masks"]:
                mask = Mask.from_json(params, mobj)
                if mobj.get("role") == "m0":
                    if m0 is not None:
                        raise ParameterError("bank declares more than one refinement mask")
                    m0 = mask
                else:
                    wavelets.append(mask)
            if m0 is None:
                raise ParameterError("bank declares no refinement mask")
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"bad bank object: {exc}") from exc
        bank = cls(params, m0, tuple(wavelets))
        if require_normalized:
            from .localfield import fe_zero

            val = eval_mask(m0, fe_zero(params))
            if abs(val - 1.0) > 1e-12:
                raise ParameterError(f"refinement mask is not normalized: m0(0) = {val}")
        return bank


@dataclass(frozen=True)
class MatrixSample:
    """A modulation or polyphase matrix evaluated at one point."""

    point: FieldElement
    entries: np.ndarray
    kind: str


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification sweep."""

    condition: str
    grid_depth: int
    max_deviation: float
    tolerance: float
    passed: bool
    worst_point: FieldElement | None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "grid_depth": self.grid_depth,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "worst_point": None if self.worst_point is None else self.worst_point.to_json(),
            "details": self.details,
        }

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.condition}: max deviation {self.max_deviation:.3e} "
            f"(tol {self.tolerance:.1e}, depth {self.grid_depth})"
        )


def make_report(condition, depth, deviations, tol, params, details=None) -> CheckReport:
    """Fold a per-grid-point deviation array into a report (first argmax wins)."""
    worst = int(np.argmax(deviations))
    max_dev = float(deviations[worst])
    return CheckReport(
        condition=condition,
        grid_depth=depth,
        max_deviation=max_dev,
        tolerance=tol,
        passed=bool(max_dev <= tol),
        worst_point=grid_point(params, depth, worst),
        details=details or {},
    )


# ---------------------------------------------------------------------------
# evaluation


def eval_mask(m: Mask, xi: FieldElement) -> complex:
    """Exact single-point evaluation through the character definition.

    This is the reference route: each term goes through u(n), lf_mul and chi
    on exact field elements, independently of the table-driven grid kernels.
    """
    if m.params != xi.params:
        raise ParameterError("mask and point belong to different fields")
    q = m.params.q
    total = 0.0 + 0.0j
    for slot, h in enumerate(m.coeffs):
        if h == 0:
            continue
        total += h * np.conj(chi_n(slot * m.stride, xi))
    return complex(total / math.sqrt(q))


def eval_symbol(m: Mask, xi: FieldElement) -> complex:
    """Symbol-convention value of a stride-q mask (no q**-0.5 prefactor)."""
    return complex(math.sqrt(m.params.q) * eval_mask(m, xi))


@functools.lru_cache(maxsize=None)
def _tmod(params: FieldParams) -> np.ndarray:
    """tmod[a, b]: character exponent of the product of digit codes a, b."""
    tab = field_tables(params)
    return tab.proj0[tab.mul]


def character_table(params: FieldParams) -> np.ndarray:
    """Unitary q-by-q table V[k, r] = q**-0.5 * conj chi(t * u(r) * u(k)).

    Its rows are the coefficient vectors of the canonical (Haar) bank, and it
    conjugates the modulation matrix into the polyphase matrix.
    """
    q = params.q
    ex = _tmod(params)[:q, :q]
    return kernels.conj_char_matrix(ex, params.p) / math.sqrt(q)


def _index_digit_matrix(indices: np.ndarray, q: int, width: int) -> np.ndarray:
    out = np.empty((len(indices), width), dtype=np.int64)
    for d in range(width):
        out[:, d] = (indices // q ** d) % q
    return out


def mask_values_at_digits(masks, point_digits: np.ndarray) -> np.ndarray:
    """Values of several masks at points given by their digit rows.

    ``point_digits[g, i]`` is the digit of point g at power i; digits beyond
    the matrix width are zero.  Returns an array of shape (len(masks), npts).
    """
    params = masks[0].params
    q = params.q
    width = point_digits.shape[1]
    # group masks by stride so each group shares one index set
    values = np.zeros((len(masks), point_digits.shape[0]), dtype=np.complex128)
    strides = sorted({m.stride for m in masks})
    for stride in strides:
        rows = [i for i, m in enumerate(masks) if m.stride == stride]
        n = max(len(masks[i].coeffs) for i in rows)
        if n == 0:
            continue
        coeffs = np.zeros((len(rows), n), dtype=np.complex128)
        for r, i in enumerate(rows):
            coeffs[r, : len(masks[i].coeffs)] = masks[i].coeffs
        indices = np.arange(n, dtype=np.int64) * stride
        # digits of the indices beyond the point width pair with zero digits
        # and contribute exponent 0, so width digits suffice.
        idx_digits = _index_digit_matrix(indices, q, width)
        exps = kernels.exponent_table(idx_digits, point_digits, _tmod(params), params.p)
        char = kernels.conj_char_matrix(exps, params.p)
        values[rows, :] = (coeffs @ char) / math.sqrt(q)
    return values


def mask_values_on_grid(masks, depth: int) -> np.ndarray:
    """Values of several masks at every depth-s grid point, kernel route."""
    params = masks[0].params
    digits = grid_digits(params, depth)
    nthreads = kernels.thread_count()
    if nthreads <= 1 or digits.shape[0] < 1024:
        return mask_values_at_digits(masks, digits)
    chunks = kernels.chunk_ranges(digits.shape[0], nthreads)
    out = np.zeros((len(masks), digits.shape[0]), dtype=np.complex128)
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        futures = {
            pool.submit(mask_values_at_digits, masks, digits[a:b]): (a, b) for a, b in chunks
        }
        for fut, (a, b) in futures.items():
            out[:, a:b] = fut.result()
    return out


@functools.lru_cache(maxsize=None)
def _shift_map_cached(params: FieldParams, depth: int) -> np.ndarray:
    """SHIFT[g, k] = grid index of xi_g + t*u(k): digit 0 moves by k in GF(q)."""
    q = params.q
    add = field_tables(params).add
    g = np.arange(q ** depth, dtype=np.int64)
    base = g - (g % q)
    return base[:, None] + add[g % q, :]


def shift_map(params: FieldParams, depth: int) -> np.ndarray:
    out = _shift_map_cached(params, depth)
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# algebra on masks


def mask_mul(a: Mask, b: Mask) -> Mask:
    """Product of two symbols as a mask: convolution under the carry-free
    index group, so that eval(result) = sqrt(q) * eval(a) * eval(b).
    """
    if a.params != b.params:
        raise ParameterError("masks belong to different fields")
    params = a.params
    out_stride = math.gcd(a.stride, b.stride)
    acc: dict[int, complex] = {}
    for j, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for k, y in enumerate(b.coeffs):
            if y == 0:
                continue
            n = index_add(params, j * a.stride, k * b.stride)
            slot, rem = divmod(n, out_stride)
            assert rem == 0, "carry-free sum left the common index lattice"
            acc[slot] = acc.get(slot, 0.0 + 0.0j) + x * y
    if not acc:
        return zero_mask(params, out_stride)
    coeffs = np.zeros(max(acc) + 1, dtype=np.complex128)
    for slot, value in acc.items():
        coeffs[slot] = value
    return Mask(params, coeffs, out_stride)


def mask_add(a: Mask, b: Mask) -> Mask:
    """Coefficient-wise sum on the common index lattice."""
    if a.params != b.params:
        raise ParameterError("masks belong to different fields")
    out_stride = math.gcd(a.stride, b.stride)
    n = max(a.max_index, b.max_index)
    if n < 0:
        return zero_mask(a.params, out_stride)
    coeffs = np.zeros(n // out_stride + 1, dtype=np.complex128)
    for m in (a, b):
        step = m.stride // out_stride
        coeffs[: len(m.coeffs) * step : step] += m.coeffs
    return Mask(a.params, coeffs, out_stride)


def mask_scale(m: Mask, scalar: complex) -> Mask:
    return Mask(m.params, m.coeffs * scalar, m.stride)


def trim_mask(m: Mask, cutoff: float = 1e-14) -> Mask:
    """Zero out coefficients below ``cutoff`` in magnitude."""
    coeffs = np.where(np.abs(m.coeffs) < cutoff, 0.0, m.coeffs)
    return Mask(m.params, coeffs, m.stride)


# ---------------------------------------------------------------------------
# matrices


def modulation_matrix(bank: FilterBank, xi: FieldElement) -> MatrixSample:
    """(L+1) x q matrix of mask values at the q shifts xi + t*u(k)."""
    params = bank.params
    shifts = [lf_add(xi, lf_mul(fe_prime_power(params, 1), u_map(params, k))) for k in range(params.q)]
    entries = np.array(
        [[eval_mask(m, s) for s in shifts] for m in bank.masks], dtype=np.complex128
    )
    return MatrixSample(point=xi, entries=entries, kind="modulation")


def polyphase_split(m: Mask) -> list:
    """The q sub-masks on the residue classes n = r (mod q), reindexed by
    (n - r)/q; returned as stride-q masks holding the raw coefficients.
    """
    if m.stride != 1:
        raise ParameterError("polyphase decomposition expects a stride-1 mask")
    q = m.params.q
    return [Mask(m.params, m.coeffs[r::q], stride=q) for r in range(q)]


def polyphase_matrix(bank: FilterBank, xi: FieldElement) -> MatrixSample:
    """q x (L+1) matrix of polyphase-component symbol values at xi."""
    comps = [polyphase_split(m) for m in bank.masks]
    entries = np.array(
        [[eval_symbol(comps[l][r], xi) for l in range(len(bank.masks))] for r in range(bank.params.q)],
        dtype=np.complex128,
    )
    return MatrixSample(point=xi, entries=entries, kind="polyphase")


# ---------------------------------------------------------------------------
# grid-sweep checks


def _require_depth(depth: int, max_index: int, q: int):
    if q ** depth < max_index + 1:
        raise DepthError(
            f"grid depth {depth} covers indices below {q ** depth}, "
            f"but the masks reach index {max_index}"
        )


def _gram_deviation_sweep(values: np.ndarray, smap: np.ndarray, target_rank: int):
    """Per-point max-abs deviation of H(g)* H(g) from the identity, where
    H(g)[l, k] = values[l, smap[g, k]]."""
    shifted = values[:, smap]  # (L+1, G, q)
    gram = np.einsum("lgk,lgj->gkj", np.conj(shifted), shifted)
    gram -= np.eye(target_rank)[None, :, :]
    return np.abs(gram).max(axis=(1, 2))


def check_uep(bank: FilterBank, depth: int, tol: float = DEFAULT_MATRIX_TOL) -> CheckReport:
    """Column orthonormality of the modulation matrix at every grid point."""
    params = bank.params
    _require_depth(depth, bank.max_index, params.q)
    values = mask_values_on_grid(bank.masks, depth)
    dev = _gram_deviation_sweep(values, shift_map(params, depth), params.q)
    return make_report("uep", depth, dev, tol, params)


def check_subqmf(m0: Mask, depth: int, tol: float = DEFAULT_MATRIX_TOL) -> CheckReport:
    """One-sided bound sum_k |m0(xi + t*u(k))|^2 <= 1 over the grid."""
    params = m0.params
    _require_depth(depth, m0.max_index, params.q)
    values = mask_values_on_grid([m0], depth)[0]
    sums = (np.abs(values[shift_map(params, depth)]) ** 2).sum(axis=1)
    dev = np.maximum(0.0, sums - 1.0)
    return make_report("subqmf", depth, dev, tol, params)


def check_polyphase_unitary(
    bank: FilterBank, depth: int, tol: float = DEFAULT_MATRIX_TOL
) -> CheckReport:
    """Row orthonormality of the polyphase matrix at every grid point."""
    params = bank.params
    q = params.q
    _require_depth(depth, bank.max_index, q)
    comps = []
    for m in bank.masks:
        comps.extend(polyphase_split(m))
    values = mask_values_on_grid(comps, depth) * math.sqrt(q)
    gamma = values.reshape(len(bank.masks), q, -1)  # (L+1, q, G)
    gram = np.einsum("lrg,lsg->grs", gamma, np.conj(gamma))
    gram -= np.eye(q)[None, :, :]
    dev = np.abs(gram).max(axis=(1, 2))
    return make_report("polyphase_unitary", depth, dev, tol, params)


def check_mixed_orthogonality(
    bankA: FilterBank, bankB: FilterBank, depth: int, tol: float = DEFAULT_MATRIX_TOL
) -> CheckReport:
    """Vanishing of the wavelet-only cross Gram between two banks.

    For every grid point and every shift index k (0 included), the two-column
    wavelet matrices at (xi, xi + t*u(k)) must have zero cross product.
    """
    if bankA.params != bankB.params:
        raise ParameterError("banks belong to different fields")
    if bankA.n_wavelets != bankB.n_wavelets:
        raise ParameterError("banks must have the same number of wavelet masks")
    params = bankA.params
    q = params.q
    _require_depth(depth, max(bankA.max_index, bankB.max_index), q)
    va = mask_values_on_grid(bankA.wavelets, depth)
    vb = mask_values_on_grid(bankB.wavelets, depth)
    smap = shift_map(params, depth)
    cross = np.einsum("lgk,lgj->gkj", np.conj(va[:, smap]), vb[:, smap])
    sel = np.zeros((q, q), dtype=bool)
    sel[0, :] = sel[:, 0] = True
    np.fill_diagonal(sel, True)
    dev = np.abs(cross[:, sel]).max(axis=1)
    return make_report("mixed_orthogonality", depth, dev, tol, params)
