"""Eigenanalysis: parity-resolved spectra, tunnel splittings, degeneracies.

The eigensolver exploits the structure of the model: for real Hamiltonians
that conserve photon-number parity (couplings n <-> n+2, n+4 only) the even
and odd Fock sub-blocks are diagonalised separately and merged, which labels
every eigenvector with an exact parity and resolves degenerate pairs without
ambiguity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidDimensionError, ParityResolutionError, PoleError
from .fock import HamiltonianParams, build_hamiltonian, quadrature_x
from .tables import SweepResult

__all__ = [
    "EigenSystem",
    "TunnelSplitting",
    "DegeneracyReport",
    "eigensystem",
    "tunnel_splitting",
    "signed_splitting",
    "splitting_sweep",
    "find_splitting_zeros",
    "degeneracy_check",
    "resonant_displaced_hamiltonian",
    "exact_block_matrix",
    "exact_block_eigenvalues",
    "align_offset",
    "first_order_crossing_amplitude",
    "second_order_energy",
    "localized_pair",
    "quartic_drive_spectrum",
    "quartic_crossing_location",
]


@dataclass
class EigenSystem:
    """Eigenvalues sorted descending (well-depth order) with parity labels.

    ``parities`` is None when the input does not commute with photon parity.
    """

    eigenvalues: np.ndarray
    parities: np.ndarray | None
    eigenvectors: np.ndarray
    dim: int

    def top_state(self, parity: int, k: int = 0) -> tuple[float, np.ndarray]:
        """k-th highest eigenpair of the given parity."""
        if self.parities is None:
            raise ParityResolutionError("eigensystem carries no parity labels")
        idx = np.nonzero(self.parities == parity)[0]
        i = idx[k]
        return self.eigenvalues[i], self.eigenvectors[:, i]


@dataclass
class TunnelSplitting:
    delta_e: float          # E(top even) - E(top odd), units of kerr
    abs_delta_e: float
    ground_parity: int      # parity of the overall top eigenstate


def _commutes_with_parity(h: np.ndarray, tol: float) -> bool:
    dim = h.shape[0]
    odd_mask = (np.add.outer(np.arange(dim), np.arange(dim)) % 2).astype(bool)
    return np.max(np.abs(h[odd_mask])) <= tol


def eigensystem(h: np.ndarray, hermitian_tol: float = 1e-10) -> EigenSystem:
    """Diagonalise a Hermitian matrix, descending order, with parity labels.

    Raises on non-Hermitian input.  Parity labels are assigned only when the
    matrix commutes with the photon-number parity; degenerate subspaces of a
    parity-commuting matrix are resolved by re-diagonalising the parity
    operator inside them.
    """
    h = np.asarray(h)
    scale = max(1.0, np.abs(h).max())
    if np.abs(h - h.conj().T).max() > hermitian_tol * scale:
        raise ValueError("input matrix is not Hermitian")
    dim = h.shape[0]
    parity_ok = _commutes_with_parity(h, 1e-13 * scale)

    if parity_ok and np.isrealobj(h):
        # exact block diagonalisation over even/odd Fock indices
        vals = np.empty(dim)
        pars = np.empty(dim, dtype=int)
        vecs = np.zeros((dim, dim))
        pos = 0
        for par in (1, -1):
            idx = np.arange(0 if par == 1 else 1, dim, 2)
            w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
            k = len(idx)
            vals[pos:pos + k] = w
            pars[pos:pos + k] = par
            vecs[np.ix_(idx, np.arange(pos, pos + k))] = v
            pos += k
        # descending energy; even member first on exact ties
        order = np.lexsort((-pars, -vals))
        return EigenSystem(vals[order], pars[order], vecs[:, order], dim)

    w, v = np.linalg.eigh(h)
    w = w[::-1]
    v = v[:, ::-1]
    if not parity_ok:
        return EigenSystem(w, None, v, dim)

    pdiag = (-1.0) ** np.arange(dim)
    expect = np.real(np.einsum("ij,i,ij->j", v.conj(), pdiag, v))
    if np.min(np.abs(expect)) < 0.999:
        # mixed degenerate subspaces: re-diagonalise parity within each group
        groups = _degenerate_groups(w, 1e-9 * max(1.0, np.abs(w).max()))
        for g in groups:
            if len(g) == 1:
                continue
            sub = v[:, g]
            pv, pu = np.linalg.eigh(sub.conj().T @ (pdiag[:, None] * sub))
            v[:, g] = sub @ pu
        expect = np.real(np.einsum("ij,i,ij->j", v.conj(), pdiag, v))
    if np.max(np.abs(np.abs(expect) - 1.0)) > 1e-6:
        raise ParityResolutionError("eigenvector parity not within 1e-6 of +/-1")
    pars = np.where(expect > 0, 1, -1)
    return EigenSystem(w, pars, v, dim)


def _degenerate_groups(w_desc: np.ndarray, tol: float) -> list:
    groups, cur = [], [0]
    for i in range(1, len(w_desc)):
        if abs(w_desc[i] - w_desc[cur[-1]]) < tol:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    groups.append(cur)
    return groups


def tunnel_splitting(p: HamiltonianParams) -> TunnelSplitting:
    """Signed ground-manifold splitting E(top even) - E(top odd)."""
    es = eigensystem(build_hamiltonian(p))
    e_even, _ = es.top_state(1)
    e_odd, _ = es.top_state(-1)
    de = e_even - e_odd
    return TunnelSplitting(de, abs(de), int(es.parities[0]))


def signed_splitting(delta: float, p0: HamiltonianParams) -> float:
    return tunnel_splitting(p0.with_(delta=delta)).delta_e


def find_splitting_zeros(p0: HamiltonianParams, lo: float, hi: float,
                         scan_points: int = 201, xtol: float = 1e-8) -> np.ndarray:
    """Zeros of the signed splitting in [lo, hi], refined by bisection."""
    grid = np.linspace(lo, hi, scan_points)
    vals = np.array([signed_splitting(d, p0) for d in grid])
    zeros = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            zeros.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            zeros.append(brentq(signed_splitting, grid[i], grid[i + 1],
                                args=(p0,), xtol=xtol))
    if vals[-1] == 0.0:
        zeros.append(grid[-1])
    return np.array(zeros)


def splitting_sweep(p0: HamiltonianParams, delta_grid: np.ndarray) -> SweepResult:
    """|dE| and signed dE per grid point; zero locations in ``meta['zeros']``."""
    delta_grid = np.asarray(delta_grid, dtype=float)
    if np.any(np.diff(delta_grid) <= 0):
        raise ValueError("delta grid must be strictly increasing")
    out = SweepResult(["delta", "eps2", "de_signed", "abs_de"])
    for d in delta_grid:
        ts = tunnel_splitting(p0.with_(delta=float(d)))
        out.append(float(d), p0.eps2, ts.delta_e, ts.abs_delta_e)
    sig = out.column("de_signed")
    zeros = []
    for i in range(len(delta_grid) - 1):
        if sig[i] == 0.0:
            zeros.append(delta_grid[i])
        elif sig[i] * sig[i + 1] < 0:
            zeros.append(brentq(signed_splitting, delta_grid[i], delta_grid[i + 1],
                                args=(p0,), xtol=1e-8))
    out.meta["zeros"] = zeros
    return out


@dataclass
class DegeneracyReport:
    m: int
    pairs: list                 # (energy_even, energy_odd) per pair, descending
    gaps: np.ndarray            # |intra-pair gap| per pair
    n_degenerate: int           # pairs with gap below tolerance
    tolerance: float
    ok: bool = field(default=False)

    def __post_init__(self):
        self.ok = self.n_degenerate >= self.m + 1


def _pair_up(es: EigenSystem, n_pairs: int) -> list:
    """Greedy descending pairing of opposite-parity states: (i_idx, j_idx)."""
    used = set()
    pairs = []
    i = 0
    while len(pairs) < n_pairs and i < es.dim - 1:
        if i in used:
            i += 1
            continue
        j = i + 1
        while j in used or (j < es.dim and es.parities[j] == es.parities[i]):
            j += 1
            if j >= es.dim:
                return pairs
        pairs.append((i, j))
        used.update((i, j))
        i += 1
    return pairs


def degeneracy_check(m: int, eps2: float, kerr: float = 1.0,
                     dim: int | None = None,
                     tolerance: float = 1e-8) -> DegeneracyReport:
    """Verify m+1 opposite-parity degenerate pairs at delta = 2 m kerr."""
    if m < 0:
        raise ValueError("m must be a non-negative integer")
    p = HamiltonianParams(delta=2 * m * kerr, kerr=kerr, eps2=eps2,
                          dim=dim if dim else 0)
    if p.dim < 2 * (m + 2):
        raise InvalidDimensionError(f"dim={p.dim} too small for m={m}")
    es = eigensystem(build_hamiltonian(p))
    pairs = _pair_up(es, m + 1)
    gaps = np.array([abs(es.eigenvalues[i] - es.eigenvalues[j]) for i, j in pairs])
    n_deg = 0
    for g in gaps:
        if g < tolerance * kerr:
            n_deg += 1
        else:
            break
    energies = [(es.eigenvalues[i] if es.parities[i] == 1 else es.eigenvalues[j],
                 es.eigenvalues[j] if es.parities[i] == 1 else es.eigenvalues[i])
                for i, j in pairs]
    return DegeneracyReport(m, energies, gaps, n_deg, tolerance)


def resonant_displaced_hamiltonian(m: int, eps2: float, kerr: float = 1.0,
                                   dim: int = 0) -> np.ndarray:
    """Displaced-frame Hamiltonian at the resonance delta = 2 m kerr.

    Specialised tridiagonal form with the ladder bracket (n - m) kept in
    integer arithmetic, so the decoupling elements at n = m vanish exactly
    (up to the scalar frame offset, same convention as
    :func:`kerrcat.fock.displaced_hamiltonian`).
    """
    if m < 0:
        raise ValueError("m must be a non-negative integer")
    if dim == 0:
        dim = max(m + 4, 8)
    alpha = np.sqrt(eps2 / kerr)
    n = np.arange(dim, dtype=float)
    h = np.diag((2 * m * kerr - 4 * eps2) * n - kerr * n * (n - 1))
    nn = np.arange(dim - 1)
    c1 = -2 * kerr * alpha * (nn - m) * np.sqrt(nn + 1.0)
    h += np.diag(c1, 1) + np.diag(c1, -1)
    return h


def exact_block_matrix(m: int, eps2: float, kerr: float = 1.0) -> np.ndarray:
    """(m+1) x (m+1) decoupled block of the displaced frame at delta = 2 m kerr."""
    return resonant_displaced_hamiltonian(m, eps2, kerr)[: m + 1, : m + 1]


def exact_block_eigenvalues(m: int, eps2: float, kerr: float = 1.0) -> np.ndarray:
    """Eigenvalues (descending) of the decoupled displaced block; each appears
    twice in the full spectrum after constant-offset alignment."""
    return np.sort(np.linalg.eigvalsh(exact_block_matrix(m, eps2, kerr)))[::-1]


def align_offset(block_vals_desc: np.ndarray, pair_means_desc: np.ndarray) -> float:
    """RMS-minimising constant offset between block eigenvalues and pair means."""
    return float(np.mean(pair_means_desc - block_vals_desc))


def first_order_crossing_amplitude(n: int, eps2: float) -> float:
    """Avoided-crossing amplitude eps2 sqrt((n+1)(n+2)) of consecutive levels."""
    return eps2 * np.sqrt((n + 1) * (n + 2))


def second_order_energy(level: int, p: HamiltonianParams) -> float:
    """Second-order squeeze-drive correction to Fock level ``level``.

    Standard second-order perturbation theory for V = eps2 (a^dag^2 + a^2) on
    the Kerr ladder E0_n = delta n - kerr n(n-1):

        E2_n = eps2^2 [ (n+1)(n+2) / (-2 delta + 2 K (2n+1))
                        + n(n-1)  / ( 2 delta - 2 K (2n-3)) ]

    and E2_n = E2_{n+1} exactly at delta = 2 n kerr.
    """
    n, delta, K, eps2 = level, p.delta, p.kerr, p.eps2
    if n < 0:
        raise ValueError("level must be >= 0")
    d_up = -2 * delta + 2 * K * (2 * n + 1)
    if abs(d_up) < 1e-12:
        raise PoleError(f"resonant denominator at level {n} (upward)")
    e2 = eps2**2 * (n + 1) * (n + 2) / d_up
    if n >= 2:
        d_dn = 2 * delta - 2 * K * (2 * n - 3)
        if abs(d_dn) < 1e-12:
            raise PoleError(f"resonant denominator at level {n} (downward)")
        e2 += eps2**2 * n * (n - 1) / d_dn
    return e2


def localized_pair(es: EigenSystem, pair_index: int = 0):
    """Right/left localized combinations of the ``pair_index``-th eigenpair.

    Returns (right, left) with the global phase fixed so <X> > 0 on "right".
    Warns when the pair is not quasi-degenerate relative to the gap to the
    next manifold.
    """
    pairs = _pair_up(es, pair_index + 2)
    if pair_index >= len(pairs):
        raise ValueError("not enough opposite-parity pairs in the spectrum")
    i, j = pairs[pair_index]
    gap = abs(es.eigenvalues[i] - es.eigenvalues[j])
    if pair_index + 1 < len(pairs):
        k, _ = pairs[pair_index + 1]
        inter = abs(es.eigenvalues[j] - es.eigenvalues[k])
        if gap > inter:
            warnings.warn(
                f"pair {pair_index} is not quasi-degenerate "
                f"(gap {gap:.3g} exceeds manifold gap {inter:.3g})",
                stacklevel=2)
    vp, vm = es.eigenvectors[:, i], es.eigenvectors[:, j]
    right = (vp + vm) / np.sqrt(2)
    left = (vp - vm) / np.sqrt(2)
    x = quadrature_x(es.dim)
    if np.real(right.conj() @ x @ right) < 0:
        right, left = left, right
    return right, left


def quartic_drive_spectrum(p: HamiltonianParams, delta_grid: np.ndarray) -> SweepResult:
    """Top even/odd gap vs delta for the quartic-drive variant (eps2 = 0)."""
    out = SweepResult(["delta", "eps4", "gap_signed", "abs_gap"])
    for d in np.asarray(delta_grid, dtype=float):
        es = eigensystem(build_hamiltonian(p.with_(delta=float(d))))
        ge = es.top_state(1)[0] - es.top_state(-1)[0]
        out.append(float(d), p.eps4, ge, abs(ge))
    sig = out.column("gap_signed")
    grid = out.column("delta")
    zeros = []
    for i in range(len(grid) - 1):
        if sig[i] * sig[i + 1] < 0:
            zeros.append(quartic_crossing_location(p, grid[i], grid[i + 1]))
        elif sig[i] == 0.0:
            zeros.append(grid[i])
    out.meta["zeros"] = zeros
    return out


def quartic_crossing_location(p: HamiltonianParams, lo: float, hi: float) -> float:
    def gap(d):
        es = eigensystem(build_hamiltonian(p.with_(delta=float(d))))
        return es.top_state(1)[0] - es.top_state(-1)[0]
    return brentq(gap, lo, hi, xtol=1e-10)
