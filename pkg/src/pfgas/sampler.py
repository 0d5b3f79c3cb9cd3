"""Single-site Metropolis sampler for the N-point Gibbs density.

This is a qualitative tool: it produces point clouds and empirical radial
profiles, with no claim of exact sampling.  The inner loop is compiled with
numba; random numbers come from numpy's PCG64 generator in fixed-size blocks,
so a seed determines the output bit for bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DataError, DomainError, ParameterError
from .model import ModelParams

_BLOCK = 256  # sweeps per batch of random numbers


@dataclass(frozen=True)
class ChainConfig:
    steps: int
    burn_in: int = 0
    proposal_sigma: float | None = None
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        if not (self.steps > self.burn_in >= 0):
            raise ParameterError("need steps > burn_in >= 0")
        if self.proposal_sigma is not None and not self.proposal_sigma > 0:
            raise ParameterError("proposal_sigma must be positive")
        if self.thin < 1:
            raise ParameterError("thin must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("seed must be an unsigned 64-bit integer")


@dataclass
class SampleSet:
    """Stored configurations (rows), their sweep indices and chain diagnostics."""

    configs: np.ndarray
    sweeps: np.ndarray
    acceptance_rate: float
    log_energy_trace: np.ndarray


@numba.njit(cache=True)
def _site_energy(zs, j, x, y, a_n, b_n, n):
    """Terms of the log density that involve point j placed at x + i y."""
    if y == 0.0:
        return -np.inf
    r2 = x * x + y * y
    if r2 == 0.0 and b_n > 0.0:
        return -np.inf
    e = 2.0 * math.log(2.0 * abs(y))
    e -= n * (a_n * r2 - b_n * math.log(r2))
    for k in range(zs.shape[0]):
        if k == j:
            continue
        dx = x - zs[k].real
        dy = y - zs[k].imag
        sy = y + zs[k].imag
        # |z_j - z_k|^2 |z_j - conj z_k|^2, logged once
        e += math.log((dx * dx + dy * dy) * (dx * dx + sy * sy))
    return e


@numba.njit(cache=True)
def _run_block(zs, sites, steps_re, steps_im, uniforms, a_n, b_n, n):
    accepted = 0
    for s in range(sites.shape[0]):
        j = sites[s]
        old = zs[j]
        nx = old.real + steps_re[s]
        ny = old.imag + steps_im[s]
        e_new = _site_energy(zs, j, nx, ny, a_n, b_n, n)
        if e_new == -np.inf:
            continue
        d = e_new - _site_energy(zs, j, old.real, old.imag, a_n, b_n, n)
        if d >= 0.0 or uniforms[s] < math.exp(d):
            zs[j] = complex(nx, ny)
            accepted += 1
    return accepted


def log_density_unnorm(p: ModelParams, config) -> float:
    """Unnormalized log of the Gibbs density; ``-inf`` on the zero set."""
    z = np.asarray(config, dtype=complex).ravel()
    if z.size != p.n:
        raise DomainError(f"configuration has {z.size} points, expected {p.n}")
    if np.any(z.imag == 0):
        return -math.inf
    r = np.abs(z)
    if p.b_n > 0 and np.any(r == 0):
        return -math.inf
    with np.errstate(divide="ignore"):
        diff = np.abs(z[:, None] - z[None, :])
        refl = np.abs(z[:, None] - z.conj()[None, :])
    iu = np.triu_indices(z.size, 1)
    pair = 2.0 * np.log(diff[iu]).sum() + 2.0 * np.log(refl[iu]).sum()
    with np.errstate(divide="ignore"):
        q = p.a_n * r * r - 2.0 * p.b_n * np.log(r)
    single = 2.0 * np.log(2.0 * np.abs(z.imag)).sum() - p.n * q.sum()
    return float(pair + single)


def initial_config(n: int) -> np.ndarray:
    """N points equispaced on the unit circle at half-step angles (none real)."""
    return np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)


def sample_chain(p: ModelParams, cfg: ChainConfig) -> SampleSet:
    """Run ``cfg.steps`` sweeps of N single-site Metropolis moves each."""
    n = p.n
    sigma = cfg.proposal_sigma if cfg.proposal_sigma is not None else 0.5 * p.gamma_n
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    zs = initial_config(n)
    if n == 1:
        zs = np.array([1j])  # the half-step angle would put a single point on the real axis
    stored, sweeps, trace = [], [], []
    accepted = 0
    done = 0
    while done < cfg.steps:
        block = min(_BLOCK, cfg.steps - done)
        m = block * n
        sites = rng.integers(0, n, size=m)
        normals = rng.standard_normal((2, m)) * sigma
        uniforms = rng.random(m)
        for b in range(block):
            sl = slice(b * n, (b + 1) * n)
            accepted += _run_block(zs, sites[sl], normals[0, sl], normals[1, sl], uniforms[sl],
                                   p.a_n, p.b_n, float(n))
            sweep = done + b
            if sweep >= cfg.burn_in and (sweep - cfg.burn_in) % cfg.thin == 0:
                stored.append(zs.copy())
                sweeps.append(sweep)
                trace.append(log_density_unnorm(p, zs))
        done += block
    return SampleSet(np.array(stored), np.array(sweeps, dtype=np.int64),
                     accepted / (cfg.steps * n), np.array(trace))


def radial_hist(s: SampleSet, bins: int, lo: float | None = None, hi: float | None = None):
    """Normalized histogram of |zeta| over all stored points: (edges, mass)."""
    if s.configs.size == 0:
        raise DataError("empty sample set")
    r = np.abs(s.configs).ravel()
    lo = float(r.min()) if lo is None else lo
    hi = float(r.max()) if hi is None else hi
    counts, edges = np.histogram(r, bins=bins, range=(lo, hi))
    return edges, counts / r.size


def band_mass(s: SampleSet, lo: float, hi: float) -> float:
    """Fraction of stored points with lo <= |zeta| <= hi."""
    if s.configs.size == 0:
        raise DataError("empty sample set")
    r = np.abs(s.configs).ravel()
    return float(np.mean((r >= lo) & (r <= hi)))


def imag_symmetry_statistic(s: SampleSet) -> float:
    """sup_y |F(y) - (1 - F(-y))| for the empirical law F of Im zeta."""
    if s.configs.size == 0:
        raise DataError("empty sample set")
    y = np.sort(s.configs.imag.ravel())
    grid = np.concatenate([y, -y])
    f = np.searchsorted(y, grid, side="right") / y.size
    g = 1.0 - np.searchsorted(y, -grid, side="left") / y.size
    return float(np.max(np.abs(f - g)))


def write_points_csv(s: SampleSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sweep_index", "j", "re", "im"])
        for sweep, cfg in zip(s.sweeps, s.configs):
            for j, z in enumerate(cfg):
                w.writerow([int(sweep), j, format(z.real, ".17g"), format(z.imag, ".17g")])


def write_hist_csv(edges, mass, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "mass"])
        for lo, hi, m in zip(edges[:-1], edges[1:], mass):
            w.writerow([format(lo, ".17g"), format(hi, ".17g"), format(m, ".17g")])
