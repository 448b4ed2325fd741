"""Pure-numpy kernels.  Reference path; the numba twins must agree bit for bit."""

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


def _mix(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


def scatter_conv(out, x, table, coef):
    """out[table[s, j]] += coef[s] * x[j]; entries with table < 0 are clipped.

    Each row of ``table`` must be injective on its nonnegative entries (true
    for translation tables), since fancy-index ``+=`` does not accumulate repeats.
    """
    for s in range(table.shape[0]):
        t = table[s]
        keep = t >= 0
        if keep.all():
            out[t] += coef[s] * x
        else:
            out[t[keep]] += coef[s] * x[keep]


def gather_conv(out, y, table, coef):
    """out[j] += sum_s coef[s] * y[table[s, j]]  (adjoint of scatter_conv)."""
    for s in range(table.shape[0]):
        t = table[s]
        keep = t >= 0
        if keep.all():
            out += coef[s] * y[t]
        else:
            out[keep] += coef[s] * y[t[keep]]


def sample_keys(key, sample_start, n_samples):
    i = np.arange(sample_start, sample_start + n_samples, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(np.uint64(key) + (i + np.uint64(1)) * GAMMA)


def digits(skeys, coords, m):
    """Uniform draws from {-m..m}, one row per sample key, one column per coordinate id."""
    c = coords.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = _mix(skeys[:, None] + (c[None, :] + np.uint64(1)) * GAMMA)
    u = (z >> _S11).astype(np.float64) * _INV53
    return np.floor(u * (2 * m + 1)) - m


def window_values(key, sample_start, n_samples, coords, m, idx, coef, chunk=4096):
    """Torus values (in [0,1)) of the factor map on each window point, per sample."""
    out = np.empty((n_samples, idx.shape[0]))
    for lo in range(0, n_samples, chunk):
        hi = min(n_samples, lo + chunk)
        x = digits(sample_keys(key, sample_start + lo, hi - lo), coords, m)
        acc = np.zeros((hi - lo, idx.shape[0]))
        for t in range(idx.shape[1]):
            acc += x[:, idx[:, t]] * coef[:, t]
        out[lo:hi] = acc - np.floor(acc)
    return out


def mc_phases(key, sample_start, n_samples, coords, m, idx, coef, alpha, chunk=4096):
    """Pairing <rho(x), alpha> mod 1 for each sample x."""
    out = np.empty(n_samples)
    for lo in range(0, n_samples, chunk):
        hi = min(n_samples, lo + chunk)
        theta = window_values(key, sample_start + lo, hi - lo, coords, m, idx, coef, chunk)
        ph = np.zeros(hi - lo)
        for w in range(idx.shape[0]):
            ph += alpha[w] * theta[:, w]
        out[lo:hi] = ph - np.floor(ph)
    return out
