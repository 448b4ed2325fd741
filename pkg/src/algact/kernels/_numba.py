"""numba twins of :mod:`algact.kernels._numpy` (same operation order)."""

import numba as nb
import numpy as np

njit = nb.njit(cache=True, nogil=True)

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit
def _mix(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@njit
def scatter_conv(out, x, table, coef):
    for s in range(table.shape[0]):
        c = coef[s]
        for j in range(table.shape[1]):
            t = table[s, j]
            if t >= 0:
                out[t] += c * x[j]


@njit
def gather_conv(out, y, table, coef):
    for s in range(table.shape[0]):
        c = coef[s]
        for j in range(table.shape[1]):
            t = table[s, j]
            if t >= 0:
                out[j] += c * y[t]


@njit
def _sample_key(key, i):
    return _mix(key + (np.uint64(i) + _ONE) * _GAMMA)


@njit
def sample_keys(key, sample_start, n_samples):
    out = np.empty(n_samples, dtype=np.uint64)
    k = np.uint64(key)
    for i in range(n_samples):
        out[i] = _sample_key(k, sample_start + i)
    return out


@njit
def _fill_digits(buf, skey, coords, m):
    width = 2 * m + 1
    for c in range(coords.shape[0]):
        z = _mix(skey + (np.uint64(coords[c]) + _ONE) * _GAMMA)
        u = np.float64(z >> _S11) * _INV53
        buf[c] = np.floor(u * width) - m


@njit
def digits(skeys, coords, m):
    out = np.empty((skeys.shape[0], coords.shape[0]))
    for i in range(skeys.shape[0]):
        _fill_digits(out[i], skeys[i], coords, m)
    return out


@njit
def window_values(key, sample_start, n_samples, coords, m, idx, coef):
    out = np.empty((n_samples, idx.shape[0]))
    buf = np.empty(coords.shape[0])
    k = np.uint64(key)
    for i in range(n_samples):
        _fill_digits(buf, _sample_key(k, sample_start + i), coords, m)
        for w in range(idx.shape[0]):
            acc = 0.0
            for t in range(idx.shape[1]):
                acc += buf[idx[w, t]] * coef[w, t]
            out[i, w] = acc - np.floor(acc)
    return out


@njit
def mc_phases(key, sample_start, n_samples, coords, m, idx, coef, alpha):
    out = np.empty(n_samples)
    buf = np.empty(coords.shape[0])
    k = np.uint64(key)
    for i in range(n_samples):
        _fill_digits(buf, _sample_key(k, sample_start + i), coords, m)
        ph = 0.0
        for w in range(idx.shape[0]):
            acc = 0.0
            for t in range(idx.shape[1]):
                acc += buf[idx[w, t]] * coef[w, t]
            ph += alpha[w] * (acc - np.floor(acc))
        out[i] = ph - np.floor(ph)
    return out
