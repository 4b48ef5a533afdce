"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time. Setting the environment variable
``SURFTRAP_DISABLE_NUMBA=1`` (or running without numba installed) selects the
numpy implementations. Both paths evaluate the same expressions in the same
order; results agree to a few ulp.

Potential parameters are packed into a flat float64 vector, see ``pack``.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

if numba is not None and "NUMBA_THREADING_LAYER" not in os.environ:
    # sweeps launch kernels from several Python threads at once
    numba.config.THREADING_LAYER = "omp"

_flag = os.environ.get("SURFTRAP_DISABLE_NUMBA", "").strip().lower()
HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and _flag not in ("1", "true", "yes", "on")

# indices into the packed parameter vector
C4, U0, LP, WX, WY, MASS, OMX, OMY, OMZ, Z0, GRAV, EW_ON = range(12)
NPARAMS = 12


def pack(c4, u0, lp, wx, wy, mass, omx, omy, omz, z0, grav_coeff, ew_on):
    """grav_coeff is gravity_sign * m * g, so U_g = grav_coeff * z."""
    return np.array([c4, u0, lp, wx, wy, mass, omx, omy, omz, z0, grav_coeff,
                     1.0 if ew_on else 0.0], dtype=np.float64)


# ---------------------------------------------------------------- numpy path

def _np_potential_points(x, y, z, p):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    z2 = z * z
    u = -p[C4] / (z2 * z2)
    if p[EW_ON] != 0.0:
        u = u + p[U0] * np.exp(-z / p[LP] - 2.0 * x * x / (p[WX] * p[WX])
                               - 2.0 * y * y / (p[WY] * p[WY]))
    dz = z - p[Z0]
    u = u + 0.5 * p[MASS] * (p[OMX] * p[OMX] * x * x + p[OMY] * p[OMY] * y * y
                             + p[OMZ] * p[OMZ] * dz * dz)
    return u + p[GRAV] * z


def _np_potential_grid(xs, ys, zs, p):
    return _np_potential_points(xs[:, None, None], ys[None, :, None],
                                zs[None, None, :], p)


def _np_excess_sum(v, mask, level):
    excess = np.where(mask & (v < level), level - v, 0.0)
    return float(np.sum(np.sum(excess.reshape(excess.shape[0], -1), axis=1)))


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:
    @numba.njit(cache=True, nogil=True)
    def _nb_point(x, y, z, p):
        z2 = z * z
        u = -p[0] / (z2 * z2)
        if p[11] != 0.0:
            u = u + p[1] * np.exp(-z / p[2] - 2.0 * x * x / (p[3] * p[3])
                                  - 2.0 * y * y / (p[4] * p[4]))
        dz = z - p[9]
        u = u + 0.5 * p[5] * (p[6] * p[6] * x * x + p[7] * p[7] * y * y
                              + p[8] * p[8] * dz * dz)
        return u + p[10] * z

    @numba.njit(cache=True, nogil=True, parallel=True)
    def _nb_potential_points_flat(x, y, z, p):
        out = np.empty(x.size)
        for i in numba.prange(x.size):
            out[i] = _nb_point(x[i], y[i], z[i], p)
        return out

    @numba.njit(cache=True, nogil=True, parallel=True)
    def _nb_potential_grid(xs, ys, zs, p):
        out = np.empty((xs.size, ys.size, zs.size))
        for i in numba.prange(xs.size):
            for j in range(ys.size):
                for k in range(zs.size):
                    out[i, j, k] = _nb_point(xs[i], ys[j], zs[k], p)
        return out

    @numba.njit(cache=True, nogil=True, parallel=True)
    def _nb_excess_sum(v, mask, level):
        # per-slab partials then a serial pass: result independent of thread count
        n0 = v.shape[0]
        partial = np.zeros(n0)
        for i in numba.prange(n0):
            s = 0.0
            for j in range(v.shape[1]):
                for k in range(v.shape[2]):
                    if mask[i, j, k] and v[i, j, k] < level:
                        s += level - v[i, j, k]
            partial[i] = s
        total = 0.0
        for i in range(n0):
            total += partial[i]
        return total

    def _nb_potential_points(x, y, z, p):
        x, y, z = np.broadcast_arrays(np.asarray(x, dtype=np.float64),
                                      np.asarray(y, dtype=np.float64),
                                      np.asarray(z, dtype=np.float64))
        shape = x.shape
        out = _nb_potential_points_flat(np.ascontiguousarray(x).ravel(),
                                        np.ascontiguousarray(y).ravel(),
                                        np.ascontiguousarray(z).ravel(), p)
        return out.reshape(shape)


def potential_points(x, y, z, p, use_numba=None):
    """Total potential at broadcast points (x, y, z)."""
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _nb_potential_points(x, y, z, p)
    return _np_potential_points(x, y, z, p)


def potential_grid(xs, ys, zs, p, use_numba=None):
    """Total potential on the product grid xs x ys x zs, shape (nx, ny, nz)."""
    if use_numba is None:
        use_numba = USE_NUMBA
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    zs = np.ascontiguousarray(zs, dtype=np.float64)
    if use_numba:
        return _nb_potential_grid(xs, ys, zs, p)
    return _np_potential_grid(xs, ys, zs, p)


def excess_sum(v, mask, level, use_numba=None):
    """Sum of (level - v) over masked cells where v < level."""
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return float(_nb_excess_sum(v, mask, float(level)))
    return _np_excess_sum(v, mask, level)


def set_threads(n):
    if USE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
