"""Compensated phasor-summation kernels behind the structure-factor sweep.

For a piecewise-constant sign profile the transform
(1/L) * integral d(z) exp(-i dk z) dz has two exact closed forms:

* midpoint form, one term per domain:
      sign_j * l_j * sinc(dk l_j / 2) * exp(-i dk z_center_j)
  stable for every dk including dk = 0;

* boundary (telescoped) form, one term per boundary:
      sum_b w_b exp(-i dk z_b) / (-i dk L)
  where interior weights are sign differences. Half the trig work, but
  the 1/dk prefactor rules it out near dk = 0.

Both paths accumulate with Neumaier compensation so that the ~3000
near-cancelling phasors of a full device lose no digits. Each grid
point is summed independently, so results are bit-identical for any
parallel partitioning of the grid.
"""
from __future__ import annotations

import math
import os

import numpy as np

# pin a portable threading layer before numba loads (avoids the probe
# for incompatible TBB builds); per-point sums keep results identical
# for any worker count, so the layer choice never affects output
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

# |dk| * L below this threshold selects the midpoint form
SMALL_DK_LENGTH = 1.0


def set_thread_count(n: int) -> int:
    """Set the sweep worker count, clamped to what the runtime allows."""
    if not HAVE_NUMBA:
        return 1
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _sweep_numba(bz, bw, mz, ml, ms, length, dk_grid, out):  # pragma: no cover
        for i in prange(dk_grid.shape[0]):
            dk = dk_grid[i]
            sre = 0.0
            cre = 0.0
            sim = 0.0
            cim = 0.0
            if abs(dk) * length < SMALL_DK_LENGTH:
                for j in range(mz.shape[0]):
                    if dk == 0.0:
                        fac = ms[j] * ml[j]
                    else:
                        fac = ms[j] * 2.0 * np.sin(0.5 * dk * ml[j]) / dk
                    ang = dk * mz[j]
                    tre = fac * np.cos(ang)
                    tim = -fac * np.sin(ang)
                    t = sre + tre
                    if abs(sre) >= abs(tre):
                        cre += (sre - t) + tre
                    else:
                        cre += (tre - t) + sre
                    sre = t
                    t = sim + tim
                    if abs(sim) >= abs(tim):
                        cim += (sim - t) + tim
                    else:
                        cim += (tim - t) + sim
                    sim = t
                out[i] = complex(sre + cre, sim + cim) / length
            else:
                for j in range(bz.shape[0]):
                    ang = dk * bz[j]
                    tre = bw[j] * np.cos(ang)
                    tim = -bw[j] * np.sin(ang)
                    t = sre + tre
                    if abs(sre) >= abs(tre):
                        cre += (sre - t) + tre
                    else:
                        cre += (tre - t) + sre
                    sre = t
                    t = sim + tim
                    if abs(sim) >= abs(tim):
                        cim += (sim - t) + tim
                    else:
                        cim += (tim - t) + sim
                    sim = t
                re = sre + cre
                im = sim + cim
                # divide sum(w exp(-i dk z)) by (-i dk L)
                out[i] = complex(-im, re) / (dk * length)


def _sweep_fsum(bz, bw, mz, ml, ms, length, dk_grid, out):
    """Pure-numpy fallback; math.fsum gives exact accumulation."""
    for i, dk in enumerate(dk_grid):
        if abs(dk) * length < SMALL_DK_LENGTH:
            if dk == 0.0:
                fac = ms * ml
            else:
                fac = ms * (2.0 * np.sin(0.5 * dk * ml) / dk)
            ang = dk * mz
            re = math.fsum(fac * np.cos(ang))
            im = math.fsum(-fac * np.sin(ang))
            out[i] = complex(re, im) / length
        else:
            ang = dk * bz
            re = math.fsum(bw * np.cos(ang))
            im = math.fsum(-bw * np.sin(ang))
            out[i] = complex(-im, re) / (dk * length)


def sweep(bz, bw, mz, ml, ms, length, dk_grid, out) -> None:
    if HAVE_NUMBA:
        _sweep_numba(bz, bw, mz, ml, ms, length, dk_grid, out)
    else:
        _sweep_fsum(bz, bw, mz, ml, ms, length, dk_grid, out)
