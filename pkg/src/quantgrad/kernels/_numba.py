"""Numba-compiled statevector kernels, same contracts as ``_numpy``."""
import cmath
import math

import numpy as np
from numba import njit


@njit(cache=True)
def apply_1q(amps, q, u00, u01, u10, u11):
    bit = 1 << q
    low = bit - 1
    for i in range(amps.shape[0] >> 1):
        i0 = ((i >> q) << (q + 1)) | (i & low)
        i1 = i0 | bit
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = u00 * a0 + u01 * a1
        amps[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def _positions(mask):
    pos = np.empty(64, dtype=np.int64)
    count = 0
    for b in range(63):
        if (mask >> b) & 1:
            pos[count] = b
            count += 1
    return pos[:count]


@njit(cache=True)
def _deposit(i, pos):
    # insert a zero bit at each (ascending) fixed position
    for p in pos:
        i = ((i >> p) << (p + 1)) | (i & ((1 << p) - 1))
    return i


@njit(cache=True)
def apply_mcx(amps, ctrl_mask, target):
    tbit = 1 << target
    pos = _positions(ctrl_mask | tbit)
    for i in range(amps.shape[0] >> pos.shape[0]):
        i0 = _deposit(i, pos) | ctrl_mask
        i1 = i0 | tbit
        tmp = amps[i0]
        amps[i0] = amps[i1]
        amps[i1] = tmp


@njit(cache=True)
def apply_mcphase(amps, mask, factor):
    pos = _positions(mask)
    for i in range(amps.shape[0] >> pos.shape[0]):
        amps[_deposit(i, pos) | mask] *= factor


@njit(cache=True)
def apply_swap(amps, q1, q2):
    b1 = 1 << q1
    b2 = 1 << q2
    for i in range(amps.shape[0]):
        if (i & b1) != 0 and (i & b2) == 0:
            j = (i ^ b1) | b2
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


@njit(cache=True)
def apply_phases(amps, turns):
    two_pi = 2.0 * math.pi
    for i in range(amps.shape[0]):
        amps[i] *= cmath.exp(1j * two_pi * turns[i])
