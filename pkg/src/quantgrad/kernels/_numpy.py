"""Pure-numpy statevector kernels.

Every function mutates ``amps`` in place. Qubit ``q`` is bit ``q`` of the
basis index (qubit 0 is least significant).
"""
import numpy as np


def _split(amps, q):
    # view as (high, bit q, low) so axis 1 is the target qubit
    return amps.reshape(-1, 2, 1 << q)


def apply_1q(amps, q, u00, u01, u10, u11):
    v = _split(amps, q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u00 * a0 + u01 * a1
    v[:, 1, :] = u10 * a0 + u11 * a1


def _indices(n_amps):
    return np.arange(n_amps, dtype=np.int64)


def apply_mcx(amps, ctrl_mask, target):
    tbit = 1 << target
    idx = _indices(amps.shape[0])
    sel = idx[((idx & tbit) == 0) & ((idx & ctrl_mask) == ctrl_mask)]
    partner = sel | tbit
    tmp = amps[sel].copy()
    amps[sel] = amps[partner]
    amps[partner] = tmp


def apply_mcphase(amps, mask, factor):
    idx = _indices(amps.shape[0])
    sel = (idx & mask) == mask
    amps[sel] *= factor


def apply_swap(amps, q1, q2):
    b1 = 1 << q1
    b2 = 1 << q2
    idx = _indices(amps.shape[0])
    sel = idx[((idx & b1) != 0) & ((idx & b2) == 0)]
    partner = (sel ^ b1) | b2
    tmp = amps[sel].copy()
    amps[sel] = amps[partner]
    amps[partner] = tmp


def apply_phases(amps, turns):
    amps *= np.exp(2j * np.pi * turns)
