"""
Coordinate builders shared by the test modules
"""

import numpy as np


def so2n_vec(spec, t=(0.0, 0.0), phi=0.0, x=None, y=None, eta=0.0):
    """Flat SO(2,n) coordinates from named parts; x and y given as {slot: value}"""
    m = spec.n - 2
    v = np.zeros(spec.coord_dim)
    v[0], v[1], v[2] = t[0], t[1], phi
    for i, value in (x or {}).items():
        v[3 + i] = value
    for i, value in (y or {}).items():
        v[3 + m + i] = value
    v[-1] = eta
    return v


def sl3_vec(d=(0.0, 0.0, 0.0), u=(0.0, 0.0, 0.0)):
    return np.array([*d, *u], dtype=float)
