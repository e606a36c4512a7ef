"""Conversions between logarithmic and linear units.

Only the CLI and configuration layer should need these; everything inside the
solvers works in linear watts.
"""

import numpy as np


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watts(x_dbm):
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(x_watts):
    return 10.0 * np.log10(np.asarray(x_watts, dtype=float) * 1000.0)
