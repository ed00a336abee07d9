from dataclasses import dataclass

import numpy as np

from utils.exceptions import SignalError


@dataclass
class Embedding:
    m: int
    d: int
    points: np.ndarray

    def __len__(self):
        return self.points.shape[0]


def embed(signal, m, d):
    """Delay vectors (x_j, x_{j+d}, ..., x_{j+(m-1)d}), one row per point."""
    x = np.asarray(signal, dtype=float)
    if int(m) < 1 or int(d) < 1:
        raise SignalError(f'embedding needs m >= 1 and d >= 1, got m={m}, d={d}')
    n_points = x.shape[0] - (m - 1) * d
    if n_points <= 0:
        raise SignalError(f'signal of {x.shape[0]} samples is too short for m={m}, d={d}')
    points = np.lib.stride_tricks.sliding_window_view(x, (m - 1) * d + 1)[:, ::d]
    return Embedding(int(m), int(d), np.ascontiguousarray(points))
