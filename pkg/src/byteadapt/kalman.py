"""Constant-velocity Kalman filter over ``(cx, cy, aspect, h)``.

The state is ``(cx, cy, aspect, h, vcx, vcy, vaspect, vh)``. Process and
measurement noise standard deviations scale with the box height, using
``weight_position`` for positions and ``weight_velocity`` for velocities.
The aspect ratio gets small fixed deviations instead, since it does not
scale with height.

The tracker calls the batched functions (``predict_many`` and
``update_many``) so each frame costs a handful of numpy calls.
"""
from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateBoxError

NDIM = 4

_F = np.eye(2 * NDIM)
_F[:NDIM, NDIM:] = np.eye(NDIM)


class KalmanNumericalError(ArithmeticError):
    """Innovation covariance could not be inverted."""


@dataclass(frozen=True)
class KalmanState:
    mean: np.ndarray
    covariance: np.ndarray


def _symmetrize(cov):
    return 0.5 * (cov + np.swapaxes(cov, -1, -2))


class KalmanFilter:
    """Kalman filter for bounding boxes in image space.

    Parameters
    ----------
    weight_position : float
        Position noise relative to box height.
    weight_velocity : float
        Velocity noise relative to box height.
    """

    def __init__(self, weight_position=1.0 / 20, weight_velocity=1.0 / 160):
        self.weight_position = weight_position
        self.weight_velocity = weight_velocity

    def initiate(self, measurement):
        """Start a track at ``measurement`` with zero velocity."""
        z = np.asarray(measurement, dtype=np.float64)
        h = z[3]
        if not h > 0:
            raise DegenerateBoxError(f"measurement height must be positive, got {h}")
        mean = np.r_[z, np.zeros(NDIM)]
        wp, wv = self.weight_position, self.weight_velocity
        std = [2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h,
               10 * wv * h, 10 * wv * h, 1e-5, 10 * wv * h]
        return KalmanState(mean, np.diag(np.square(std)))

    def _process_noise(self, h):
        wp, wv = self.weight_position, self.weight_velocity
        n = len(h)
        std = np.empty((n, 2 * NDIM))
        std[:, 0] = std[:, 1] = std[:, 3] = wp * h
        std[:, 2] = 1e-2
        std[:, 4] = std[:, 5] = std[:, 7] = wv * h
        std[:, 6] = 1e-5
        q = np.zeros((n, 2 * NDIM, 2 * NDIM))
        idx = np.arange(2 * NDIM)
        q[:, idx, idx] = std ** 2
        return q

    def _measurement_noise(self, h):
        wp = self.weight_position
        n = len(h)
        std = np.empty((n, NDIM))
        std[:, 0] = std[:, 1] = std[:, 3] = wp * h
        std[:, 2] = 1e-1
        r = np.zeros((n, NDIM, NDIM))
        idx = np.arange(NDIM)
        r[:, idx, idx] = std ** 2
        return r

    def predict_many(self, means, covariances):
        """One constant-velocity step for ``(N, 8)`` means and ``(N, 8, 8)`` covariances."""
        means = np.asarray(means, dtype=np.float64)
        covariances = np.asarray(covariances, dtype=np.float64)
        if len(means) == 0:
            return means.copy(), covariances.copy()
        q = self._process_noise(means[:, 3])
        new_means = means @ _F.T
        new_covs = _F @ covariances @ _F.T + q
        return new_means, _symmetrize(new_covs)

    def update_many(self, means, covariances, measurements):
        """Correct ``N`` states with ``(N, 4)`` measurements."""
        means = np.asarray(means, dtype=np.float64)
        covariances = np.asarray(covariances, dtype=np.float64)
        z = np.asarray(measurements, dtype=np.float64).reshape(-1, NDIM)
        if len(means) == 0:
            return means.copy(), covariances.copy()
        if np.any(~(z[:, 3] > 0)):
            raise DegenerateBoxError("measurement height must be positive")
        s = covariances[:, :NDIM, :NDIM] + self._measurement_noise(means[:, 3])
        hp = covariances[:, :NDIM, :]
        try:
            gain_t = np.linalg.solve(s, hp)
        except np.linalg.LinAlgError as exc:
            raise KalmanNumericalError("singular innovation covariance") from exc
        gain = np.swapaxes(gain_t, 1, 2)
        innovation = z - means[:, :NDIM]
        new_means = means + np.einsum("nij,nj->ni", gain, innovation)
        new_covs = covariances - gain @ s @ gain_t
        return new_means, _symmetrize(new_covs)

    def predict(self, state):
        m, p = self.predict_many(state.mean[None], state.covariance[None])
        return KalmanState(m[0], p[0])

    def update(self, state, measurement):
        m, p = self.update_many(state.mean[None], state.covariance[None], np.asarray(measurement)[None])
        return KalmanState(m[0], p[0])
