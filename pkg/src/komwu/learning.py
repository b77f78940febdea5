"""The kernelized multiplicative-weights learner and its simplex special case.

The learner accumulates ``s_t = sum of eta_tau * w_tau`` with
``w_t = loss_{t-1} - prediction_{t-1} + prediction_t`` and plays the
domain's marginal map at log-weights ``-s_t``. With zero predictions this is
the non-optimistic multiplicative-weights update; the caller owns the choice
of prediction stream (the self-play harness feeds the previous loss).
"""

import numpy as np


def as_schedule(learning_rate):
    """Normalize a constant or ``t -> eta`` callable into a callable.

    Rates must be strictly positive and finite; ``t`` is 1-based.
    """
    if callable(learning_rate):
        fn = learning_rate
    else:
        eta = float(learning_rate)
        if not (eta > 0 and np.isfinite(eta)):
            raise ValueError(f"learning rate must be positive, got {eta}")
        fn = lambda t: eta

    def checked(t):
        eta = float(fn(t))
        if not (eta > 0 and np.isfinite(eta)):
            raise ValueError(f"schedule produced a bad rate {eta} at t={t}")
        return eta

    return checked


class KomwuLearner:
    """Multiplicative weights over a 0/1-polyhedral domain via its kernel.

    Protocol per round t: ``step(prediction)`` returns the iterate, then
    ``observe_loss(loss)`` feeds back the incurred loss vector. A
    non-optimistic learner (``optimistic=False``) takes no predictions.
    """

    def __init__(self, domain, learning_rate, optimistic=True):
        self.domain = domain
        self.optimistic = bool(optimistic)
        self._schedule = as_schedule(learning_rate)
        d = domain.dimension
        self._s = np.zeros(d)
        self._prev_loss = np.zeros(d)
        self._prev_pred = np.zeros(d)
        self._pending_pred = None
        self._t = 0
        self._awaiting_loss = False

    @property
    def rounds(self):
        """Number of completed (step, loss) rounds."""
        return self._t

    @property
    def weights(self):
        """Copy of the accumulated weighted-loss state s."""
        return self._s.copy()

    def _check(self, v, name):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.domain.dimension,):
            raise ValueError(f"{name} has shape {v.shape}, expected "
                             f"({self.domain.dimension},)")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{name} contains non-finite entries")
        return v

    def step(self, prediction=None):
        """Advance one round and return the iterate in the polytope."""
        if self._awaiting_loss:
            raise RuntimeError("step called twice without observing a loss")
        if prediction is None:
            prediction = np.zeros(self.domain.dimension)
        elif not self.optimistic:
            raise ValueError("non-optimistic learner takes no prediction")
        else:
            prediction = self._check(prediction, "prediction")
        eta = self._schedule(self._t + 1)
        w = self._prev_loss - self._prev_pred + prediction
        self._s = self._s + eta * w
        self._pending_pred = prediction
        self._awaiting_loss = True
        return self.domain.marginals(-self._s)

    def observe_loss(self, loss):
        """Record the loss for the pending round."""
        if not self._awaiting_loss:
            raise RuntimeError("observe_loss called without a pending step")
        loss = self._check(loss, "loss")
        self._prev_loss = loss.copy()
        self._prev_pred = self._pending_pred
        self._pending_pred = None
        self._t += 1
        self._awaiting_loss = False


class SimplexOmwu:
    """Textbook optimistic multiplicative weights over a finite choice set."""

    def __init__(self, n_choices, learning_rate, optimistic=True):
        if n_choices < 1:
            raise ValueError("need at least one choice")
        self.n = int(n_choices)
        self.optimistic = bool(optimistic)
        self._schedule = as_schedule(learning_rate)
        self._log_lam = np.full(self.n, -np.log(self.n))
        self._prev_loss = np.zeros(self.n)
        self._prev_pred = np.zeros(self.n)
        self._pending_pred = None
        self._t = 0
        self._awaiting_loss = False

    def distribution(self):
        return np.exp(self._log_lam)

    def step(self, prediction=None):
        if self._awaiting_loss:
            raise RuntimeError("step called twice without observing a loss")
        if prediction is None:
            prediction = np.zeros(self.n)
        elif not self.optimistic:
            raise ValueError("non-optimistic learner takes no prediction")
        prediction = np.asarray(prediction, dtype=float)
        if prediction.shape != (self.n,) or not np.all(np.isfinite(prediction)):
            raise ValueError("bad prediction vector")
        eta = self._schedule(self._t + 1)
        w = self._prev_loss - self._prev_pred + prediction
        self._log_lam = self._log_lam - eta * w
        m = self._log_lam.max()
        self._log_lam -= m + np.log(np.exp(self._log_lam - m).sum())
        self._pending_pred = prediction
        self._awaiting_loss = True
        return np.exp(self._log_lam)

    def observe_loss(self, loss):
        if not self._awaiting_loss:
            raise RuntimeError("observe_loss called without a pending step")
        loss = np.asarray(loss, dtype=float)
        if loss.shape != (self.n,) or not np.all(np.isfinite(loss)):
            raise ValueError("bad loss vector")
        self._prev_loss = loss.copy()
        self._prev_pred = self._pending_pred
        self._pending_pred = None
        self._t += 1
        self._awaiting_loss = False
