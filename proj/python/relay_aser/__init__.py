"""ASER of dual-hop decode-and-forward relaying over mixed eta-mu / kappa-mu fading."""

import json as _json

from ._core import ConfigError, ConvergenceError, specfun
from . import _core

__all__ = ["Scenario", "ConfigError", "ConvergenceError", "specfun", "pdf", "mgf", "cdf", "power_batch"]


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


class Scenario:
    """A validated scenario; accepts the same JSON document as the command-line tool."""

    def __init__(self, config):
        self._s = _core._Scenario.from_json(_text(config))

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            return cls(f.read())

    @property
    def snr_db(self):
        return list(self._s.snr_db)

    def to_dict(self):
        return _json.loads(self._s.to_json())

    def aser(self, snr_db):
        return self._s.aser(snr_db)

    def aser_quadrature(self, snr_db):
        return self._s.aser_quadrature(snr_db)

    def aser_asym(self, snr_db):
        return self._s.aser_asym(snr_db)

    def outage_sr(self, snr_db):
        return self._s.outage_sr(snr_db)

    def diversity_order(self):
        return self._s.diversity_order()

    def sweep(self):
        """(snr_db, exact, asymptotic) over the configured grid."""
        return [(s, self._s.aser(s), self._s.aser_asym(s)) for s in self._s.snr_db]

    def simulate(self, snr_db, trials=100000, seed=1, mode="semi_analytic", workers=1):
        return self._s.simulate(snr_db, trials, seed, mode, workers)

    def optimize_xi(self, snr_db, tol=1e-6):
        return self._s.optimize_xi(snr_db, tol)


def pdf(fading, gamma, gbar):
    return _core._pdf(_text(fading), gamma, gbar)


def mgf(fading, z, gbar):
    return _core._mgf(_text(fading), z, gbar)


def cdf(fading, gamma_th, gbar):
    return _core._cdf(_text(fading), gamma_th, gbar)


def power_batch(config, workers=1):
    """Rows of the optimal power split for a batch (or single) power-opt document."""
    return _json.loads(_core._power_batch(_text(config), workers))
