"""Flow-equation diagonalization of banded symmetric matrices.

The heavy lifting lives in the compiled ``_bandflow`` extension; this package
re-exports it and adds a few conveniences.
"""

from ._bandflow import *  # noqa: F401,F403
from ._bandflow import (
    BandedMatrix,
    FlowConfig,
    Generator,
    integrate_flow,
    run_cli,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def diagonalize(h, generator=Generator.MIELKE, **config):
    """Flow ``h`` to diagonal form and return the final diagonal.

    ``h`` is a BandedMatrix or a square array. Keyword arguments set the
    matching FlowConfig fields. Raises RuntimeError if the flow does not
    converge before ``ell_max``.
    """
    if not isinstance(h, BandedMatrix):
        h = BandedMatrix.from_dense(h)
    cfg = FlowConfig()
    cfg.generator = generator
    for key, value in config.items():
        if not hasattr(cfg, key):
            raise TypeError(f"unknown FlowConfig field {key!r}")
        setattr(cfg, key, value)
    result = integrate_flow(h, cfg)
    if not result.converged:
        raise RuntimeError(f"flow not converged by ell = {result.ell_final:g}")
    return result.final.diagonal()


def cli(*args):
    """Run a bandflow subcommand; returns (status, stdout, stderr)."""
    return run_cli([str(a) for a in args])
