"""Conditional Schrodinger-cat-like states from squeezed vacuum, a beam
splitter, and photon counting in the auxiliary output channel.

Subpackage map:

- :mod:`beamcat.specfun`    special-function kernel (Hermite, 2F1, D_nu, ...)
- :mod:`beamcat.states`     state construction: squeezed vacuum, beam-splitter
  oracle, conditional and component coefficients, norms, event probabilities
- :mod:`beamcat.phasespace` observables: photon statistics, quadrature, Wigner
  and Husimi functions (closed forms plus Fock-basis oracles)
- :mod:`beamcat.detection`  multiplexed on/off detector model, Bernoulli loss,
  Bayesian posterior mixtures and their phase-space functions
- :mod:`beamcat.analysis`   curve/structure helpers shared by the CLI and tests
- :mod:`beamcat.io`         CSV/JSON artifact writers and readers
- :mod:`beamcat.cli`        the `beamcat` command-line interface
- :mod:`beamcat.verify`     self-check suite behind `beamcat verify`
"""

__version__ = "0.1.0"
