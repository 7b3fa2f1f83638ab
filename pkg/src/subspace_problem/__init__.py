"""Numerical certificates for a weighted inductive limit of holomorphic
functions whose projective hull is not a topological subspace.

The quantitative skeleton of the construction lives in five layers:

* :mod:`.seq_space`  -- Koethe matrix, associated weights, truncated sequences
* :mod:`.geometry`   -- the half-annulus, angular families, discs D_n
* :mod:`.weights`    -- plateau/shoulder angular weights and product weights
* :mod:`.outer`      -- outer functions e_n in the log domain
* :mod:`.operators`  -- psi, phi, the near-identity B and its Neumann inverse

:mod:`.verify` runs the full battery and :mod:`.cli` exposes it.
"""

__version__ = "0.1.0"
