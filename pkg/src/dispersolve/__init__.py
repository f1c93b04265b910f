"""Pseudo-spectral toolkit for u_t + L u + eps A u + u u_x = 0 on the circle.

Subpackages:
  symbols     -- dispersion/dissipation symbol families, resonance function,
                 non-resonance certification
  grid        -- periodic grid, real spectral fields, Fourier multipliers
  lp          -- dyadic cutoff banks, space/modulation projectors,
                 pseudo-products, resonance support tests
  norms       -- Sobolev / Bourgain / sum-space / dyadic-block functionals,
                 mass and Hamiltonian
  solver      -- ETDRK4 / Lawson4 exponential integrators
  experiments -- scripted verification experiments
  runio, cli  -- configuration, content-addressed run dirs, command line
"""

__version__ = "0.1.0"
