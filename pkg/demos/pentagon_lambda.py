"""Apply the normalised operator K five times and read off the pentagon constant.

The five Hermite samples are transformed on a 4096-point grid; the ratio
K^5 f / f is the same scalar lambda for every sample, of modulus one.
"""

import cmath
import math

from qpentagon.kop import GridSpec, KConfig, pentagon_check, sample_functions

for hbar in (0.7, 1.0):
    res = pentagon_check(sample_functions(a=1 / (2 * math.pi * hbar)), KConfig(hbar), GridSpec(36.0, 2048))
    phase = cmath.phase(res.lam) / math.pi
    print(f"hbar={hbar}: lambda = {res.lam:.12f}  (|lambda| - 1 = {res.abs_dev:.1e}, arg = {phase:.6f} pi)")
    print(f"    fit residual {res.max_residual:.1e}, spread across samples {res.spread:.1e}")
