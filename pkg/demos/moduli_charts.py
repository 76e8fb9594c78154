"""Five points on the line: charts, regular functions and crossing removal.

A configuration is read in every chart that contains it; the regular
functions X_{a,b;c} evaluate exactly there, and a crossing chord monomial is
rewritten into regular ones by the three-term Pluecker relation.
"""

import random
from fractions import Fraction

from qpentagon.moduli import (
    X_abc,
    chart_coordinates,
    charts_containing,
    label_to_lattice,
    pluecker_reduce,
    psi_c,
    random_vector_config,
    regular_to_basis,
)
from qpentagon.moduli import _complete_with_sides

conf = psi_c(Fraction(2), Fraction(3), 1)
print("configuration:", ["inf" if p.is_infinite() else str(p.value()) for p in conf.points])
for c in charts_containing(conf):
    X, Y = chart_coordinates(conf, c)
    print(f"  chart {c}: X = {X}, Y = {Y}")

for a, b, c in [(-1, 1, 1), (0, 2, 3), (-2, 1, 5)]:
    print(f"X_{{{a},{b};{c}}} = {X_abc(conf, a, b, c)}  <->  lattice point {label_to_lattice(a, b, c)}")

crossing = _complete_with_sides({(1, 3): 1, (2, 4): 1})
terms = pluecker_reduce([crossing])
print("crossing monomial ->", ", ".join(str(regular_to_basis(t)) for t in terms))
vc = random_vector_config(random.Random(0))
print("exact agreement:", crossing.evaluate(vc) == sum(t.evaluate(vc) for t in terms))
