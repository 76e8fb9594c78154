"""Walk a few canonical basis elements around their order-five orbit.

Each element is printed in the dump format, together with the tropical
orbit of its label and a product expanded back into the basis.
"""

from qpentagon.cluster import canonical_IA, dump_basis_element, multiply_in_basis_classical, tropical_gamma
from qpentagon.qtorus import canonical_IAq, dump_element

for p in [(1, 0), (-1, 2), (2, 1)]:
    orbit = [p]
    for _ in range(4):
        orbit.append(tropical_gamma(orbit[-1]))
    print(dump_basis_element(p))
    print("   orbit:", " -> ".join(map(str, orbit)))
    print("   quantum:", dump_element(canonical_IAq(p)))

product = multiply_in_basis_classical((1, 0), (0, 1))
print("I(1,0) I(0,1) =", " + ".join(f"{c} I{r}" for r, c in sorted(product.items())))
print("check:", canonical_IA((1, 0)) * canonical_IA((0, 1)) == canonical_IA((1, 1)) + canonical_IA((0, 0)))
