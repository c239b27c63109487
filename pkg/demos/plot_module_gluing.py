"""
Gluing modules
==============

A module over A is the same as a module over A[1/p], a module over the
completion, and an identification of the two over the completed generic
fibre.  Torsion lives only on the completed side.
"""

import random

from gluekit.modules import ModulePresentation, format_presentation, glue_module, prune, triple_of_module
from gluekit.ring.base import BasePair
from gluekit.ring.ideal import AffineAlgebra
from gluekit.ring.polynomial import OVER_R
from gluekit.sampling import random_module

base = BasePair.arithmetic(5)
A = AffineAlgebra(base, ("x",), [], OVER_R, name="A")

# A^2 / (x e1 - e2, 25 e2): one generator is redundant
M = ModulePresentation(A, 2, [[A.ring("x"), A.ring("-1")], [A.ring("0"), A.ring("25")]])
d = triple_of_module(M)
print("generic fibre:", format_presentation(prune(d.F)[0]))

g = glue_module(d)
print("glued:", format_presentation(prune(g.module)[0]))
print("certified:", g.generic.passed and g.completed.passed)

# a few random round trips
r = random.Random(0)
for _ in range(5):
    M = random_module(r, base, 1)
    g = glue_module(triple_of_module(M))
    print(M, "->", g.completed.passed)
