"""
Reduction of points and the Iwahori subgroup
============================================

Integral points of GL_2 reduce modulo 5.  Matrices in the Iwahori
subgroup reduce to lower triangular ones.
"""

from gluekit.models import iwahori_membership, left_multiplication, matrix_point, reduce_matrix, specialize_point
from gluekit.ring.base import BasePair

base = BasePair.arithmetic(5)

for m in ([[1, 5], [1, 1]], [[1, 1], [5, 1]], [[2, 10], [3, 1]]):
    red = [[int(c) for c in row] for row in reduce_matrix(base, m)]
    print(m, "->", red, "Iwahori:", iwahori_membership(m, 5))

# reduction commutes with left multiplication by an integral matrix
g = [[1, 5], [2, 1]]
f = left_multiplication(base, g)
pt = matrix_point(base, [[2, 10], [3, 1]])
print(specialize_point(f(pt)) == f.reduced(specialize_point(pt)))
