"""
A triple that does not glue to an affine scheme
===============================================

Gluing K[x] to the unit circle fails the dense image condition: nothing
algebraic reduces to xb = 1/x on the circle.
"""

from gluekit.models import unit_circle_triple
from gluekit.triple import classify_triple, dense_image_check

circle = unit_circle_triple(5)
res = dense_image_check(circle)
print("dense:", res.dense, "missed target:", res.witness)
print(classify_triple(circle))

# the closed unit disk is the affine control
print(classify_triple(unit_circle_triple(5, degenerate=True)))
