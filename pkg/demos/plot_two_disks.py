"""
Gluing the affine line from two formal disks
============================================

The affine line over Z_(5) is recovered from its generic fibre K[x] and
two closed disks, one around 0 and one around 1/5.
"""

from gluekit import pullback_ring
from gluekit.models import two_disks_generators, two_disks_triple
from gluekit.triple import membership, subalgebras_equal

# the triple: A = K[x], B = R<u> x R<v>, x -> (u, v + 1/5)
T = two_disks_triple(5, prec=4)

# x itself is not integral on the second disk, but 5x is
print("x in D:", membership("x", T))
print("5x in D:", membership("5*x", T))

# search for generators of the glued ring and certify it
res = pullback_ring(T, degree_bound=6, prec=4)
for g in res.generators:
    print(g)
for r in res.relation_list():
    print("  relation", r)
print(res.certificates["verify"])

# the search output generates the same ring as the hand-picked alpha, beta, gamma
G = two_disks_generators(T)
same = subalgebras_equal(T, [g.a for g in res.generators], list(G.values()), 6)
print("degreewise equal up to 6:", all(same.values()))
