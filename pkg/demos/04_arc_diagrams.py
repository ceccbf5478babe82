"""
Arc diagrams and collapse orders
================================

N curves joining 2N boundary points without crossing give C_N (Catalan)
connectivity patterns.  To read off a connectivity from a partition function
we collapse its arcs one at a time.  An arc can be collapsed when all the
arcs still left lie on one side of it: if they are all outside, its interval
shrinks to a point; if they are all inside, its endpoints are sent to
infinity instead.
"""

from nullstate.diagrams import allowable_sequences, catalan, enumerate_diagrams

for n in range(1, 7):
    ds = enumerate_diagrams(n)
    print(f"N = {n}: {len(ds):3d} diagrams (Catalan {catalan(n)}), "
          f"{sum(len(allowable_sequences(d)) for d in ds):6d} allowed collapse orders in total")

print()
for d in enumerate_diagrams(3):
    seqs = allowable_sequences(d)
    print(d.pairs, f"{len(seqs)} orders, e.g.")
    for s in seqs[:2]:
        print("    ", " then ".join(f"{a}{'~' if k == 'outer_collapse' else '.'}" for a, k in zip(s.arcs(), s.kinds)))
print("\n('.' shrinks the interval, '~' sends the endpoints to infinity)")
