"""
Network metrics of a call graph
===============================

Node- and network-level measures on a few small graphs whose values can be
checked by hand.
"""

from syscallnet import SystemCallGraph, compute_metrics
from syscallnet.features import FEATURE_NAMES, featurize

# a directed path a -> b -> c
path = SystemCallGraph.from_edges({("a", "b"): 1, ("b", "c"): 1})
rep = compute_metrics(path, "path")
print("average distance:", rep.average_distance)          # (1 + 1 + 2) / 3
print("portion in-degree 1:", rep.portion_in_degree_1)    # b and c out of 3
print("betweenness:", rep.betweenness)                     # only b is between

# a star with a repeated spoke and a self-loop on the hub
star = SystemCallGraph.from_edges({("hub", "x"): 3, ("hub", "y"): 1, ("hub", "z"): 1, ("hub", "hub"): 2})
rep = compute_metrics(star, "star")
print("weighted in-degree:", rep.weighted_in_degree)
print("clustering:", rep.clustering_coefficient, "density:", rep.network_density)

# the seven classification features of a report
fv = featurize(rep)
print({n: float(v) for n, v in zip(FEATURE_NAMES, fv.as_array())})
