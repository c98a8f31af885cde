"""Regenerate the bundled social edge lists from networkx's datasets.

Node labels are mapped to dense integer ids in sorted-label order so the
files are stable across networkx versions.
"""

import networkx as nx


def write(g, name):
    g = nx.Graph(g)
    g.remove_edges_from(nx.selfloop_edges(g))
    g.remove_nodes_from(list(nx.isolates(g)))
    nodes = sorted(g.nodes(), key=str)
    idx = {n: i for i, n in enumerate(nodes)}
    edges = sorted((min(idx[u], idx[v]), max(idx[u], idx[v])) for u, v in g.edges())
    with open(name, "w") as f:
        for u, v in edges:
            f.write(f"{u} {v}\n")
    print(name, g.number_of_nodes(), len(edges))


write(nx.karate_club_graph(), "karate.edges")

lm = nx.les_miserables_graph()
write(lm, "les_miserables.edges")
# induced 1-hop ego networks around the two highest-degree characters
write(nx.ego_graph(lm, "Valjean"), "lesmis_ego_valjean.edges")
write(nx.ego_graph(lm, "Gavroche"), "lesmis_ego_gavroche.edges")

# Davis southern women: one-mode co-attendance projection, keeping pairs
# that attended at least three events together
davis = nx.davis_southern_women_graph()
women = [n for n, d in davis.nodes(data=True) if d.get("bipartite") == 0]
wproj = nx.bipartite.weighted_projected_graph(davis, women)
write(
    nx.Graph((u, v) for u, v, d in wproj.edges(data=True) if d["weight"] >= 3),
    "southern_women_w3.edges",
)

write(nx.florentine_families_graph(), "florentine_families.edges")
write(nx.krackhardt_kite_graph(), "kite.edges")
