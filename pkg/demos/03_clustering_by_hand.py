"""Lowest-ID formation and the CHG promotion on two small graphs."""
from manetsim.clustering import CH_G, CHG, backbone, form_clusters


def show(title, adj):
    print(title)
    for mode in (CH_G, CHG):
        roles = form_clusters(adj, mode)
        desc = ", ".join(f"{v}:{r.kind.value}@{r.cluster_id}" for v, r in sorted(roles.items()))
        print(f"  {mode:5} backbone={sorted(backbone(roles, mode))}  {desc}")


chain = {1: {2}, 2: {1, 3}, 3: {2, 4}, 4: {3, 5}, 5: {4}}
show("chain 1-2-3-4-5", chain)

# two triangles joined by the 3-4 link: the bridge ends become the CHGs
tri = {1: {2, 3}, 2: {1, 3}, 3: {1, 2, 4}, 4: {3, 5, 6}, 5: {4, 6}, 6: {4, 5}}
show("triangles {1,2,3} and {4,5,6} bridged by 3-4", tri)
