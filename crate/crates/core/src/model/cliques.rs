use super::{density_budget, Clique, InstanceData, NodeId};

/// Maximal cliques of the undirected joint graph, via Bron–Kerbosch with
/// pivoting.
///
/// Cliques with a single member carry no joint edge and are not reported.
/// Each clique's density is the minimum of its members' densities. Output is
/// canonical: members ascending, cliques in lexicographic order.
pub fn maximal_cliques(data: &InstanceData) -> Vec<Clique> {
    let n = data.nodes.len();
    let mut adj = vec![Vec::new(); n];
    for e in &data.joints {
        let (a, b) = (e.a.index(), e.b.index());
        if a < n && b < n && a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let mut found = Vec::new();
    let candidates: Vec<usize> = (0..n).filter(|&v| !adj[v].is_empty()).collect();
    expand(&adj, &mut Vec::new(), candidates, Vec::new(), &mut found);

    let mut cliques: Vec<Clique> = found
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let density = members
                .iter()
                .map(|&v| data.nodes[v].density)
                .min()
                .unwrap_or(0);
            Clique {
                members: members.into_iter().map(NodeId).collect(),
                budget: density_budget(density),
                density,
            }
        })
        .collect();
    cliques.sort_by(|x, y| x.members.cmp(&y.members));
    cliques
}

fn expand(
    adj: &[Vec<usize>],
    current: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && current.len() > 1 {
            out.push(current.clone());
        }
        return;
    }
    // pivot: the vertex of P ∪ X with most neighbours in P
    let pivot = candidates
        .iter()
        .chain(&excluded)
        .copied()
        .max_by_key(|&u| intersect(&adj[u], &candidates).len())
        .expect("candidates is non-empty");
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|v| adj[pivot].binary_search(v).is_err())
        .collect();
    for v in branch {
        current.push(v);
        expand(
            adj,
            current,
            intersect(&candidates, &adj[v]),
            intersect(&excluded, &adj[v]),
            out,
        );
        current.pop();
        candidates.retain(|&c| c != v);
        let at = excluded.partition_point(|&x| x < v);
        excluded.insert(at, v);
    }
}

fn intersect(xs: &[usize], ys: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(xs[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
