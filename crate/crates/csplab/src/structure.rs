//! Constraint-hypergraph analytics: components, distances, cycle structure,
//! tree/unicyclic classification, contraction, and local-neighborhood
//! diagnostics.

use crate::csp::Instance;
use crate::{Error, Result};

fn adjacency(inst: &Instance) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); inst.n];
    for (i, e) in inst.edges.iter().enumerate() {
        for &v in &e.vars {
            adj[v as usize].push(i as u32);
        }
    }
    adj
}

/// Connected components of the constraint hypergraph, largest first (ties
/// by smallest contained variable). Variables inside a component are sorted.
pub fn components(inst: &Instance) -> Vec<Vec<u32>> {
    let adj = adjacency(inst);
    let mut seen = vec![false; inst.n];
    let mut out: Vec<Vec<u32>> = Vec::new();
    for start in 0..inst.n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start as u32];
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &e in &adj[v as usize] {
                for &u in &inst.edges[e as usize].vars {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// A cycle v_0, e_1, v_1, ..., e_r, v_r = v_0: distinct edges, distinct
/// vertices, consecutive vertices shared by the connecting edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cycle {
    /// v_0 .. v_{r-1} (closing back to v_0)
    pub vertices: Vec<u32>,
    /// e_1 .. e_r, edge ids into the instance's edge list
    pub edges: Vec<u32>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Check the cycle is well-formed for the given instance.
    pub fn verify(&self, inst: &Instance) -> Result<()> {
        let r = self.edges.len();
        if r < 2 || self.vertices.len() != r {
            return Err(Error::input("cycle must have r >= 2 and r vertices"));
        }
        let mut vs = self.vertices.clone();
        vs.sort_unstable();
        vs.dedup();
        let mut es = self.edges.clone();
        es.sort_unstable();
        es.dedup();
        if vs.len() != r || es.len() != r {
            return Err(Error::input("cycle vertices/edges not distinct"));
        }
        for i in 0..r {
            let e = &inst.edges[self.edges[i] as usize];
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % r];
            if !e.vars.contains(&a) || !e.vars.contains(&b) {
                return Err(Error::input(format!(
                    "edge {i} does not join its cycle vertices"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classification {
    Tree,
    Unicyclic(Cycle),
    Multicyclic,
}

/// Classify one connected component (given as its sorted variable set) by
/// the excess rule: connected with Σ(k_i - 1) = v - 1 is a hypertree, = v
/// is unicyclic (with the explicit cycle returned), > v is multicyclic.
pub fn classify(inst: &Instance, comp: &[u32]) -> Result<Classification> {
    if comp.is_empty() {
        return Err(Error::input("empty component"));
    }
    let in_comp = {
        let mut f = vec![false; inst.n];
        for &v in comp {
            if v as usize >= inst.n {
                return Err(Error::input("component variable out of range"));
            }
            f[v as usize] = true;
        }
        f
    };
    let mut edge_ids = Vec::new();
    let mut excess_sum = 0usize;
    for (i, e) in inst.edges.iter().enumerate() {
        let inside = e.vars.iter().filter(|&&v| in_comp[v as usize]).count();
        if inside == 0 {
            continue;
        }
        if inside != e.vars.len() {
            return Err(Error::input("component boundary crosses an edge"));
        }
        edge_ids.push(i as u32);
        excess_sum += e.vars.len() - 1;
    }
    // connectivity check: BFS within the component
    {
        let adj = adjacency(inst);
        let mut seen = vec![false; inst.n];
        let mut stack = vec![comp[0]];
        seen[comp[0] as usize] = true;
        let mut count = 0usize;
        while let Some(v) = stack.pop() {
            count += 1;
            for &e in &adj[v as usize] {
                for &u in &inst.edges[e as usize].vars {
                    if in_comp[u as usize] && !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u);
                    }
                }
            }
        }
        if count != comp.len() {
            return Err(Error::input("component set is not connected"));
        }
    }
    let v = comp.len();
    if excess_sum == v - 1 {
        return Ok(Classification::Tree);
    }
    if excess_sum > v {
        return Ok(Classification::Multicyclic);
    }
    // exactly one cycle: find it in the bipartite incidence graph
    let cycle = find_cycle(inst, comp, &edge_ids)
        .ok_or_else(|| Error::internal("unicyclic component without a findable cycle"))?;
    cycle.verify(inst)?;
    Ok(Classification::Unicyclic(cycle))
}

/// DFS on the bipartite incidence graph (variable nodes and edge nodes);
/// the first back-incidence closes the unique cycle.
fn find_cycle(inst: &Instance, comp: &[u32], edge_ids: &[u32]) -> Option<Cycle> {
    // node encoding: variable v -> 2v, edge index j (into edge_ids) -> 2j+1
    let adj = adjacency(inst);
    let edge_pos: std::collections::HashMap<u32, u32> = edge_ids
        .iter()
        .enumerate()
        .map(|(j, &e)| (e, j as u32))
        .collect();
    let mut parent: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    let start = (comp[0] as u64) << 1;
    parent.insert(start, u64::MAX);
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        let nbrs: Vec<u64> = if node & 1 == 0 {
            let v = (node >> 1) as u32;
            adj[v as usize]
                .iter()
                .filter_map(|e| edge_pos.get(e).map(|&j| ((j as u64) << 1) | 1))
                .collect()
        } else {
            let e = edge_ids[(node >> 1) as usize];
            inst.edges[e as usize]
                .vars
                .iter()
                .map(|&v| (v as u64) << 1)
                .collect()
        };
        for nb in nbrs {
            if nb == parent[&node] {
                // skip one traversal of the tree edge back to the parent;
                // a true multi-incidence cannot occur (tuples have distinct
                // variables), so skipping every occurrence is safe
                continue;
            }
            if parent.contains_key(&nb) {
                // found the cycle: join the two root paths of node and nb
                let path = |mut x: u64| -> Vec<u64> {
                    let mut p = vec![x];
                    while parent[&x] != u64::MAX {
                        x = parent[&x];
                        p.push(x);
                    }
                    p
                };
                let pa = path(node);
                let pb = path(nb);
                // drop the common suffix up to the lowest common ancestor
                let mut ia = pa.len();
                let mut ib = pb.len();
                while ia > 0 && ib > 0 && pa[ia - 1] == pb[ib - 1] {
                    ia -= 1;
                    ib -= 1;
                }
                // cycle nodes: pa[0..=ia] ++ reverse(pb[0..ib])
                let mut nodes: Vec<u64> = pa[0..=ia].to_vec();
                nodes.extend(pb[0..ib].iter().rev());
                // nodes alternate var/edge around the cycle; rotate to start
                // at a variable
                if nodes[0] & 1 == 1 {
                    nodes.rotate_left(1);
                }
                let mut vertices = Vec::new();
                let mut edges = Vec::new();
                for (i, &x) in nodes.iter().enumerate() {
                    if i % 2 == 0 {
                        vertices.push((x >> 1) as u32);
                    } else {
                        edges.push(edge_ids[(x >> 1) as usize]);
                    }
                }
                return Some(Cycle { vertices, edges });
            }
            parent.insert(nb, node);
            stack.push(nb);
        }
    }
    None
}

/// BFS distance (in edges) from the nearest source; None = unreachable.
pub fn distances(inst: &Instance, sources: &[u32]) -> Result<Vec<Option<usize>>> {
    let adj = adjacency(inst);
    let mut dist: Vec<Option<usize>> = vec![None; inst.n];
    let mut frontier: Vec<u32> = Vec::new();
    for &s in sources {
        if s as usize >= inst.n {
            return Err(Error::input(format!("source {s} out of range")));
        }
        if dist[s as usize].is_none() {
            dist[s as usize] = Some(0);
            frontier.push(s);
        }
    }
    let mut depth = 0usize;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &e in &adj[v as usize] {
                for &u in &inst.edges[e as usize].vars {
                    if dist[u as usize].is_none() {
                        dist[u as usize] = Some(depth);
                        next.push(u);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

/// Contract each group of variables to a single fresh variable. Ungrouped
/// variables keep their relative order (new ids 0..), then one id per group
/// in the order given. Edges whose tuple collapses to repeated variables
/// are rejected unless `allow_repeats`.
pub fn contract(inst: &Instance, groups: &[Vec<u32>], allow_repeats: bool) -> Result<Instance> {
    let mut group_of = vec![usize::MAX; inst.n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::input("empty contraction group"));
        }
        for &v in members {
            if v as usize >= inst.n {
                return Err(Error::input(format!("group variable {v} out of range")));
            }
            if group_of[v as usize] != usize::MAX {
                return Err(Error::input(format!("variable {v} in two groups")));
            }
            group_of[v as usize] = g;
        }
    }
    let mut map = vec![0u32; inst.n];
    let mut next = 0u32;
    for v in 0..inst.n {
        if group_of[v] == usize::MAX {
            map[v] = next;
            next += 1;
        }
    }
    let first_group_id = next;
    for v in 0..inst.n {
        if group_of[v] != usize::MAX {
            map[v] = first_group_id + group_of[v] as u32;
        }
    }
    let new_n = first_group_id as usize + groups.len();
    let mut edges = Vec::with_capacity(inst.edges.len());
    for (i, e) in inst.edges.iter().enumerate() {
        let vars: Vec<u32> = e.vars.iter().map(|&v| map[v as usize]).collect();
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if !allow_repeats && sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "edge {i} collapses to a repeated-variable tuple"
            )));
        }
        edges.push(crate::csp::CEdge { vars, cid: e.cid });
    }
    let out = Instance {
        n: new_n,
        d: inst.d,
        k: inst.k,
        table: inst.table.clone(),
        edges,
        flavor: crate::csp::Flavor::Hat,
    };
    out.validate_with_repeats(allow_repeats)?;
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeighborhoodStats {
    /// no edge contains more than one variable of T
    pub max_one_var_per_edge: bool,
    /// the sub-instance induced on the radius-r ball around T is a forest
    pub forest_within_r: bool,
    /// number of variables within distance r of T
    pub ball_size: usize,
}

pub fn neighborhood_stats(inst: &Instance, t_set: &[u32], r: usize) -> Result<NeighborhoodStats> {
    let dist = distances(inst, t_set)?;
    let mut in_t = vec![false; inst.n];
    for &v in t_set {
        in_t[v as usize] = true;
    }
    let max_one_var_per_edge = inst
        .edges
        .iter()
        .all(|e| e.vars.iter().filter(|&&v| in_t[v as usize]).count() <= 1);
    let in_ball: Vec<bool> = dist.iter().map(|d| d.map_or(false, |x| x <= r)).collect();
    let ball_size = in_ball.iter().filter(|&&b| b).count();
    // union-find cycle detection over induced edges
    let mut uf: Vec<u32> = (0..inst.n as u32).collect();
    fn find(uf: &mut Vec<u32>, x: u32) -> u32 {
        let mut root = x;
        while uf[root as usize] != root {
            root = uf[root as usize];
        }
        let mut cur = x;
        while uf[cur as usize] != root {
            let nxt = uf[cur as usize];
            uf[cur as usize] = root;
            cur = nxt;
        }
        root
    }
    let mut forest = true;
    'edges: for e in &inst.edges {
        if !e.vars.iter().all(|&v| in_ball[v as usize]) {
            continue;
        }
        let base = find(&mut uf, e.vars[0]);
        for &v in &e.vars[1..] {
            let rv = find(&mut uf, v);
            if rv == base {
                forest = false;
                break 'edges;
            }
            uf[rv as usize] = base;
        }
    }
    Ok(NeighborhoodStats {
        max_one_var_per_edge,
        forest_within_r: forest,
        ball_size,
    })
}
