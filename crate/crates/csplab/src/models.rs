//! Builders for the named constraint distributions and for user-defined ones.
//!
//! The model DSL accepts one expression per model:
//! `dkt:<d>,<k>,<t>` | `hom:<path>` | `coloring:<d>` | `ed3` | `s3:<q>` |
//! `file:<path>`.

use crate::csp::{Constraint, ConstraintDistribution, DistFlag};
use crate::{Error, Result};

/// A target hypergraph H for homomorphism problems. Tuple entries are
/// 1-based vertex ids; repeated vertices inside a tuple are allowed here
/// (unlike instance tuples). A tuple with all entries equal is a loop.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypergraphH {
    pub vertex_count: usize,
    pub k: u8,
    pub edges: Vec<Vec<u32>>,
    pub directed: bool,
}

impl HypergraphH {
    pub fn new(vertex_count: usize, k: u8, edges: Vec<Vec<u32>>, directed: bool) -> Result<Self> {
        for e in &edges {
            if e.len() != k as usize {
                return Err(Error::input("H edge arity mismatch"));
            }
            for &v in e {
                if v < 1 || v as usize > vertex_count {
                    return Err(Error::input(format!("H vertex {v} out of range")));
                }
            }
        }
        let mut h = HypergraphH {
            vertex_count,
            k,
            edges,
            directed,
        };
        h.edges.sort_unstable();
        h.edges.dedup();
        Ok(h)
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|e| e.iter().all(|&v| v == e[0]))
    }

    /// Loopless complete graph K_d (k=2, undirected).
    pub fn complete(d: usize) -> Self {
        let mut edges = Vec::new();
        for a in 1..=d as u32 {
            for b in 1..=d as u32 {
                if a != b {
                    edges.push(vec![a, b]);
                }
            }
        }
        HypergraphH::new(d, 2, edges, false).unwrap()
    }

    /// Undirected cycle on `len` vertices (k=2).
    pub fn cycle(len: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..len {
            let a = i as u32 + 1;
            let b = ((i + 1) % len) as u32 + 1;
            edges.push(vec![a, b]);
            edges.push(vec![b, a]);
        }
        HypergraphH::new(len, 2, edges, false).unwrap()
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    fn heap(a: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..n {
            heap(a, n - 1, out);
            if n % 2 == 0 {
                a.swap(i, n - 1);
            } else {
                a.swap(0, n - 1);
            }
        }
    }
    heap(&mut idx, k, &mut out);
    out.sort_unstable();
    out
}

/// Default cap on the size of an enumerated (d,k,t) support.
pub const DKT_SUPPORT_CAP: usize = 1_000_000;

/// Uniform distribution over all constraints with exactly `t` restrictions.
/// Flags the degenerate regime `t >= d^{k-1}`.
pub fn build_dkt(d: u8, k: u8, t: usize) -> Result<ConstraintDistribution> {
    build_dkt_capped(d, k, t, DKT_SUPPORT_CAP)
}

pub fn build_dkt_capped(d: u8, k: u8, t: usize, cap: usize) -> Result<ConstraintDistribution> {
    let probe = Constraint::empty(d, k)?;
    let cells = probe.cells();
    if t > cells {
        return Err(Error::input(format!("t={t} exceeds d^k={cells}")));
    }
    // support size C(cells, t), checked against the cap before enumeration
    let mut count: u128 = 1;
    for i in 0..t {
        count = count * (cells - i) as u128 / (i + 1) as u128;
        if count > cap as u128 {
            return Err(Error::capacity(format!(
                "(d,k,t)=({d},{k},{t}) support exceeds cap {cap}"
            )));
        }
    }
    let count = count as usize;
    let mut constraints = Vec::with_capacity(count);
    // enumerate t-subsets of cell indices in lexicographic order
    let mut comb: Vec<usize> = (0..t).collect();
    loop {
        let tuples: Vec<Vec<u8>> = comb.iter().map(|&i| probe.decode(i)).collect();
        constraints.push(Constraint::from_restrictions(
            d,
            k,
            tuples.iter().map(|t| t.as_slice()),
        )?);
        if t == 0 {
            break;
        }
        // next combination
        let mut i = t;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if comb[i] != i + cells - t {
                comb[i] += 1;
                for j in i + 1..t {
                    comb[j] = comb[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                comb.clear();
                break;
            }
        }
        if comb.is_empty() {
            break;
        }
    }
    debug_assert_eq!(constraints.len(), count);
    let w = 1.0 / count as f64;
    let entries = constraints.into_iter().map(|c| (c, w)).collect();
    let mut dist = ConstraintDistribution::new(format!("dkt:{d},{k},{t}"), d, k, entries)?;
    if t >= (d as usize).pow(k as u32 - 1) {
        dist = dist.with_flag(DistFlag::DegenerateT);
    }
    Ok(dist)
}

/// Single-constraint distribution whose allowed set is exactly H's edge set;
/// undirected H is first closed under all tuple permutations.
pub fn build_homomorphism(h: &HypergraphH) -> Result<ConstraintDistribution> {
    if h.vertex_count == 0 {
        return Err(Error::input("H must have at least one vertex"));
    }
    if h.vertex_count > 255 {
        return Err(Error::input(
            "H too large to serve as a domain (max 255 vertices)",
        ));
    }
    let d = h.vertex_count as u8;
    let k = h.k;
    let mut allowed = vec![false; (d as usize).pow(k as u32)];
    let probe = Constraint::empty(d, k)?;
    let perms = if h.directed {
        vec![(0..k as usize).collect::<Vec<_>>()]
    } else {
        permutations(k as usize)
    };
    for e in &h.edges {
        for p in &perms {
            let t: Vec<u8> = p.iter().map(|&i| e[i] as u8).collect();
            allowed[probe.encode(&t)] = true;
        }
    }
    let restrictions: Vec<Vec<u8>> = (0..allowed.len())
        .filter(|&i| !allowed[i])
        .map(|i| probe.decode(i))
        .collect();
    let c = Constraint::from_restrictions(d, k, restrictions.iter().map(|t| t.as_slice()))?;
    let mut dist = ConstraintDistribution::new(format!("hom:d={d},k={k}"), d, k, vec![(c, 1.0)])?;
    if h.edges.is_empty() {
        dist = dist.with_flag(DistFlag::TriviallyUnsatisfiable);
    }
    if h.has_loop() {
        dist = dist.with_flag(DistFlag::TriviallySatisfiable);
    }
    Ok(dist)
}

/// d-colouring as the loopless-complete-graph homomorphism problem.
pub fn build_coloring(d: u8) -> Result<ConstraintDistribution> {
    if d < 2 {
        return Err(Error::input("coloring needs d >= 2"));
    }
    let mut dist = build_homomorphism(&HypergraphH::complete(d as usize))?;
    dist = ConstraintDistribution::new(
        format!("coloring:{d}"),
        dist.d(),
        dist.k(),
        dist.entries().to_vec(),
    )?;
    Ok(dist)
}

/// The d=3, k=2 two-constraint model: C1 says either both variables equal 1
/// or neither does; C2 says the variables differ. Weights 2/3 and 1/3.
pub fn build_paper_ed3() -> ConstraintDistribution {
    let c1 = Constraint::from_restrictions(
        3,
        2,
        [[1u8, 2], [1, 3], [2, 1], [3, 1]].iter().map(|t| &t[..]),
    )
    .unwrap();
    let c2 = Constraint::from_restrictions(3, 2, [[1u8, 1], [2, 2], [3, 3]].iter().map(|t| &t[..]))
        .unwrap();
    ConstraintDistribution::new("ed3", 3, 2, vec![(c1, 2.0 / 3.0), (c2, 1.0 / 3.0)]).unwrap()
}

/// Case boundary for the d=5 model: c(q) = (1-q)/q.
pub fn s3_case_boundary(q: f64) -> f64 {
    (1.0 - q) / q
}

/// The d=5, k=2 model whose threshold type encodes the 3-colourability
/// threshold. Both constraints force edge endpoints into the same side of
/// the {1,2} / {3,4,5} split; C1 is disequality on {1,2}, C2 disequality on
/// {3,4,5}. Weights (q, 1-q).
pub fn build_paper_s3(q: f64) -> Result<ConstraintDistribution> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::input(format!("q={q} must lie in (0,1)")));
    }
    let mut c1_res: Vec<Vec<u8>> = vec![vec![1, 1], vec![2, 2]];
    let mut c2_res: Vec<Vec<u8>> = vec![vec![3, 3], vec![4, 4], vec![5, 5]];
    for a in [1u8, 2] {
        for b in [3u8, 4, 5] {
            c1_res.push(vec![a, b]);
            c1_res.push(vec![b, a]);
            c2_res.push(vec![a, b]);
            c2_res.push(vec![b, a]);
        }
    }
    let c1 = Constraint::from_restrictions(5, 2, c1_res.iter().map(|t| t.as_slice()))?;
    let c2 = Constraint::from_restrictions(5, 2, c2_res.iter().map(|t| t.as_slice()))?;
    ConstraintDistribution::new(format!("s3:{q}"), 5, 2, vec![(c1, q), (c2, 1.0 - q)])
}

/// Parse the H-file format: `HGRAPH 1`, `d=<int> k=<int> directed=<0|1>`,
/// then one comma-separated tuple per line.
pub fn parse_hgraph(text: &str) -> Result<HypergraphH> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("HGRAPH 1") {
        return Err(Error::parse("missing `HGRAPH 1` header"));
    }
    let meta: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::parse("missing HGRAPH meta line"))?
        .split_whitespace()
        .collect();
    if meta.len() != 3 {
        return Err(Error::parse("expected `d= k= directed=` line"));
    }
    let kv = |tok: &str, key: &str| -> Result<String> {
        tok.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| Error::parse(format!("expected `{key}=`, found `{tok}`")))
    };
    let d: usize = kv(meta[0], "d")?
        .parse()
        .map_err(|_| Error::parse("bad d"))?;
    let k: u8 = kv(meta[1], "k")?
        .parse()
        .map_err(|_| Error::parse("bad k"))?;
    let directed = match kv(meta[2], "directed")?.as_str() {
        "0" => false,
        "1" => true,
        other => return Err(Error::parse(format!("bad directed flag `{other}`"))),
    };
    let mut edges = Vec::new();
    for line in lines {
        let tuple: Vec<u32> = line
            .trim()
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse(format!("bad vertex `{x}`")))
            })
            .collect::<Result<_>>()?;
        edges.push(tuple);
    }
    HypergraphH::new(d, k, edges, directed)
}

pub fn write_hgraph(h: &HypergraphH) -> String {
    let mut s = format!(
        "HGRAPH 1\nd={} k={} directed={}\n",
        h.vertex_count,
        h.k,
        if h.directed { 1 } else { 0 }
    );
    for e in &h.edges {
        s.push_str(
            &e.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        s.push('\n');
    }
    s
}

/// Parse the explicit listing format: `CSPDIST 1`, `d= k=`, then per entry
/// `w=<prob> nres=<int> : <tuple>;<tuple>;...`.
pub fn parse_dist_file(text: &str) -> Result<ConstraintDistribution> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("CSPDIST 1") {
        return Err(Error::parse("missing `CSPDIST 1` header"));
    }
    let meta: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::parse("missing CSPDIST meta line"))?
        .split_whitespace()
        .collect();
    if meta.len() != 2 {
        return Err(Error::parse("expected `d= k=` line"));
    }
    let d: u8 = meta[0]
        .strip_prefix("d=")
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::parse("bad d"))?;
    let k: u8 = meta[1]
        .strip_prefix("k=")
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::parse("bad k"))?;
    let mut entries = Vec::new();
    for line in lines {
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse("entry line missing `:`"))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(format!("malformed entry head `{head}`")));
        }
        let w: f64 = toks[0]
            .strip_prefix("w=")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::parse("bad weight"))?;
        let nres: usize = toks[1]
            .strip_prefix("nres=")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::parse("bad nres"))?;
        let rest = rest.trim();
        let tuples: Vec<Vec<u8>> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(';')
                .map(|t| {
                    t.trim()
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<u8>()
                                .map_err(|_| Error::parse(format!("bad value `{x}`")))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?
        };
        if tuples.len() != nres {
            return Err(Error::parse("nres does not match listed tuples"));
        }
        let c = Constraint::from_restrictions(d, k, tuples.iter().map(|t| t.as_slice()))?;
        entries.push((c, w));
    }
    ConstraintDistribution::new("file", d, k, entries)
}

/// Parse a model DSL expression. `hom:` and `file:` read from disk.
pub fn parse_model(expr: &str) -> Result<ConstraintDistribution> {
    let expr = expr.trim();
    if expr == "ed3" {
        return Ok(build_paper_ed3());
    }
    if let Some(rest) = expr.strip_prefix("dkt:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::parse("dkt expects `dkt:<d>,<k>,<t>`"));
        }
        let d: u8 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse("bad d in dkt"))?;
        let k: u8 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse("bad k in dkt"))?;
        let t: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse("bad t in dkt"))?;
        return build_dkt(d, k, t);
    }
    if let Some(rest) = expr.strip_prefix("s3:") {
        let q: f64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::parse("bad q in s3"))?;
        return build_paper_s3(q);
    }
    if let Some(rest) = expr.strip_prefix("coloring:") {
        let d: u8 = rest
            .trim()
            .parse()
            .map_err(|_| Error::parse("bad d in coloring"))?;
        return build_coloring(d);
    }
    if let Some(path) = expr.strip_prefix("hom:") {
        let text = std::fs::read_to_string(path.trim())?;
        let h = parse_hgraph(&text)?;
        return build_homomorphism(&h);
    }
    if let Some(path) = expr.strip_prefix("file:") {
        let text = std::fs::read_to_string(path.trim())?;
        return parse_dist_file(&text);
    }
    Err(Error::parse(format!("unknown model expression `{expr}`")))
}
