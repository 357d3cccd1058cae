//! Audits answering: is every tree or unicyclic (hat-flavor) instance over
//! the support of a distribution satisfiable? For k=2 this is decided
//! exactly by a finite closure: the family F of root candidate sets
//! achievable by tree instances, and a semigroup of composed edge relations
//! interleaved with diagonal restrictions from F. Counterexample witnesses
//! are rebuilt from closure derivations and re-verified. For k >= 3 a
//! bounded literal enumeration stands in. Also houses the explicit
//! unicyclic-to-hyperedge and distance-controlled homomorphism
//! constructions.

use crate::csp::{CEdge, Constraint, ConstraintDistribution, Flavor, Instance};
use crate::models::HypergraphH;
use crate::solver::{solve, DEFAULT_BUDGET};
use crate::structure::{classify, components, Classification};
use crate::{Error, Result};

/// Binary relation on {1..d} as a d*d bitmask; bit (a-1)*d + (b-1) set
/// means the ordered pair (a, b) is allowed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Rel {
    d: u8,
    bits: u64,
}

impl Rel {
    pub fn from_constraint(c: &Constraint) -> Result<Rel> {
        if c.k() != 2 {
            return Err(Error::input("relation view requires k=2"));
        }
        if c.d() > 8 {
            return Err(Error::capacity("relation algebra supports d <= 8"));
        }
        let d = c.d();
        let mut bits = 0u64;
        for t in c.allowed_tuples() {
            bits |= 1u64 << ((t[0] - 1) as u64 * d as u64 + (t[1] - 1) as u64);
        }
        Ok(Rel { d, bits })
    }

    pub fn contains(&self, a: u8, b: u8) -> bool {
        self.bits & (1u64 << ((a - 1) as u64 * self.d as u64 + (b - 1) as u64)) != 0
    }

    pub fn transpose(&self) -> Rel {
        let mut bits = 0u64;
        for a in 0..self.d as u64 {
            for b in 0..self.d as u64 {
                if self.bits & (1u64 << (a * self.d as u64 + b)) != 0 {
                    bits |= 1u64 << (b * self.d as u64 + a);
                }
            }
        }
        Rel { d: self.d, bits }
    }

    /// Relational composition: (a,c) in self;other iff exists b with
    /// (a,b) in self and (b,c) in other.
    pub fn compose(&self, other: &Rel) -> Rel {
        debug_assert_eq!(self.d, other.d);
        let d = self.d as u64;
        let row_mask = (1u64 << d) - 1;
        let mut bits = 0u64;
        for a in 0..d {
            let mut out_row = 0u64;
            let row = (self.bits >> (a * d)) & row_mask;
            let mut m = row;
            while m != 0 {
                let b = m.trailing_zeros() as u64;
                m &= m - 1;
                out_row |= (other.bits >> (b * d)) & row_mask;
            }
            bits |= out_row << (a * d);
        }
        Rel { d: self.d, bits }
    }

    /// f_R(S) = { a : exists b in S with (a,b) in R }, sets as bitmasks.
    pub fn image(&self, set: u32) -> u32 {
        let d = self.d as u64;
        let row_mask = (1u64 << d) - 1;
        let mut out = 0u32;
        for a in 0..d {
            if ((self.bits >> (a * d)) & row_mask) & set as u64 != 0 {
                out |= 1 << a;
            }
        }
        out
    }

    /// Diagonal relation on a set.
    pub fn diag(d: u8, set: u32) -> Rel {
        let mut bits = 0u64;
        for a in 0..d as u64 {
            if set & (1 << a) != 0 {
                bits |= 1u64 << (a * d as u64 + a);
            }
        }
        Rel { d, bits }
    }

    pub fn diagonal_set(&self) -> u32 {
        let mut out = 0u32;
        for a in 0..self.d as u64 {
            if self.bits & (1u64 << (a * self.d as u64 + a)) != 0 {
                out |= 1 << a;
            }
        }
        out
    }
}

/// A deduplicated edge relation of the support: constraint `cid` read in
/// the given orientation (transposed = child at position 1).
#[derive(Clone, Copy, Debug)]
struct Gen {
    rel: Rel,
    cid: usize,
    transposed: bool,
}

#[derive(Clone, Copy, Debug)]
enum SetDeriv {
    Full,
    /// f_{gen}(sets[src])
    Image {
        gen: usize,
        src: usize,
    },
    Intersect {
        a: usize,
        b: usize,
    },
}

/// The family F of root candidate sets achievable by arc consistency on
/// tree instances over the support, with derivations and minimal realizing
/// tree sizes.
pub struct AchievableSets {
    d: u8,
    sets: Vec<u32>,
    derivs: Vec<SetDeriv>,
    /// minimal variable count of a tree realizing each set
    tree_vars: Vec<usize>,
    gens: Vec<Gen>,
}

impl AchievableSets {
    pub fn d(&self) -> u8 {
        self.d
    }
    pub fn sets(&self) -> &[u32] {
        &self.sets
    }
    pub fn contains(&self, set: u32) -> bool {
        self.sets.contains(&set)
    }
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.d) - 1
    }
    pub fn tree_vars(&self, set: u32) -> Option<usize> {
        self.sets
            .iter()
            .position(|&s| s == set)
            .map(|i| self.tree_vars[i])
    }
}

fn support_gens(dist: &ConstraintDistribution) -> Result<Vec<Gen>> {
    let mut gens: Vec<Gen> = Vec::new();
    for (cid, (c, _)) in dist.entries().iter().enumerate() {
        let fwd = Rel::from_constraint(c)?;
        for (rel, transposed) in [(fwd, false), (fwd.transpose(), true)] {
            if !gens.iter().any(|g| g.rel == rel) {
                gens.push(Gen {
                    rel,
                    cid,
                    transposed,
                });
            }
        }
    }
    Ok(gens)
}

/// Compute F by fixpoint: start from the full domain, close under images
/// through every oriented support relation and under pairwise
/// intersection. Minimal tree sizes are settled smallest-first.
pub fn achievable_sets(dist: &ConstraintDistribution) -> Result<AchievableSets> {
    if dist.k() != 2 {
        return Err(Error::input(
            "achievable_sets requires k=2 (use audit_bounded)",
        ));
    }
    let d = dist.d();
    let gens = support_gens(dist)?;
    let full = (1u32 << d) - 1;
    let mut sets = vec![full];
    let mut derivs = vec![SetDeriv::Full];
    let mut tree_vars = vec![1usize];
    let mut index: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    index.insert(full, 0);
    // settle in order of increasing tree size so derivations are minimal
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, u32, usize)>> =
        std::collections::BinaryHeap::new();
    let push_candidates =
        |i: usize,
         sets: &Vec<u32>,
         tree_vars: &Vec<usize>,
         heap: &mut std::collections::BinaryHeap<std::cmp::Reverse<(usize, u32, usize)>>| {
            for (g, gen) in gens.iter().enumerate() {
                let img = gen.rel.image(sets[i]);
                let cost = tree_vars[i] + 1;
                heap.push(std::cmp::Reverse((cost, img, encode_image(g, i))));
            }
            for j in 0..sets.len() {
                let inter = sets[i] & sets[j];
                let cost = tree_vars[i] + tree_vars[j] - 1;
                heap.push(std::cmp::Reverse((cost, inter, encode_intersect(i, j))));
            }
        };
    fn encode_image(g: usize, src: usize) -> usize {
        (g << 32) | src | (1 << 62)
    }
    fn encode_intersect(a: usize, b: usize) -> usize {
        (a << 32) | b
    }
    push_candidates(0, &sets, &tree_vars, &mut heap);
    while let Some(std::cmp::Reverse((cost, mask, code))) = heap.pop() {
        if index.contains_key(&mask) {
            continue;
        }
        let deriv = if code & (1 << 62) != 0 {
            SetDeriv::Image {
                gen: (code >> 32) & 0x3fff_ffff,
                src: code & 0xffff_ffff,
            }
        } else {
            SetDeriv::Intersect {
                a: code >> 32,
                b: code & 0xffff_ffff,
            }
        };
        let i = sets.len();
        sets.push(mask);
        derivs.push(deriv);
        tree_vars.push(cost);
        index.insert(mask, i);
        push_candidates(i, &sets, &tree_vars, &mut heap);
        if sets.len() > 1 << d {
            return Err(Error::internal("achievable-set family exceeded 2^d"));
        }
    }
    Ok(AchievableSets {
        d,
        sets,
        derivs,
        tree_vars,
        gens,
    })
}

/// Incrementally built witness instance over the support's constraint table.
struct WitnessBuilder<'a> {
    f: &'a AchievableSets,
    n: usize,
    edges: Vec<CEdge>,
}

impl<'a> WitnessBuilder<'a> {
    fn new(f: &'a AchievableSets) -> Self {
        WitnessBuilder {
            f,
            n: 0,
            edges: Vec::new(),
        }
    }

    fn fresh_var(&mut self) -> u32 {
        self.n += 1;
        (self.n - 1) as u32
    }

    fn add_edge(&mut self, from: u32, to: u32, gen: &Gen) {
        let vars = if gen.transposed {
            vec![to, from]
        } else {
            vec![from, to]
        };
        self.edges.push(CEdge { vars, cid: gen.cid });
    }

    /// Attach a tree at `root` reducing its candidate set to sets[idx].
    fn attach_tree(&mut self, idx: usize, root: u32) {
        match self.f.derivs[idx] {
            SetDeriv::Full => {}
            SetDeriv::Image { gen, src } => {
                let child = self.fresh_var();
                let gen = self.f.gens[gen];
                self.add_edge(root, child, &gen);
                self.attach_tree(src, child);
            }
            SetDeriv::Intersect { a, b } => {
                self.attach_tree(a, root);
                self.attach_tree(b, root);
            }
        }
    }

    fn into_instance(self, dist: &ConstraintDistribution) -> Result<Instance> {
        let table = dist.entries().iter().map(|(c, _)| c.clone()).collect();
        Instance::new(self.n, dist.d(), 2, table, self.edges, Flavor::Hat)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum AuditVerdict {
    AllSatisfiable,
    Counterexample(Instance),
}

#[derive(Clone, PartialEq, Debug)]
pub enum BoundedVerdict {
    NoCounterexampleUpTo(usize),
    Counterexample(Instance),
}

/// One semigroup word factor: an oriented support relation or a diagonal
/// restriction realized by a hanging tree.
#[derive(Clone, Copy, Debug)]
enum Factor {
    Edge(usize),
    Diag(usize),
}

/// Exact k=2 audit engine shared by `audit_binary` (no size bound) and
/// `audit_bounded` (witness limited to `max_vars` variables).
fn closure_audit(
    dist: &ConstraintDistribution,
    max_vars: Option<usize>,
) -> Result<Option<Instance>> {
    let f = achievable_sets(dist)?;
    let within = |vars: usize| max_vars.map_or(true, |m| vars <= m);
    // tree counterexample: the empty set is achievable
    if let Some(idx) = f.sets.iter().position(|&s| s == 0) {
        if within(f.tree_vars[idx]) {
            let mut b = WitnessBuilder::new(&f);
            let root = b.fresh_var();
            b.attach_tree(idx, root);
            let inst = b.into_instance(dist)?;
            verify_counterexample(&inst, true)?;
            return Ok(Some(inst));
        }
    }
    // cycle counterexample: Dijkstra over semigroup states
    // (relation, min(2, #edge factors)); cost = witness variable count
    // (each edge factor adds one cycle variable, each diagonal adds its
    // tree's variables minus the shared root)
    type State = (u64, u8);
    let mut best: std::collections::HashMap<State, usize> = std::collections::HashMap::new();
    let mut parent: std::collections::HashMap<State, (Option<State>, Factor)> =
        std::collections::HashMap::new();
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, u64, u8)>> =
        std::collections::BinaryHeap::new();
    let full_idx = f.sets.iter().position(|&s| s == f.full_mask()).unwrap();
    let factors: Vec<(Factor, Rel, usize, u8)> = {
        let mut v: Vec<(Factor, Rel, usize, u8)> = f
            .gens
            .iter()
            .enumerate()
            .map(|(g, gen)| (Factor::Edge(g), gen.rel, 1usize, 1u8))
            .collect();
        for (i, &s) in f.sets.iter().enumerate() {
            if i != full_idx && s != 0 {
                v.push((Factor::Diag(i), Rel::diag(f.d, s), f.tree_vars[i] - 1, 0));
            }
        }
        v
    };
    for &(fac, rel, cost, class) in &factors {
        let st = (rel.bits, class);
        if best.get(&st).map_or(true, |&c| cost < c) {
            best.insert(st, cost);
            parent.insert(st, (None, fac));
            heap.push(std::cmp::Reverse((cost, rel.bits, class)));
        }
    }
    let cap = 1usize << (f.d as usize * f.d as usize).min(40);
    while let Some(std::cmp::Reverse((cost, bits, class))) = heap.pop() {
        if best.get(&(bits, class)) != Some(&cost) {
            continue;
        }
        let rel = Rel { d: f.d, bits };
        if class >= 2 && rel.diagonal_set() == 0 && within(cost) {
            // reconstruct the factor word and build the witness cycle
            let mut word = Vec::new();
            let mut cur = Some((bits, class));
            while let Some(st) = cur {
                let (prev, fac) = parent[&st];
                word.push(fac);
                cur = prev;
            }
            word.reverse();
            let inst = build_cycle_witness(dist, &f, &word)?;
            verify_counterexample(&inst, false)?;
            return Ok(Some(inst));
        }
        for &(fac, frel, fcost, fclass) in &factors {
            let nrel = rel.compose(&frel);
            let nclass = (class + fclass).min(2);
            let ncost = cost + fcost;
            if !within(ncost) {
                continue;
            }
            let st = (nrel.bits, nclass);
            if best.get(&st).map_or(true, |&c| ncost < c) {
                best.insert(st, ncost);
                parent.insert(st, (Some((bits, class)), fac));
                heap.push(std::cmp::Reverse((ncost, nrel.bits, nclass)));
            }
            if best.len() > 3 * cap {
                return Err(Error::internal("semigroup closure exceeded its cap"));
            }
        }
    }
    Ok(None)
}

fn build_cycle_witness(
    dist: &ConstraintDistribution,
    f: &AchievableSets,
    word: &[Factor],
) -> Result<Instance> {
    let mut b = WitnessBuilder::new(f);
    let v0 = b.fresh_var();
    let mut cur = v0;
    let edge_total = word
        .iter()
        .filter(|fac| matches!(fac, Factor::Edge(_)))
        .count();
    let mut edges_done = 0usize;
    for fac in word {
        match *fac {
            Factor::Diag(idx) => b.attach_tree(idx, cur),
            Factor::Edge(g) => {
                edges_done += 1;
                let next = if edges_done == edge_total {
                    v0
                } else {
                    b.fresh_var()
                };
                let gen = f.gens[g];
                b.add_edge(cur, next, &gen);
                cur = next;
            }
        }
    }
    b.into_instance(dist)
}

fn verify_counterexample(inst: &Instance, expect_tree: bool) -> Result<()> {
    let comps = components(inst);
    if comps.len() != 1 {
        return Err(Error::internal("witness is not connected"));
    }
    match classify(inst, &comps[0])? {
        Classification::Tree if expect_tree => {}
        Classification::Unicyclic(_) if !expect_tree => {}
        other => {
            return Err(Error::internal(format!(
                "witness has wrong shape: {other:?} (expect_tree={expect_tree})"
            )))
        }
    }
    if !solve(inst, DEFAULT_BUDGET)?.is_unsat() {
        return Err(Error::internal("witness is satisfiable"));
    }
    Ok(())
}

/// Decide whether any tree or unicyclic hat instance over the support is
/// unsatisfiable (k=2, exact).
pub fn audit_binary(dist: &ConstraintDistribution) -> Result<AuditVerdict> {
    if dist.k() != 2 {
        return Err(Error::input(
            "audit_binary requires k=2 (use audit_bounded)",
        ));
    }
    Ok(match closure_audit(dist, None)? {
        Some(inst) => AuditVerdict::Counterexample(inst),
        None => AuditVerdict::AllSatisfiable,
    })
}

/// Bounded audit: no tree/unicyclic counterexample on up to `max_vars`
/// variables. Exact closure for k=2; literal shape enumeration for k >= 3.
pub fn audit_bounded(dist: &ConstraintDistribution, max_vars: usize) -> Result<BoundedVerdict> {
    if max_vars == 0 {
        return Err(Error::input("max_vars must be positive"));
    }
    if dist.k() == 2 {
        return Ok(match closure_audit(dist, Some(max_vars))? {
            Some(inst) => BoundedVerdict::Counterexample(inst),
            None => BoundedVerdict::NoCounterexampleUpTo(max_vars),
        });
    }
    audit_bounded_literal(dist, max_vars)
}

/// A hypergraph shape: vertex count plus sorted edge list (each edge a
/// sorted vertex set), canonical under vertex relabeling.
type Shape = (usize, Vec<Vec<u8>>);

fn canonical_shape(n: usize, edges: &[Vec<u8>]) -> Shape {
    let mut perm: Vec<u8> = (0..n as u8).collect();
    let mut best: Option<Vec<Vec<u8>>> = None;
    // n <= 10 in practice; straightforward permutation minimization
    permute_all(&mut perm, 0, &mut |p| {
        let mut mapped: Vec<Vec<u8>> = edges
            .iter()
            .map(|e| {
                let mut m: Vec<u8> = e.iter().map(|&v| p[v as usize]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped.sort();
        if best.as_ref().map_or(true, |b| &mapped < b) {
            best = Some(mapped);
        }
    });
    (n, best.unwrap())
}

fn permute_all(perm: &mut Vec<u8>, i: usize, f: &mut impl FnMut(&[u8])) {
    if i == perm.len() {
        f(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permute_all(perm, i + 1, f);
        perm.swap(i, j);
    }
}

/// All tree and unicyclic k-uniform hypergraph shapes with at most
/// `max_vars` vertices, up to isomorphism. Trees grow by edges sharing one
/// vertex; a unicyclic shape is a tree plus one edge sharing two vertices.
fn enumerate_shapes(k: usize, max_vars: usize) -> Vec<(Shape, bool)> {
    let mut trees: Vec<Shape> = Vec::new();
    if k > max_vars {
        return Vec::new();
    }
    let first: Shape = (k, vec![(0..k as u8).collect()]);
    let mut frontier = vec![first.clone()];
    trees.push(first);
    let mut seen: std::collections::HashSet<Shape> = trees.iter().cloned().collect();
    while let Some((n, edges)) = frontier.pop() {
        if n + k - 1 > max_vars {
            continue;
        }
        for anchor in 0..n as u8 {
            let mut e: Vec<u8> = vec![anchor];
            e.extend(n as u8..(n + k - 1) as u8);
            let mut new_edges = edges.clone();
            new_edges.push(e);
            let shape = canonical_shape(n + k - 1, &new_edges);
            if seen.insert(shape.clone()) {
                trees.push(shape.clone());
                frontier.push(shape);
            }
        }
    }
    let mut out: Vec<(Shape, bool)> = trees.iter().map(|s| (s.clone(), true)).collect();
    let mut seen_uni: std::collections::HashSet<Shape> = std::collections::HashSet::new();
    for (n, edges) in &trees {
        if n + k - 2 > max_vars {
            continue;
        }
        for a in 0..*n as u8 {
            for b in (a + 1)..*n as u8 {
                let mut e = vec![a, b];
                e.extend(*n as u8..(*n + k - 2) as u8);
                let mut new_edges = edges.clone();
                new_edges.push(e);
                let shape = canonical_shape(n + k - 2, &new_edges);
                if seen_uni.insert(shape.clone()) {
                    out.push((shape, false));
                }
            }
        }
    }
    out
}

fn audit_bounded_literal(dist: &ConstraintDistribution, max_vars: usize) -> Result<BoundedVerdict> {
    let k = dist.k() as usize;
    // per-edge variants: (cid, position order) deduplicated by the induced
    // constraint on the edge's sorted vertex tuple
    let mut variants: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut variant_keys: Vec<Constraint> = Vec::new();
    let mut perms = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    permute_all_usize(&mut idx, 0, &mut |p| perms.push(p.to_vec()));
    for (cid, (c, _)) in dist.entries().iter().enumerate() {
        for p in &perms {
            let key = c.permuted(p)?;
            if !variant_keys.contains(&key) {
                variant_keys.push(key);
                variants.push((cid, p.clone()));
            }
        }
    }
    let shapes = enumerate_shapes(k, max_vars);
    let mut total: u128 = 0;
    for ((_, edges), _) in &shapes {
        total += (variants.len() as u128).pow(edges.len() as u32);
    }
    if total > 20_000_000 {
        return Err(Error::capacity(format!(
            "bounded audit would enumerate {total} instances; lower max_vars"
        )));
    }
    let table: Vec<Constraint> = dist.entries().iter().map(|(c, _)| c.clone()).collect();
    for ((n, edges), _) in &shapes {
        let e = edges.len();
        let mut choice = vec![0usize; e];
        loop {
            let inst_edges: Vec<CEdge> = edges
                .iter()
                .zip(choice.iter())
                .map(|(vs, &ch)| {
                    let (cid, ref perm) = variants[ch];
                    // position i of the tuple reads vertex perm[i]
                    let vars: Vec<u32> = perm.iter().map(|&i| vs[i] as u32).collect();
                    CEdge { vars, cid }
                })
                .collect();
            let inst = Instance::new(
                *n,
                dist.d(),
                dist.k(),
                table.clone(),
                inst_edges,
                Flavor::Hat,
            )?;
            if solve(&inst, DEFAULT_BUDGET)?.is_unsat() {
                verify_counterexample(
                    &inst,
                    edges.iter().map(|e| e.len() - 1).sum::<usize>() == n - 1,
                )?;
                return Ok(BoundedVerdict::Counterexample(inst));
            }
            // odometer
            let mut i = e;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < variants.len() {
                    break;
                }
                choice[i] = 0;
                if i == 0 {
                    break;
                }
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    Ok(BoundedVerdict::NoCounterexampleUpTo(max_vars))
}

fn permute_all_usize(perm: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == perm.len() {
        f(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permute_all_usize(perm, i + 1, f);
        perm.swap(i, j);
    }
}

/// Pseudo-instance over a dummy domain, used to borrow the structural
/// classifiers for plain hypergraphs.
fn hypergraph_as_instance(g: &HypergraphH) -> Result<Instance> {
    let k = g.k;
    let table = vec![Constraint::empty(2, k)?];
    let edges = g
        .edges
        .iter()
        .map(|e| CEdge {
            vars: e.iter().map(|&v| v - 1).collect(),
            cid: 0,
        })
        .collect();
    let inst = Instance {
        n: g.vertex_count,
        d: 2,
        k,
        table,
        edges,
        flavor: Flavor::Hat,
    };
    inst.validate()?;
    Ok(inst)
}

/// The explicit homomorphism of a unicyclic k>=3 hypergraph onto a single
/// hyperedge (w_1..w_k, reported 1-based): alternate w_1/w_2 along the
/// cycle with w_3 at the final cycle vertex, then extend greedily over the
/// hanging trees.
pub fn unicyclic_homomorphism(g: &HypergraphH) -> Result<Vec<u32>> {
    let k = g.k as usize;
    if k < 3 {
        return Err(Error::input("unicyclic_homomorphism requires k >= 3"));
    }
    let inst = hypergraph_as_instance(g)?;
    let comps = components(&inst);
    if comps.len() != 1 {
        return Err(Error::input("hypergraph must be connected"));
    }
    let cycle = match classify(&inst, &comps[0])? {
        Classification::Unicyclic(c) => c,
        other => {
            return Err(Error::input(format!(
                "hypergraph is not unicyclic: {other:?}"
            )))
        }
    };
    let r = cycle.len();
    let mut h = vec![0u32; g.vertex_count]; // 0 = unmapped
    for (i, &v) in cycle.vertices.iter().enumerate() {
        h[v as usize] = if i == r - 1 { 3 } else { (i % 2) as u32 + 1 };
    }
    // extend edge by edge outward from the cycle
    let mut remaining: Vec<usize> = (0..inst.edges.len()).collect();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|&ei| {
            let vars = &inst.edges[ei].vars;
            if !vars.iter().any(|&v| h[v as usize] != 0) {
                return true; // not reachable yet
            }
            let mut used = 0u32;
            for &v in vars.iter() {
                let img = h[v as usize];
                if img != 0 {
                    used |= 1 << (img - 1);
                }
            }
            let mut next = 1u32;
            for &v in vars.iter() {
                if h[v as usize] == 0 {
                    while used & (1 << (next - 1)) != 0 {
                        next += 1;
                    }
                    h[v as usize] = next;
                    used |= 1 << (next - 1);
                }
            }
            false
        });
        if remaining.len() == before {
            return Err(Error::internal("hanging-tree extension stalled"));
        }
    }
    // isolated vertices (none in a connected hypergraph, but be safe)
    for x in h.iter_mut() {
        if *x == 0 {
            *x = 1;
        }
    }
    // verify: every edge maps bijectively onto {1..k}
    for e in &g.edges {
        let mut used = 0u32;
        for &v in e {
            used |= 1 << (h[(v - 1) as usize] - 1);
        }
        if used != (1u32 << k) - 1 {
            return Err(Error::internal("edge image is not the full hyperedge"));
        }
    }
    Ok(h)
}

fn undirected_adj(g: &HypergraphH) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); g.vertex_count];
    for e in &g.edges {
        let (a, b) = (e[0] - 1, e[1] - 1);
        if a != b {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

fn find_triangle(adj: &[Vec<u32>]) -> Option<[u32; 3]> {
    for (a, nbrs) in adj.iter().enumerate() {
        for &b in nbrs {
            if (b as usize) <= a {
                continue;
            }
            for &c in &adj[b as usize] {
                if c > b && nbrs.contains(&c) {
                    return Some([a as u32, b, c]);
                }
            }
        }
    }
    None
}

/// A walk of exact length `len` from `from` to `to` in a connected graph
/// that contains a triangle through `from` (parity fixed by circling it).
fn exact_walk(
    adj: &[Vec<u32>],
    tri: &[u32; 3],
    from: u32,
    to: u32,
    len: usize,
) -> Result<Vec<u32>> {
    // BFS shortest path from `from` to `to`
    let mut prev = vec![u32::MAX; adj.len()];
    let mut dist = vec![usize::MAX; adj.len()];
    dist[from as usize] = 0;
    let mut q = std::collections::VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x as usize] {
            if dist[y as usize] == usize::MAX {
                dist[y as usize] = dist[x as usize] + 1;
                prev[y as usize] = x;
                q.push_back(y);
            }
        }
    }
    let l = dist[to as usize];
    if l == usize::MAX || len < l {
        return Err(Error::input("walk target unreachable within length"));
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur as usize];
        path.push(cur);
    }
    path.reverse();
    let mut walk = Vec::with_capacity(len + 1);
    walk.push(from);
    let mut pad = len - l;
    if pad % 2 == 1 {
        // circle the triangle once (3 steps) to flip parity
        if pad < 3 {
            return Err(Error::input("length too short for parity adjustment"));
        }
        let i = tri.iter().position(|&t| t == from).ok_or_else(|| {
            Error::internal("parity adjustment requires the walk to start on the triangle")
        })?;
        walk.push(tri[(i + 1) % 3]);
        walk.push(tri[(i + 2) % 3]);
        walk.push(from);
        pad -= 3;
    }
    let bounce = adj[from as usize][0];
    for _ in 0..pad / 2 {
        walk.push(bounce);
        walk.push(from);
    }
    walk.extend(path.into_iter().skip(1));
    debug_assert_eq!(walk.len(), len + 1);
    Ok(walk)
}

/// Distance-controlled homomorphism: map M's unique cycle onto
/// a triangle of H, send each vertex at distance j from the cycle to the
/// j-th vertex of an exact-length-r walk ending at u, and bounce past r.
/// Every vertex at distance exactly r maps to u. Requires r >= |V(H)|+3.
pub fn distance_homomorphism(
    m: &HypergraphH,
    h: &HypergraphH,
    u: u32,
    r: usize,
) -> Result<Vec<u32>> {
    if m.k != 2 || h.k != 2 {
        return Err(Error::input("distance_homomorphism requires k=2"));
    }
    if u < 1 || u as usize > h.vertex_count {
        return Err(Error::input("u out of range"));
    }
    if r < h.vertex_count + 3 {
        return Err(Error::input("r must be at least |V(H)|+3"));
    }
    let hadj = undirected_adj(h);
    if hadj.iter().any(|l| l.is_empty()) && h.vertex_count > 1 {
        return Err(Error::input("H must be connected"));
    }
    let tri0 = find_triangle(&hadj).ok_or_else(|| Error::input("H contains no triangle"))?;
    let minst = hypergraph_as_instance(m)?;
    let comps = components(&minst);
    if comps.len() != 1 {
        return Err(Error::input("M must be connected"));
    }
    let cycle = match classify(&minst, &comps[0])? {
        Classification::Unicyclic(c) => c,
        other => return Err(Error::input(format!("M is not unicyclic: {other:?}"))),
    };
    // map the cycle onto the triangle: alternate tri[0]/tri[1], odd cycles
    // close through tri[2]
    let rc = cycle.len();
    let mut img = vec![0u32; m.vertex_count]; // 1-based H vertices, 0 unmapped
    let tri_of = |i: usize| -> u32 {
        if i == rc - 1 && rc % 2 == 1 {
            tri0[2]
        } else {
            tri0[i % 2]
        }
    };
    for (i, &v) in cycle.vertices.iter().enumerate() {
        img[v as usize] = tri_of(i) + 1;
    }
    // walks of exact length r from each triangle vertex to u
    let mut walks: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    for &t in &[tri0[0], tri0[1], tri0[2]] {
        walks.insert(t, exact_walk(&hadj, &tri0, t, u - 1, r)?);
    }
    // BFS from the cycle through M, carrying (anchor triangle vertex, depth)
    let madj = undirected_adj(m);
    let mut info: Vec<Option<(u32, usize)>> = vec![None; m.vertex_count];
    let mut q = std::collections::VecDeque::new();
    for (i, &v) in cycle.vertices.iter().enumerate() {
        info[v as usize] = Some((tri_of(i), 0));
        q.push_back(v);
    }
    let ubounce = hadj[(u - 1) as usize][0];
    while let Some(v) = q.pop_front() {
        let (anchor, depth) = info[v as usize].unwrap();
        for &w in &madj[v as usize] {
            if info[w as usize].is_some() {
                continue;
            }
            let j = depth + 1;
            info[w as usize] = Some((anchor, j));
            img[w as usize] = if j <= r {
                walks[&anchor][j] + 1
            } else if (j - r) % 2 == 1 {
                ubounce + 1
            } else {
                u
            };
            q.push_back(w);
        }
    }
    // verify edge by edge
    for e in &m.edges {
        let (a, b) = (img[(e[0] - 1) as usize], img[(e[1] - 1) as usize]);
        if a == b || !hadj[(a - 1) as usize].contains(&(b - 1)) {
            return Err(Error::internal("distance homomorphism fails an edge"));
        }
    }
    Ok(img)
}
