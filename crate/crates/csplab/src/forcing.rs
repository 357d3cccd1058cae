//! Value-level forcing machinery for binary supports: the forcing digraph
//! and its mean-offspring matrix, forced-set BFS with stored chains,
//! percolation verdicts (empirical sampling cross-checked against the
//! Perron root of the relevant mean-matrix block), and the two-condition
//! theorem checker used by the coarse-threshold experiments.

use crate::csp::{ConstraintDistribution, Flavor, Instance};
use crate::sampler::{sample_hat, trial_rng, GenSpec};
use crate::solver::{solve_restricted, ValueRestriction, DEFAULT_BUDGET};
use crate::structure::{classify, components, Classification};
use crate::{Error, Result};
use rand::Rng;
use std::collections::HashMap;

pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_ZETA: f64 = 0.05;
/// Analytic verdicts within this distance of the critical Perron root 1
/// are never combined into a conclusive answer.
pub const INCONCLUSIVE_BAND: f64 = 0.1;

/// One forcing rule: constraint `cid`, read with the assigned endpoint at
/// position 1 (`transposed=false`) or position 2 (`transposed=true`),
/// leaves `gamma` as the single candidate when the endpoint takes `delta`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ForcingEdge {
    pub delta: u8,
    pub gamma: u8,
    pub cid: usize,
    pub transposed: bool,
}

#[derive(Clone, Debug)]
pub struct ForcingDigraph {
    pub d: u8,
    pub edges: Vec<ForcingEdge>,
    /// mean_matrix[δ-1][γ-1]: expected number of neighbors forced to γ by
    /// a vertex holding δ, at density parameter c (hat-model rate: each
    /// forcing-capable (constraint, orientation) contributes c·P(C)/2).
    pub mean_matrix: Vec<Vec<f64>>,
}

/// Enumerate single-candidate rows of every support constraint in both
/// orientations and accumulate the mean-offspring matrix.
pub fn build_forcing_digraph(dist: &ConstraintDistribution, c: f64) -> Result<ForcingDigraph> {
    if dist.k() != 2 {
        return Err(Error::input("forcing digraph requires k=2"));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::input("c must be finite and nonnegative"));
    }
    let d = dist.d();
    let mut edges = Vec::new();
    let mut mean = vec![vec![0.0f64; d as usize]; d as usize];
    for (cid, (con, w)) in dist.entries().iter().enumerate() {
        for transposed in [false, true] {
            let pos = if transposed { 2 } else { 1 };
            for delta in 1..=d {
                let rows = con.allowed_rows(pos, delta)?;
                if rows.len() == 1 {
                    let gamma = rows[0][0];
                    edges.push(ForcingEdge {
                        delta,
                        gamma,
                        cid,
                        transposed,
                    });
                    mean[delta as usize - 1][gamma as usize - 1] += c * w / 2.0;
                }
            }
        }
    }
    Ok(ForcingDigraph {
        d,
        edges,
        mean_matrix: mean,
    })
}

fn spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    // power iteration on (M + I), primitive whenever M is irreducible;
    // reducible blocks still converge to the dominant class
    let mut v = vec![1.0f64; n];
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            let mut s = v[i]; // the +I term
            for j in 0..n {
                s += m[i][j] * v[j];
            }
            w[i] = s;
        }
        let norm = w.iter().fold(0.0f64, |a, &x| a.max(x));
        if norm == 0.0 {
            return 0.0;
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        if (norm - lambda).abs() <= 1e-13 * norm.max(1.0)
            && v.iter().zip(&w).all(|(a, b)| (a - b).abs() <= 1e-13)
        {
            return norm - 1.0;
        }
        lambda = norm;
        v = w;
    }
    lambda - 1.0
}

impl ForcingDigraph {
    /// Spectral radius of the full mean matrix.
    pub fn perron_root(&self) -> f64 {
        spectral_radius(&self.mean_matrix)
    }

    /// Spectral radius restricted to the values both reachable from δ and
    /// able to reach γ in the forcing digraph — the block governing the
    /// branching process behind F_{δ,γ}.
    pub fn perron_root_for(&self, delta: u8, gamma: u8) -> f64 {
        let d = self.d as usize;
        let reach = |from: usize, forward: bool| -> Vec<bool> {
            let mut seen = vec![false; d];
            seen[from] = true;
            let mut stack = vec![from];
            while let Some(x) = stack.pop() {
                for y in 0..d {
                    let (a, b) = if forward { (x, y) } else { (y, x) };
                    if self.mean_matrix[a][b] > 0.0 && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen
        };
        let fwd = reach(delta as usize - 1, true);
        let bwd = reach(gamma as usize - 1, false);
        let block: Vec<usize> = (0..d).filter(|&i| fwd[i] && bwd[i]).collect();
        let sub: Vec<Vec<f64>> = block
            .iter()
            .map(|&i| block.iter().map(|&j| self.mean_matrix[i][j]).collect())
            .collect();
        spectral_radius(&sub)
    }

    /// Reachability δ→μ through chained forcings, returning the rule
    /// sequence if one exists.
    pub fn sequence(&self, delta: u8, mu: u8) -> Option<Vec<ForcingEdge>> {
        let d = self.d as usize;
        // BFS over values; a sequence needs at least one rule
        let mut prev: Vec<Option<(u8, ForcingEdge)>> = vec![None; d];
        let mut queue = std::collections::VecDeque::from([delta]);
        let mut seen = vec![false; d];
        while let Some(x) = queue.pop_front() {
            for e in &self.edges {
                if e.delta == x && !seen[e.gamma as usize - 1] {
                    seen[e.gamma as usize - 1] = true;
                    prev[e.gamma as usize - 1] = Some((x, *e));
                    if e.gamma == mu {
                        let mut seq = Vec::new();
                        let mut cur = mu;
                        while let Some((p, edge)) = prev[cur as usize - 1] {
                            seq.push(edge);
                            cur = p;
                            if cur == delta && edge.delta == delta {
                                break;
                            }
                        }
                        seq.reverse();
                        return Some(seq);
                    }
                    queue.push_back(e.gamma);
                }
            }
        }
        None
    }
}

/// Reachability δ→μ in the value-level forcing digraph of the support.
pub fn forcing_sequence_exists(
    dist: &ConstraintDistribution,
    delta: u8,
    mu: u8,
) -> Result<Option<Vec<ForcingEdge>>> {
    Ok(build_forcing_digraph(dist, 1.0)?.sequence(delta, mu))
}

/// One step of a stored forcing chain: variable `var` was forced to
/// `value` through instance edge `edge`.
#[derive(Clone, Copy, Debug)]
pub struct ChainStep {
    pub var: u32,
    pub value: u8,
    pub edge: usize,
}

/// F_δ(v) exposed by BFS, per target value, with parent pointers for
/// replaying chains and a contradiction flag when some variable is forced
/// to two different values.
pub struct ForcedSet {
    d: u8,
    root: u32,
    root_value: u8,
    /// (var, value) -> (parent var, parent value, edge index)
    parents: HashMap<(u32, u8), (u32, u8, usize)>,
    contradictory: bool,
}

impl ForcedSet {
    pub fn root(&self) -> (u32, u8) {
        (self.root, self.root_value)
    }

    pub fn contradictory(&self) -> bool {
        self.contradictory
    }

    /// F_{δ,γ}(v): variables forced to γ (sorted; the root only appears if
    /// re-forced through a nontrivial chain).
    pub fn set(&self, gamma: u8) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .parents
            .keys()
            .filter(|&&(_, g)| g == gamma)
            .map(|&(u, _)| u)
            .collect();
        out.sort_unstable();
        out
    }

    /// F_δ(v) = ∪_γ F_{δ,γ}(v), deduplicated and sorted.
    pub fn union(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.parents.keys().map(|&(u, _)| u).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn size(&self, gamma: u8) -> usize {
        self.parents.keys().filter(|&&(_, g)| g == gamma).count()
    }

    /// Chain of forcing steps from the root to (u, γ), root excluded.
    pub fn chain(&self, u: u32, gamma: u8) -> Option<Vec<ChainStep>> {
        if gamma == 0 || gamma > self.d {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = (u, gamma);
        loop {
            let &(pv, pval, edge) = self.parents.get(&cur)?;
            steps.push(ChainStep {
                var: cur.0,
                value: cur.1,
                edge,
            });
            if (pv, pval) == (self.root, self.root_value) {
                break;
            }
            cur = (pv, pval);
        }
        steps.reverse();
        Some(steps)
    }
}

/// BFS closure of chained forcings from v:δ over a k=2 instance. Edges of
/// other arities are ignored (forcing is a binary-row notion).
pub fn forced_set(inst: &Instance, v: u32, delta: u8) -> Result<ForcedSet> {
    if v as usize >= inst.n {
        return Err(Error::input("root variable out of range"));
    }
    if delta == 0 || delta > inst.d {
        return Err(Error::input("root value out of range"));
    }
    // incident binary edges per variable
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); inst.n];
    for (ei, e) in inst.edges.iter().enumerate() {
        if e.vars.len() == 2 {
            incident[e.vars[0] as usize].push(ei);
            incident[e.vars[1] as usize].push(ei);
        }
    }
    let mut parents: HashMap<(u32, u8), (u32, u8, usize)> = HashMap::new();
    let mut forced_value: HashMap<u32, u8> = HashMap::new();
    forced_value.insert(v, delta);
    let mut contradictory = false;
    // carry the arrival edge so chains never immediately backtrack
    let mut queue = std::collections::VecDeque::from([(v, delta, usize::MAX)]);
    while let Some((x, val, via)) = queue.pop_front() {
        for &ei in &incident[x as usize] {
            if ei == via {
                continue;
            }
            let e = &inst.edges[ei];
            let (pos, other) = if e.vars[0] == x {
                (1u8, e.vars[1])
            } else {
                (2u8, e.vars[0])
            };
            if other == x {
                continue;
            }
            let rows = inst.table[e.cid].allowed_rows(pos, val)?;
            if rows.len() != 1 {
                continue;
            }
            let gamma = rows[0][0];
            let state = (other, gamma);
            if !parents.contains_key(&state) {
                parents.insert(state, (x, val, ei));
                match forced_value.get(&other) {
                    Some(&g) if g != gamma => contradictory = true,
                    None => {
                        forced_value.insert(other, gamma);
                    }
                    _ => {}
                }
                queue.push_back((other, gamma, ei));
            }
        }
    }
    Ok(ForcedSet {
        d: inst.d,
        root: v,
        root_value: delta,
        parents,
        contradictory,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Percolates,
    Subcritical,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct PercolationReport {
    pub delta: u8,
    pub gamma: u8,
    pub perron_root: f64,
    /// per n in the input list: fraction of sampled roots with
    /// |F_{δ,γ}(v)| >= βn
    pub empirical: Vec<(usize, f64)>,
    pub beta: f64,
    pub zeta: f64,
    pub verdict: Verdict,
}

/// Sample |F_{δ,γ}(v)| at one (n, c) cell: hat instances, one uniform root
/// per trial, deterministic per-trial substreams.
pub fn forced_size_samples(
    dist: &ConstraintDistribution,
    c: f64,
    n: usize,
    trials: usize,
    delta: u8,
    gamma: u8,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let spec = GenSpec {
            dist: dist.clone(),
            n,
            c,
            flavor: Flavor::Hat,
            seed,
            trial_index: t as u64,
        };
        let inst = sample_hat(&spec)?;
        // root drawn from a separate stream so instance bits stay aligned
        let mut rng = trial_rng(seed ^ 0x726f6f74, t as u64);
        let v = rng.gen_range(0..n as u32);
        out.push(forced_set(&inst, v, delta)?.size(gamma));
    }
    Ok(out)
}

/// Combined empirical + analytic percolation verdicts for every (δ,γ).
pub fn percolation_verdict(
    dist: &ConstraintDistribution,
    c: f64,
    n_list: &[usize],
    trials: usize,
    beta: f64,
    zeta: f64,
    seed: u64,
) -> Result<Vec<PercolationReport>> {
    if n_list.is_empty() || trials == 0 {
        return Err(Error::input("need at least one n and one trial"));
    }
    if !(0.0 < beta && beta < 1.0 && 0.0 < zeta && zeta < 1.0) {
        return Err(Error::input("beta and zeta must lie in (0,1)"));
    }
    let dg = build_forcing_digraph(dist, c)?;
    let d = dist.d();
    // one pass of sampling serves every (δ,γ): collect all sizes per trial
    let mut sizes: HashMap<(u8, u8), Vec<Vec<usize>>> = HashMap::new();
    for delta in 1..=d {
        for gamma in 1..=d {
            sizes.insert((delta, gamma), vec![Vec::new(); n_list.len()]);
        }
    }
    for (ni, &n) in n_list.iter().enumerate() {
        for t in 0..trials {
            let spec = GenSpec {
                dist: dist.clone(),
                n,
                c,
                flavor: Flavor::Hat,
                seed,
                trial_index: t as u64,
            };
            let inst = sample_hat(&spec)?;
            let mut rng = trial_rng(seed ^ 0x726f6f74, t as u64);
            let v = rng.gen_range(0..n as u32);
            for delta in 1..=d {
                let fs = forced_set(&inst, v, delta)?;
                for gamma in 1..=d {
                    sizes.get_mut(&(delta, gamma)).unwrap()[ni].push(fs.size(gamma));
                }
            }
        }
    }
    let mut reports = Vec::new();
    for delta in 1..=d {
        for gamma in 1..=d {
            let root = dg.perron_root_for(delta, gamma);
            let samples = &sizes[&(delta, gamma)];
            let empirical: Vec<(usize, f64)> = n_list
                .iter()
                .zip(samples)
                .map(|(&n, s)| {
                    let thr = beta * n as f64;
                    let hits = s.iter().filter(|&&x| x as f64 >= thr).count();
                    (n, hits as f64 / s.len() as f64)
                })
                .collect();
            let emp_percolates = empirical.iter().all(|&(_, f)| f >= zeta);
            let analytic_percolates = root > 1.0;
            let verdict = if (root - 1.0).abs() <= INCONCLUSIVE_BAND
                || emp_percolates != analytic_percolates
            {
                Verdict::Inconclusive
            } else if analytic_percolates {
                Verdict::Percolates
            } else {
                Verdict::Subcritical
            };
            reports.push(PercolationReport {
                delta,
                gamma,
                perron_root: root,
                empirical,
                beta,
                zeta,
                verdict,
            });
        }
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug)]
pub struct T23Params {
    pub n_list: [usize; 3],
    pub trials: usize,
    pub beta: f64,
    pub zeta: f64,
    pub seed: u64,
}

impl Default for T23Params {
    fn default() -> Self {
        T23Params {
            n_list: [500, 1000, 2000],
            trials: 60,
            beta: DEFAULT_BETA,
            zeta: DEFAULT_ZETA,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct T23Report {
    pub delta: u8,
    /// (b): M has no satisfying assignment avoiding δ
    pub b_holds: bool,
    /// (c): F_{δ,δ} percolates and a positive fraction of roots reach βn
    pub c_holds: bool,
    pub perron_root: f64,
    pub percolation: Verdict,
    /// per n: fraction of sampled roots v with |F_{δ,δ}(v)| >= βn
    pub zn_fraction: Vec<(usize, f64)>,
}

/// Check conditions (b) and (c) of the coarse-threshold theorem for a
/// candidate obstruction M and value δ. Condition (a) — M appearing as a
/// sub-CSP with positive limiting probability — is the probe module's
/// planted-subinstance experiment and is not evaluated here.
pub fn check_t23(
    dist: &ConstraintDistribution,
    m: &Instance,
    delta: u8,
    c: f64,
    params: &T23Params,
) -> Result<T23Report> {
    if dist.d() != 3 || dist.k() != 2 {
        return Err(Error::input("check_t23 requires d=3, k=2"));
    }
    if m.d != 3 {
        return Err(Error::input("M must share the domain d=3"));
    }
    if delta == 0 || delta > 3 {
        return Err(Error::input("delta out of range"));
    }
    let comps = components(m);
    if comps.len() != 1 {
        return Err(Error::input("M must be connected"));
    }
    match classify(m, &comps[0])? {
        Classification::Tree | Classification::Unicyclic(_) => {}
        Classification::Multicyclic => {
            return Err(Error::input("M must be a tree or unicyclic"));
        }
    }
    // (b): restrict every variable to the two values other than δ
    let others: Vec<u8> = (1..=3u8).filter(|&x| x != delta).collect();
    let b_holds =
        solve_restricted(m, &ValueRestriction::Global(&others), DEFAULT_BUDGET)?.is_unsat();
    // (c): percolation of F_{δ,δ} plus the linear root count
    let reports = percolation_verdict(
        dist,
        c,
        &params.n_list,
        params.trials,
        params.beta,
        params.zeta,
        params.seed,
    )?;
    let rep = reports
        .into_iter()
        .find(|r| r.delta == delta && r.gamma == delta)
        .ok_or_else(|| Error::internal("missing percolation report"))?;
    let zn_ok = rep.empirical.iter().all(|&(_, f)| f > 0.0);
    let c_holds = rep.verdict == Verdict::Percolates && zn_ok;
    Ok(T23Report {
        delta,
        b_holds,
        c_holds,
        perron_root: rep.perron_root,
        percolation: rep.verdict,
        zn_fraction: rep.empirical,
    })
}
