//! Random instance generation: the plain and hat sparse models, planting
//! operations, and the random digraph model. Everything is deterministic
//! given (seed, trialIndex) and uses geometric skip-sampling so that work is
//! proportional to the number of edges produced, never to the number of
//! potential edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::csp::{CEdge, Constraint, ConstraintDistribution, Flavor, Instance};
use crate::models::HypergraphH;
use crate::{Error, Result};

/// Everything that pins down one random instance.
#[derive(Clone, Debug)]
pub struct GenSpec {
    pub dist: ConstraintDistribution,
    pub n: usize,
    pub c: f64,
    pub flavor: Flavor,
    pub seed: u64,
    pub trial_index: u64,
}

impl GenSpec {
    /// Per-edge probability p = c / n^{k-1}; validates the spec.
    pub fn p(&self) -> Result<f64> {
        if self.n < self.dist.k() as usize {
            return Err(Error::input(format!(
                "n={} smaller than arity k={}",
                self.n,
                self.dist.k()
            )));
        }
        if !self.c.is_finite() || self.c < 0.0 {
            return Err(Error::input(format!(
                "density c={} must be finite and >= 0",
                self.c
            )));
        }
        let p = self.c / (self.n as f64).powi(self.dist.k() as i32 - 1);
        if p > 1.0 {
            return Err(Error::input(format!("p = c/n^(k-1) = {p} exceeds 1")));
        }
        Ok(p)
    }
}

/// Per-trial substream of the master seed. ChaCha streams are independent,
/// so trials can run concurrently and still merge deterministically.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn binom(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::capacity("binomial overflow"))?
            / (i + 1) as u128;
    }
    Ok(acc)
}

fn falling(n: usize, k: usize) -> Result<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::capacity("arrangement count overflow"))?;
    }
    Ok(acc)
}

/// Emits the indices of a Bernoulli(p) subset of 0..total in increasing
/// order, drawing one geometric gap per emitted index.
struct SkipSampler {
    next: u128,
    total: u128,
    ln_one_minus_p: f64,
    primed: bool,
}

impl SkipSampler {
    fn new(p: f64, total: u128) -> Self {
        let ln_one_minus_p = if p >= 1.0 {
            f64::NEG_INFINITY
        } else {
            (1.0 - p).ln()
        };
        SkipSampler {
            next: 0,
            total: if p <= 0.0 { 0 } else { total },
            ln_one_minus_p,
            primed: false,
        }
    }

    fn next_index(&mut self, rng: &mut impl Rng) -> Option<u128> {
        if !self.primed {
            self.primed = true;
        } else {
            self.next += 1;
        }
        if self.next >= self.total {
            return None;
        }
        // gap ~ Geometric(p): floor(ln(1-U)/ln(1-p)), U uniform on [0,1)
        let gap = if self.ln_one_minus_p == f64::NEG_INFINITY {
            0.0
        } else {
            (1.0 - rng.gen::<f64>()).ln() / self.ln_one_minus_p
        };
        if gap >= (self.total - self.next) as f64 {
            self.next = self.total;
            return None;
        }
        self.next += gap as u128;
        Some(self.next)
    }
}

/// Lexicographic unranking of a k-subset of {0..n-1} (combinatorial number
/// system).
fn unrank_subset(mut rank: u128, n: usize, k: usize) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0usize;
    let mut rem = k;
    while rem > 0 {
        let with_x = binom(n - x - 1, rem - 1)?;
        if rank < with_x {
            out.push(x as u32);
            rem -= 1;
        } else {
            rank -= with_x;
        }
        x += 1;
        if x > n {
            return Err(Error::internal("subset unrank walked off the end"));
        }
    }
    Ok(out)
}

/// Unranking of an ordered k-arrangement of {0..n-1}: mixed-radix digits
/// with radices n, n-1, ..., each digit selecting among the unused elements.
fn unrank_arrangement(mut rank: u128, n: usize, k: usize) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(k);
    let mut radix_total: u128 = falling(n, k).unwrap();
    for i in 0..k {
        radix_total /= (n - i) as u128;
        let digit = (rank / radix_total) as u32;
        rank %= radix_total;
        // digit-th smallest element not yet used
        let mut val = digit;
        let mut sorted: Vec<u32> = out.clone();
        sorted.sort_unstable();
        for &u in &sorted {
            if val >= u {
                val += 1;
            }
        }
        out.push(val);
    }
    out
}

fn sample_cid(dist: &ConstraintDistribution, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, (_, w)) in dist.entries().iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    dist.support_size() - 1
}

/// The plain model: each unordered k-set appears with probability p; a
/// present edge gets a uniform ordering of its variables and an independent
/// P-distributed constraint.
pub fn sample_plain(spec: &GenSpec) -> Result<Instance> {
    if spec.flavor != Flavor::Plain {
        return Err(Error::input("sample_plain requires plain flavor"));
    }
    let p = spec.p()?;
    let k = spec.dist.k() as usize;
    let mut rng = trial_rng(spec.seed, spec.trial_index);
    let total = binom(spec.n, k)?;
    let table: Vec<Constraint> = spec.dist.entries().iter().map(|(c, _)| c.clone()).collect();
    let mut edges = Vec::new();
    let mut skip = SkipSampler::new(p, total);
    while let Some(rank) = skip.next_index(&mut rng) {
        let mut vars = unrank_subset(rank, spec.n, k)?;
        // uniform ordering via Fisher-Yates
        for i in (1..k).rev() {
            let j = rng.gen_range(0..=i);
            vars.swap(i, j);
        }
        let cid = sample_cid(&spec.dist, &mut rng);
        edges.push(CEdge { vars, cid });
    }
    let inst = Instance {
        n: spec.n,
        d: spec.dist.d(),
        k: spec.dist.k(),
        table,
        edges,
        flavor: Flavor::Plain,
    };
    debug_assert!(inst.validate().is_ok());
    Ok(inst)
}

/// The hat model: every (ordered k-tuple, support constraint) pair appears
/// independently with probability P(C) * p / k!. Duplicate tuples are legal.
pub fn sample_hat(spec: &GenSpec) -> Result<Instance> {
    if spec.flavor != Flavor::Hat {
        return Err(Error::input("sample_hat requires hat flavor"));
    }
    let p = spec.p()?;
    let k = spec.dist.k() as usize;
    let kfact: f64 = (1..=k).map(|i| i as f64).product();
    let mut rng = trial_rng(spec.seed, spec.trial_index);
    let total = falling(spec.n, k)?;
    let table: Vec<Constraint> = spec.dist.entries().iter().map(|(c, _)| c.clone()).collect();
    let mut edges = Vec::new();
    for (cid, (_, w)) in spec.dist.entries().iter().enumerate() {
        let q = w * p / kfact;
        if q > 1.0 {
            return Err(Error::input(format!("per-tuple rate {q} exceeds 1")));
        }
        let mut skip = SkipSampler::new(q, total);
        while let Some(rank) = skip.next_index(&mut rng) {
            let vars = unrank_arrangement(rank, spec.n, k);
            edges.push(CEdge { vars, cid });
        }
    }
    let inst = Instance {
        n: spec.n,
        d: spec.dist.d(),
        k: spec.dist.k(),
        table,
        edges,
        flavor: Flavor::Hat,
    };
    debug_assert!(inst.validate().is_ok());
    Ok(inst)
}

/// Adds M on a uniformly random injective placement of its variables into
/// the host's variables. The result is hat-flavored since tuple collisions
/// with existing edges are possible.
pub fn plant_sub_csp(inst: &Instance, m: &Instance, rng: &mut impl Rng) -> Result<Instance> {
    if m.n > inst.n {
        return Err(Error::input(
            "planted instance has more variables than host",
        ));
    }
    if m.d != inst.d {
        return Err(Error::input("planted instance domain mismatch"));
    }
    if m.k > inst.k {
        return Err(Error::input("planted instance arity exceeds host arity"));
    }
    let map = rand::seq::index::sample(rng, inst.n, m.n);
    let mut out = inst.clone();
    out.flavor = Flavor::Hat;
    let offset = out.table.len();
    out.table.extend(m.table.iter().cloned());
    for e in &m.edges {
        out.edges.push(CEdge {
            vars: e
                .vars
                .iter()
                .map(|&v| map.index(v as usize) as u32)
                .collect(),
            cid: offset + e.cid,
        });
    }
    out.validate()?;
    Ok(out)
}

/// Pins a uniformly random ordered tuple of distinct variables to the given
/// values by adding one unary constraint per pinned variable.
pub fn plant_assignment(inst: &Instance, values: &[u8], rng: &mut impl Rng) -> Result<Instance> {
    if values.len() > inst.n {
        return Err(Error::input("more pinned values than variables"));
    }
    for &a in values {
        if a < 1 || a > inst.d {
            return Err(Error::input(format!("pinned value {a} out of domain")));
        }
    }
    let vars = rand::seq::index::sample(rng, inst.n, values.len());
    let mut out = inst.clone();
    out.flavor = Flavor::Hat;
    for (i, &a) in values.iter().enumerate() {
        let restrictions: Vec<Vec<u8>> =
            (1..=inst.d).filter(|&b| b != a).map(|b| vec![b]).collect();
        let pin =
            Constraint::from_restrictions(inst.d, 1, restrictions.iter().map(|t| t.as_slice()))?;
        let cid = out.table.len();
        out.table.push(pin);
        out.edges.push(CEdge {
            vars: vec![vars.index(i) as u32],
            cid,
        });
    }
    out.validate()?;
    Ok(out)
}

/// Random digraph: each of the n(n-1) ordered pairs present with
/// probability p. Vertices are 1-based in the result.
pub fn sample_digraph(n: usize, p: f64, seed: u64) -> Result<HypergraphH> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("p={p} out of [0,1]")));
    }
    let mut rng = trial_rng(seed, 0);
    let total = (n as u128) * (n as u128 - 1).max(0);
    let mut edges = Vec::new();
    let mut skip = SkipSampler::new(p, total);
    while let Some(rank) = skip.next_index(&mut rng) {
        let a = (rank / (n as u128 - 1)) as u32;
        let r = (rank % (n as u128 - 1)) as u32;
        let b = if r >= a { r + 1 } else { r };
        edges.push(vec![a + 1, b + 1]);
    }
    HypergraphH::new(n, 2, edges, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::write_instance;
    use crate::models::{build_homomorphism, build_paper_ed3, HypergraphH};

    fn diseq(d: u8) -> ConstraintDistribution {
        build_homomorphism(&HypergraphH::complete(d as usize)).unwrap()
    }

    fn spec(
        dist: ConstraintDistribution,
        n: usize,
        c: f64,
        flavor: Flavor,
        seed: u64,
        t: u64,
    ) -> GenSpec {
        GenSpec {
            dist,
            n,
            c,
            flavor,
            seed,
            trial_index: t,
        }
    }

    #[test]
    fn plain_determinism_and_invariants() {
        let s = spec(build_paper_ed3(), 200, 2.0, Flavor::Plain, 42, 3);
        let a = sample_plain(&s).unwrap();
        let b = sample_plain(&s).unwrap();
        assert_eq!(write_instance(&a), write_instance(&b));
        a.validate().unwrap();
        let mut s2 = s.clone();
        s2.trial_index = 4;
        let c = sample_plain(&s2).unwrap();
        assert_ne!(write_instance(&a), write_instance(&c));
    }

    #[test]
    fn plain_zero_density_is_empty() {
        let s = spec(build_paper_ed3(), 50, 0.0, Flavor::Plain, 1, 0);
        assert_eq!(sample_plain(&s).unwrap().num_edges(), 0);
    }

    #[test]
    fn plain_edge_count_concentrates() {
        // d=2 k=2 disequality, n=1000, c=1: mean C(n,2)p = (n-1)/2
        let n = 1000;
        let trials = 50;
        let mut total = 0usize;
        for t in 0..trials {
            let s = spec(diseq(2), n, 1.0, Flavor::Plain, 7, t);
            total += sample_plain(&s).unwrap().num_edges();
        }
        let mean = total as f64 / trials as f64;
        let expect = (n as f64 - 1.0) / 2.0;
        let p = 1.0 / n as f64;
        let sigma = (expect * (1.0 - p)).sqrt() / (trials as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * sigma,
            "mean {mean} vs {expect} (sigma {sigma})"
        );
    }

    #[test]
    fn hat_edge_count_matches_plain_expectation() {
        // expected hat edges = n(n-1)...(n-k+1) p / k! = C(n,k) p
        let n = 1000;
        let trials = 50;
        let mut total = 0usize;
        for t in 0..trials {
            let s = spec(build_paper_ed3(), n, 1.5, Flavor::Hat, 11, t);
            total += sample_hat(&s).unwrap().num_edges();
        }
        let mean = total as f64 / trials as f64;
        let expect = 1.5 * (n as f64 - 1.0) / 2.0;
        let sigma = expect.sqrt() / (trials as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * sigma,
            "mean {mean} vs {expect} (sigma {sigma})"
        );
    }

    #[test]
    fn hat_allows_duplicate_tuples_plain_never_has_them() {
        let mut dup_seen = false;
        for t in 0..200 {
            let s = spec(diseq(2), 60, 2.5, Flavor::Hat, 5, t);
            let inst = sample_hat(&s).unwrap();
            let mut sets: Vec<Vec<u32>> = inst
                .edges
                .iter()
                .map(|e| {
                    let mut v = e.vars.clone();
                    v.sort_unstable();
                    v
                })
                .collect();
            sets.sort();
            let before = sets.len();
            sets.dedup();
            if sets.len() < before {
                dup_seen = true;
                break;
            }
        }
        assert!(dup_seen, "no duplicate tuple in 200 hat samples at n=60");
    }

    #[test]
    fn constraint_frequencies_match_weights() {
        // ed3 weights 2/3, 1/3; chi-square with 1 dof, p > 0.001 <=> x < 10.83
        let mut counts = [0usize; 2];
        for t in 0..10 {
            let s = spec(build_paper_ed3(), 2000, 3.0, Flavor::Plain, 13, t);
            for e in sample_plain(&s).unwrap().edges {
                counts[e.cid] += 1;
            }
        }
        let total = (counts[0] + counts[1]) as f64;
        assert!(total > 10_000.0);
        let exp = [total * 2.0 / 3.0, total / 3.0];
        let chi2: f64 = (0..2)
            .map(|i| (counts[i] as f64 - exp[i]).powi(2) / exp[i])
            .sum();
        assert!(chi2 < 10.83, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn permutation_uniformity() {
        // symmetric constraint => position-1 value marginal must be uniform
        let mut counts = [0usize; 3];
        for t in 0..10 {
            let s = spec(diseq(3), 2000, 3.0, Flavor::Plain, 17, t);
            let inst = sample_plain(&s).unwrap();
            for e in inst.edges {
                counts[e.vars[0] as usize % 3] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        let exp = total as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - exp).powi(2) / exp).sum();
        // 2 dof, p > 0.001 <=> chi2 < 13.82
        assert!(chi2 < 13.82, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn p_validation() {
        let s = spec(diseq(2), 10, 11.0, Flavor::Plain, 1, 0);
        assert!(s.p().is_err()); // p = 1.1 > 1
        let s = spec(diseq(2), 1, 0.5, Flavor::Plain, 1, 0);
        assert!(s.p().is_err()); // n < k
    }

    #[test]
    fn plant_empty_only_changes_flavor() {
        let s = spec(build_paper_ed3(), 40, 2.0, Flavor::Plain, 3, 0);
        let host = sample_plain(&s).unwrap();
        let empty = Instance::trivial(0, 3, 2, Flavor::Plain);
        let mut rng = trial_rng(9, 0);
        let out = plant_sub_csp(&host, &empty, &mut rng).unwrap();
        assert_eq!(out.flavor, Flavor::Hat);
        assert_eq!(out.edges, host.edges);
        assert_eq!(out.table, host.table);
    }

    #[test]
    fn plant_full_relabels_injectively() {
        let m_spec = spec(diseq(2), 12, 1.5, Flavor::Plain, 21, 0);
        let m = sample_plain(&m_spec).unwrap();
        let host = Instance::trivial(12, 2, 2, Flavor::Plain);
        let mut rng = trial_rng(22, 0);
        let out = plant_sub_csp(&host, &m, &mut rng).unwrap();
        assert_eq!(out.num_edges(), m.num_edges());
        // the variable map is a permutation of 0..12
        let mut seen = vec![false; 12];
        for (a, b) in out.edges.iter().zip(m.edges.iter()) {
            assert_eq!(out.table[a.cid], m.table[b.cid]);
            for &v in &a.vars {
                seen[v as usize] = true;
            }
        }
        let used_in_m: usize = {
            let mut s = vec![false; 12];
            for e in &m.edges {
                for &v in &e.vars {
                    s[v as usize] = true;
                }
            }
            s.iter().filter(|&&x| x).count()
        };
        assert_eq!(seen.iter().filter(|&&x| x).count(), used_in_m);
    }

    #[test]
    fn plant_assignment_pins_values() {
        let inst = Instance::trivial(5, 3, 2, Flavor::Plain);
        let mut rng = trial_rng(31, 0);
        let out = plant_assignment(&inst, &[2, 3], &mut rng).unwrap();
        assert_eq!(out.num_edges(), 2);
        for (e, &want) in out.edges.iter().zip([2u8, 3].iter()) {
            let c = &out.table[e.cid];
            assert_eq!(c.k(), 1);
            assert!(c.allows(&[want]));
            for b in 1..=3u8 {
                if b != want {
                    assert!(!c.allows(&[b]));
                }
            }
        }
        // pinned variables are distinct
        assert_ne!(out.edges[0].vars, out.edges[1].vars);
        // r=0 leaves the instance unchanged apart from flavor
        let same = plant_assignment(&inst, &[], &mut rng).unwrap();
        assert_eq!(same.edges, inst.edges);
    }

    #[test]
    fn digraph_count_and_trivia() {
        assert_eq!(sample_digraph(100, 0.0, 1).unwrap().edges.len(), 0);
        let n = 500;
        let p = 1.0 / n as f64;
        let trials = 40;
        let mut total = 0usize;
        for s in 0..trials {
            total += sample_digraph(n, p, s).unwrap().edges.len();
        }
        let mean = total as f64 / trials as f64;
        let expect = (n * (n - 1)) as f64 * p;
        let sigma = expect.sqrt() / (trials as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * sigma);
        // all edges are valid ordered pairs
        let g = sample_digraph(50, 0.05, 77).unwrap();
        for e in &g.edges {
            assert_ne!(e[0], e[1]);
            assert!(e[0] >= 1 && e[0] as usize <= 50);
        }
    }

    #[test]
    fn unrank_subset_enumerates_lexicographically() {
        let total = binom(6, 3).unwrap();
        let mut prev: Option<Vec<u32>> = None;
        for r in 0..total {
            let s = unrank_subset(r, 6, 3).unwrap();
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            if let Some(p) = prev {
                assert!(p < s);
            }
            prev = Some(s);
        }
    }

    #[test]
    fn unrank_arrangement_is_a_bijection() {
        let total = falling(5, 3).unwrap();
        let mut seen = std::collections::HashSet::new();
        for r in 0..total {
            let a = unrank_arrangement(r, 5, 3);
            assert_eq!(a.len(), 3);
            let mut s = a.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 3);
            assert!(seen.insert(a));
        }
        assert_eq!(seen.len(), total as usize);
    }
}
