//! Exact satisfiability: component decomposition, generalized arc
//! consistency over bitmask domains, and backtracking search with
//! smallest-domain-first variable order. A brute-force enumerator serves as
//! the test oracle, and homomorphism checking is the single-constraint
//! special case.

use crate::csp::{evaluate, Assignment, Eval, Instance};
use crate::models::{build_homomorphism, HypergraphH};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
    BudgetExceeded(u64),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

/// Optional restriction of the initial candidate sets.
#[derive(Clone, Debug)]
pub enum ValueRestriction<'a> {
    None,
    /// Same allowed-value subset at every variable.
    Global(&'a [u8]),
    /// One allowed-value list per variable.
    PerVar(&'a [Vec<u8>]),
}

enum Probe {
    Fail,
    AllSingleton,
    Branch(u32),
}

struct Engine<'a> {
    inst: &'a Instance,
    /// candidate-value bitmask per variable; bit (v-1) = value v allowed
    dom: Vec<u64>,
    /// allowed tuples per table constraint
    allowed: Vec<Vec<Vec<u8>>>,
    /// incident edge ids per variable
    adj: Vec<Vec<u32>>,
    trail: Vec<(u32, u64)>,
    queue: Vec<u32>,
    in_queue: Vec<bool>,
    stamp: Vec<u32>,
    epoch: u32,
    nodes: u64,
    budget: u64,
}

impl<'a> Engine<'a> {
    fn new(inst: &'a Instance, restriction: &ValueRestriction) -> Result<Self> {
        if inst.d as usize > 64 {
            return Err(Error::capacity("solver supports domains up to 64 values"));
        }
        let full: u64 = if inst.d == 64 {
            u64::MAX
        } else {
            (1u64 << inst.d) - 1
        };
        let mut dom = vec![full; inst.n];
        match restriction {
            ValueRestriction::None => {}
            ValueRestriction::Global(vals) => {
                let mask = value_mask(vals, inst.d)?;
                for m in dom.iter_mut() {
                    *m &= mask;
                }
            }
            ValueRestriction::PerVar(lists) => {
                if lists.len() != inst.n {
                    return Err(Error::input("per-variable restriction length mismatch"));
                }
                for (m, vals) in dom.iter_mut().zip(lists.iter()) {
                    *m &= value_mask(vals, inst.d)?;
                }
            }
        }
        let allowed: Vec<Vec<Vec<u8>>> = inst.table.iter().map(|c| c.allowed_tuples()).collect();
        let mut adj = vec![Vec::new(); inst.n];
        for (i, e) in inst.edges.iter().enumerate() {
            for &v in &e.vars {
                adj[v as usize].push(i as u32);
            }
        }
        Ok(Engine {
            inst,
            dom,
            allowed,
            adj,
            trail: Vec::new(),
            queue: Vec::new(),
            in_queue: vec![false; inst.edges.len()],
            stamp: vec![0; inst.n],
            epoch: 0,
            nodes: 0,
            budget: 0,
        })
    }

    fn set_dom(&mut self, v: u32, mask: u64) {
        self.trail.push((v, self.dom[v as usize]));
        self.dom[v as usize] = mask;
    }

    fn enqueue_incident(&mut self, v: u32) {
        for i in 0..self.adj[v as usize].len() {
            let e = self.adj[v as usize][i];
            if !self.in_queue[e as usize] {
                self.in_queue[e as usize] = true;
                self.queue.push(e);
            }
        }
    }

    /// Prune values at the edge's variables that no allowed tuple supports
    /// within current domains. Returns false on domain wipeout.
    fn revise(&mut self, e: u32) -> bool {
        let edge = &self.inst.edges[e as usize];
        let tuples = &self.allowed[edge.cid];
        let k = edge.vars.len();
        let mut supported = [0u64; 8];
        debug_assert!(k <= 8);
        'tuples: for t in tuples {
            for (j, &v) in edge.vars.iter().enumerate() {
                if self.dom[v as usize] & (1u64 << (t[j] - 1)) == 0 {
                    continue 'tuples;
                }
            }
            for (j, &val) in t.iter().enumerate() {
                supported[j] |= 1u64 << (val - 1);
            }
        }
        let mut changed: Vec<u32> = Vec::new();
        for (j, &v) in edge.vars.iter().enumerate() {
            let new = self.dom[v as usize] & supported[j];
            if new != self.dom[v as usize] {
                self.set_dom(v, new);
                if new == 0 {
                    return false;
                }
                changed.push(v);
            }
        }
        for v in changed {
            self.enqueue_incident(v);
        }
        true
    }

    /// Run the GAC queue to fixpoint. Returns false on wipeout.
    fn propagate(&mut self) -> bool {
        while let Some(e) = self.queue.pop() {
            self.in_queue[e as usize] = false;
            if !self.revise(e) {
                // drain so a later restart begins clean
                while let Some(x) = self.queue.pop() {
                    self.in_queue[x as usize] = false;
                }
                return false;
            }
        }
        true
    }

    fn enqueue_all(&mut self) {
        for e in 0..self.inst.edges.len() as u32 {
            if !self.in_queue[e as usize] {
                self.in_queue[e as usize] = true;
                self.queue.push(e);
            }
        }
    }

    /// Probe candidate values of undecided variables: assign, propagate,
    /// undo. A wipeout soundly prunes the value; surviving values contribute
    /// their propagation strength to the variable's branching score
    /// (product of strengths; ties to lowest index). Probing is focused on
    /// variables near recent domain changes (`dirty`) and widens to the
    /// whole component only when the local pass finds nothing to branch on.
    fn probe_and_select(&mut self, comp: &[u32], dirty: Option<&[u32]>) -> Result<Probe> {
        let mut use_all = dirty.is_none();
        let mut dirty_vec: Vec<u32> = dirty.unwrap_or(&[]).to_vec();
        loop {
            let candidates: Vec<u32> = if use_all {
                comp.to_vec()
            } else {
                self.epoch += 1;
                for &v in &dirty_vec {
                    self.stamp[v as usize] = self.epoch;
                    for i in 0..self.adj[v as usize].len() {
                        let e = self.adj[v as usize][i];
                        for &u in &self.inst.edges[e as usize].vars {
                            self.stamp[u as usize] = self.epoch;
                        }
                    }
                }
                comp.iter()
                    .copied()
                    .filter(|&v| self.stamp[v as usize] == self.epoch)
                    .collect()
            };
            let pass_mark = self.trail.len();
            let mut pruned = false;
            let mut best: Option<(u128, u32)> = None;
            for &v in &candidates {
                if self.dom[v as usize].count_ones() < 2 {
                    continue;
                }
                let mut score: u128 = 1;
                let mut bit = self.dom[v as usize];
                while bit != 0 {
                    let low = bit & bit.wrapping_neg();
                    bit ^= low;
                    self.nodes += 1;
                    if self.nodes > self.budget {
                        return Err(Error::capacity("budget"));
                    }
                    let mark = self.trail.len();
                    self.set_dom(v, low);
                    self.enqueue_incident(v);
                    let ok = self.propagate();
                    let strength = (self.trail.len() - mark) as u128;
                    while self.trail.len() > mark {
                        let (u, old) = self.trail.pop().unwrap();
                        self.dom[u as usize] = old;
                    }
                    if ok {
                        score = score.saturating_mul(strength + 1);
                    } else {
                        pruned = true;
                        let rest = self.dom[v as usize] & !low;
                        if rest == 0 {
                            return Ok(Probe::Fail);
                        }
                        self.set_dom(v, rest);
                        self.enqueue_incident(v);
                        if !self.propagate() {
                            return Ok(Probe::Fail);
                        }
                        // propagation may have dropped values we still meant
                        // to probe
                        bit &= self.dom[v as usize];
                    }
                }
                if self.dom[v as usize].count_ones() >= 2 && best.map_or(true, |(s, _)| score > s) {
                    best = Some((score, v));
                }
            }
            if pruned {
                // refocus on what the prunings touched and go again
                dirty_vec = self.trail[pass_mark..].iter().map(|&(v, _)| v).collect();
                dirty_vec.sort_unstable();
                dirty_vec.dedup();
                use_all = false;
                continue;
            }
            if let Some((_, v)) = best {
                return Ok(Probe::Branch(v));
            }
            if !use_all && comp.iter().any(|&v| self.dom[v as usize].count_ones() >= 2) {
                use_all = true;
                continue;
            }
            return Ok(Probe::AllSingleton);
        }
    }

    /// Backtracking search over one component's variables. Domains are
    /// already GAC at entry; leaves them fixed to a solution on success.
    /// Value prunings discovered by probing stay on the trail, so the
    /// caller's undo point covers them. `dirty` lists the variables whose
    /// domains changed since the parent node (None = probe everything).
    fn search(&mut self, comp: &[u32], dirty: Option<&[u32]>) -> Result<bool> {
        let v = match self.probe_and_select(comp, dirty)? {
            Probe::Fail => return Ok(false),
            Probe::AllSingleton => return Ok(true),
            Probe::Branch(v) => v,
        };
        let candidates = self.dom[v as usize];
        let mut bit = candidates;
        while bit != 0 {
            let low = bit & bit.wrapping_neg();
            bit ^= low;
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::capacity("budget"));
            }
            let mark = self.trail.len();
            self.set_dom(v, low);
            self.enqueue_incident(v);
            if self.propagate() {
                let mut changed: Vec<u32> = self.trail[mark..].iter().map(|&(u, _)| u).collect();
                changed.sort_unstable();
                changed.dedup();
                if self.search(comp, Some(&changed))? {
                    return Ok(true);
                }
            }
            while self.trail.len() > mark {
                let (u, old) = self.trail.pop().unwrap();
                self.dom[u as usize] = old;
            }
        }
        Ok(false)
    }
}

fn value_mask(vals: &[u8], d: u8) -> Result<u64> {
    let mut mask = 0u64;
    for &v in vals {
        if v < 1 || v > d {
            return Err(Error::input(format!("restricted value {v} out of domain")));
        }
        mask |= 1u64 << (v - 1);
    }
    Ok(mask)
}

fn components(inst: &Instance) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); inst.n];
    for (i, e) in inst.edges.iter().enumerate() {
        for &v in &e.vars {
            adj[v as usize].push(i as u32);
        }
    }
    let mut comp = vec![usize::MAX; inst.n];
    let mut out: Vec<Vec<u32>> = Vec::new();
    for start in 0..inst.n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start as u32];
        comp[start] = id;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &e in &adj[v as usize] {
                for &u in &inst.edges[e as usize].vars {
                    if comp[u as usize] == usize::MAX {
                        comp[u as usize] = id;
                        stack.push(u);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

pub fn solve(inst: &Instance, budget: u64) -> Result<SolveResult> {
    solve_restricted(inst, &ValueRestriction::None, budget)
}

pub fn solve_restricted(
    inst: &Instance,
    restriction: &ValueRestriction,
    budget: u64,
) -> Result<SolveResult> {
    Ok(solve_counted(inst, restriction, budget)?.0)
}

/// Like `solve_restricted` but also reports the node count (value probes
/// and branch decisions).
pub fn solve_counted(
    inst: &Instance,
    restriction: &ValueRestriction,
    budget: u64,
) -> Result<(SolveResult, u64)> {
    inst.validate_with_repeats(true)?;
    let mut eng = Engine::new(inst, restriction)?;
    eng.budget = budget;
    for m in &eng.dom {
        if *m == 0 {
            return Ok((SolveResult::Unsat, 0));
        }
    }
    eng.enqueue_all();
    if !eng.propagate() {
        return Ok((SolveResult::Unsat, 0));
    }
    for comp in components(inst) {
        match eng.search(&comp, None) {
            Ok(true) => {}
            Ok(false) => return Ok((SolveResult::Unsat, eng.nodes)),
            Err(Error::Capacity(msg)) if msg == "budget" => {
                return Ok((SolveResult::BudgetExceeded(eng.nodes), eng.nodes))
            }
            Err(e) => return Err(e),
        }
    }
    let mut a = Assignment::unassigned(inst.n);
    for v in 0..inst.n {
        debug_assert_eq!(eng.dom[v].count_ones(), 1);
        a.set(v, eng.dom[v].trailing_zeros() as u8 + 1);
    }
    match evaluate(inst, &a)? {
        Eval::Satisfied => Ok((SolveResult::Sat(a), eng.nodes)),
        Eval::Violated(e) => Err(Error::internal(format!(
            "solver produced assignment violating edge {e}"
        ))),
    }
}

/// Exhaustive oracle: first satisfying assignment in lexicographic order.
pub fn brute_force(inst: &Instance) -> Result<SolveResult> {
    inst.validate_with_repeats(true)?;
    let count = (inst.d as f64).powi(inst.n as i32);
    if count > 1e7 {
        return Err(Error::capacity("brute force limited to d^n <= 10^7"));
    }
    let mut a = Assignment::from_values(vec![1; inst.n]);
    loop {
        if evaluate(inst, &a)? == Eval::Satisfied {
            return Ok(SolveResult::Sat(a));
        }
        // next assignment in lexicographic order: last position fastest
        let mut i = inst.n;
        loop {
            if i == 0 {
                return Ok(SolveResult::Unsat);
            }
            i -= 1;
            let v = a.get(i).unwrap();
            if v < inst.d {
                a.set(i, v + 1);
                break;
            }
            a.set(i, 1);
        }
    }
}

/// Decide G -> H homomorphism; returns the 1-based vertex mapping if any.
pub fn homomorphic(g: &HypergraphH, h: &HypergraphH) -> Result<Option<Vec<u32>>> {
    if g.k != h.k {
        return Err(Error::input("arity mismatch between G and H"));
    }
    let dist = build_homomorphism(h)?;
    let table = vec![dist.constraint(0).clone()];
    let edges = g
        .edges
        .iter()
        .map(|e| crate::csp::CEdge {
            vars: e.iter().map(|&v| v - 1).collect(),
            cid: 0,
        })
        .collect();
    let inst = Instance {
        n: g.vertex_count,
        d: dist.d(),
        k: dist.k(),
        table,
        edges,
        flavor: crate::csp::Flavor::Hat,
    };
    inst.validate_with_repeats(true)?;
    match solve(&inst, DEFAULT_BUDGET)? {
        SolveResult::Sat(a) => {
            let mapping: Vec<u32> = a.values().iter().map(|&v| v as u32).collect();
            for e in &g.edges {
                let img: Vec<u8> = e.iter().map(|&v| mapping[v as usize - 1] as u8).collect();
                if !dist.constraint(0).allows(&img) {
                    return Err(Error::internal("homomorphism witness fails edge check"));
                }
            }
            Ok(Some(mapping))
        }
        SolveResult::Unsat => Ok(None),
        SolveResult::BudgetExceeded(n) => Err(Error::capacity(format!(
            "homomorphism search hit budget at {n} nodes"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{CEdge, Constraint, Flavor};
    use crate::models::{build_paper_ed3, parse_model};
    use crate::sampler::{sample_plain, GenSpec};

    fn triangle_2col() -> Instance {
        let diseq =
            Constraint::from_restrictions(2, 2, [[1u8, 1], [2, 2]].iter().map(|t| &t[..])).unwrap();
        Instance::new(
            3,
            2,
            2,
            vec![diseq],
            vec![
                CEdge {
                    vars: vec![0, 1],
                    cid: 0,
                },
                CEdge {
                    vars: vec![1, 2],
                    cid: 0,
                },
                CEdge {
                    vars: vec![0, 2],
                    cid: 0,
                },
            ],
            Flavor::Plain,
        )
        .unwrap()
    }

    #[test]
    fn empty_instance_sat_all_ones() {
        let inst = Instance::trivial(4, 3, 2, Flavor::Plain);
        match solve(&inst, 1000).unwrap() {
            SolveResult::Sat(a) => assert_eq!(a.values(), &[1, 1, 1, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_cycle_two_coloring_unsat() {
        assert!(solve(&triangle_2col(), 1000).unwrap().is_unsat());
        assert!(brute_force(&triangle_2col()).unwrap().is_unsat());
    }

    #[test]
    fn brute_force_unary_cases() {
        let forbid1 = Constraint::from_restrictions(2, 1, [[1u8]].iter().map(|t| &t[..])).unwrap();
        let forbid2 = Constraint::from_restrictions(2, 1, [[2u8]].iter().map(|t| &t[..])).unwrap();
        let sat = Instance::new(
            1,
            2,
            1,
            vec![forbid1.clone()],
            vec![CEdge {
                vars: vec![0],
                cid: 0,
            }],
            Flavor::Hat,
        )
        .unwrap();
        match brute_force(&sat).unwrap() {
            SolveResult::Sat(a) => assert_eq!(a.values(), &[2]),
            other => panic!("{other:?}"),
        }
        let unsat = Instance::new(
            1,
            2,
            1,
            vec![forbid1, forbid2],
            vec![
                CEdge {
                    vars: vec![0],
                    cid: 0,
                },
                CEdge {
                    vars: vec![0],
                    cid: 1,
                },
            ],
            Flavor::Hat,
        )
        .unwrap();
        assert!(brute_force(&unsat).unwrap().is_unsat());
    }

    #[test]
    fn agrees_with_brute_force_on_random_ed3() {
        for t in 0..1000 {
            let spec = GenSpec {
                dist: build_paper_ed3(),
                n: 8,
                c: 2.5,
                flavor: Flavor::Plain,
                seed: 99,
                trial_index: t,
            };
            let inst = sample_plain(&spec).unwrap();
            let fast = solve(&inst, DEFAULT_BUDGET).unwrap();
            let slow = brute_force(&inst).unwrap();
            assert_eq!(fast.is_sat(), slow.is_sat(), "trial {t}");
            if let SolveResult::Sat(a) = fast {
                assert_eq!(evaluate(&inst, &a).unwrap(), Eval::Satisfied);
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_random_3sat() {
        let dist = parse_model("dkt:2,3,1").unwrap();
        for t in 0..500 {
            let spec = GenSpec {
                dist: dist.clone(),
                n: 10,
                c: 4.5,
                flavor: Flavor::Plain,
                seed: 101,
                trial_index: t,
            };
            let inst = sample_plain(&spec).unwrap();
            assert_eq!(
                solve(&inst, DEFAULT_BUDGET).unwrap().is_sat(),
                brute_force(&inst).unwrap().is_sat(),
                "trial {t}"
            );
        }
    }

    #[test]
    fn restricted_solving() {
        // ed3's C2 (disequality) triangle: sat over all 3 values,
        // unsat restricted to {2,3} (odd cycle on two values)
        let c2 = build_paper_ed3().constraint(1).clone();
        let tri = Instance::new(
            3,
            3,
            2,
            vec![c2],
            vec![
                CEdge {
                    vars: vec![0, 1],
                    cid: 0,
                },
                CEdge {
                    vars: vec![1, 2],
                    cid: 0,
                },
                CEdge {
                    vars: vec![0, 2],
                    cid: 0,
                },
            ],
            Flavor::Plain,
        )
        .unwrap();
        assert!(solve(&tri, 1000).unwrap().is_sat());
        assert!(
            solve_restricted(&tri, &ValueRestriction::Global(&[2, 3]), 1000)
                .unwrap()
                .is_unsat()
        );
        // full-domain restriction identical to solve
        let full = solve_restricted(&tri, &ValueRestriction::Global(&[1, 2, 3]), 1000).unwrap();
        assert_eq!(full, solve(&tri, 1000).unwrap());
    }

    #[test]
    fn component_independence() {
        // two disjoint triangles, one 2-colorable (even cycle is), one not
        let diseq =
            Constraint::from_restrictions(2, 2, [[1u8, 1], [2, 2]].iter().map(|t| &t[..])).unwrap();
        let inst = Instance::new(
            7,
            2,
            2,
            vec![diseq],
            vec![
                // square on 0..4: satisfiable
                CEdge {
                    vars: vec![0, 1],
                    cid: 0,
                },
                CEdge {
                    vars: vec![1, 2],
                    cid: 0,
                },
                CEdge {
                    vars: vec![2, 3],
                    cid: 0,
                },
                CEdge {
                    vars: vec![3, 0],
                    cid: 0,
                },
                // triangle on 4..7: unsat
                CEdge {
                    vars: vec![4, 5],
                    cid: 0,
                },
                CEdge {
                    vars: vec![5, 6],
                    cid: 0,
                },
                CEdge {
                    vars: vec![4, 6],
                    cid: 0,
                },
            ],
            Flavor::Plain,
        )
        .unwrap();
        assert!(solve(&inst, 1000).unwrap().is_unsat());
    }

    #[test]
    fn budget_exceeded_is_explicit() {
        let dist = parse_model("dkt:2,3,1").unwrap();
        let spec = GenSpec {
            dist,
            n: 60,
            c: 4.3,
            flavor: Flavor::Plain,
            seed: 5,
            trial_index: 0,
        };
        let inst = sample_plain(&spec).unwrap();
        match solve(&inst, 1).unwrap() {
            SolveResult::BudgetExceeded(n) => assert!(n >= 1),
            // tiny chance propagation alone decides it; accept that too
            other => assert!(other.is_sat() || other.is_unsat()),
        }
    }

    #[test]
    fn homomorphism_basics() {
        // any cycle -> triangle
        for len in [3usize, 4, 5, 7, 10] {
            assert!(
                homomorphic(&HypergraphH::cycle(len), &HypergraphH::complete(3))
                    .unwrap()
                    .is_some()
            );
        }
        // triangle -> C5: no
        assert!(homomorphic(&HypergraphH::cycle(3), &HypergraphH::cycle(5))
            .unwrap()
            .is_none());
        // edgeless G: yes
        let g = HypergraphH::new(4, 2, vec![], true).unwrap();
        let h = HypergraphH::complete(2);
        assert_eq!(homomorphic(&g, &h).unwrap().unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn monotone_under_edge_addition() {
        let mut inst = triangle_2col();
        assert!(solve(&inst, 1000).unwrap().is_unsat());
        inst.n = 4;
        inst.edges.push(CEdge {
            vars: vec![2, 3],
            cid: 0,
        });
        assert!(solve(&inst, 1000).unwrap().is_unsat());
    }
}
