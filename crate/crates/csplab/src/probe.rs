//! Monte Carlo threshold estimation: P_sat grids with Wilson intervals,
//! monotone (isotonic) curve fits, crossing/width extraction, adaptive
//! threshold location, the sharpening diagnostic, and the s3 reduction
//! consistency experiment.

use crate::csp::{CEdge, ConstraintDistribution, Flavor, Instance};
use crate::models::{build_coloring, build_paper_s3, s3_case_boundary};
use crate::sampler::{sample_hat, sample_plain, GenSpec};
use crate::solver::{solve, SolveResult};
use crate::{Error, Result};
use rayon::prelude::*;

/// z for a 95% interval.
const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (Z95 / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub sat: usize,
    pub unsat: usize,
    pub budget_exceeded: usize,
    /// estimate over decided trials only; None when every trial blew the
    /// budget
    pub phat: Option<f64>,
    pub lo95: f64,
    pub hi95: f64,
    /// more than 10% of trials exceeded the budget
    pub unreliable: bool,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Crossing {
    At(f64),
    BelowGrid,
    AboveGrid,
}

#[derive(Clone, Debug)]
pub struct NSummary {
    pub n: usize,
    pub c_half: Crossing,
    /// [lo, hi] band for the 0.5 crossing from the Wilson envelopes
    pub c_half_band: Option<(f64, f64)>,
    /// width = c(P=0.25) - c(P=0.75); None if either quantile leaves the grid
    pub width: Option<f64>,
    pub width_band: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ThresholdCurve {
    pub model: String,
    pub flavor: Flavor,
    pub n_list: Vec<usize>,
    pub c_grid: Vec<f64>,
    /// row-major: cells[ni * c_grid.len() + ci]
    pub cells: Vec<Cell>,
}

/// Pool-adjacent-violators fit of a non-increasing sequence (weighted).
pub fn pava_nonincreasing(ys: &[f64], ws: &[f64]) -> Vec<f64> {
    // fit non-decreasing on the reversed sequence
    let mut blocks: Vec<(f64, f64)> = Vec::new(); // (mean, weight)
    for i in (0..ys.len()).rev() {
        blocks.push((ys[i], ws[i].max(1e-12)));
        while blocks.len() >= 2 {
            let (m2, w2) = blocks[blocks.len() - 1];
            let (m1, w1) = blocks[blocks.len() - 2];
            if m2 >= m1 {
                break;
            }
            blocks.pop();
            blocks.pop();
            blocks.push(((m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2));
        }
    }
    // expand back, then un-reverse
    let mut out = Vec::with_capacity(ys.len());
    let mut bi = 0;
    let mut used = 0.0f64;
    for i in (0..ys.len()).rev() {
        out.push(blocks[bi].0);
        used += ws[i].max(1e-12);
        if used >= blocks[bi].1 - 1e-9 {
            bi += 1;
            used = 0.0;
        }
    }
    out.reverse();
    out
}

/// Where a non-increasing curve sampled at `xs` crosses `level`, by linear
/// interpolation.
fn crossing(xs: &[f64], fitted: &[f64], level: f64) -> Crossing {
    if fitted[0] < level {
        return Crossing::BelowGrid;
    }
    if *fitted.last().unwrap() > level {
        return Crossing::AboveGrid;
    }
    for i in 0..fitted.len() - 1 {
        let (a, b) = (fitted[i], fitted[i + 1]);
        if a >= level && b <= level {
            if (a - b).abs() < 1e-12 {
                return Crossing::At((xs[i] + xs[i + 1]) / 2.0);
            }
            let t = (a - level) / (a - b);
            return Crossing::At(xs[i] + t * (xs[i + 1] - xs[i]));
        }
    }
    Crossing::At(*xs.last().unwrap())
}

impl ThresholdCurve {
    pub fn cell(&self, ni: usize, ci: usize) -> &Cell {
        &self.cells[ni * self.c_grid.len() + ci]
    }

    fn row(&self, ni: usize) -> &[Cell] {
        &self.cells[ni * self.c_grid.len()..(ni + 1) * self.c_grid.len()]
    }

    /// Per-n crossing and width summary from monotone fits of the point
    /// estimates and of the Wilson envelopes.
    pub fn summary(&self, ni: usize) -> NSummary {
        let row = self.row(ni);
        let ws: Vec<f64> = row.iter().map(|c| (c.sat + c.unsat) as f64).collect();
        let phat: Vec<f64> = row.iter().map(|c| c.phat.unwrap_or(0.5)).collect();
        let lo: Vec<f64> = row.iter().map(|c| c.lo95).collect();
        let hi: Vec<f64> = row.iter().map(|c| c.hi95).collect();
        let fit = pava_nonincreasing(&phat, &ws);
        let fit_lo = pava_nonincreasing(&lo, &ws);
        let fit_hi = pava_nonincreasing(&hi, &ws);
        let c_half = crossing(&self.c_grid, &fit, 0.5);
        let band = |level: f64| -> Option<(f64, f64)> {
            // the lower envelope crosses earlier (P decreasing in c)
            match (
                crossing(&self.c_grid, &fit_lo, level),
                crossing(&self.c_grid, &fit_hi, level),
            ) {
                (Crossing::At(a), Crossing::At(b)) => Some((a.min(b), a.max(b))),
                _ => None,
            }
        };
        let q25 = crossing(&self.c_grid, &fit, 0.25);
        let q75 = crossing(&self.c_grid, &fit, 0.75);
        let width = match (q25, q75) {
            (Crossing::At(a), Crossing::At(b)) => Some((a - b).max(0.0)),
            _ => None,
        };
        let width_band = match (band(0.25), band(0.75)) {
            (Some((l25, h25)), Some((l75, h75))) => {
                Some(((l25 - h75).max(0.0), (h25 - l75).max(0.0)))
            }
            _ => None,
        };
        NSummary {
            n: self.n_list[ni],
            c_half,
            c_half_band: band(0.5),
            width,
            width_band,
        }
    }

    /// `model,flavor,n,c,trials,sat,unsat,budget,phat,lo95,hi95`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,flavor,n,c,trials,sat,unsat,budget,phat,lo95,hi95\n");
        let flavor = match self.flavor {
            Flavor::Plain => "plain",
            Flavor::Hat => "hat",
        };
        for cell in &self.cells {
            let phat = cell
                .phat
                .map(|p| format!("{p:.6}"))
                .unwrap_or_else(|| "na".into());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{:.6},{:.6}\n",
                self.model,
                flavor,
                cell.n,
                cell.c,
                cell.trials,
                cell.sat,
                cell.unsat,
                cell.budget_exceeded,
                phat,
                cell.lo95,
                cell.hi95,
            ));
        }
        out
    }

    /// `model,n,chalf,width,lo,hi`
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("model,n,chalf,width,lo,hi\n");
        for ni in 0..self.n_list.len() {
            let s = self.summary(ni);
            let chalf = match s.c_half {
                Crossing::At(x) => format!("{x:.6}"),
                Crossing::BelowGrid => "below".into(),
                Crossing::AboveGrid => "above".into(),
            };
            let width = s
                .width
                .map(|w| format!("{w:.6}"))
                .unwrap_or_else(|| "na".into());
            let (lo, hi) = s
                .c_half_band
                .map(|(a, b)| (format!("{a:.6}"), format!("{b:.6}")))
                .unwrap_or_else(|| ("na".into(), "na".into()));
            out.push_str(&format!(
                "{},{},{chalf},{width},{lo},{hi}\n",
                self.model, s.n
            ));
        }
        out
    }
}

fn sample(spec: &GenSpec) -> Result<Instance> {
    match spec.flavor {
        Flavor::Plain => sample_plain(spec),
        Flavor::Hat => sample_hat(spec),
    }
}

/// Estimate P_sat over an (n, c) grid. Per-trial substreams make the
/// result independent of worker scheduling; budget-exceeded trials are
/// excluded from the estimate and reported.
pub fn psat_grid(
    dist: &ConstraintDistribution,
    flavor: Flavor,
    n_list: &[usize],
    c_grid: &[f64],
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<ThresholdCurve> {
    if n_list.is_empty() || c_grid.is_empty() || trials == 0 {
        return Err(Error::input("empty grid"));
    }
    if c_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input("c grid must be strictly increasing"));
    }
    let tasks: Vec<(usize, usize, usize)> = (0..n_list.len())
        .flat_map(|ni| (0..c_grid.len()).flat_map(move |ci| (0..trials).map(move |t| (ni, ci, t))))
        .collect();
    let outcomes: Vec<Result<(usize, usize, SolveResult)>> = tasks
        .par_iter()
        .map(|&(ni, ci, t)| {
            let spec = GenSpec {
                dist: dist.clone(),
                n: n_list[ni],
                c: c_grid[ci],
                flavor,
                seed,
                trial_index: ((ni * c_grid.len() + ci) * trials + t) as u64,
            };
            let inst = sample(&spec)?;
            Ok((ni, ci, solve(&inst, budget)?))
        })
        .collect();
    let mut cells: Vec<Cell> = (0..n_list.len())
        .flat_map(|ni| {
            c_grid.iter().map(move |&c| Cell {
                n: n_list[ni],
                c,
                trials,
                sat: 0,
                unsat: 0,
                budget_exceeded: 0,
                phat: None,
                lo95: 0.0,
                hi95: 1.0,
                unreliable: false,
            })
        })
        .collect();
    for res in outcomes {
        let (ni, ci, outcome) = res?;
        let cell = &mut cells[ni * c_grid.len() + ci];
        match outcome {
            SolveResult::Sat(_) => cell.sat += 1,
            SolveResult::Unsat => cell.unsat += 1,
            SolveResult::BudgetExceeded(_) => cell.budget_exceeded += 1,
        }
    }
    for cell in &mut cells {
        let decided = cell.sat + cell.unsat;
        if decided > 0 {
            cell.phat = Some(cell.sat as f64 / decided as f64);
            let (lo, hi) = wilson(cell.sat, decided);
            cell.lo95 = lo;
            cell.hi95 = hi;
        }
        cell.unreliable = cell.budget_exceeded * 10 > cell.trials;
    }
    Ok(ThresholdCurve {
        model: dist.name().to_string(),
        flavor,
        n_list: n_list.to_vec(),
        c_grid: c_grid.to_vec(),
        cells,
    })
}

/// Expected constraints per variable at density c (the second reporting
/// scale next to the paper-style c itself).
pub fn constraints_per_variable(
    dist: &ConstraintDistribution,
    flavor: Flavor,
    n: usize,
    c: f64,
) -> Result<f64> {
    let spec = GenSpec {
        dist: dist.clone(),
        n,
        c,
        flavor,
        seed: 0,
        trial_index: 0,
    };
    let p = spec.p()?;
    let k = dist.k() as u32;
    let mut expected = 1.0f64;
    match flavor {
        Flavor::Plain => {
            // C(n, k) * p
            for i in 0..k {
                expected *= (n - i as usize) as f64 / (i + 1) as f64;
            }
            expected *= p;
        }
        Flavor::Hat => {
            // n^(k)_falling * p / k!
            for i in 0..k {
                expected *= (n - i as usize) as f64 / (i + 1) as f64;
            }
            expected *= p;
        }
    }
    Ok(expected / n as f64)
}

#[derive(Clone, Debug)]
pub struct LocateReport {
    pub n: usize,
    pub c_half: Crossing,
    /// final bisection bracket when c_half is At(..)
    pub bracket: Option<(f64, f64)>,
    /// expected constraints per variable at the located crossing
    pub constraints_per_var: Option<f64>,
    pub trials_per_point: usize,
}

/// Adaptive bisection of P_sat = 0.5 in c, to bracket width `tol`.
/// Reports BelowGrid when P_sat < 0.5 already at c = tol, AboveGrid when
/// no unsat-majority density is found by doubling.
pub fn locate_threshold(
    dist: &ConstraintDistribution,
    flavor: Flavor,
    n: usize,
    trials: usize,
    tol: f64,
    seed: u64,
    budget: u64,
) -> Result<LocateReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::input("tol must be positive"));
    }
    let mut stream = 0u64;
    let phat_at = |c: f64, stream: &mut u64| -> Result<f64> {
        let mut sat = 0usize;
        let mut decided = 0usize;
        for _ in 0..trials {
            let spec = GenSpec {
                dist: dist.clone(),
                n,
                c,
                flavor,
                seed,
                trial_index: *stream,
            };
            *stream += 1;
            match solve(&sample(&spec)?, budget)? {
                SolveResult::Sat(_) => {
                    sat += 1;
                    decided += 1;
                }
                SolveResult::Unsat => decided += 1,
                SolveResult::BudgetExceeded(_) => {}
            }
        }
        if decided == 0 {
            return Err(Error::capacity("every trial exceeded the budget"));
        }
        Ok(sat as f64 / decided as f64)
    };
    if phat_at(tol, &mut stream)? < 0.5 {
        return Ok(LocateReport {
            n,
            c_half: Crossing::BelowGrid,
            bracket: None,
            constraints_per_var: None,
            trials_per_point: trials,
        });
    }
    let mut lo = tol;
    let mut hi = tol.max(1.0);
    let mut found = false;
    for _ in 0..40 {
        if phat_at(hi, &mut stream)? < 0.5 {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        return Ok(LocateReport {
            n,
            c_half: Crossing::AboveGrid,
            bracket: None,
            constraints_per_var: None,
            trials_per_point: trials,
        });
    }
    while hi - lo > tol {
        let mid = (lo + hi) / 2.0;
        if phat_at(mid, &mut stream)? >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c_half = (lo + hi) / 2.0;
    Ok(LocateReport {
        n,
        c_half: Crossing::At(c_half),
        bracket: Some((lo, hi)),
        constraints_per_var: Some(constraints_per_variable(dist, flavor, n, c_half)?),
        trials_per_point: trials,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sharpness {
    Sharpening,
    NonSharpening,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct SharpnessReport {
    /// per n: (n, width, width band)
    pub widths: Vec<(usize, f64, Option<(f64, f64)>)>,
    pub verdict: Sharpness,
}

/// Heuristic evidence only: widths must shrink monotonically to under 0.6
/// of the smallest-n width with non-overlapping bands to call sharpening;
/// bands all overlapping a common constant reads as non-sharpening.
pub fn sharpness_diagnostic(curve: &ThresholdCurve) -> Result<SharpnessReport> {
    if curve.n_list.len() < 2 {
        return Err(Error::input("need at least two n values"));
    }
    let mut widths = Vec::new();
    for ni in 0..curve.n_list.len() {
        let s = curve.summary(ni);
        let w = s
            .width
            .ok_or_else(|| Error::input(format!("width leaves the grid at n={}", s.n)))?;
        widths.push((s.n, w, s.width_band));
    }
    let monotone = widths.windows(2).all(|p| p[1].1 <= p[0].1);
    let first = widths.first().unwrap();
    let last = widths.last().unwrap();
    let shrunk = last.1 < 0.6 * first.1;
    let disjoint_ends = match (first.2, last.2) {
        (Some((_, _)), Some((_, hi_last))) => hi_last < first.2.unwrap().0,
        _ => false,
    };
    // do all bands share a common point?
    let common_overlap = {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut all_present = true;
        for &(_, _, band) in &widths {
            match band {
                Some((a, b)) => {
                    lo = lo.max(a);
                    hi = hi.min(b);
                }
                None => all_present = false,
            }
        }
        all_present && lo <= hi
    };
    let verdict = if monotone && shrunk && disjoint_ends {
        Sharpness::Sharpening
    } else if common_overlap {
        Sharpness::NonSharpening
    } else {
        Sharpness::Inconclusive
    };
    Ok(SharpnessReport { widths, verdict })
}

#[derive(Clone, Debug)]
pub struct Fact9Cell {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub agreements: usize,
    pub decided: usize,
    pub solver_sat: usize,
    pub predicate_sat: usize,
    pub disagreements: Vec<Instance>,
}

#[derive(Clone, Debug)]
pub struct Fact9Report {
    pub q: f64,
    pub boundary: f64,
    pub cells: Vec<Fact9Cell>,
}

/// Direct reduction predicate for an s3 instance: every connected
/// component commits to one value block, so a component is satisfiable iff
/// its C1-edges form a bipartite graph or its C2-edges are 3-colourable.
pub fn s3_reduction_predicate(inst: &Instance, budget: u64) -> Result<bool> {
    let comps = crate::structure::components(inst);
    for comp in &comps {
        if comp.len() == 1 {
            continue;
        }
        let index: std::collections::HashMap<u32, u32> = comp
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut c1_edges: Vec<(u32, u32)> = Vec::new();
        let mut c2_edges: Vec<CEdge> = Vec::new();
        for e in &inst.edges {
            if !index.contains_key(&e.vars[0]) {
                continue;
            }
            let (a, b) = (index[&e.vars[0]], index[&e.vars[1]]);
            match e.cid {
                0 => c1_edges.push((a, b)),
                1 => c2_edges.push(CEdge {
                    vars: vec![a, b],
                    cid: 0,
                }),
                _ => return Err(Error::input("not an s3 instance")),
            }
        }
        if bipartite(comp.len(), &c1_edges) {
            continue;
        }
        // 3-colourability of the C2 subgraph via the exact solver
        let col = build_coloring(3)?;
        let table = vec![col.entries()[0].0.clone()];
        let sub = Instance::new(comp.len(), 3, 2, table, c2_edges, Flavor::Hat)?;
        match solve(&sub, budget)? {
            SolveResult::Sat(_) => continue,
            SolveResult::Unsat => return Ok(false),
            SolveResult::BudgetExceeded(_) => {
                return Err(Error::capacity("3-colouring check exceeded budget"))
            }
        }
    }
    Ok(true)
}

fn bipartite(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a == b {
            return false;
        }
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let mut color = vec![0u8; n]; // 0 unvisited
    for s in 0..n {
        if color[s] != 0 {
            continue;
        }
        color[s] = 1;
        let mut q = std::collections::VecDeque::from([s as u32]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x as usize] {
                if color[y as usize] == 0 {
                    color[y as usize] = 3 - color[x as usize];
                    q.push_back(y);
                } else if color[y as usize] == color[x as usize] {
                    return false;
                }
            }
        }
    }
    true
}

/// Compare exact solving of sampled s3(q) instances against the direct
/// case-analysis predicate; disagreeing instances are returned verbatim.
pub fn fact9_experiment(
    q: f64,
    n_list: &[usize],
    c_list: &[f64],
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<Fact9Report> {
    let dist = build_paper_s3(q)?;
    let mut cells = Vec::new();
    for &n in n_list {
        for &c in c_list {
            let mut cell = Fact9Cell {
                n,
                c,
                trials,
                agreements: 0,
                decided: 0,
                solver_sat: 0,
                predicate_sat: 0,
                disagreements: Vec::new(),
            };
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
                let solver = match solve(&inst, budget)? {
                    SolveResult::Sat(_) => true,
                    SolveResult::Unsat => false,
                    SolveResult::BudgetExceeded(_) => continue,
                };
                let pred = s3_reduction_predicate(&inst, budget)?;
                cell.decided += 1;
                if solver {
                    cell.solver_sat += 1;
                }
                if pred {
                    cell.predicate_sat += 1;
                }
                if solver == pred {
                    cell.agreements += 1;
                } else {
                    cell.disagreements.push(inst);
                }
            }
            cells.push(cell);
        }
    }
    Ok(Fact9Report {
        q,
        boundary: s3_case_boundary(q),
        cells,
    })
}
