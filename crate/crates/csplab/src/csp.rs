//! Domain types for constraints, distributions, instances, and assignments,
//! plus satisfaction evaluation and the relation algebra primitives used by
//! every other module.
//!
//! Values are 1-based: a variable over domain size `d` takes values in
//! `{1..d}`. A constraint on a k-tuple is the set of *forbidden* value
//! tuples (restrictions); the allowed set is derived on demand. Tuples are
//! encoded into bit-vector indices in mixed radix with position 1 most
//! significant.

use crate::{Error, Result};
use std::fmt::Write as _;

/// A k-ary constraint over domain `{1..d}`, stored as a restriction bit set
/// of length `d^k`. Bit set means the tuple is forbidden.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Constraint {
    d: u8,
    k: u8,
    bits: Vec<u64>,
}

/// Hard cap on `d^k` so encodings stay in `usize` and enumerations stay sane.
pub const MAX_CELLS: usize = 1 << 24;

fn checked_cells(d: u8, k: u8) -> Result<usize> {
    if d < 2 {
        return Err(Error::input(format!("domain size d={d} must be >= 2")));
    }
    if k < 1 {
        return Err(Error::input("arity k must be >= 1"));
    }
    let mut cells: usize = 1;
    for _ in 0..k {
        cells = cells
            .checked_mul(d as usize)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::capacity(format!("d^k too large for d={d}, k={k}")))?;
    }
    Ok(cells)
}

impl Constraint {
    /// The empty constraint: no restrictions, satisfied by every assignment.
    pub fn empty(d: u8, k: u8) -> Result<Self> {
        let cells = checked_cells(d, k)?;
        Ok(Constraint {
            d,
            k,
            bits: vec![0; cells.div_ceil(64)],
        })
    }

    /// The full constraint: every tuple forbidden.
    pub fn full(d: u8, k: u8) -> Result<Self> {
        let mut c = Constraint::empty(d, k)?;
        for idx in 0..c.cells() {
            c.set_restricted_idx(idx);
        }
        Ok(c)
    }

    pub fn from_restrictions<'a, I>(d: u8, k: u8, restrictions: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [u8]>,
    {
        let mut c = Constraint::empty(d, k)?;
        for t in restrictions {
            c.check_tuple(t)?;
            let idx = c.encode(t);
            c.set_restricted_idx(idx);
        }
        Ok(c)
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    /// Total number of value tuples, `d^k`.
    pub fn cells(&self) -> usize {
        (self.d as usize).pow(self.k as u32)
    }

    fn check_tuple(&self, t: &[u8]) -> Result<()> {
        if t.len() != self.k as usize {
            return Err(Error::input(format!(
                "tuple length {} does not match arity {}",
                t.len(),
                self.k
            )));
        }
        for &v in t {
            if v < 1 || v > self.d {
                return Err(Error::input(format!(
                    "value {v} out of range 1..{}",
                    self.d
                )));
            }
        }
        Ok(())
    }

    /// Mixed-radix encoding of a value tuple, position 1 most significant.
    pub fn encode(&self, t: &[u8]) -> usize {
        debug_assert_eq!(t.len(), self.k as usize);
        let mut idx = 0usize;
        for &v in t {
            idx = idx * self.d as usize + (v as usize - 1);
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u8> {
        let mut t = vec![0u8; self.k as usize];
        for pos in (0..self.k as usize).rev() {
            t[pos] = (idx % self.d as usize) as u8 + 1;
            idx /= self.d as usize;
        }
        t
    }

    fn set_restricted_idx(&mut self, idx: usize) {
        self.bits[idx / 64] |= 1u64 << (idx % 64);
    }

    pub fn is_restricted_idx(&self, idx: usize) -> bool {
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn is_restricted(&self, t: &[u8]) -> bool {
        self.is_restricted_idx(self.encode(t))
    }

    /// An assignment satisfies the constraint iff its tuple is not a restriction.
    pub fn allows(&self, t: &[u8]) -> bool {
        !self.is_restricted(t)
    }

    pub fn restriction_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty_constraint(&self) -> bool {
        self.restriction_count() == 0
    }

    pub fn restrictions(&self) -> Vec<Vec<u8>> {
        (0..self.cells())
            .filter(|&i| self.is_restricted_idx(i))
            .map(|i| self.decode(i))
            .collect()
    }

    pub fn allowed_tuples(&self) -> Vec<Vec<u8>> {
        (0..self.cells())
            .filter(|&i| !self.is_restricted_idx(i))
            .map(|i| self.decode(i))
            .collect()
    }

    /// All (k-1)-tuples that, inserted at `position` (1-based) with `value`,
    /// form an allowed tuple. This is the allowed set of the residual
    /// constraint obtained by pinning one variable.
    pub fn allowed_rows(&self, position: u8, value: u8) -> Result<Vec<Vec<u8>>> {
        self.check_pos_value(position, value)?;
        let pos = position as usize - 1;
        let mut rows = Vec::new();
        for idx in 0..self.cells() {
            if self.is_restricted_idx(idx) {
                continue;
            }
            let t = self.decode(idx);
            if t[pos] == value {
                let mut row = t;
                row.remove(pos);
                rows.push(row);
            }
        }
        Ok(rows)
    }

    fn check_pos_value(&self, position: u8, value: u8) -> Result<()> {
        if position < 1 || position > self.k {
            return Err(Error::input(format!(
                "position {position} out of range 1..{}",
                self.k
            )));
        }
        if value < 1 || value > self.d {
            return Err(Error::input(format!(
                "value {value} out of range 1..{}",
                self.d
            )));
        }
        Ok(())
    }

    /// Residual constraint of arity k-1 obtained by pinning `position` to
    /// `value`; its restrictions are the complement of `allowed_rows`.
    pub fn restrict(&self, position: u8, value: u8) -> Result<Constraint> {
        self.check_pos_value(position, value)?;
        if self.k == 1 {
            return Err(Error::input(
                "cannot restrict a unary constraint to arity 0",
            ));
        }
        let pos = position as usize - 1;
        let mut out = Constraint::empty(self.d, self.k - 1)?;
        for idx in 0..self.cells() {
            if !self.is_restricted_idx(idx) {
                continue;
            }
            let t = self.decode(idx);
            if t[pos] == value {
                let mut row = t;
                row.remove(pos);
                let ridx = out.encode(&row);
                out.set_restricted_idx(ridx);
            }
        }
        Ok(out)
    }

    /// Reorder canonical positions: the result allows `(u_1..u_k)` iff `self`
    /// allows `(u_{perm[1]}..u_{perm[k]})` (perm is 0-based over positions).
    pub fn permuted(&self, perm: &[usize]) -> Result<Constraint> {
        if perm.len() != self.k as usize {
            return Err(Error::input("permutation length must equal arity"));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::input("not a permutation"));
            }
            seen[p] = true;
        }
        let mut out = Constraint::empty(self.d, self.k)?;
        for idx in 0..self.cells() {
            let u = out.decode(idx);
            let src: Vec<u8> = perm.iter().map(|&p| u[p]).collect();
            if self.is_restricted(&src) {
                out.set_restricted_idx(idx);
            }
        }
        Ok(out)
    }
}

/// Flags a builder may attach to a distribution.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistFlag {
    /// (d,k,t) with t >= d^{k-1}: a.s. unsatisfiable already at o(n) constraints.
    DegenerateT,
    /// Homomorphism target with no edges: nothing nontrivial is satisfiable.
    TriviallyUnsatisfiable,
    /// Homomorphism target with a loop: everything is satisfiable.
    TriviallySatisfiable,
}

/// A weighted support set over constraints sharing (d, k). The entry list is
/// exactly the support: every weight is strictly positive.
#[derive(Clone, Debug)]
pub struct ConstraintDistribution {
    name: String,
    d: u8,
    k: u8,
    entries: Vec<(Constraint, f64)>,
    flags: Vec<DistFlag>,
}

impl ConstraintDistribution {
    pub fn new(
        name: impl Into<String>,
        d: u8,
        k: u8,
        entries: Vec<(Constraint, f64)>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("distribution support must be nonempty"));
        }
        let mut sum = 0.0;
        for (c, w) in &entries {
            if c.d() != d || c.k() != k {
                return Err(Error::input("all support constraints must share (d, k)"));
            }
            if !(*w > 0.0) {
                return Err(Error::input(format!(
                    "weight {w} must be strictly positive"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("weights sum to {sum}, expected 1")));
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if entries[i].0 == entries[j].0 {
                    return Err(Error::input("duplicate constraint in support"));
                }
            }
        }
        Ok(ConstraintDistribution {
            name: name.into(),
            d,
            k,
            entries,
            flags: Vec::new(),
        })
    }

    pub fn with_flag(mut self, flag: DistFlag) -> Self {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn d(&self) -> u8 {
        self.d
    }
    pub fn k(&self) -> u8 {
        self.k
    }
    pub fn entries(&self) -> &[(Constraint, f64)] {
        &self.entries
    }
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }
    pub fn flags(&self) -> &[DistFlag] {
        &self.flags
    }
    pub fn constraint(&self, cid: usize) -> &Constraint {
        &self.entries[cid].0
    }
    pub fn weight(&self, cid: usize) -> f64 {
        self.entries[cid].1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    /// At most one constraint per unordered variable set.
    Plain,
    /// Independent (ordered tuple, constraint) placements; multi-edges allowed.
    Hat,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Hat => "hat",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Flavor::Plain),
            "hat" => Ok(Flavor::Hat),
            other => Err(Error::parse(format!("unknown flavor `{other}`"))),
        }
    }
}

/// One constrained tuple: an ordered variable tuple plus an index into the
/// instance's constraint table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CEdge {
    pub vars: Vec<u32>,
    pub cid: usize,
}

/// A CSP instance: n variables and a multiset of constrained tuples. The
/// constraint table may hold mixed arities 1..k (planting adds unary pins).
#[derive(Clone, PartialEq, Debug)]
pub struct Instance {
    pub n: usize,
    pub d: u8,
    pub k: u8,
    pub table: Vec<Constraint>,
    pub edges: Vec<CEdge>,
    pub flavor: Flavor,
}

impl Instance {
    pub fn new(
        n: usize,
        d: u8,
        k: u8,
        table: Vec<Constraint>,
        edges: Vec<CEdge>,
        flavor: Flavor,
    ) -> Result<Self> {
        let inst = Instance {
            n,
            d,
            k,
            table,
            edges,
            flavor,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Empty instance (no edges) on n variables.
    pub fn trivial(n: usize, d: u8, k: u8, flavor: Flavor) -> Self {
        Instance {
            n,
            d,
            k,
            table: Vec::new(),
            edges: Vec::new(),
            flavor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_repeats(false)
    }

    /// Like `validate` but optionally permitting repeated variables inside a
    /// tuple (used only for homomorphism-side graphs built by contraction).
    pub fn validate_with_repeats(&self, allow_repeats: bool) -> Result<()> {
        for c in &self.table {
            if c.d() != self.d {
                return Err(Error::input("table constraint domain mismatch"));
            }
            if c.k() > self.k {
                return Err(Error::input(
                    "table constraint arity exceeds instance arity",
                ));
            }
        }
        let mut seen_sets: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            let c = self
                .table
                .get(e.cid)
                .ok_or_else(|| Error::input(format!("edge {i}: cid {} out of range", e.cid)))?;
            if e.vars.len() != c.k() as usize {
                return Err(Error::input(format!(
                    "edge {i}: tuple length {} does not match constraint arity {}",
                    e.vars.len(),
                    c.k()
                )));
            }
            for &v in &e.vars {
                if v as usize >= self.n {
                    return Err(Error::input(format!("edge {i}: variable {v} out of range")));
                }
            }
            if !allow_repeats {
                let mut vs = e.vars.clone();
                vs.sort_unstable();
                if vs.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::input(format!(
                        "edge {i}: repeated variable in tuple"
                    )));
                }
                if self.flavor == Flavor::Plain {
                    if !seen_sets.insert(vs) {
                        return Err(Error::input(format!(
                            "edge {i}: duplicate unordered variable set in plain instance"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges whose unordered variable set repeats an earlier edge's.
    pub fn duplicate_edge_sets(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut dups = 0;
        for e in &self.edges {
            let mut vs = e.vars.clone();
            vs.sort_unstable();
            if !seen.insert(vs) {
                dups += 1;
            }
        }
        dups
    }
}

/// A (possibly partial) assignment; 0 marks an unassigned variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assignment {
    values: Vec<u8>,
}

impl Assignment {
    pub fn unassigned(n: usize) -> Self {
        Assignment { values: vec![0; n] }
    }

    pub fn from_values(values: Vec<u8>) -> Self {
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }

    pub fn get(&self, v: usize) -> Option<u8> {
        match self.values[v] {
            0 => None,
            x => Some(x),
        }
    }

    pub fn set(&mut self, v: usize, value: u8) {
        self.values[v] = value;
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Eval {
    Satisfied,
    /// Index of the first (lowest-index) violated edge.
    Violated(usize),
}

/// Check a complete assignment against every edge; the induced value tuple
/// must avoid each edge's restriction set.
pub fn evaluate(inst: &Instance, a: &Assignment) -> Result<Eval> {
    if a.len() != inst.n {
        return Err(Error::input(format!(
            "assignment length {} does not match n={}",
            a.len(),
            inst.n
        )));
    }
    if !a.is_complete() {
        return Err(Error::input("assignment is not complete"));
    }
    for &v in a.values() {
        if v > inst.d {
            return Err(Error::input(format!(
                "assignment value {v} exceeds d={}",
                inst.d
            )));
        }
    }
    let mut tuple = Vec::with_capacity(inst.k as usize);
    for (i, e) in inst.edges.iter().enumerate() {
        let c = &inst.table[e.cid];
        tuple.clear();
        tuple.extend(e.vars.iter().map(|&v| a.values()[v as usize]));
        if c.is_restricted(&tuple) {
            return Ok(Eval::Violated(i));
        }
    }
    Ok(Eval::Satisfied)
}

fn fmt_tuple(t: &[u8]) -> String {
    t.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_tuple(s: &str) -> Result<Vec<u8>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u8>()
                .map_err(|_| Error::parse(format!("bad tuple component `{x}`")))
        })
        .collect()
}

/// Serialize an instance in the `CSPINST v1` text format.
pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    s.push_str("CSPINST 1\n");
    let _ = writeln!(
        s,
        "d={} k={} n={} flavor={}",
        inst.d,
        inst.k,
        inst.n,
        inst.flavor.as_str()
    );
    let _ = writeln!(s, "ncons={}", inst.table.len());
    for (id, c) in inst.table.iter().enumerate() {
        let res = c
            .restrictions()
            .iter()
            .map(|t| fmt_tuple(t))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            s,
            "cons {id} arity={} nres={} : {res}",
            c.k(),
            c.restriction_count()
        );
    }
    let _ = writeln!(s, "nedges={}", inst.edges.len());
    for e in &inst.edges {
        let vars = e
            .vars
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, "edge {} {vars}", e.cid);
    }
    s
}

fn expect_kv<'a>(tok: &'a str, key: &str) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(format!("expected `{key}=<value>`, found `{tok}`")))
}

/// Parse the `CSPINST v1` text format.
pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut next = || {
        lines
            .next()
            .ok_or_else(|| Error::parse("unexpected end of CSPINST input"))
    };
    let header = next()?;
    if header.trim() != "CSPINST 1" {
        return Err(Error::parse("missing `CSPINST 1` header"));
    }
    let meta: Vec<&str> = next()?.split_whitespace().collect();
    if meta.len() != 4 {
        return Err(Error::parse("expected `d= k= n= flavor=` line"));
    }
    let d: u8 = expect_kv(meta[0], "d")?
        .parse()
        .map_err(|_| Error::parse("bad d"))?;
    let k: u8 = expect_kv(meta[1], "k")?
        .parse()
        .map_err(|_| Error::parse("bad k"))?;
    let n: usize = expect_kv(meta[2], "n")?
        .parse()
        .map_err(|_| Error::parse("bad n"))?;
    let flavor: Flavor = expect_kv(meta[3], "flavor")?.parse()?;

    let ncons: usize = expect_kv(next()?.trim(), "ncons")?
        .parse()
        .map_err(|_| Error::parse("bad ncons"))?;
    let mut table = Vec::with_capacity(ncons);
    for i in 0..ncons {
        let line = next()?;
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("cons line {i} missing `:`")))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "cons" {
            return Err(Error::parse(format!("malformed cons line: `{line}`")));
        }
        let id: usize = toks[1].parse().map_err(|_| Error::parse("bad cons id"))?;
        if id != i {
            return Err(Error::parse(format!(
                "cons id {id} out of order, expected {i}"
            )));
        }
        let arity: u8 = expect_kv(toks[2], "arity")?
            .parse()
            .map_err(|_| Error::parse("bad arity"))?;
        let nres: usize = expect_kv(toks[3], "nres")?
            .parse()
            .map_err(|_| Error::parse("bad nres"))?;
        let rest = rest.trim();
        let tuples: Vec<Vec<u8>> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(';')
                .map(|t| parse_tuple(t.trim()))
                .collect::<Result<_>>()?
        };
        if tuples.len() != nres {
            return Err(Error::parse(format!(
                "cons {i}: expected {nres} restrictions, found {}",
                tuples.len()
            )));
        }
        let c = Constraint::from_restrictions(d, arity, tuples.iter().map(|t| t.as_slice()))?;
        table.push(c);
    }
    let nedges: usize = expect_kv(next()?.trim(), "nedges")?
        .parse()
        .map_err(|_| Error::parse("bad nedges"))?;
    let mut edges = Vec::with_capacity(nedges);
    for i in 0..nedges {
        let toks: Vec<&str> = next()?.split_whitespace().collect();
        if toks.len() < 2 || toks[0] != "edge" {
            return Err(Error::parse(format!("malformed edge line {i}")));
        }
        let cid: usize = toks[1].parse().map_err(|_| Error::parse("bad edge cid"))?;
        let vars: Vec<u32> = toks[2..]
            .iter()
            .map(|t| t.parse().map_err(|_| Error::parse("bad edge variable")))
            .collect::<Result<_>>()?;
        edges.push(CEdge { vars, cid });
    }
    Instance::new(n, d, k, table, edges, flavor)
}
