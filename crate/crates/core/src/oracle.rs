//! Plaintext reference implementation of the cake-cutting algorithm,
//! plus fairness and strategyproofness checkers.
//!
//! [`cc_puv_allocate`] deliberately replicates the secure protocol's
//! enumeration order, tie-breaking, and flow scan order register by
//! register, so equivalence testing is equality of every intermediate
//! value, not just set-equivalence of outcomes. [`naive_allocate`] is a
//! second, independently structured implementation used to cross-check
//! the shared conventions.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::valuations::{choose_precision, Frac, IntegerValuation, PiecewiseUniformValuation, ValuationError};

/// Subset-selection strategy for the iterative phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Scan all 2^n − 1 subsets per iteration.
    Exhaustive,
    /// Capacity binary search plus residual min-cut extraction.
    Polynomial,
}

/// Per-agent lists of half-open subintervals of [0,1), ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub pieces: Vec<Vec<(Frac, Frac)>>,
}

impl Allocation {
    /// Total length of one agent's pieces.
    pub fn piece_length(&self, agent: usize) -> Frac {
        self.pieces[agent]
            .iter()
            .map(|(a, b)| *b - *a)
            .fold(Frac::zero(), |acc, l| acc + l)
    }
}

/// A fully quantized problem instance shared by the oracle and the
/// secure protocol driver.
#[derive(Debug, Clone)]
pub struct PlainInstance {
    pub n: usize,
    pub d: u32,
    pub q: u64,
    /// Public bound L: smallest power of two ≥ every ℓ_i.
    pub big_l: usize,
    /// Interval slots carried into the protocol: max ℓ_i, or L when the
    /// ℓ-computation is skipped.
    pub slots: usize,
    pub valuations: Vec<PiecewiseUniformValuation>,
    pub ints: Vec<IntegerValuation>,
}

impl PlainInstance {
    pub fn build(
        valuations: Vec<PiecewiseUniformValuation>,
        strict_no_ell: bool,
    ) -> Result<Self, ValuationError> {
        for v in &valuations {
            v.validate()?;
        }
        let n = valuations.len();
        let (d, q) = choose_precision(&valuations)?;
        let max_ell = valuations.iter().map(|v| v.ell()).max().unwrap_or(1);
        let big_l = max_ell.next_power_of_two();
        let slots = if strict_no_ell { big_l } else { max_ell };
        let ints = valuations.iter().map(|v| v.discretize(q, slots)).collect();
        Ok(PlainInstance {
            n,
            d,
            q,
            big_l,
            slots,
            valuations,
            ints,
        })
    }

    /// m = 2ℓn + 2: size of the boundary multiset V.
    pub fn m(&self) -> usize {
        2 * self.slots * self.n + 2
    }

    /// n! as u64; instances are bounded well below overflow.
    pub fn factorial(&self) -> u64 {
        (1..=self.n as u64).product()
    }

    /// The sorted boundary array W(1..m), 0-based here.
    pub fn boundary_array(&self) -> Vec<u64> {
        let mut v: Vec<u64> = Vec::with_capacity(self.m());
        for iv in &self.ints {
            v.extend_from_slice(&iv.endpoints);
        }
        v.push(0);
        v.push(self.q);
        v.sort_unstable();
        v
    }

    /// Desirability matrix per the partition-interval test: the interval
    /// must be nonempty and contained in one of the agent's support
    /// intervals.
    pub fn desirability(&self, w: &[u64]) -> Vec<Vec<u64>> {
        let m1 = w.len() - 1;
        (0..self.n)
            .map(|i| {
                (0..m1)
                    .map(|k| {
                        if w[k + 1] == w[k] {
                            return 0;
                        }
                        let iv = &self.ints[i];
                        for j in 0..self.slots {
                            let a = iv.endpoints[2 * j];
                            let b = iv.endpoints[2 * j + 1];
                            if a <= w[k] && w[k + 1] <= b {
                                return 1;
                            }
                        }
                        0
                    })
                    .collect()
            })
            .collect()
    }
}

// ----------------------------------------------------------------------
// Plaintext max flow on the fixed four-layer graph
// ----------------------------------------------------------------------

/// Residuals and flows of the fixed four-layer network. The secure
/// protocol holds the same registers as sharings; scan orders here and
/// there must stay in lockstep.
#[derive(Debug, Clone)]
pub struct PlainFlow {
    pub a_res: Vec<u64>,
    pub b_res: Vec<Vec<u64>>,
    pub c_res: Vec<u64>,
    pub a_flow: Vec<u64>,
    pub b_flow: Vec<Vec<u64>>,
    pub c_flow: Vec<u64>,
    pub flow: u64,
}

impl PlainFlow {
    pub fn new(a: Vec<u64>, b: Vec<Vec<u64>>, c: Vec<u64>) -> Self {
        let m1 = a.len();
        let n = c.len();
        PlainFlow {
            a_res: a,
            b_res: b,
            c_res: c,
            a_flow: vec![0; m1],
            b_flow: vec![vec![0; n]; m1],
            c_flow: vec![0; n],
            flow: 0,
        }
    }

    /// One greedy pass in (k outer, i inner) ascending order, pushing
    /// min(A_k, B_{k,i}, C_i) on every pair.
    pub fn greedy_sweep(&mut self) {
        let m1 = self.a_res.len();
        let n = self.c_res.len();
        for k in 0..m1 {
            for i in 0..n {
                let mc = self.a_res[k].min(self.b_res[k][i]).min(self.c_res[i]);
                self.flow += mc;
                self.a_flow[k] += mc;
                self.b_flow[k][i] += mc;
                self.c_flow[i] += mc;
                self.a_res[k] -= mc;
                self.b_res[k][i] -= mc;
                self.c_res[i] -= mc;
            }
        }
    }

    /// One BFS-layered residual augmentation. Interval level 0 is fed by
    /// the source; agent level d by forward edges from interval level d;
    /// interval level d+1 by back edges (placed flow b_{k,i}) from agent
    /// level d. The first sink-reaching agent level wins, then the
    /// lowest agent index, and parents are the lowest-indexed candidates.
    /// Pushes the path bottleneck and reports whether a path existed.
    pub fn augment_once(&mut self) -> bool {
        let m1 = self.a_res.len();
        let n = self.c_res.len();
        let levels = n.max(1);
        let mut reached_interval = vec![false; m1];
        let mut reached_agent = vec![false; n];
        // parent_agent[d][i] = interval feeding agent i at level d
        let mut agent_level: Vec<Vec<bool>> = Vec::new();
        let mut parent_agent: Vec<Vec<usize>> = Vec::new();
        // parent_interval[d][k] = agent whose placed flow backs interval k at level d ≥ 1
        let mut interval_level: Vec<Vec<bool>> = Vec::new();
        let mut parent_interval: Vec<Vec<usize>> = Vec::new();

        let mut exit_level: Option<(usize, usize)> = None;
        for d in 0..levels {
            let ilvl: Vec<bool> = if d == 0 {
                (0..m1).map(|k| self.a_res[k] > 0).collect()
            } else {
                let prev_agents = &agent_level[d - 1];
                (0..m1)
                    .map(|k| {
                        if reached_interval[k] {
                            return false;
                        }
                        (0..n).any(|i| prev_agents[i] && self.b_flow[k][i] > 0)
                    })
                    .collect()
            };
            let iparent: Vec<usize> = if d == 0 {
                vec![usize::MAX; m1]
            } else {
                let prev_agents = &agent_level[d - 1];
                (0..m1)
                    .map(|k| {
                        if !ilvl[k] {
                            return usize::MAX;
                        }
                        (0..n)
                            .find(|&i| prev_agents[i] && self.b_flow[k][i] > 0)
                            .unwrap()
                    })
                    .collect()
            };
            for k in 0..m1 {
                if ilvl[k] {
                    reached_interval[k] = true;
                }
            }
            let alvl: Vec<bool> = (0..n)
                .map(|i| {
                    if reached_agent[i] {
                        return false;
                    }
                    (0..m1).any(|k| ilvl[k] && self.b_res[k][i] > 0)
                })
                .collect();
            let aparent: Vec<usize> = (0..n)
                .map(|i| {
                    if !alvl[i] {
                        return usize::MAX;
                    }
                    (0..m1).find(|&k| ilvl[k] && self.b_res[k][i] > 0).unwrap()
                })
                .collect();
            for i in 0..n {
                if alvl[i] {
                    reached_agent[i] = true;
                }
            }
            interval_level.push(ilvl);
            parent_interval.push(iparent);
            agent_level.push(alvl);
            parent_agent.push(aparent);
            if exit_level.is_none() {
                if let Some(i) = (0..n).find(|&i| agent_level[d][i] && self.c_res[i] > 0) {
                    exit_level = Some((d, i));
                    break;
                }
            }
        }
        let (d_star, exit_agent) = match exit_level {
            Some(x) => x,
            None => return false,
        };
        // Walk the parents back to the source, collecting the path.
        let mut path_intervals = vec![0usize; d_star + 1];
        let mut path_agents = vec![0usize; d_star + 1];
        path_agents[d_star] = exit_agent;
        let mut d = d_star;
        loop {
            path_intervals[d] = parent_agent[d][path_agents[d]];
            if d == 0 {
                break;
            }
            path_agents[d - 1] = parent_interval[d][path_intervals[d]];
            d -= 1;
        }
        // Bottleneck: source edge, forward edges, back edges, sink edge.
        let mut delta = self.a_res[path_intervals[0]];
        for d in 0..=d_star {
            delta = delta.min(self.b_res[path_intervals[d]][path_agents[d]]);
            if d > 0 {
                delta = delta.min(self.b_flow[path_intervals[d]][path_agents[d - 1]]);
            }
        }
        delta = delta.min(self.c_res[exit_agent]);
        debug_assert!(delta > 0);
        // Push.
        self.flow += delta;
        self.a_res[path_intervals[0]] -= delta;
        self.a_flow[path_intervals[0]] += delta;
        for d in 0..=d_star {
            let (k, i) = (path_intervals[d], path_agents[d]);
            self.b_res[k][i] -= delta;
            self.b_flow[k][i] += delta;
            if d > 0 {
                let back = path_agents[d - 1];
                self.b_flow[k][back] -= delta;
                self.b_res[k][back] += delta;
            }
        }
        self.c_res[exit_agent] -= delta;
        self.c_flow[exit_agent] += delta;
        true
    }

    /// Greedy sweep followed by augmentations until no path remains.
    pub fn run_to_max(&mut self) {
        self.greedy_sweep();
        while self.augment_once() {}
    }
}

/// Greedy-then-augment maximum flow on given capacities; the plaintext
/// counterpart of the oblivious assignment subprotocol.
pub fn max_flow_plain(a: Vec<u64>, b: Vec<Vec<u64>>, c: Vec<u64>) -> PlainFlow {
    let mut net = PlainFlow::new(a, b, c);
    net.run_to_max();
    net
}

// ----------------------------------------------------------------------
// Register-mirroring reference run
// ----------------------------------------------------------------------

/// Everything one iteration decided, for divergence diagnosis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub best_subset: Vec<u64>,
    pub min_len: u64,
    pub size_best: u64,
    /// Rescaled minimum average demand found by the capacity search
    /// (polynomial mode only).
    pub c_star: Option<u64>,
    pub selected: Vec<u64>,
    pub available_after: Vec<u64>,
    pub served_after: Vec<u64>,
    pub flow_b: Vec<Vec<u64>>,
    pub flow_total: u64,
}

/// Full plaintext run trace mirrored by the secure protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub q: u64,
    pub big_l: usize,
    pub slots: usize,
    pub w: Vec<u64>,
    pub interval_len: Vec<u64>,
    pub desired: Vec<Vec<u64>>,
    pub iterations: Vec<IterationTrace>,
    pub alloc_matrix: Vec<Vec<u64>>,
    pub alloc_denominator: Vec<u64>,
    pub allocation: Allocation,
}

struct Registers {
    available: Vec<u64>,
    served: Vec<u64>,
    num_served: u64,
    alloc: Vec<Vec<u64>>,
    alloc_den: Vec<u64>,
}

/// Len(S',X) for a subset given as 0/1 members, per the availability ·
/// desirability-OR · length sum.
fn len_of_subset(members: &[u64], available: &[u64], desired: &[Vec<u64>], lens: &[u64]) -> u64 {
    let m1 = lens.len();
    let mut total = 0;
    for k in 0..m1 {
        if available[k] == 0 || lens[k] == 0 {
            continue;
        }
        if members
            .iter()
            .enumerate()
            .any(|(i, &b)| b == 1 && desired[i][k] == 1)
        {
            total += lens[k];
        }
    }
    total
}

/// The plaintext reference algorithm, mirroring the secure protocol's
/// registers, enumeration order, first-wins tie-break, and flow order.
pub fn cc_puv_allocate(instance: &PlainInstance, mode: SelectionMode, pad: bool) -> RunTrace {
    let n = instance.n;
    let q = instance.q;
    let m = instance.m();
    let m1 = m - 1;
    let w = instance.boundary_array();
    let lens: Vec<u64> = (0..m1).map(|k| w[k + 1] - w[k]).collect();
    let desired = instance.desirability(&w);
    let mut regs = Registers {
        available: vec![1; m1],
        served: vec![0; n],
        num_served: 0,
        alloc: vec![vec![0; m1]; n],
        alloc_den: vec![0; n],
    };
    let mut iterations = Vec::new();
    let mut iter_count = 0usize;
    loop {
        if pad {
            if iter_count == n {
                break;
            }
        } else if regs.num_served == n as u64 {
            break;
        }
        iter_count += 1;
        let done = regs.num_served == n as u64;
        let (mut best, mut min_len, mut size_best, c_star) = match mode {
            SelectionMode::Exhaustive => {
                let (b, ml, sb) = select_exhaustive(instance, &regs, &lens, &desired);
                (b, ml, sb, None)
            }
            SelectionMode::Polynomial => {
                let (b, ml, sb, cs) = select_polynomial(instance, &regs, &lens, &desired);
                (b, ml, sb, Some(cs))
            }
        };
        if done {
            best = vec![0; n];
            size_best = 0;
            min_len = match mode {
                SelectionMode::Exhaustive => min_len,
                SelectionMode::Polynomial => 0,
            };
        }
        // Served/available updates run before the flow assignment.
        for i in 0..n {
            regs.served[i] += best[i];
        }
        regs.num_served += size_best;
        let selected: Vec<u64> = (0..m1)
            .map(|k| {
                let any = (0..n).any(|i| best[i] == 1 && desired[i][k] == 1);
                regs.available[k] * u64::from(any)
            })
            .collect();
        for k in 0..m1 {
            regs.available[k] *= 1 - selected[k];
        }
        #[cfg(feature = "fault-injection")]
        let selected = selected; // placeholder so both sides stay identical
        // Capacities and the assignment flow.
        let a_caps: Vec<u64> = (0..m1).map(|k| size_best * selected[k] * lens[k]).collect();
        let b_caps: Vec<Vec<u64>> = (0..m1)
            .map(|k| {
                (0..n)
                    .map(|i| size_best * lens[k] * desired[i][k] * best[i])
                    .collect()
            })
            .collect();
        let c_caps: Vec<u64> = (0..n).map(|_| min_len).collect();
        let max_flow = min_len * size_best;
        let mut net = PlainFlow::new(a_caps, b_caps, c_caps);
        let mut first = true;
        while net.flow < max_flow {
            if first {
                net.greedy_sweep();
                first = false;
            } else {
                let found = net.augment_once();
                assert!(found, "legal iteration must saturate its max flow");
            }
        }
        for i in 0..n {
            regs.alloc_den[i] += size_best * best[i];
            for k in 0..m1 {
                regs.alloc[i][k] += net.b_flow[k][i];
            }
        }
        iterations.push(IterationTrace {
            best_subset: best,
            min_len,
            size_best,
            c_star,
            selected,
            available_after: regs.available.clone(),
            served_after: regs.served.clone(),
            flow_b: net.b_flow.clone(),
            flow_total: net.flow,
        });
        if !pad && iter_count > n {
            unreachable!("more than n serving iterations");
        }
    }
    let allocation = final_serving(instance, &w, &regs.alloc, &regs.alloc_den);
    RunTrace {
        q,
        big_l: instance.big_l,
        slots: instance.slots,
        w,
        interval_len: lens,
        desired,
        iterations,
        alloc_matrix: regs.alloc,
        alloc_denominator: regs.alloc_den,
        allocation,
    }
}

/// Exhaustive scan over u = 1..2^n − 1 with the strict-inequality
/// first-wins update rule on cross-multiplied averages. Exposed so
/// tests can evaluate the argmin on arbitrary register states.
pub fn exhaustive_argmin(
    n: usize,
    q: u64,
    available: &[u64],
    served: &[u64],
    lens: &[u64],
    desired: &[Vec<u64>],
) -> (Vec<u64>, u64, u64) {
    let sentinel = n as u64 * (q + 1);
    let mut best = vec![0u64; n];
    let mut min_len = sentinel;
    let mut size_best = 0u64;
    for u in 1..(1u64 << n) {
        let members: Vec<u64> = (0..n).map(|i| (u >> i) & 1).collect();
        let size: u64 = members.iter().sum();
        let h: u64 = (0..n).map(|i| members[i] * served[i]).sum();
        let legal = u64::from(h == 0);
        let len = len_of_subset(&members, available, desired, lens);
        let len_star = len * legal + sentinel * (1 - legal);
        let a = size_best * len_star;
        let b = size * min_len;
        if a < b {
            best = members;
            min_len = len_star;
            size_best = size;
        }
    }
    (best, min_len, size_best)
}

/// True when exactly one legal subset attains the minimum average on
/// the given state. Used to pick the allocation-comparison sub-corpus.
pub fn minimizer_is_unique(
    n: usize,
    available: &[u64],
    served: &[u64],
    lens: &[u64],
    desired: &[Vec<u64>],
) -> bool {
    let mut best: Option<(u128, u128)> = None; // avg as (len, size) cross-compared
    let mut count = 0usize;
    for u in 1..(1u64 << n) {
        let members: Vec<u64> = (0..n).map(|i| (u >> i) & 1).collect();
        if (0..n).any(|i| members[i] == 1 && served[i] == 1) {
            continue;
        }
        let size: u64 = members.iter().sum();
        let len = len_of_subset(&members, available, desired, lens);
        match best {
            None => {
                best = Some((len as u128, size as u128));
                count = 1;
            }
            Some((bl, bs)) => {
                let lhs = len as u128 * bs;
                let rhs = bl * size as u128;
                if lhs < rhs {
                    best = Some((len as u128, size as u128));
                    count = 1;
                } else if lhs == rhs {
                    count += 1;
                }
            }
        }
    }
    count == 1
}

fn select_exhaustive(
    instance: &PlainInstance,
    regs: &Registers,
    lens: &[u64],
    desired: &[Vec<u64>],
) -> (Vec<u64>, u64, u64) {
    exhaustive_argmin(
        instance.n,
        instance.q,
        &regs.available,
        &regs.served,
        lens,
        desired,
    )
}

/// Capacity binary search over [0, Q·n!+1] plus residual min-cut subset
/// extraction, then Len/size recomputed from the extracted subset.
fn select_polynomial(
    instance: &PlainInstance,
    regs: &Registers,
    lens: &[u64],
    desired: &[Vec<u64>],
) -> (Vec<u64>, u64, u64, u64) {
    let n = instance.n;
    let m1 = lens.len();
    let fact = instance.factorial();
    let feasible = |c: u64| -> bool {
        let mut net = feasibility_net(instance, regs, lens, desired, c);
        net.run_to_max();
        let unserved = n as u64 - regs.served.iter().sum::<u64>();
        net.flow == c * unserved
    };
    let mut c_lo = 0u64;
    let mut c_hi = instance.q * fact + 1;
    while c_hi - c_lo != 1 {
        let c_mid = (c_lo + c_hi) / 2;
        if feasible(c_mid) {
            c_lo = c_mid;
        } else {
            c_hi = c_mid;
        }
    }
    let c_star = c_lo;
    // Residual graph of G(S, X; c*+1): an unserved agent is in S_min iff
    // no source→interval→agent path with positive residuals remains.
    let mut net = feasibility_net(instance, regs, lens, desired, c_star + 1);
    net.run_to_max();
    let best: Vec<u64> = (0..n)
        .map(|i| {
            if regs.served[i] == 1 {
                return 0;
            }
            let reach: u64 = (0..m1).map(|k| net.a_res[k].min(net.b_res[k][i])).sum();
            u64::from(reach == 0)
        })
        .collect();
    let size_best: u64 = best.iter().sum();
    let min_len = len_of_subset(&best, &regs.available, desired, lens);
    (best, min_len, size_best, c_star)
}

fn feasibility_net(
    instance: &PlainInstance,
    regs: &Registers,
    lens: &[u64],
    desired: &[Vec<u64>],
    c: u64,
) -> PlainFlow {
    let n = instance.n;
    let m1 = lens.len();
    let fact = instance.factorial();
    let a: Vec<u64> = (0..m1).map(|k| fact * regs.available[k] * lens[k]).collect();
    let b: Vec<Vec<u64>> = (0..m1)
        .map(|k| {
            (0..n)
                .map(|i| fact * regs.available[k] * lens[k] * desired[i][k] * (1 - regs.served[i]))
                .collect()
        })
        .collect();
    let c_caps: Vec<u64> = (0..n).map(|_| c).collect();
    PlainFlow::new(a, b, c_caps)
}

/// The serving pass: exclusive-run coalescing and n!-rescaled exact
/// division, mirroring the secure subprotocol's arithmetic.
fn final_serving(
    instance: &PlainInstance,
    w: &[u64],
    alloc: &[Vec<u64>],
    alloc_den: &[u64],
) -> Allocation {
    let n = instance.n;
    let q = instance.q;
    let m1 = w.len() - 1;
    let fact = instance.factorial();
    // Exclusive classification: count holders, remember the last one.
    let exclusive: Vec<u64> = (0..m1)
        .map(|k| {
            let mut count = 0u64;
            let mut relevant = 0u64;
            for (i, rows) in alloc.iter().enumerate() {
                if rows[k] > 0 {
                    count += 1;
                    relevant = i as u64 + 1;
                }
            }
            if count == 1 {
                relevant
            } else {
                0
            }
        })
        .collect();
    let mut pieces: Vec<Vec<(Frac, Frac)>> = vec![Vec::new(); n];
    let nfq = Frac::from_integer((fact * q) as i128);
    let qf = Frac::from_integer(q as i128);
    let mut k = 0usize;
    while k < m1 {
        if exclusive[k] == 0 {
            let mut position = fact * w[k];
            for (i, rows) in alloc.iter().enumerate() {
                let relevant = rows[k] > 0;
                let numerator = fact * rows[k];
                debug_assert_eq!(
                    if alloc_den[i] > 0 { numerator % alloc_den[i] } else { 0 },
                    0,
                    "n!-rescaled division must be exact"
                );
                let size = if alloc_den[i] > 0 { numerator / alloc_den[i] } else { 0 };
                if relevant {
                    let start = Frac::from_integer(position as i128) / nfq;
                    let end = Frac::from_integer((position + size) as i128) / nfq;
                    if end > start {
                        pieces[i].push((start, end));
                    }
                }
                position += size;
            }
            k += 1;
        } else {
            let mut j = k + 1;
            while j < m1 && exclusive[j] == exclusive[j - 1] {
                j += 1;
            }
            let owner = (exclusive[k] - 1) as usize;
            let start = Frac::from_integer(w[k] as i128) / qf;
            let end = Frac::from_integer(w[j] as i128) / qf;
            if end > start {
                pieces[owner].push((start, end));
            }
            k = j;
        }
    }
    Allocation { pieces }
}

// ----------------------------------------------------------------------
// Independent naive implementation and property checkers
// ----------------------------------------------------------------------

/// One recursion step of the naive implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveIteration {
    pub subset: Vec<u64>,
    pub avg: Frac,
}

/// Direct recursive implementation working on interval index sets and
/// rational averages; shares only the first-wins tie-break convention.
/// Returns the iteration sequence and each agent's utility (measure of
/// its piece under its own valuation).
pub fn naive_allocate(instance: &PlainInstance) -> (Vec<NaiveIteration>, Vec<Frac>) {
    let n = instance.n;
    let w = instance.boundary_array();
    let m1 = w.len() - 1;
    let desired = instance.desirability(&w);
    let lens: Vec<u64> = (0..m1).map(|k| w[k + 1] - w[k]).collect();
    let mut remaining_agents: Vec<usize> = (0..n).collect();
    let mut remaining_intervals: Vec<usize> = (0..m1).collect();
    let mut iterations = Vec::new();
    let mut utilities = vec![Frac::zero(); n];
    while !remaining_agents.is_empty() {
        let mut best: Option<(Vec<u64>, Frac)> = None;
        for u in 1..(1u64 << n) {
            let members: Vec<u64> = (0..n).map(|i| (u >> i) & 1).collect();
            if (0..n).any(|i| members[i] == 1 && !remaining_agents.contains(&i)) {
                continue;
            }
            let size: u64 = members.iter().sum();
            let len: u64 = remaining_intervals
                .iter()
                .filter(|&&k| (0..n).any(|i| members[i] == 1 && desired[i][k] == 1))
                .map(|&k| lens[k])
                .sum();
            let avg = Frac::new(len as i128, size as i128);
            if best.as_ref().is_none_or(|(_, b)| avg < *b) {
                best = Some((members, avg));
            }
        }
        let (members, avg) = best.expect("non-empty agent set has a minimizing subset");
        let served_intervals: Vec<usize> = remaining_intervals
            .iter()
            .copied()
            .filter(|&k| (0..n).any(|i| members[i] == 1 && desired[i][k] == 1))
            .collect();
        for i in 0..n {
            if members[i] == 1 {
                // Each served agent receives desired cake of length exactly
                // avg; under its own valuation that measures avg / |supp|.
                let supp: u64 = (0..instance.slots)
                    .map(|j| {
                        instance.ints[i].endpoints[2 * j + 1] - instance.ints[i].endpoints[2 * j]
                    })
                    .sum();
                utilities[i] = avg / Frac::from_integer(supp as i128);
                remaining_agents.retain(|&a| a != i);
            }
        }
        remaining_intervals.retain(|k| !served_intervals.contains(k));
        iterations.push(NaiveIteration {
            subset: members,
            avg,
        });
    }
    (iterations, utilities)
}

/// Envy-freeness and proportionality report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessReport {
    /// (envious agent, envied agent, own measure, other's measure)
    pub envy_violations: Vec<(usize, usize, Frac, Frac)>,
    /// Agents whose own-measure falls below 1/n.
    pub proportionality_violations: Vec<(usize, Frac)>,
}

impl FairnessReport {
    pub fn passed(&self) -> bool {
        self.envy_violations.is_empty() && self.proportionality_violations.is_empty()
    }
}

/// Exact-rational envy-freeness and proportionality check.
pub fn check_envy_free(instance: &PlainInstance, allocation: &Allocation) -> FairnessReport {
    let n = instance.n;
    let mut report = FairnessReport {
        envy_violations: Vec::new(),
        proportionality_violations: Vec::new(),
    };
    let share = Frac::new(1, n as i128);
    for i in 0..n {
        let own = instance.valuations[i].measure(&allocation.pieces[i]);
        if own < share {
            report.proportionality_violations.push((i, own));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let other = instance.valuations[i].measure(&allocation.pieces[j]);
            if other > own {
                report.envy_violations.push((i, j, own, other));
            }
        }
    }
    report
}

/// One profitable deviation found by [`check_strategyproof`].
#[derive(Debug, Clone)]
pub struct Deviation {
    pub agent: usize,
    pub misreport: PiecewiseUniformValuation,
    pub truthful_utility: Frac,
    pub deviant_utility: Frac,
}

/// Tries every misreport in `grid` for every agent; reports the first
/// deviation that strictly beats truth-telling, if any. Utilities are
/// measured under the true valuation.
pub fn check_strategyproof(
    truth: &[PiecewiseUniformValuation],
    grid: &[PiecewiseUniformValuation],
    mode: SelectionMode,
) -> Result<Option<Deviation>, ValuationError> {
    let honest = PlainInstance::build(truth.to_vec(), false)?;
    let honest_trace = cc_puv_allocate(&honest, mode, false);
    for agent in 0..truth.len() {
        let truthful_utility =
            truth[agent].measure(&honest_trace.allocation.pieces[agent]);
        for misreport in grid {
            if misreport == &truth[agent] {
                continue;
            }
            let mut reported = truth.to_vec();
            reported[agent] = misreport.clone();
            let instance = PlainInstance::build(reported, false)?;
            let trace = cc_puv_allocate(&instance, mode, false);
            let deviant_utility = truth[agent].measure(&trace.allocation.pieces[agent]);
            if deviant_utility > truthful_utility {
                return Ok(Some(Deviation {
                    agent,
                    misreport: misreport.clone(),
                    truthful_utility,
                    deviant_utility,
                }));
            }
        }
    }
    Ok(None)
}

/// Seeded random instance on the 10^-d grid: n agents, up to `max_ell`
/// support intervals each. Used by test corpora.
pub fn random_instance(
    rng: &mut dyn rand_core::RngCore,
    n: usize,
    max_ell: usize,
    d: u32,
) -> Vec<PiecewiseUniformValuation> {
    let q = 10u64.pow(d) as i128;
    (0..n)
        .map(|_| loop {
            let ell = 1 + (rng.next_u64() as usize) % max_ell;
            let mut points: Vec<i128> = (0..2 * ell)
                .map(|_| (rng.next_u64() % (q as u64 + 1)) as i128)
                .collect();
            points.sort_unstable();
            let intervals: Vec<(Frac, Frac)> = (0..ell)
                .map(|j| {
                    (
                        Frac::new(points[2 * j], q),
                        Frac::new(points[2 * j + 1], q),
                    )
                })
                .filter(|(a, b)| b > a)
                .collect();
            if let Ok(v) = PiecewiseUniformValuation::new(intervals) {
                return v;
            }
        })
        .collect()
}
