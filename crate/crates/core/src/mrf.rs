//! Distributed screening of candidate inputs on a Markov random field.
//!
//! Agents are nodes; each node's random variable ranges over that agent's
//! feasible candidates. Unary energies are the input and leader-velocity
//! costs, pairwise energies the attraction-repulsion and alignment terms
//! between neighbouring candidates. A synchronous mean-field sweep updates
//! every follower's belief from the previous sweep's neighbour beliefs:
//!
//! ```text
//! Q_i(c) ∝ exp(−[Ψ_acc(c) + Ψ_vel(c) + Σ_j Σ_{c_j} Q_j(c_j)·(Ψ_a(c, c_j) + Ψ_align(c, c_j))])
//! ```
//!
//! The leader is a fixed node with a single candidate held at probability 1.

use rayon::prelude::*;

use crate::control_space::{generate_candidates_or_brake, ControlCandidate, DiscretizationConfig};
use crate::dynamics::{predict_state, AgentState, Bounds};
use crate::error::{invalid, FlockError, Result};
use crate::potentials::{attract_repulse_unchecked, psi_acc, psi_align, psi_vel, PotentialParams, EPS_VELOCITY};
use crate::vec2::Vec2;

/// Per-agent neighbour lists. The leader's list is empty; every follower's
/// list ends with the leader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborGraph {
    neighbors: Vec<Vec<usize>>,
    leader_index: usize,
}

impl NeighborGraph {
    pub fn neighbors(&self, agent: usize) -> &[usize] {
        &self.neighbors[agent]
    }

    pub fn leader_index(&self) -> usize {
        self.leader_index
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn is_leader(&self, agent: usize) -> bool {
        agent == self.leader_index
    }

    /// Builds a graph from explicit lists, e.g. for metrics over a fully
    /// connected set. No invariants beyond index range are enforced.
    pub fn from_lists(neighbors: Vec<Vec<usize>>, leader_index: usize) -> Result<Self> {
        let n = neighbors.len();
        if leader_index >= n {
            return Err(invalid(format!("leader index {leader_index} out of range for {n} agents")));
        }
        if neighbors.iter().flatten().any(|&j| j >= n) {
            return Err(invalid("neighbour index out of range"));
        }
        Ok(Self { neighbors, leader_index })
    }
}

/// k-nearest-follower graph with the leader appended to every follower.
///
/// Distance ties go to the lower agent index.
pub fn build_neighbor_graph(positions: &[Vec2], k: usize, leader_index: usize) -> Result<NeighborGraph> {
    let n = positions.len();
    if n == 0 {
        return Err(invalid("need at least one agent"));
    }
    if leader_index >= n {
        return Err(invalid(format!("leader index {leader_index} out of range for {n} agents")));
    }
    if positions.iter().any(|p| p.x.is_nan() || p.y.is_nan()) {
        return Err(invalid("NaN position"));
    }
    let neighbors = (0..n)
        .map(|i| {
            if i == leader_index {
                return Vec::new();
            }
            let mut others: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i && j != leader_index)
                .map(|j| (positions[i].distance(positions[j]), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut list: Vec<usize> = others.into_iter().take(k).map(|(_, j)| j).collect();
            list.push(leader_index);
            list
        })
        .collect();
    Ok(NeighborGraph { neighbors, leader_index })
}

/// Probability vector over one agent's candidate list.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(invalid("belief over zero candidates"));
        }
        Ok(Self(vec![1.0 / count as f64; count]))
    }

    /// Point mass on `index`.
    pub fn delta(count: usize, index: usize) -> Result<Self> {
        if index >= count {
            return Err(invalid("delta index out of range"));
        }
        let mut p = vec![0.0; count];
        p[index] = 1.0;
        Ok(Self(p))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(total > 0.0 && total.is_finite()) {
            return Err(FlockError::NumericFailure("weights cannot be normalized".into()));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    /// Boltzmann distribution `∝ exp(−energy)`, shifted by the minimum energy
    /// before exponentiation.
    pub fn from_energies(energies: &[f64]) -> Result<Self> {
        let min = energies
            .iter()
            .copied()
            .filter(|e| e.is_finite())
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(FlockError::NumericFailure("all candidate energies are non-finite".into()));
        }
        let weights = energies
            .iter()
            .map(|&e| if e.is_finite() { (min - e).exp() } else { 0.0 })
            .collect();
        Self::from_weights(weights)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest entry, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn init_beliefs(candidate_counts: &[usize]) -> Result<Vec<Belief>> {
    candidate_counts.iter().map(|&c| Belief::uniform(c)).collect()
}

/// One agent's screening domain: its candidates and the input it applied
/// last (needed by the input-turn cost).
#[derive(Debug, Clone, PartialEq)]
pub struct AgentCandidates {
    pub last_input: Vec2,
    pub candidates: Vec<ControlCandidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Maximum number of follower neighbours.
    pub k: usize,
    /// Low-pass filter coefficient.
    pub alpha: f64,
    /// Upper bound on mean-field sweeps per control tick.
    pub iterations: usize,
    /// Early-stop threshold on the largest belief change in a sweep.
    pub epsilon_converge: f64,
    /// Multiplier on every pairwise energy. 1 is the plain model; other
    /// values change the balance between neighbour interaction and the
    /// unary input/velocity costs.
    pub pair_weight: f64,
    pub discretization: DiscretizationConfig,
    pub potentials: PotentialParams,
    pub bounds: Bounds,
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.iterations == 0 {
            return Err(invalid("iterations must be at least 1"));
        }
        if self.epsilon_converge.is_nan() || self.epsilon_converge < 0.0 {
            return Err(invalid("epsilon_converge must be non-negative"));
        }
        if !(self.pair_weight.is_finite() && self.pair_weight > 0.0) {
            return Err(invalid("pair_weight must be positive"));
        }
        self.discretization.validate()?;
        self.potentials.validate()?;
        self.bounds.validate()?;
        if (self.discretization.t_p - self.potentials.t_p).abs() > 0.0 {
            return Err(invalid("prediction horizon differs between discretization and potentials"));
        }
        Ok(())
    }
}

/// Unary energy `Ψ_acc + Ψ_vel` of one candidate.
pub fn unary_energy(c: &ControlCandidate, last_input: Vec2, v_leader: Vec2, params: &PotentialParams) -> f64 {
    psi_acc(c.input, last_input, params) + psi_vel(c.predicted.velocity, v_leader, params)
}

/// Pairwise energy `Ψ_a + Ψ_align` between candidate `ci` of agent i and
/// candidate `cj` of neighbour j, both on predicted states.
pub fn pair_energy(ci: &ControlCandidate, cj: &ControlCandidate, params: &PotentialParams) -> f64 {
    let d = ci.predicted.position.distance(cj.predicted.position);
    attract_repulse_unchecked(d, params) + psi_align(ci.predicted.velocity, cj.predicted.velocity, params)
}

/// Mean-field energy of candidate `c`: unary terms plus the expectation of
/// the pairwise terms under each neighbour's belief.
pub fn candidate_energy(
    c: &ControlCandidate,
    last_input: Vec2,
    neighbors: &[(&Belief, &[ControlCandidate])],
    v_leader: Vec2,
    params: &PotentialParams,
) -> f64 {
    let pairwise: f64 = neighbors
        .iter()
        .map(|(belief, cands)| {
            belief
                .probabilities()
                .iter()
                .zip(cands.iter())
                .map(|(q, cj)| q * pair_energy(c, cj, params))
                .sum::<f64>()
        })
        .sum();
    unary_energy(c, last_input, v_leader, params) + pairwise
}

/// Per-candidate quantities reused across every pair it takes part in.
#[derive(Debug, Clone, Copy)]
struct CandidateGeometry {
    position: Vec2,
    speed: f64,
    /// Unit velocity, or zero below the angle threshold.
    heading: Vec2,
}

impl CandidateGeometry {
    fn new(c: &ControlCandidate) -> Self {
        let v = c.predicted.velocity;
        let speed = v.norm();
        let heading = if speed < EPS_VELOCITY { Vec2::ZERO } else { v * (1.0 / speed) };
        Self { position: c.predicted.position, speed, heading }
    }
}

/// Attraction-repulsion energies and velocity angles for an unordered agent
/// pair, stored row-major in `(lo, hi)` orientation.
#[derive(Debug, Clone)]
struct SharedPair {
    n_lo: usize,
    n_hi: usize,
    attract_repulse: Vec<f64>,
    angle: Vec<f64>,
}

impl SharedPair {
    fn new(lo: &[CandidateGeometry], hi: &[CandidateGeometry], params: &PotentialParams) -> Self {
        let mut attract_repulse = Vec::with_capacity(lo.len() * hi.len());
        let mut angle = Vec::with_capacity(lo.len() * hi.len());
        for a in lo {
            for b in hi {
                attract_repulse.push(attract_repulse_unchecked(a.position.distance(b.position), params));
                let both_moving = a.speed >= EPS_VELOCITY && b.speed >= EPS_VELOCITY;
                angle.push(if both_moving { a.heading.dot(b.heading).clamp(-1.0, 1.0).acos() } else { 0.0 });
            }
        }
        Self { n_lo: lo.len(), n_hi: hi.len(), attract_repulse, angle }
    }

    /// Matrix `[own candidate × other candidate]` of `Ψ_a + Ψ_align` seen
    /// from the side whose geometry is `own`.
    fn directed_energies(
        &self,
        own: &[CandidateGeometry],
        transposed: bool,
        params: &PotentialParams,
        pair_weight: f64,
    ) -> Vec<f64> {
        let (rows, cols) = if transposed { (self.n_hi, self.n_lo) } else { (self.n_lo, self.n_hi) };
        debug_assert_eq!(rows, own.len());
        let mut m = Vec::with_capacity(rows * cols);
        for (r, g) in own.iter().enumerate() {
            let reach = g.speed * params.t_p / params.k_l;
            for c in 0..cols {
                let idx = if transposed { c * self.n_hi + r } else { r * self.n_hi + c };
                let align = (reach * self.angle[idx]).exp();
                m.push(pair_weight * (self.attract_repulse[idx] + align));
            }
        }
        m
    }
}

/// Precomputed unary vectors and per-edge pairwise matrices for one tick.
///
/// Sweeps reuse the tables; the energies they produce are identical to
/// [`candidate_energy`] evaluated term by term.
#[derive(Debug, Clone)]
pub struct EnergyTables {
    unary: Vec<Vec<f64>>,
    /// `edges[i][e]` is `(j, matrix)` with `matrix[ci * n_j + cj]`.
    edges: Vec<Vec<(usize, Vec<f64>)>>,
    leader_index: usize,
}

impl EnergyTables {
    pub fn build(
        agents: &[AgentCandidates],
        graph: &NeighborGraph,
        v_leader: Vec2,
        params: &PotentialParams,
    ) -> Result<Self> {
        Self::build_weighted(agents, graph, v_leader, params, 1.0)
    }

    /// As [`EnergyTables::build`], with every pairwise energy multiplied by
    /// `pair_weight`.
    pub fn build_weighted(
        agents: &[AgentCandidates],
        graph: &NeighborGraph,
        v_leader: Vec2,
        params: &PotentialParams,
        pair_weight: f64,
    ) -> Result<Self> {
        if agents.len() != graph.len() {
            return Err(invalid("candidate sets and graph disagree on agent count"));
        }
        if agents.iter().any(|a| a.candidates.is_empty()) {
            return Err(invalid("agent without candidates"));
        }
        let geometry: Vec<Vec<CandidateGeometry>> = agents
            .iter()
            .map(|a| a.candidates.iter().map(CandidateGeometry::new).collect())
            .collect();

        // Distance and angle terms are symmetric, so each unordered edge is
        // evaluated once and shared by both directions.
        let mut pairs: Vec<(usize, usize)> = (0..agents.len())
            .flat_map(|i| graph.neighbors(i).iter().map(move |&j| (i.min(j), i.max(j))))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let shared: Vec<SharedPair> = pairs
            .par_iter()
            .map(|&(lo, hi)| SharedPair::new(&geometry[lo], &geometry[hi], params))
            .collect();
        let lookup = |i: usize, j: usize| -> (&SharedPair, bool) {
            let key = (i.min(j), i.max(j));
            let idx = pairs.binary_search(&key).expect("edge was registered");
            (&shared[idx], i > j)
        };

        let per_agent: Vec<_> = (0..agents.len())
            .into_par_iter()
            .map(|i| {
                let own = &agents[i];
                let unary = own
                    .candidates
                    .iter()
                    .map(|c| unary_energy(c, own.last_input, v_leader, params))
                    .collect::<Vec<_>>();
                let edges = graph
                    .neighbors(i)
                    .iter()
                    .map(|&j| {
                        let (pair, transposed) = lookup(i, j);
                        (j, pair.directed_energies(&geometry[i], transposed, params, pair_weight))
                    })
                    .collect::<Vec<_>>();
                (unary, edges)
            })
            .collect();
        let (unary, edges) = per_agent.into_iter().unzip();
        Ok(Self { unary, edges, leader_index: graph.leader_index() })
    }

    /// Mean-field energies of every candidate of agent `i` given `beliefs`.
    pub fn energies(&self, i: usize, beliefs: &[Belief]) -> Vec<f64> {
        let mut e = self.unary[i].clone();
        for (j, m) in &self.edges[i] {
            let q = beliefs[*j].probabilities();
            let nj = q.len();
            for (ci, slot) in e.iter_mut().enumerate() {
                let row = &m[ci * nj..(ci + 1) * nj];
                *slot += row.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        e
    }

    /// One synchronous sweep. The leader's belief is carried over unchanged.
    pub fn sweep(&self, beliefs: &[Belief]) -> Result<SweepOutcome> {
        if beliefs.len() != self.unary.len()
            || beliefs.iter().zip(&self.unary).any(|(b, u)| b.len() != u.len())
        {
            return Err(invalid("beliefs do not match candidate sets"));
        }
        let updated: Vec<Belief> = (0..beliefs.len())
            .into_par_iter()
            .map(|i| {
                if i == self.leader_index {
                    Ok(beliefs[i].clone())
                } else {
                    Belief::from_energies(&self.energies(i, beliefs))
                }
            })
            .collect::<Result<_>>()?;
        let max_change = updated
            .iter()
            .zip(beliefs)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        Ok(SweepOutcome { beliefs: updated, max_change })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub beliefs: Vec<Belief>,
    /// Largest absolute change of any belief entry.
    pub max_change: f64,
}

/// A single synchronous mean-field update over all followers.
pub fn mean_field_sweep(
    beliefs: &[Belief],
    agents: &[AgentCandidates],
    graph: &NeighborGraph,
    v_leader: Vec2,
    params: &PotentialParams,
) -> Result<SweepOutcome> {
    EnergyTables::build(agents, graph, v_leader, params)?.sweep(beliefs)
}

/// Input of the most probable candidate, lowest index on ties.
pub fn select_input(belief: &Belief, candidates: &[ControlCandidate]) -> Result<Vec2> {
    if belief.len() != candidates.len() || candidates.is_empty() {
        return Err(invalid("belief and candidate list lengths differ"));
    }
    Ok(candidates[belief.argmax()].input)
}

/// Low-pass filter `(1 − α)·u_last + α·u`. `α = 1` bypasses the filter.
pub fn smooth_input(u: Vec2, u_last: Vec2, alpha: f64) -> Result<Vec2> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(u_last * (1.0 - alpha) + u * alpha)
}

/// Converts an acceleration command to a velocity command for
/// velocity-controlled vehicles: `v + u*·dt`.
pub fn velocity_command(v: Vec2, u_star: Vec2, dt: f64) -> Result<Vec2> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    Ok(v + u_star * dt)
}

/// The single candidate the leader publishes: its state propagated by `t_p`
/// at its reference velocity.
pub fn leader_candidate(leader: &AgentState, t_p: f64) -> Result<ControlCandidate> {
    Ok(ControlCandidate { input: Vec2::ZERO, predicted: predict_state(leader, Vec2::ZERO, t_p)? })
}

/// Diagnostics from one control tick.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutcome {
    /// Smoothed acceleration command per agent; the leader's entry is zero.
    pub commands: Vec<Vec2>,
    /// Raw (pre-filter) selected input per agent.
    pub selected: Vec<Vec2>,
    pub sweeps: usize,
    pub final_change: f64,
}

/// Full pipeline for one tick: candidates, uniform beliefs, up to
/// `iterations` sweeps, argmax selection and smoothing against each
/// follower's last input.
pub fn control_step(
    states: &[AgentState],
    graph: &NeighborGraph,
    v_leader: Vec2,
    config: &ControllerConfig,
) -> Result<ControlOutcome> {
    config.validate()?;
    if states.len() != graph.len() {
        return Err(invalid("state count and graph size differ"));
    }
    if states.iter().any(|s| !s.is_finite()) {
        return Err(invalid("non-finite agent state"));
    }
    let leader = graph.leader_index();
    let agents: Vec<AgentCandidates> = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let candidates = if i == leader {
                vec![leader_candidate(s, config.discretization.t_p)?]
            } else {
                generate_candidates_or_brake(s, &config.discretization, &config.bounds)?
            };
            Ok(AgentCandidates { last_input: s.last_input, candidates })
        })
        .collect::<Result<_>>()?;

    let tables = EnergyTables::build_weighted(&agents, graph, v_leader, &config.potentials, config.pair_weight)?;
    let counts: Vec<usize> = agents.iter().map(|a| a.candidates.len()).collect();
    let mut beliefs = init_beliefs(&counts)?;
    let mut sweeps = 0;
    let mut final_change = f64::INFINITY;
    while sweeps < config.iterations {
        let out = tables.sweep(&beliefs)?;
        beliefs = out.beliefs;
        final_change = out.max_change;
        sweeps += 1;
        if final_change < config.epsilon_converge {
            break;
        }
    }

    let mut commands = vec![Vec2::ZERO; states.len()];
    let mut selected = vec![Vec2::ZERO; states.len()];
    for i in (0..states.len()).filter(|&i| i != leader) {
        let u = select_input(&beliefs[i], &agents[i].candidates)?;
        selected[i] = u;
        commands[i] = smooth_input(u, states[i].last_input, config.alpha)?;
    }
    Ok(ControlOutcome { commands, selected, sweeps, final_change })
}
