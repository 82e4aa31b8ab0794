//! Leader-follower scenario: S-curve leader, scattered followers, a
//! deterministic tick loop and CSV logging.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::dynamics::{integrate_step, AgentState};
use crate::error::{FlockError, Result};
use crate::metrics::{
    collision_check, control_efficiency, distance_metrics, order_metric, trajectory_length, MetricsRecord,
};
use crate::mrf::{build_neighbor_graph, control_step};
use crate::potentials::desired_distance;
use crate::vec2::Vec2;

/// Index of the leader in every state vector.
pub const LEADER: usize = 0;

const MAX_SPAWN_REJECTIONS: usize = 10_000;

/// Leader velocity at time `t`: zero while gathering, then constant speed
/// with heading `A·sin(2π(t − t_gather)/P)` measured from +x.
pub fn leader_velocity(t: f64, config: &ScenarioConfig) -> Vec2 {
    if t < config.gather_duration {
        return Vec2::ZERO;
    }
    let phase = TAU * (t - config.gather_duration) / config.s_curve_period;
    let heading = config.s_curve_amplitude * phase.sin();
    Vec2::new(heading.cos(), heading.sin()) * config.leader_speed
}

/// Kinematic leader integrated tick by tick from the origin.
#[derive(Debug, Clone)]
pub struct LeaderTrack {
    tick: usize,
    state: AgentState,
}

impl LeaderTrack {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            tick: 0,
            state: AgentState { velocity: leader_velocity(0.0, config), ..AgentState::default() },
        }
    }

    pub fn state(&self) -> AgentState {
        self.state
    }

    pub fn advance(&mut self, config: &ScenarioConfig) {
        self.state.position += self.state.velocity * config.dt;
        self.tick += 1;
        self.state.velocity = leader_velocity(self.tick as f64 * config.dt, config);
    }
}

/// Leader state at time `t`, with position accumulated at tick resolution.
/// Between ticks the position is interpolated along the current velocity.
pub fn leader_reference(t: f64, config: &ScenarioConfig) -> AgentState {
    let t = t.max(0.0);
    let mut track = LeaderTrack::new(config);
    let whole = (t / config.dt).floor() as usize;
    for _ in 0..whole {
        track.advance(config);
    }
    let mut s = track.state();
    let rem = t - whole as f64 * config.dt;
    if rem > 0.0 {
        s.position += s.velocity * rem;
        s.velocity = leader_velocity(t, config);
    }
    s
}

/// Initial states: the leader at the origin followed by `n_agents − 1`
/// followers at rest, uniform in the annulus `[2·d_t, spawn_radius]`.
pub fn spawn_followers(config: &ScenarioConfig) -> Result<Vec<AgentState>> {
    let d_t = desired_distance(&config.controller.potentials)?;
    let r_in = 2.0 * d_t;
    let r_out = config.spawn_radius;
    if r_out < r_in {
        return Err(FlockError::InfeasibleScenario(format!(
            "spawn radius {r_out} is inside the exclusion radius {r_in:.4}"
        )));
    }
    let min_sep = 2.0 * config.controller.bounds.r_coll;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut positions = vec![Vec2::ZERO];
    let mut rejections = 0;
    while positions.len() < config.n_agents {
        // area-uniform radius
        let r = rng.gen_range(r_in * r_in..=r_out * r_out).sqrt();
        let theta = rng.gen_range(0.0..TAU);
        let p = Vec2::new(r * theta.cos(), r * theta.sin());
        if positions.iter().all(|q| q.distance(p) >= min_sep) {
            positions.push(p);
        } else {
            rejections += 1;
            if rejections >= MAX_SPAWN_REJECTIONS {
                return Err(FlockError::InfeasibleScenario(format!(
                    "could not place {} agents with spacing {min_sep} m",
                    config.n_agents
                )));
            }
        }
    }
    let mut states: Vec<AgentState> = positions.into_iter().map(AgentState::at_rest).collect();
    states[LEADER] = LeaderTrack::new(config).state();
    Ok(states)
}

/// States and metrics at one tick. `states[i].last_input` is the input
/// applied on the step that produced this tick (zero for the leader).
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub states: Vec<AgentState>,
    pub metrics: MetricsRecord,
    pub collision_free: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub u_avg: f64,
    pub traj_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationLog {
    pub config: ScenarioConfig,
    pub initial: TickRecord,
    /// One record per simulated tick.
    pub ticks: Vec<TickRecord>,
    pub summary: Vec<AgentSummary>,
    /// True if any tick (including the initial one) violated the safety
    /// separation.
    pub collided: bool,
}

impl SimulationLog {
    /// Initial record followed by every tick.
    pub fn records(&self) -> impl Iterator<Item = &TickRecord> {
        std::iter::once(&self.initial).chain(self.ticks.iter())
    }

    pub fn write_trajectory_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,agent_id,px,py,vx,vy,ux,uy")?;
        for rec in self.records() {
            for (id, s) in rec.states.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    rec.t,
                    id,
                    s.position.x,
                    s.position.y,
                    s.velocity.x,
                    s.velocity.y,
                    s.last_input.x,
                    s.last_input.y
                )?;
            }
        }
        Ok(())
    }

    pub fn write_metrics_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,order,d_min,d_max,d_avg")?;
        for rec in self.records() {
            let m = &rec.metrics;
            writeln!(w, "{},{},{},{},{}", m.t, m.order, m.d_min, m.d_max, m.d_avg)?;
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "agent_id,u_avg,traj_length")?;
        for (id, s) in self.summary.iter().enumerate() {
            writeln!(w, "{},{},{}", id, s.u_avg, s.traj_length)?;
        }
        Ok(())
    }

    /// Writes `trajectory.csv`, `metrics.csv` and `summary.csv` into `dir`.
    pub fn write_csv_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let open = |name: &str| -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(dir.join(name))?)) };
        let mut w = open("trajectory.csv")?;
        self.write_trajectory_csv(&mut w)?;
        w.flush()?;
        let mut w = open("metrics.csv")?;
        self.write_metrics_csv(&mut w)?;
        w.flush()?;
        let mut w = open("summary.csv")?;
        self.write_summary_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn record(t: f64, states: Vec<AgentState>, config: &ScenarioConfig) -> Result<TickRecord> {
    let positions: Vec<Vec2> = states.iter().map(|s| s.position).collect();
    let velocities: Vec<Vec2> = states.iter().map(|s| s.velocity).collect();
    let graph = build_neighbor_graph(&positions, config.controller.k, LEADER)?;
    let (d_min, d_max, d_avg) = distance_metrics(&positions)?;
    let metrics = MetricsRecord {
        t,
        order: order_metric(&velocities, &graph)?,
        d_min,
        d_max,
        d_avg,
        input_magnitudes: states.iter().map(|s| s.last_input.norm()).collect(),
    };
    let collision_free = collision_check(&positions, config.controller.bounds.r_coll);
    Ok(TickRecord { t, states, metrics, collision_free })
}

/// Runs the scenario for `config.steps` ticks.
pub fn run_simulation(config: &ScenarioConfig) -> Result<SimulationLog> {
    config.validate()?;
    let mut states = spawn_followers(config)?;
    let mut leader = LeaderTrack::new(config);
    let initial = record(0.0, states.clone(), config)?;
    let mut ticks = Vec::with_capacity(config.steps);

    for step in 0..config.steps {
        let leader_now = leader.state();
        states[LEADER] = leader_now;
        let positions: Vec<Vec2> = states.iter().map(|s| s.position).collect();
        let graph = build_neighbor_graph(&positions, config.controller.k, LEADER)?;
        let control = control_step(&states, &graph, leader_now.velocity, &config.controller)?;

        for (i, s) in states.iter_mut().enumerate() {
            if i != LEADER {
                *s = integrate_step(s, control.commands[i], config.dt)?;
            }
        }
        leader.advance(config);
        states[LEADER] = leader.state();

        let t = (step + 1) as f64 * config.dt;
        ticks.push(record(t, states.clone(), config)?);
    }

    let collided = std::iter::once(&initial).chain(&ticks).any(|r| !r.collision_free);
    let summary = (0..config.n_agents)
        .map(|i| {
            let inputs: Vec<Vec2> = ticks.iter().map(|r| r.states[i].last_input).collect();
            let path: Vec<Vec2> = std::iter::once(&initial)
                .chain(&ticks)
                .map(|r| r.states[i].position)
                .collect();
            Ok(AgentSummary {
                u_avg: if inputs.is_empty() { 0.0 } else { control_efficiency(&inputs)? },
                traj_length: if path.len() < 2 { 0.0 } else { trajectory_length(&path)? },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationLog { config: *config, initial, ticks, summary, collided })
}
