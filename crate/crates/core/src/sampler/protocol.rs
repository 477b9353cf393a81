//! The strobed relaxation protocol: repeated exposures to fluctuations,
//! each followed by a classical readout.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loops::{loop_update_thermal, LoopSettings};
use super::metropolis::metropolis_sweep;
use super::pimc::{default_slices, pimc_sweep, quench_readout, PimcMoves, Worldlines};
use super::problem::Problem;
use crate::error::{Error, Result};
use crate::ice::{monopole_count, IceLattice, Spin, SpinState};

/// Generator used by every chain; one stream per chain.
pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Default sweep count standing in for a long (equilibrating) pause.
pub const LONG_SWEEPS: usize = 1 << 12;
/// Default sweep count standing in for the shortest pause.
pub const SHORT_SWEEPS: usize = 1 << 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Metropolis,
    Loop,
    Pimc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExposureParams {
    pub gamma: f64,
    pub temperature: f64,
    pub sweeps: usize,
}

impl ExposureParams {
    pub fn classical(temperature: f64, sweeps: usize) -> Self {
        ExposureParams { gamma: 0.0, temperature, sweeps }
    }

    /// Fluctuation strengths of the physical qubit lattice.
    pub fn chimera_scale(sweeps: usize) -> Self {
        ExposureParams { gamma: 0.34, temperature: 0.083, sweeps }
    }

    /// Effective fluctuation strengths seen by the logical ice spins.
    pub fn logical_scale(sweeps: usize) -> Self {
        ExposureParams { gamma: 0.010, temperature: 0.089, sweeps }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config(format!("temperature must be positive, got {}", self.temperature)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineOptions {
    /// Loop attempts per sweep of the loop engine (default: active vertices / 4).
    pub loops_per_sweep: Option<usize>,
    pub max_loop_steps: Option<usize>,
    /// Trotter slices (default: [`default_slices`]).
    pub trotter_slices: Option<usize>,
    /// Forbid whole-worldline cluster flips, see [`PimcMoves`].
    pub kinetic: bool,
    /// Record energy and monopole count after every sweep.
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub chain_length: usize,
    pub burn_in: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub engine: Engine,
    #[serde(default)]
    pub options: EngineOptions,
}

impl Default for ProtocolSpec {
    fn default() -> Self {
        ProtocolSpec {
            chain_length: 128,
            burn_in: 16,
            repetitions: 1,
            seed: 0,
            engine: Engine::Loop,
            options: EngineOptions::default(),
        }
    }
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        if self.chain_length == 0 {
            return Err(Error::Config("chain length must be positive".into()));
        }
        if self.burn_in >= self.chain_length {
            return Err(Error::Config(format!(
                "burn-in {} must be shorter than the chain ({})",
                self.burn_in, self.chain_length
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("at least one repetition is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum InitialState {
    Random,
    Given(SpinState),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub energy: f64,
    pub monopoles: usize,
    /// Spins changed since the previous readout (the initial state for step 0).
    pub hamming: usize,
    pub burn_in: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub energy: f64,
    pub monopoles: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleChain {
    pub initial: SpinState,
    pub states: Vec<SpinState>,
    pub steps: Vec<StepRecord>,
    pub burn_in: usize,
    /// Per-exposure sweep traces when requested.
    pub traces: Vec<Vec<SweepTrace>>,
}

impl SampleChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// States after the burn-in prefix.
    pub fn equilibrium(&self) -> &[SpinState] {
        &self.states[self.burn_in.min(self.states.len())..]
    }

    /// Newline-delimited JSON, one record per step.
    pub fn write_ndjson<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (rec, state) in self.steps.iter().zip(&self.states) {
            let line = ChainRecord {
                step: rec.step,
                spins: state.to_json_values(),
                energy: rec.energy,
                monopoles: rec.monopoles,
                hamming: rec.hamming,
                burn_in: rec.burn_in,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads records written by [`SampleChain::write_ndjson`]. The initial
    /// state is not stored, so it is reconstructed as the first readout.
    pub fn read_ndjson<R: BufRead>(lattice: &IceLattice, input: R) -> Result<Self> {
        let mut states = Vec::new();
        let mut steps = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<chain>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: ChainRecord =
                serde_json::from_str(&line).map_err(|e| Error::json(format!("chain record {n}"), e))?;
            states.push(SpinState::from_json_values(lattice, &rec.spins)?);
            steps.push(StepRecord {
                step: rec.step,
                energy: rec.energy,
                monopoles: rec.monopoles,
                hamming: rec.hamming,
                burn_in: rec.burn_in,
            });
        }
        if states.is_empty() {
            return Err(Error::Empty("chain file"));
        }
        let burn_in = steps.iter().take_while(|s| s.burn_in).count();
        Ok(SampleChain { initial: states[0].clone(), states, steps, burn_in, traces: Vec::new() })
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRecord {
    step: usize,
    spins: Vec<Option<Spin>>,
    energy: f64,
    monopoles: usize,
    hamming: usize,
    burn_in: bool,
}

/// Applies exposures to a classical state with one engine.
pub struct Exposer<'a> {
    problem: &'a Problem,
    engine: Engine,
    exposure: ExposureParams,
    options: EngineOptions,
    loop_settings: LoopSettings,
    loops_per_sweep: usize,
    slices: usize,
}

impl<'a> Exposer<'a> {
    pub fn new(problem: &'a Problem, engine: Engine, exposure: ExposureParams, options: EngineOptions) -> Result<Self> {
        exposure.validate()?;
        if engine == Engine::Pimc && exposure.gamma <= 0.0 {
            return Err(Error::Config("the pimc engine needs gamma > 0".into()));
        }
        let mut loop_settings = LoopSettings::for_problem(problem);
        if let Some(m) = options.max_loop_steps {
            loop_settings.max_steps = m;
        }
        let slices = options.trotter_slices.unwrap_or_else(|| default_slices(exposure.gamma, exposure.temperature));
        if engine == Engine::Pimc && slices < 2 {
            return Err(Error::Config("the pimc engine needs at least two Trotter slices".into()));
        }
        Ok(Exposer {
            problem,
            engine,
            exposure,
            options,
            loop_settings,
            loops_per_sweep: options.loops_per_sweep.unwrap_or((problem.lattice().num_active() / 4).max(1)),
            slices,
        })
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    /// One exposure of `sweeps` sweeps, in place.
    pub fn expose(&self, state: &mut SpinState, rng: &mut ChainRng, trace: Option<&mut Vec<SweepTrace>>) -> Result<()> {
        let t = self.exposure.temperature;
        let lattice = self.problem.lattice();
        let mut trace = trace;
        let record = |s: &SpinState, trace: &mut Option<&mut Vec<SweepTrace>>| {
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(SweepTrace { energy: self.problem.energy(s), monopoles: monopole_count(s, lattice) });
            }
        };
        match self.engine {
            Engine::Metropolis => {
                for _ in 0..self.exposure.sweeps {
                    metropolis_sweep(state, self.problem, t, rng);
                    record(state, &mut trace);
                }
            }
            Engine::Loop => {
                for _ in 0..self.exposure.sweeps {
                    metropolis_sweep(state, self.problem, t, rng);
                    for _ in 0..self.loops_per_sweep {
                        loop_update_thermal(state, self.problem, t, self.loop_settings, rng);
                    }
                    record(state, &mut trace);
                }
            }
            Engine::Pimc => {
                if self.exposure.sweeps == 0 {
                    return Ok(());
                }
                let moves = PimcMoves { worldline_flips: !self.options.kinetic };
                let mut w = Worldlines::from_state(state, self.slices);
                for _ in 0..self.exposure.sweeps {
                    pimc_sweep(&mut w, self.problem, self.exposure.gamma, t, moves, rng)?;
                    if trace.is_some() {
                        let probe = SpinState::from_raw(w.slice(0));
                        record(&probe, &mut trace);
                    }
                }
                *state = quench_readout(&w, rng);
            }
        }
        Ok(())
    }
}

/// Runs one chain. Repetition `r` draws from stream `r` of `protocol.seed`.
pub fn run_protocol(
    problem: &Problem,
    protocol: &ProtocolSpec,
    exposure: &ExposureParams,
    initial: &InitialState,
    repetition: u64,
) -> Result<SampleChain> {
    protocol.validate()?;
    let exposer = Exposer::new(problem, protocol.engine, *exposure, protocol.options)?;
    let mut rng = chain_rng(protocol.seed, repetition);
    let mut state = match initial {
        InitialState::Random => problem.random_state(&mut rng),
        InitialState::Given(s) => {
            if s.len() != problem.lattice().num_sites() {
                return Err(Error::Config("initial state does not fit the lattice".into()));
            }
            let mut s = s.clone();
            problem.impose(&mut s);
            s
        }
    };
    let initial_state = state.clone();
    let counted = problem.mobile_sites();
    let mut states = Vec::with_capacity(protocol.chain_length);
    let mut steps = Vec::with_capacity(protocol.chain_length);
    let mut traces = Vec::new();
    for step in 0..protocol.chain_length {
        let previous = state.clone();
        let mut trace = protocol.options.trace.then(Vec::new);
        exposer.expose(&mut state, &mut rng, trace.as_mut())?;
        if let Some(t) = trace {
            traces.push(t);
        }
        debug_assert!(problem.respects_frozen(&state));
        steps.push(StepRecord {
            step,
            energy: problem.energy(&state),
            monopoles: monopole_count(&state, problem.lattice()),
            hamming: state.hamming_on(&previous, counted),
            burn_in: step < protocol.burn_in,
        });
        states.push(state.clone());
    }
    Ok(SampleChain { initial: initial_state, states, steps, burn_in: protocol.burn_in, traces })
}

/// All repetitions of a protocol, run in parallel on the current rayon pool.
pub fn run_repetitions(
    problem: &Problem,
    protocol: &ProtocolSpec,
    exposure: &ExposureParams,
    initial: &InitialState,
) -> Result<Vec<SampleChain>> {
    (0..protocol.repetitions as u64)
        .into_par_iter()
        .map(|r| run_protocol(problem, protocol, exposure, initial, r))
        .collect()
}
