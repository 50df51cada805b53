use std::path::PathBuf;

use serde::Serialize;

use gaudin_core::acsm::{
    classical_energy, classical_limit, continuation_step, excited_states, extrapolate_trace,
    ground_state_seed, root_layout, AcsmParams, ContinuationOptions, ContinuationTrace,
    SeedOptions, TracePoint, DEFAULT_SCHEDULE,
};
use gaudin_core::bethe::BetheSolution;

use super::Outcome;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::format::{NumberFormat, Table};

const EXCITED_ATTEMPTS: usize = 2000;

/// One entry of the root dump.
#[derive(Debug, Serialize)]
pub struct RootDump {
    #[serde(rename = "N")]
    pub n: usize,
    pub l: u8,
    /// 0 for the ground state, then excited states by energy.
    pub state: usize,
    pub roots: Vec<RootEntry>,
    pub energy: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct RootEntry {
    pub re: f64,
    pub im: f64,
}

impl RootDump {
    fn new(n: usize, state: usize, sol: &BetheSolution) -> Self {
        Self {
            n,
            l: sol.sector().l(),
            state,
            roots: sol
                .roots()
                .iter()
                .map(|z| RootEntry { re: z.re, im: z.im })
                .collect(),
            energy: -sol.r[0].re,
            residual: sol.residual_norm,
        }
    }
}

pub struct Setup {
    pub params: AcsmParams,
    pub schedule: Vec<usize>,
    pub seed: SeedOptions,
    pub roots_out: Option<PathBuf>,
    pub excited: usize,
}

pub fn setup(cfg: &RunConfig) -> CliResult<Setup> {
    let base = AcsmParams::default();
    let schedule = cfg
        .schedule
        .clone()
        .unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage(
            "schedule must be non-empty and strictly increasing".into(),
        ));
    }
    let params = AcsmParams::new(
        schedule[0],
        cfg.a.unwrap_or(base.a),
        cfg.b.unwrap_or(base.b),
        cfg.k.unwrap_or(base.k),
    )?;
    for &n in &schedule {
        params.with_n(n)?;
    }
    let defaults = SeedOptions::default();
    Ok(Setup {
        params,
        schedule,
        seed: SeedOptions {
            attempts: cfg.attempts.unwrap_or(defaults.attempts),
            seed: cfg.seed(),
            ..defaults
        },
        roots_out: cfg.roots_out.clone(),
        excited: cfg.excited.unwrap_or(0),
    })
}

pub struct AcsmRun {
    pub trace: ContinuationTrace,
    pub excited: Vec<BetheSolution>,
    pub failure: Option<CliError>,
}

/// Seeds, continues and samples excited states. A continuation failure
/// keeps the partial trace.
pub fn compute(s: &Setup) -> CliResult<AcsmRun> {
    let gs = ground_state_seed(&s.params, &s.seed)?;
    let excited = if s.excited > 0 {
        excited_states(&s.params, &gs, s.excited, EXCITED_ATTEMPTS, s.seed.seed)?
    } else {
        Vec::new()
    };
    let mut trace = ContinuationTrace::start(s.params, gs)?;
    let opts = ContinuationOptions::default();
    let mut failure = None;
    for &n in &s.schedule[1..] {
        if let Err(e) = continuation_step(&mut trace, n, &opts) {
            failure = Some(CliError::Core(e));
            break;
        }
    }
    Ok(AcsmRun {
        trace,
        excited,
        failure,
    })
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    let fmt = NumberFormat::new(cfg.digits()?);
    let s = setup(cfg)?;
    let result = compute(&s)?;
    let mut tables = vec![trace_table(&s, &result.trace, &fmt)?];
    if !result.excited.is_empty() {
        tables.push(excited_table(&s, &result, &fmt));
    }
    if let Some(path) = &s.roots_out {
        write_roots(path, &result)?;
    }
    Ok(Outcome {
        tables,
        failure: result.failure,
    })
}

fn trace_table(s: &Setup, trace: &ContinuationTrace, fmt: &NumberFormat) -> CliResult<Table> {
    let p = &s.params;
    let mut t = Table::new(
        format!(
            "ground state, a = {}, b = {}, k = {}",
            fmt.real(p.a),
            fmt.real(p.b),
            fmt.real(p.k)
        ),
        &[
            "N",
            "lambda1_N",
            "min_re",
            "max_re",
            "E_per_N",
            "E_classical_per_N",
            "residual",
        ],
    );
    t.note("min_re and max_re run over the arc roots only");
    for pt in &trace.points {
        t.push(trace_row(pt, classical_energy(&p.with_n(pt.n)?)?, fmt));
    }
    let limit = classical_limit(p)?;
    match extrapolate_trace(trace) {
        Ok(ex) => {
            t.note(
                "inf row: least-squares cubic in 1/N; classical column is the closed-form limit",
            );
            t.push(vec![
                "inf".into(),
                fmt.real(ex.lambda1_n.limit_value),
                fmt.real(ex.min_re.limit_value),
                fmt.real(ex.max_re.limit_value),
                fmt.real(ex.energy_per_spin.limit_value),
                fmt.real(limit),
                String::new(),
            ]);
        }
        Err(e) => {
            t.note(format!("notice: no extrapolation row ({e})"));
            t.note(format!("classical limit {}", fmt.real(limit)));
        }
    }
    Ok(t)
}

fn trace_row(pt: &TracePoint, classical: f64, fmt: &NumberFormat) -> Vec<String> {
    vec![
        pt.n.to_string(),
        fmt.real(pt.lambda1_n()),
        fmt.real(pt.min_re),
        fmt.real(pt.max_re),
        fmt.real(pt.energy_per_spin),
        fmt.real(classical),
        fmt.real(pt.solution.residual_norm),
    ]
}

fn excited_table(s: &Setup, run: &AcsmRun, fmt: &NumberFormat) -> Table {
    let mut t = Table::new(
        format!("sampled excited states at N = {}", s.params.n),
        &["state", "E", "near_centre", "arc", "detached"],
    );
    t.note("roots counted by region: real in (0, a), Re > b, elsewhere");
    for (i, sol) in run.excited.iter().enumerate() {
        let layout = root_layout(sol, &s.params);
        t.push(vec![
            (i + 1).to_string(),
            fmt.real(-sol.r[0].re),
            layout.near_centre.to_string(),
            layout.arc.to_string(),
            layout.detached.to_string(),
        ]);
    }
    t
}

fn write_roots(path: &std::path::Path, run: &AcsmRun) -> CliResult<()> {
    let mut dump: Vec<RootDump> = run
        .trace
        .points
        .iter()
        .map(|p| RootDump::new(p.n, 0, &p.solution))
        .collect();
    let n0 = run.trace.points[0].n;
    dump.extend(
        run.excited
            .iter()
            .enumerate()
            .map(|(i, s)| RootDump::new(n0, i + 1, s)),
    );
    let path = crate::config::resolve_output_path(path);
    let text = serde_json::to_string_pretty(&dump).expect("root dump serialises");
    std::fs::write(path, text + "\n")?;
    Ok(())
}
