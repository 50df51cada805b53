use gaudin_core::bethe::{
    enumerate_solutions, sector_is_even_block, EnumerationOptions, EnumerationReport, Sector,
};
use gaudin_core::spinops::{
    build_hamiltonian, eigensolve, pair_coefficients, parity_split, SpinSystem,
};
use gaudin_core::EllipticContext;

use super::Outcome;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::format::{NumberFormat, Table};

pub const DEFAULT_K: f64 = 0.5;
pub const DEFAULT_Z: [f64; 3] = [0.0, 0.2, 0.4];
pub const DEFAULT_SPINS: [f64; 3] = [0.5, 1.0, 1.5];
pub const DEFAULT_COEFFS: [f64; 2] = [-0.5, -0.25];

pub struct Setup {
    pub system: SpinSystem,
    pub coeffs: Vec<(usize, f64)>,
    pub sectors: Vec<Sector>,
    pub options: EnumerationOptions,
}

pub fn setup(cfg: &RunConfig) -> CliResult<Setup> {
    let ctx = EllipticContext::new(cfg.k.unwrap_or(DEFAULT_K))?;
    let z = cfg.z.clone().unwrap_or_else(|| DEFAULT_Z.to_vec());
    let spins = cfg.spins.clone().unwrap_or_else(|| DEFAULT_SPINS.to_vec());
    let system = SpinSystem::from_spins(&spins, &z, ctx)?;
    let c = cfg
        .coeffs
        .clone()
        .unwrap_or_else(|| DEFAULT_COEFFS.to_vec());
    if c.len() > system.len() {
        return Err(CliError::Usage(format!(
            "{} coefficients for {} sites",
            c.len(),
            system.len()
        )));
    }
    let sectors = match cfg.sector {
        None => Sector::BOTH.to_vec(),
        Some(l) => vec![Sector::from_l(l)?],
    };
    let defaults = EnumerationOptions::default();
    let options = EnumerationOptions {
        budget: cfg.budget.unwrap_or(defaults.budget),
        seed: cfg.seed(),
        ..defaults
    };
    Ok(Setup {
        system,
        coeffs: c.into_iter().enumerate().collect(),
        sectors,
        options,
    })
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    let fmt = NumberFormat::new(cfg.digits()?);
    let s = setup(cfg)?;
    let mut tables = vec![coupling_table(&s, &fmt)?];
    let h = build_hamiltonian(&s.coeffs, &s.system)?;
    let blocks = parity_split(&h, &s.system)?;
    let mut incomplete = Vec::new();
    for &sector in &s.sectors {
        let block = if sector_is_even_block(&s.system, sector) {
            &blocks.even
        } else {
            &blocks.odd
        };
        let ed = eigensolve(block)?.values;
        let report = enumerate_solutions(&s.system, sector, &s.options);
        if !report.is_complete() {
            incomplete.push(format!(
                "l = {}: found {} of {}",
                sector.l(),
                report.found(),
                report.expected
            ));
        }
        tables.push(sector_table(&s, &report, &ed, &fmt));
    }
    let failure = (!incomplete.is_empty()).then(|| {
        CliError::Numerical(format!(
            "enumeration incomplete ({})",
            incomplete.join("; ")
        ))
    });
    Ok(Outcome { tables, failure })
}

fn coupling_table(s: &Setup, fmt: &NumberFormat) -> CliResult<Table> {
    let mut t = Table::new("exchange couplings", &["i", "j", "Hx", "Hy", "Hz"]);
    t.note("H = sum over pairs of Hx Sx Sx + Hy Sy Sy + Hz Sz Sz; sites numbered from 1");
    for ((i, j), c) in pair_coefficients(&s.coeffs, &s.system)? {
        let mut row = vec![(i + 1).to_string(), (j + 1).to_string()];
        row.extend(c.iter().map(|&x| fmt.real(x)));
        t.push(row);
    }
    Ok(t)
}

fn sector_table(s: &Setup, report: &EnumerationReport, ed: &[f64], fmt: &NumberFormat) -> Table {
    let m = s.system.root_count();
    let mut header = vec!["l", "E", "E_ed", "delta", "residual"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend((1..=m).map(|a| format!("lambda{a}")));
    let mut t = Table {
        title: format!("sector l = {}", report.sector.l()),
        header,
        ..Default::default()
    };
    t.note(format!(
        "{} of {} solutions after {} starts; E_ed is the matching eigenvalue of the parity block",
        report.found(),
        report.expected,
        report.attempts
    ));
    for (row_index, (energy, sol)) in report.by_energy(&s.coeffs).into_iter().enumerate() {
        let mut row = vec![report.sector.l().to_string(), fmt.real(energy)];
        match ed.get(row_index) {
            Some(&e) => row.extend([fmt.real(e), fmt.real(energy - e)]),
            None => row.extend([String::new(), String::new()]),
        }
        row.push(fmt.real(sol.residual_norm));
        let mut roots = sol.roots().to_vec();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)));
        row.extend(roots.iter().map(|&z| fmt.complex(z)));
        t.push(row);
    }
    t
}
