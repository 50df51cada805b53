use gaudin_core::{Complex64, EllipticContext};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::format::{parse_complex, NumberFormat, Table};

pub const DEFAULT_K: f64 = 0.5;

pub fn run(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let fmt = NumberFormat::new(cfg.digits()?);
    let ctx = EllipticContext::new(cfg.k.unwrap_or(DEFAULT_K))?;
    let points = cfg
        .eval
        .iter()
        .flatten()
        .map(|s| {
            parse_complex(s)
                .ok_or_else(|| CliError::Usage(format!("cannot parse complex number '{s}'")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut tables = Vec::new();
    if cfg.constants.unwrap_or(false) || points.is_empty() {
        tables.push(constants_table(&ctx, &fmt));
    }
    if !points.is_empty() {
        tables.push(eval_table(&ctx, &points, &fmt));
    }
    Ok(tables)
}

fn constants_table(ctx: &EllipticContext, fmt: &NumberFormat) -> Table {
    let mut t = Table::new("elliptic constants", &["k", "K", "K_prime", "q", "C"]);
    t.note("C is the shift in phi(u + iK') = phi(u) + iC");
    t.push(
        [ctx.k, ctx.kk, ctx.kk_prime, ctx.q, ctx.quasi_shift]
            .iter()
            .map(|&x| fmt.real(x))
            .collect(),
    );
    t
}

fn eval_table(ctx: &EllipticContext, points: &[Complex64], fmt: &NumberFormat) -> Table {
    let mut t = Table::new(
        format!("special functions at k = {}", fmt.real(ctx.k)),
        &["u", "sn", "cn", "dn", "phi1", "phi4"],
    );
    t.note("'pole' marks a value within the pole guard");
    for &u in points {
        let mut row = vec![fmt.complex(u)];
        match ctx.jacobi_elliptic(u) {
            Ok((sn, cn, dn)) => row.extend([sn, cn, dn].map(|z| fmt.complex(z))),
            Err(_) => row.extend(["pole"; 3].map(String::from)),
        }
        match ctx.phi(u) {
            Ok((p1, p4)) => row.extend([p1, p4].map(|z| fmt.complex(z))),
            Err(_) => row.extend(["pole"; 2].map(String::from)),
        }
        t.push(row);
    }
    t
}
