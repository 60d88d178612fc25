use std::io::Write;

use levyd::verify::{run_check, Check, SuiteConfig, VerificationReport};
use rayon::prelude::*;

use crate::args::{Format, VerifyArgs};
use crate::error::CliError;
use crate::pool;
use crate::records::open_output;

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let checks: Vec<Check> = if args.check.is_empty() {
        Check::ALL.to_vec()
    } else {
        args.check.iter().map(|s| s.parse::<Check>()).collect::<Result<_, _>>()?
    };
    let mut cfg = SuiteConfig { ibp_n: args.ibp_n, ..SuiteConfig::default() };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    let workers = pool::build(args.threads)?;
    let results: Vec<levyd::Result<Vec<VerificationReport>>> =
        workers.install(|| checks.par_iter().map(|&c| run_check(c, &cfg)).collect());

    let mut out = open_output(args.out.output.as_deref())?;
    if args.out.format == Format::Csv {
        writeln!(out, "name,target,computed,tolerance,mode,passed,gated,detail")?;
    }
    let (mut total, mut failed, mut gated_failures) = (0, 0, 0);
    for rows in results {
        for row in rows? {
            total += 1;
            if row.is_failure() {
                failed += 1;
            } else if !row.passed {
                gated_failures += 1;
            }
            match args.out.format {
                Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&row).map_err(std::io::Error::other)?)?,
                Format::Csv => writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.name,
                    row.target,
                    row.computed,
                    row.tolerance,
                    serde_json::to_value(row.mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
                    row.passed,
                    row.gated,
                    csv_field(&row.detail)
                )?,
            }
        }
    }
    out.flush()?;
    eprintln!("{total} rows: {} passed, {failed} failed, {gated_failures} gated rows outside tolerance (reported only)", total - failed - gated_failures);
    if failed > 0 {
        return Err(CliError::VerificationFailed { failed, total });
    }
    Ok(())
}
