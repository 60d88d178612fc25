use std::io::Write;

use levyd::truncation::{beta_report, gamma_report, stick_breaking_report};
use levyd::Error;

use crate::args::{TableArgs, TableFamily};
use crate::error::CliError;
use crate::records::open_output;
use crate::simulate::beta_params;

/// Shortest representation that reads back to the same double.
fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

pub fn run(args: TableArgs) -> Result<(), CliError> {
    let mut out = open_output(args.output.as_deref())?;
    match args.family {
        TableFamily::Beta => {
            let p = beta_params(&args.process)?;
            let k_min = args.k_min.unwrap_or(0);
            writeln!(
                out,
                "K,l1_error,marginal_bound,expected_atoms,stick_breaking_l1,stick_breaking_marginal_bound,stick_breaking_expected_atoms"
            )?;
            for k in k_min..=args.k_max {
                let sup = beta_report(&p, k, args.observations)?;
                let sb = match stick_breaking_report(p.c(), args.process.mass, k, args.observations) {
                    Ok(r) => Some(r),
                    Err(Error::Unsupported(_)) => None,
                    Err(e) => return Err(e.into()),
                };
                writeln!(
                    out,
                    "{k},{},{},{},{},{},{}",
                    cell(Some(sup.l1_error)),
                    cell(sup.marginal_bound),
                    cell(Some(sup.expected_atoms)),
                    cell(sb.as_ref().map(|r| r.l1_error)),
                    cell(sb.as_ref().and_then(|r| r.marginal_bound)),
                    cell(sb.as_ref().map(|r| r.expected_atoms)),
                )?;
            }
        }
        TableFamily::Gamma => {
            let k_min = args.k_min.unwrap_or(1);
            if k_min == 0 {
                return Err(CliError::Usage("gamma levels start at K = 1".into()));
            }
            writeln!(out, "K,H,l1_error,expected_atoms")?;
            for k in k_min..=args.k_max {
                for &h in &args.last_h {
                    let r = gamma_report(args.process.mass, k, h)?;
                    writeln!(out, "{k},{h},{},{}", cell(Some(r.l1_error)), cell(Some(r.expected_atoms)))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}
