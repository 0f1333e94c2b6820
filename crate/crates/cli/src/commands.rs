//! Text output of the `coeffs` and `verify` commands.

use std::fmt::Write;

use anyhow::Result;
use tfphase_core::fracops::{l1_weights, l2_coefficients, FractionalOrder};
use tfphase_core::verify::{coefficient_suite, fuzz_l1_inequality, fuzz_l2_inequality, continuous_identity_suite, FuzzConfig};

use crate::output::format_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffFamily {
    L1,
    L2,
}

impl std::str::FromStr for CoeffFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "l1" => Ok(CoeffFamily::L1),
            "l2" => Ok(CoeffFamily::L2),
            _ => Err(format!("unknown coefficient family `{s}` (expected l1 or l2)")),
        }
    }
}

/// CSV table of `b_k` (`k < n`, with the given `dt`) or of `a_j, b_j, c_j, d_j`
/// (`1 <= j <= n`, preceded by a `# r1 = ...` comment line).
pub fn coeff_table(which: CoeffFamily, alpha: f64, n: usize, dt: f64) -> Result<String> {
    let al = FractionalOrder::new(alpha)?;
    let mut s = String::new();
    match which {
        CoeffFamily::L1 => {
            let w = l1_weights(al, dt, n)?;
            s.push_str("k,b\n");
            for k in 0..n {
                writeln!(s, "{k},{}", format_float(w.b(k)))?;
            }
        }
        CoeffFamily::L2 => {
            let co = l2_coefficients(al, n)?;
            writeln!(s, "# r1 = {}", format_float(co.r1()))?;
            s.push_str("j,a,b,c,d\n");
            for j in 1..=n {
                writeln!(
                    s,
                    "{j},{},{},{},{}",
                    format_float(co.a(j)),
                    format_float(co.b(j)),
                    format_float(co.c(j)),
                    format_float(co.d(j))
                )?;
            }
        }
    }
    Ok(s)
}

/// Runs the coefficient, energy-inequality and continuous-identity suites.
/// Returns the report text and whether everything passed.
pub fn verify_report(trials: usize, seed: u64) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut ok = true;
    let alphas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let coeffs = coefficient_suite(&alphas, 256)?;
    ok &= coeffs.passed();
    writeln!(out, "{coeffs}")?;
    let cfg = FuzzConfig {
        trials,
        seed,
        ..FuzzConfig::default()
    };
    for rep in [fuzz_l1_inequality(&cfg)?, fuzz_l2_inequality(&cfg)?] {
        ok &= rep.passed();
        writeln!(out, "{rep}")?;
    }
    for s in continuous_identity_suite(&[0.3, 0.7], 4)? {
        let pass = s.decreasing() && s.last() <= 1e-4;
        ok &= pass;
        let levels: Vec<String> = s.residuals.iter().map(|r| format!("{r:.2e}")).collect();
        writeln!(
            out,
            "continuous identity u = {}, alpha = {}: residuals [{}] {}",
            s.label,
            s.alpha,
            levels.join(", "),
            if pass { "ok" } else { "FAILED" }
        )?;
    }
    Ok((out, ok))
}
