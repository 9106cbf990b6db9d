//! Command-line interface of `noma-sim`.

use clap::Parser;
use noma_sim_core::{SchemeId, SweepSpec};
use std::path::PathBuf;

/// Parsed SNR grid. A newtype so clap treats the whole comma/range
/// expression as a single argument value.
#[derive(Clone, Debug, PartialEq)]
pub struct SnrGrid(pub Vec<f64>);

/// Parses an SNR grid expression: comma-separated entries, each either a
/// plain dB value or a `start:step:stop` range (step > 0, stop included
/// when it is exactly reachable).
pub fn parse_snr_grid(s: &str) -> Result<SnrGrid, String> {
    let mut grid = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err("empty SNR entry".to_string());
        }
        if token.contains(':') {
            let parts: Vec<&str> = token.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range `{token}` must be start:step:stop"));
            }
            let start = parse_db(parts[0])?;
            let step = parse_db(parts[1])?;
            let stop = parse_db(parts[2])?;
            if step <= 0.0 {
                return Err(format!("range `{token}`: step must be positive"));
            }
            if stop < start {
                return Err(format!("range `{token}`: stop must be >= start"));
            }
            // Small forgiveness term so stops that are exactly reachable in
            // real arithmetic survive the floating-point division.
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            for k in 0..=count {
                grid.push(start + k as f64 * step);
            }
        } else {
            grid.push(parse_db(token)?);
        }
    }
    Ok(SnrGrid(grid))
}

fn parse_db(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positive_rate(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("rate must be positive and finite, got `{s}`"))
    }
}

fn parse_scheme(s: &str) -> Result<SchemeId, String> {
    s.parse::<SchemeId>().map_err(|e| e.to_string())
}

/// Sweep driver for the semi-grant-free NOMA simulator: estimates outage
/// probability and mean sum-rate gain per (SNR, pool size, scheme) cell and
/// writes plot-ready CSV.
#[derive(Debug, Parser)]
#[command(name = "noma-sim", version)]
pub struct Cli {
    /// Schemes to simulate, comma separated: crnoma, sgf1, sgf2, hybrid
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sgf1,sgf2,hybrid",
        value_parser = parse_scheme
    )]
    pub schemes: Vec<SchemeId>,

    /// Contender pool sizes M, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2",
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    pub m: Vec<u64>,

    /// Transmit SNR grid in dB: values and/or start:step:stop ranges
    #[arg(long, default_value = "0:5:50", value_parser = parse_snr_grid)]
    pub snr_db: SnrGrid,

    /// Primary user's target rate R0, bits/s/Hz
    #[arg(long, default_value = "0.2", value_parser = parse_positive_rate)]
    pub r0: f64,

    /// Contender target rate Rs, bits/s/Hz
    #[arg(long, default_value = "1.0", value_parser = parse_positive_rate)]
    pub rs: f64,

    /// Monte-Carlo trials per sweep cell
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Master seed; identical seeds reproduce results bit for bit
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Append analytical floor/bound overlay rows to the CSV
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub analysis: bool,

    /// Worker threads for the trial engine (the numbers never depend on
    /// this; defaults to all cores)
    #[arg(long, env = "NOMA_SIM_WORKERS", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Evaluate all schemes of a sweep cell on one shared draw sequence
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, num_args = 1)]
    pub shared_draws: bool,
}

impl Cli {
    /// Resolves the parsed flags into an engine sweep spec.
    pub fn to_spec(&self) -> SweepSpec {
        SweepSpec {
            snr_db_grid: self.snr_db.0.clone(),
            m_list: self.m.iter().map(|&m| m as usize).collect(),
            schemes: self.schemes.clone(),
            r0: self.r0,
            rs: self.rs,
            trials: self.trials,
            seed: self.seed,
            shared_draws: self.shared_draws,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_range_is_inclusive_when_reachable() {
        let grid = parse_snr_grid("0:5:50").unwrap().0;
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[10], 50.0);
    }

    #[test]
    fn snr_range_drops_unreachable_stop() {
        assert_eq!(parse_snr_grid("0:3:10").unwrap().0, vec![0.0, 3.0, 6.0, 9.0]);
    }

    #[test]
    fn snr_fractional_step_reaches_stop() {
        let grid = parse_snr_grid("0:0.1:1").unwrap().0;
        assert_eq!(grid.len(), 11);
        assert!((grid[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snr_accepts_lists_mixes_and_negatives() {
        assert_eq!(parse_snr_grid("10").unwrap().0, vec![10.0]);
        assert_eq!(parse_snr_grid("0,5,10").unwrap().0, vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_snr_grid("-10:5:0").unwrap().0, vec![-10.0, -5.0, 0.0]);
        assert_eq!(
            parse_snr_grid("-5,0:10:20").unwrap().0,
            vec![-5.0, 0.0, 10.0, 20.0]
        );
        assert_eq!(parse_snr_grid("3:5:3").unwrap().0, vec![3.0]);
    }

    #[test]
    fn snr_rejects_malformed_input() {
        assert!(parse_snr_grid("").is_err());
        assert!(parse_snr_grid("abc").is_err());
        assert!(parse_snr_grid("0:5").is_err());
        assert!(parse_snr_grid("0:5:50:60").is_err());
        assert!(parse_snr_grid("0:0:10").is_err());
        assert!(parse_snr_grid("0:-5:10").is_err());
        assert!(parse_snr_grid("10:5:0").is_err());
        assert!(parse_snr_grid("5,,10").is_err());
        assert!(parse_snr_grid("inf").is_err());
    }

    #[test]
    fn defaults_resolve_to_documented_values() {
        let cli = Cli::try_parse_from(["noma-sim"]).unwrap();
        let spec = cli.to_spec();
        assert_eq!(spec.seed, 0);
        assert_eq!(spec.trials, 100_000);
        assert_eq!(spec.r0, 0.2);
        assert_eq!(spec.rs, 1.0);
        assert_eq!(spec.m_list, vec![2]);
        assert_eq!(spec.snr_db_grid.len(), 11);
        assert_eq!(
            spec.schemes,
            vec![SchemeId::Sgf1, SchemeId::Sgf2, SchemeId::Hybrid]
        );
        assert!(spec.shared_draws);
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn flag_values_are_validated_at_parse_time() {
        assert!(Cli::try_parse_from(["noma-sim", "--trials", "0"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--m", "0"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--r0", "-0.2"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--rs", "0"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--schemes", "sgf9"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--snr-db", "10:5:0"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--workers", "0"]).is_err());
        assert!(Cli::try_parse_from(["noma-sim", "--no-such-flag"]).is_err());
    }

    #[test]
    fn scheme_list_and_disabling_shared_draws() {
        let cli = Cli::try_parse_from([
            "noma-sim",
            "--schemes",
            "crnoma,hybrid",
            "--m",
            "2,4,8",
            "--shared-draws",
            "false",
        ])
        .unwrap();
        let spec = cli.to_spec();
        assert_eq!(spec.schemes, vec![SchemeId::CrNoma, SchemeId::Hybrid]);
        assert_eq!(spec.m_list, vec![2, 4, 8]);
        assert!(!spec.shared_draws);
    }
}
