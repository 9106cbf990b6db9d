//! CSV emission and the embedded run manifest.
//!
//! Every output file starts with `#`-prefixed manifest comments recording
//! the exact sweep configuration, followed by the column header and one
//! data row per (SNR, pool size, scheme) cell. The manifest is parseable
//! back into the identical [`SweepSpec`], so a CSV file is a complete,
//! reproducible record of the run that produced it. Numeric spec fields
//! are written in shortest-round-trip form; measured fields use 10
//! significant digits.

use noma_sim_core::montecarlo::SweepRow;
use noma_sim_core::schemes::SystemParams;
use noma_sim_core::{analysis, SchemeId, SweepSpec};
use std::io::{self, Write};
use thiserror::Error;

/// Column header of the data section.
pub const CSV_HEADER: &str = "snr_db,scheme,m,r0,rs,trials,outage,ci_low,ci_high,mean_gain";

/// Formats a measured float field: 10 significant digits, scientific.
pub fn fmt10(x: f64) -> String {
    format!("{x:.9e}")
}

/// Provenance block embedded in every CSV output.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    /// The resolved sweep configuration.
    pub spec: SweepSpec,
    /// Tool name and version that produced the file.
    pub tool: String,
    /// RFC 3339 creation timestamp. Excluded from golden comparisons: two
    /// otherwise-identical runs differ only on this line.
    pub generated: String,
}

impl RunManifest {
    /// Stamps a manifest for `spec` with the current time.
    pub fn new(spec: SweepSpec) -> Self {
        Self {
            spec,
            tool: format!("noma-sim {}", env!("CARGO_PKG_VERSION")),
            generated: chrono::Utc::now().to_rfc3339(),
        }
    }

    /// The `#`-prefixed header lines, in emission order.
    pub fn comment_lines(&self) -> Vec<String> {
        let spec = &self.spec;
        let joined_m = spec
            .m_list
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let joined_snr = spec
            .snr_db_grid
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let joined_schemes = spec
            .schemes
            .iter()
            .map(|s| s.name().to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            format!("# tool = {}", self.tool),
            format!("# generated = {}", self.generated),
            format!("# seed = {}", spec.seed),
            format!("# trials = {}", spec.trials),
            format!("# r0 = {}", spec.r0),
            format!("# rs = {}", spec.rs),
            format!("# m = {joined_m}"),
            format!("# snr_db = {joined_snr}"),
            format!("# schemes = {joined_schemes}"),
            format!("# shared_draws = {}", spec.shared_draws),
        ]
    }
}

/// A manifest block that cannot be read back.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ManifestError {
    #[error("missing manifest key `{0}`")]
    MissingKey(&'static str),
    #[error("malformed manifest value for `{key}`: `{value}`")]
    BadValue { key: &'static str, value: String },
}

/// Reconstructs the manifest — and with it the exact [`SweepSpec`] — from
/// the comment block of an emitted CSV file.
pub fn parse_manifest(text: &str) -> Result<RunManifest, ManifestError> {
    let mut pairs = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = rest.split_once('=') {
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
    }
    let lookup = |key: &'static str| -> Result<&str, ManifestError> {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or(ManifestError::MissingKey(key))
    };
    fn parse<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, ManifestError> {
        value.parse().map_err(|_| ManifestError::BadValue {
            key,
            value: value.to_string(),
        })
    }
    fn parse_list<T: std::str::FromStr>(
        key: &'static str,
        value: &str,
    ) -> Result<Vec<T>, ManifestError> {
        value.split(',').map(|v| parse(key, v.trim())).collect()
    }

    let spec = SweepSpec {
        snr_db_grid: parse_list("snr_db", lookup("snr_db")?)?,
        m_list: parse_list("m", lookup("m")?)?,
        schemes: parse_list("schemes", lookup("schemes")?)?,
        r0: parse("r0", lookup("r0")?)?,
        rs: parse("rs", lookup("rs")?)?,
        trials: parse("trials", lookup("trials")?)?,
        seed: parse("seed", lookup("seed")?)?,
        shared_draws: parse("shared_draws", lookup("shared_draws")?)?,
    };
    Ok(RunManifest {
        spec,
        tool: lookup("tool")?.to_string(),
        generated: lookup("generated")?.to_string(),
    })
}

/// One analytical overlay row (`--analysis`).
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisRow {
    /// Grid SNR this row is plotted against, dB.
    pub snr_db: f64,
    /// Scheme name with an `_floor`/`_bound` suffix.
    pub label: String,
    /// Contender pool size.
    pub m: usize,
    /// The floor or bound probability.
    pub value: f64,
}

/// Builds the analytical overlay for every cell of the sweep: outage
/// floors for the greedy and guarded schemes and the high-SNR outage upper
/// bound for the hybrid scheme. The floors are SNR-independent and repeat
/// across the grid so the CSV plots directly as horizontal lines.
///
/// Parameter sets outside an expression's validity region produce one
/// warning through `warn` and suppress just that overlay; the simulation
/// rows are unaffected.
pub fn analysis_rows(spec: &SweepSpec, warn: &mut dyn FnMut(String)) -> Vec<AnalysisRow> {
    let mut rows = Vec::new();
    let mut bound_warned = false;
    let has = |s: SchemeId| spec.schemes.contains(&s);
    for &snr_db in &spec.snr_db_grid {
        for &m in &spec.m_list {
            if has(SchemeId::Sgf1) {
                rows.push(AnalysisRow {
                    snr_db,
                    label: format!("{}_floor", SchemeId::Sgf1.name()),
                    m,
                    value: analysis::csi_floor(m, spec.rs).value,
                });
            }
            if has(SchemeId::Sgf2) {
                rows.push(AnalysisRow {
                    snr_db,
                    label: format!("{}_floor", SchemeId::Sgf2.name()),
                    m,
                    value: analysis::qos_floor(m, spec.r0).value,
                });
            }
            if has(SchemeId::Hybrid) {
                let params = SystemParams::from_snr_db(snr_db, m, spec.r0, spec.rs)
                    .expect("spec was validated");
                match analysis::hybrid_outage_bound(&params) {
                    Ok(value) => rows.push(AnalysisRow {
                        snr_db,
                        label: format!("{}_bound", SchemeId::Hybrid.name()),
                        m,
                        value,
                    }),
                    Err(e) => {
                        if !bound_warned {
                            warn(format!("{e}; hybrid_bound rows suppressed"));
                            bound_warned = true;
                        }
                    }
                }
            }
        }
    }
    rows
}

/// Writes the complete CSV: manifest comments, header, one row per sweep
/// cell, then any analytical overlay rows. LF line endings, UTF-8.
pub fn emit_csv<W: Write>(
    w: &mut W,
    manifest: &RunManifest,
    rows: &[SweepRow],
    analysis: &[AnalysisRow],
) -> io::Result<()> {
    for line in manifest.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    let r0 = fmt10(manifest.spec.r0);
    let rs = fmt10(manifest.spec.rs);
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt10(row.snr_db),
            row.scheme.name(),
            row.m,
            r0,
            rs,
            row.estimate.trials,
            fmt10(row.estimate.p_hat),
            fmt10(row.estimate.ci_low),
            fmt10(row.estimate.ci_high),
            fmt10(row.estimate.mean_gain),
        )?;
    }
    for a in analysis {
        // Overlay rows carry no trials; the value fills the CI columns.
        writeln!(
            w,
            "{},{},{},{},{},0,{},{},{},{}",
            fmt10(a.snr_db),
            a.label,
            a.m,
            r0,
            rs,
            fmt10(a.value),
            fmt10(a.value),
            fmt10(a.value),
            fmt10(0.0),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use noma_sim_core::montecarlo::run_sweep;

    fn spec() -> SweepSpec {
        SweepSpec {
            snr_db_grid: vec![-5.0, 0.0, 10.5],
            m_list: vec![2, 4],
            schemes: vec![SchemeId::Sgf1, SchemeId::Hybrid],
            r0: 0.2,
            rs: 1.0,
            trials: 64,
            seed: 0xDEAD_BEEF,
            shared_draws: true,
        }
    }

    #[test]
    fn fmt10_has_ten_significant_digits() {
        assert_eq!(fmt10(0.0), "0.000000000e0");
        assert_eq!(fmt10(10.0), "1.000000000e1");
        assert_eq!(fmt10(0.5), "5.000000000e-1");
        assert_eq!(fmt10(1.0 / 3.0), "3.333333333e-1");
        assert_eq!(fmt10(0.03584217079025052), "3.584217079e-2");
    }

    #[test]
    fn manifest_round_trips_exactly() {
        let manifest = RunManifest::new(spec());
        let mut buf = Vec::new();
        emit_csv(&mut buf, &manifest, &[], &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed = parse_manifest(&text).unwrap();
        assert_eq!(parsed, manifest);
    }

    #[test]
    fn manifest_round_trips_awkward_floats() {
        let mut s = spec();
        s.snr_db_grid = vec![0.1, 1.0 / 3.0, -7.25];
        s.r0 = 0.1 + 0.2; // 0.30000000000000004
        s.rs = 1e-9;
        let manifest = RunManifest::new(s);
        let text = manifest.comment_lines().join("\n");
        let parsed = parse_manifest(&text).unwrap();
        assert_eq!(parsed.spec, manifest.spec);
    }

    #[test]
    fn manifest_parse_reports_missing_keys() {
        assert_eq!(
            parse_manifest("# seed = 1"),
            Err(ManifestError::MissingKey("snr_db"))
        );
        let garbled = "# tool = x\n# generated = y\n# seed = 1\n# trials = 9\n# r0 = 0.2\n\
                       # rs = 1\n# m = two\n# snr_db = 0\n# schemes = sgf1\n# shared_draws = true";
        assert!(matches!(
            parse_manifest(garbled),
            Err(ManifestError::BadValue { key: "m", .. })
        ));
    }

    #[test]
    fn csv_layout_matches_contract() {
        let s = spec();
        let rows = run_sweep(&s).unwrap();
        let manifest = RunManifest::new(s);
        let mut buf = Vec::new();
        emit_csv(&mut buf, &manifest, &rows, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# tool = noma-sim {}", env!("CARGO_PKG_VERSION")));
        let header_at = lines.iter().position(|l| *l == CSV_HEADER).unwrap();
        assert_eq!(header_at, 10, "ten manifest lines precede the header");
        let data = &lines[header_at + 1..];
        assert_eq!(data.len(), 3 * 2 * 2);
        for line in data {
            assert_eq!(line.split(',').count(), 10);
        }
        assert!(data[0].starts_with("-5.000000000e0,sgf1,2,"));
        assert!(data[1].starts_with("-5.000000000e0,hybrid,2,"));
        assert!(!text.contains('\r'), "LF endings only");
    }

    #[test]
    fn analysis_rows_cover_grid_and_respect_validity() {
        let mut s = spec();
        s.schemes = vec![SchemeId::Sgf1, SchemeId::Sgf2, SchemeId::Hybrid];
        let mut warnings = Vec::new();
        let rows = analysis_rows(&s, &mut |w| warnings.push(w));
        assert!(warnings.is_empty());
        // 3 overlays x 3 SNR x 2 pool sizes.
        assert_eq!(rows.len(), 18);
        assert!(rows.iter().any(|r| r.label == "sgf1_floor"));
        let floor = rows
            .iter()
            .find(|r| r.label == "sgf1_floor" && r.m == 2)
            .unwrap();
        assert!((floor.value - 1.0 / 3.0).abs() < 1e-12);
        let bounds: Vec<_> = rows.iter().filter(|r| r.label == "hybrid_bound").collect();
        assert_eq!(bounds.len(), 6);

        // r0 = rs = 1 invalidates only the hybrid bound; floors stay.
        s.r0 = 1.0;
        let mut warnings = Vec::new();
        let rows = analysis_rows(&s, &mut |w| warnings.push(w));
        assert_eq!(warnings.len(), 1, "exactly one warning: {warnings:?}");
        assert!(rows.iter().all(|r| r.label != "hybrid_bound"));
        assert_eq!(rows.len(), 12);
    }

    #[test]
    fn overlay_rows_share_the_data_schema() {
        let s = spec();
        let manifest = RunManifest::new(s.clone());
        let overlay = analysis_rows(&s, &mut |_| {});
        let mut buf = Vec::new();
        emit_csv(&mut buf, &manifest, &[], &overlay).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(11) {
            assert_eq!(line.split(',').count(), 10);
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[5], "0", "overlay rows carry zero trials");
            assert_eq!(fields[6], fields[7]);
            assert_eq!(fields[7], fields[8]);
        }
    }
}
