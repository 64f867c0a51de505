//! Artifact emission: time-series CSV, JSON reports, and the manifest that
//! ties them together with a content hash. All output is UTF-8 with LF line
//! endings and is byte-deterministic for a fixed config and seed.

use std::fs;
use std::path::{Path, PathBuf};

use conewave_core::diagnostics::EnergyLedger;
use conewave_core::solver::DECAY_OFFSETS;
use conewave_core::TRUNCATION_LABELS;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Collects artifacts in emission order, then writes them together with the
/// manifest. The manifest's content hash covers every artifact (name and
/// bytes), so any change to an emitted file changes the recorded hash.
pub struct Emitter {
    out_dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Serialize)]
pub struct FailureRecord {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    subcommand: &'a str,
    seed: u64,
    status: &'a str,
    failure: Option<&'a FailureRecord>,
    truncation_labels: [&'static str; 3],
    /// (1+t) window for decay fits and the cone-band width, echoed for
    /// reproducibility of fitted reports.
    fit_window: (f64, f64),
    cone_band_width: f64,
    config: &'a RunConfig,
    outputs: Vec<&'a str>,
    content_hash: String,
}

impl Emitter {
    pub fn new(out_dir: &Path) -> Emitter {
        Emitter {
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add_bytes(&mut self, rel: &str, bytes: Vec<u8>) {
        self.files.push((rel.to_string(), bytes));
    }

    /// Serializes a report with the truncation labels embedded at the top
    /// level, as `reports/<name>.json`.
    pub fn add_report<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Report<'a, T: Serialize> {
            truncation_labels: [&'static str; 3],
            #[serde(flatten)]
            body: &'a T,
        }
        let rep = Report {
            truncation_labels: TRUNCATION_LABELS,
            body,
        };
        let mut text = serde_json::to_string_pretty(&rep)
            .map_err(|e| CliError::Numerical(format!("report serialization: {e}")))?;
        text.push('\n');
        self.add_bytes(&format!("reports/{name}.json"), text.into_bytes());
        Ok(())
    }

    /// Emits `series.csv` from the committed ledger rows:
    /// t, E_0..E_N, T_tan (cumulative), residual (weighted, running), flux
    /// (cumulative weighted cone flux). Floats use the shortest round-trip
    /// decimal form, so the bytes are reproducible.
    pub fn add_series(&mut self, ledger: &EnergyLedger) {
        let mut csv = String::from("t");
        for k in 0..=ledger.level {
            csv.push_str(&format!(",e_{k}"));
        }
        csv.push_str(",t_tan,residual,flux\n");
        for row in &ledger.rows {
            csv.push_str(&format!("{}", row.t));
            for e in &row.e_levels {
                csv.push_str(&format!(",{e}"));
            }
            csv.push_str(&format!(
                ",{},{},{}\n",
                row.cum_tan_good, row.residual_w, row.cum_cone_w
            ));
        }
        self.add_bytes("series.csv", csv.into_bytes());
    }

    /// Writes all artifacts plus `manifest.json` and returns the content
    /// hash. Call once, last.
    pub fn finalize(
        self,
        subcommand: &str,
        cfg: &RunConfig,
        seed: u64,
        status: &str,
        failure: Option<&FailureRecord>,
    ) -> Result<String, CliError> {
        let io = |e: std::io::Error| CliError::Numerical(format!("writing outputs: {e}"));

        let mut hasher = Sha256::new();
        for (name, bytes) in &self.files {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update(bytes);
        }
        let hash = format!("sha256:{:x}", hasher.finalize());

        let manifest = Manifest {
            tool: "conewave",
            subcommand,
            seed,
            status,
            failure,
            truncation_labels: TRUNCATION_LABELS,
            fit_window: cfg.fit_window,
            // Decay samples sit at q0 + 0.5 k, so the band spans this width.
            cone_band_width: 0.5 * (DECAY_OFFSETS as f64 - 1.0),
            config: cfg,
            outputs: self.files.iter().map(|(n, _)| n.as_str()).collect(),
            content_hash: hash.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Numerical(format!("manifest serialization: {e}")))?;
        text.push('\n');

        fs::create_dir_all(&self.out_dir).map_err(io)?;
        for (name, bytes) in &self.files {
            let path = self.out_dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io)?;
            }
            fs::write(&path, bytes).map_err(io)?;
        }
        fs::write(self.out_dir.join("manifest.json"), text).map_err(io)?;
        Ok(hash)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use conewave_core::diagnostics::LedgerRow;

    fn tiny_ledger(level: usize) -> EnergyLedger {
        let mut ledger = EnergyLedger::new(4, level, 0.0);
        ledger.rows.push(LedgerRow {
            t: 0.5,
            e_levels: vec![0.1; level + 1],
            slice_w: 0.1,
            slice_1: 0.1,
            cum_tan_wtp: 0.0,
            cum_tan_good: 0.25,
            cum_cone_w: 0.125,
            cum_cone_1: 0.0,
            cum_div_w: 0.0,
            cum_div_1: 0.0,
            residual_w: 0.0,
            residual_1: 0.0,
            smallness_ok: true,
            max_abs: 0.1,
        });
        ledger
    }

    fn tiny_config() -> RunConfig {
        serde_json::from_str(
            r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
                 "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25 }"#,
        )
        .expect("config")
    }

    #[test]
    fn series_header_tracks_the_hierarchy_depth() {
        let mut em = Emitter::new(Path::new("/nonexistent"));
        em.add_series(&tiny_ledger(2));
        let (name, bytes) = &em.files[0];
        assert_eq!(name, "series.csv");
        let text = core::str::from_utf8(bytes).expect("utf8");
        assert!(
            text.starts_with("t,e_0,e_1,e_2,t_tan,residual,flux\n"),
            "unexpected header: {text}"
        );
        // Shortest round-trip float formatting keeps rows compact and exact.
        assert!(text.contains("\n0.5,0.1,0.1,0.1,0.25,0,0.125\n"), "row: {text}");
    }

    #[test]
    fn content_hash_covers_names_and_bytes_of_every_artifact() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = tiny_config();

        let hash_of = |rel: &str, bytes: &[u8], sub: &Path| {
            let mut em = Emitter::new(sub);
            em.add_bytes(rel, bytes.to_vec());
            em.finalize("run", &cfg, 0, "completed", None).expect("finalize")
        };

        let a = hash_of("x.csv", b"1,2\n", &dir.path().join("a"));
        let b = hash_of("x.csv", b"1,2\n", &dir.path().join("b"));
        let c = hash_of("x.csv", b"1,3\n", &dir.path().join("c"));
        let d = hash_of("y.csv", b"1,2\n", &dir.path().join("d"));
        assert_eq!(a, b, "equal artifacts must hash equal");
        assert_ne!(a, c, "changed bytes must change the hash");
        assert_ne!(a, d, "changed names must change the hash");
        assert!(a.starts_with("sha256:"));
    }

    #[test]
    fn finalize_writes_artifacts_under_nested_paths() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = tiny_config();
        let mut em = Emitter::new(dir.path());
        em.add_report("demo", &serde_json::json!({ "value": 1 })).expect("report");
        em.finalize("run", &cfg, 0, "completed", None).expect("finalize");

        let report: serde_json::Value = serde_json::from_slice(
            &fs::read(dir.path().join("reports/demo.json")).expect("report file"),
        )
        .expect("json");
        assert_eq!(report["value"], 1);
        assert_eq!(
            report["truncation_labels"].as_array().map(|a| a.len()),
            Some(TRUNCATION_LABELS.len()),
            "reports must embed the truncation labels"
        );
        assert!(dir.path().join("manifest.json").is_file());
    }
}
