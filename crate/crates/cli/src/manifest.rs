use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::io::write_json;
use crate::CliError;

/// Record of one invocation: enough to rerun it and find its outputs.
#[derive(Serialize)]
pub struct RunManifest<C: Serialize> {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub config: C,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn write(
        path: &Path,
        subcommand: &'static str,
        config: C,
        seed: Option<u64>,
        started: Instant,
        outputs: Vec<PathBuf>,
    ) -> Result<(), CliError> {
        let m = RunManifest {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            config,
            seed,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            outputs,
        };
        write_json(path, &m)
    }
}

/// `out.json` → `out.manifest.json`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}.json"))
}
