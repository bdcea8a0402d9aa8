use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{Format, ScenarioConfig};
use super::{scenarios, HarnessError, OperationLog, Result};

/// Default parent directory for run directories.
pub const OUTPUT_ROOT_ENV: &str = "ISLANDS_OUTPUT_ROOT";
pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    fn of(path: impl Into<String>, bytes: &[u8]) -> Self {
        Self { path: path.into(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 }
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Buffered output of one scenario run.
#[derive(Clone, Debug, Default)]
pub struct Execution {
    pub artifacts: Vec<Artifact>,
    pub inputs: Vec<FileDigest>,
    pub ops: OperationLog,
    formats: Vec<Format>,
}

impl Execution {
    fn push(&mut self, name: &str, bytes: Vec<u8>) {
        self.artifacts.push(Artifact { name: name.to_owned(), bytes });
    }

    pub(crate) fn text(&mut self, name: &str, body: String) {
        self.push(name, body.into_bytes());
    }

    pub(crate) fn csv(&mut self, name: &str, body: String) {
        if self.formats.contains(&Format::Csv) {
            self.text(name, body);
        }
    }

    pub(crate) fn json(&mut self, name: &str, value: &Value) {
        if self.formats.contains(&Format::Json) {
            self.text(name, pretty(value));
        }
    }

    /// Reads an input file relative to the config directory and records its digest.
    pub(crate) fn read_input(&mut self, base_dir: &Path, path: &Path) -> Result<String> {
        let full = base_dir.join(path);
        let bytes = fs::read(&full).map_err(|e| HarnessError::io(full.display(), e))?;
        self.inputs.push(FileDigest::of(full.display().to_string(), &bytes));
        String::from_utf8(bytes).map_err(|_| HarnessError::Parse(format!("{}: not UTF-8", full.display())))
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    pub fn summary(&self) -> Option<Value> {
        self.artifact(SUMMARY).and_then(|a| serde_json::from_slice(&a.bytes).ok())
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Validates and runs a parsed config without touching the file system
/// beyond its inputs. Relative input paths resolve against `base_dir`.
pub fn execute(config: &ScenarioConfig, base_dir: &Path) -> (Execution, Result<()>) {
    let mut exec = Execution { formats: config.formats.clone(), ..Execution::default() };
    let outcome = config.validate().and_then(|()| scenarios::dispatch(config, base_dir, &mut exec));
    match outcome {
        Ok(mut summary) => {
            let map = summary.as_object_mut().expect("summaries are objects");
            map.insert("scenario".into(), config.scenario.kind().into());
            map.insert("seed".into(), config.seed.into());
            exec.text(SUMMARY, pretty(&summary));
            (exec, Ok(()))
        }
        Err(e) => (exec, Err(e)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub kind: String,
    pub code: i32,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: String,
    pub config_sha256: String,
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub inputs: Vec<FileDigest>,
    pub artifacts: Vec<FileDigest>,
    pub operations: Vec<String>,
    /// `ok` or `failed`.
    pub status: String,
    pub failure: Option<FailureRecord>,
}

impl Manifest {
    pub fn succeeded(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides every other output-directory source.
    pub out: Option<PathBuf>,
    /// Replace an earlier run directory.
    pub force: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

/// `--out`, then the config's `output_dir`, then `$ISLANDS_OUTPUT_ROOT/<stem>`,
/// then `runs/<stem>` under the working directory.
pub fn resolve_output_dir(config_path: &Path, configured: Option<&Path>, options: &RunOptions) -> PathBuf {
    if let Some(out) = &options.out {
        return out.clone();
    }
    let base = config_path.parent().unwrap_or(Path::new(""));
    if let Some(dir) = configured {
        return base.join(dir);
    }
    let stem = config_path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(stem),
        _ => PathBuf::from("runs").join(stem),
    }
}

/// Makes `dir` ready for a fresh run: created if missing, reused if empty.
/// With `force`, an earlier run directory (one holding a manifest) is
/// cleared of the files that manifest lists.
fn prepare_dir(dir: &Path, force: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display(), e))?;
    let mut entries = fs::read_dir(dir).map_err(|e| HarnessError::io(dir.display(), e))?;
    if entries.next().is_none() {
        return Ok(());
    }
    let refuse = |why: &str| HarnessError::Io(format!("{}: {why}", dir.display()));
    if !force {
        return Err(refuse("output directory is not empty (use --force to replace an earlier run)"));
    }
    let manifest_path = dir.join(MANIFEST);
    let previous: Manifest = fs::read(&manifest_path)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .ok_or_else(|| refuse("not an earlier run directory; refusing to clear it"))?;
    for a in &previous.artifacts {
        let path = dir.join(&a.path);
        if path.exists() {
            fs::remove_file(&path).map_err(|e| HarnessError::io(path.display(), e))?;
        }
    }
    fs::remove_file(&manifest_path).map_err(|e| HarnessError::io(manifest_path.display(), e))?;
    if fs::read_dir(dir).map_err(|e| HarnessError::io(dir.display(), e))?.next().is_some() {
        return Err(refuse("holds files the earlier manifest does not list"));
    }
    Ok(())
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    let path = dir.join(MANIFEST);
    let body = pretty(&serde_json::to_value(manifest).expect("manifest serializes"));
    fs::write(&path, body).map_err(|e| HarnessError::io(path.display(), e))
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    for (k, a) in artifacts.iter().enumerate() {
        let path = dir.join(&a.name);
        if let Err(e) = fs::write(&path, &a.bytes) {
            for done in &artifacts[..=k] {
                let _ = fs::remove_file(dir.join(&done.name));
            }
            return Err(HarnessError::io(path.display(), e));
        }
    }
    Ok(())
}

/// Runs a scenario file and writes its run directory.
///
/// On error the directory holds only `manifest.json` with the failure
/// record, unless the directory itself could not be prepared.
pub fn run(config_path: &Path, options: &RunOptions) -> Result<RunOutcome> {
    let started = now_ms();
    let raw = fs::read(config_path).map_err(|e| HarnessError::io(config_path.display(), e))?;
    let parsed = std::str::from_utf8(&raw)
        .map_err(|_| HarnessError::Parse("config is not UTF-8".into()))
        .and_then(ScenarioConfig::parse);
    let dir = resolve_output_dir(config_path, parsed.as_ref().ok().and_then(|c| c.output_dir.as_deref()), options);
    prepare_dir(&dir, options.force)?;

    let mut manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config_path.display().to_string(),
        config_sha256: sha256_hex(&raw),
        scenario: parsed.as_ref().ok().map(|c| c.scenario.kind().to_owned()),
        seed: parsed.as_ref().ok().and_then(|c| c.seed),
        started_unix_ms: started,
        finished_unix_ms: started,
        inputs: Vec::new(),
        artifacts: Vec::new(),
        operations: Vec::new(),
        status: "ok".into(),
        failure: None,
    };

    let result = parsed.and_then(|config| {
        let base = config_path.parent().unwrap_or(Path::new(""));
        let (exec, outcome) = execute(&config, base);
        manifest.inputs = exec.inputs.clone();
        manifest.operations = exec.ops.names().into_iter().map(str::to_owned).collect();
        outcome?;
        write_artifacts(&dir, &exec.artifacts)?;
        manifest.artifacts = exec.artifacts.iter().map(|a| FileDigest::of(a.name.clone(), &a.bytes)).collect();
        Ok(())
    });

    manifest.finished_unix_ms = now_ms();
    if let Err(e) = &result {
        manifest.status = "failed".into();
        manifest.failure = Some(FailureRecord { kind: e.kind().into(), code: e.exit_code(), reason: e.to_string() });
        manifest.artifacts.clear();
    }
    write_manifest(&dir, &manifest)?;
    result.map(|()| RunOutcome { dir, manifest })
}

/// Reads a run directory's manifest.
pub(crate) fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let bytes = fs::read(&path).map_err(|_| HarnessError::MissingArtifact(path.display().to_string()))?;
    serde_json::from_slice(&bytes).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))
}
