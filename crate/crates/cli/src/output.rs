use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use eulerfan::Error;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Exit classes: 1 constraint failure, 2 numerical failure, 3 bad input.
#[derive(Debug)]
pub enum Failure {
    Constraint(String),
    Numerical(String),
    BadInput(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Constraint(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::BadInput(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Constraint(m) => write!(f, "constraint failure: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::BadInput(m) => write!(f, "bad input: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Domain(_) | Error::Invalid(_) | Error::Io(_) | Error::Hyperbolicity { .. } | Error::UnsupportedPressure(_) => {
                Failure::BadInput(msg)
            }
            Error::Margin(_) => Failure::Constraint(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::BadInput(e.to_string())
    }
}

pub type CmdResult = Result<Done, Failure>;

/// What a command produced: the report body, extra files and an optional failure to report with exit 1.
pub struct Done {
    pub result: Value,
    pub files: Vec<(String, String)>,
    pub copies: Vec<PathBuf>,
    pub failure: Option<String>,
}

impl Done {
    pub fn new(result: Value) -> Self {
        Done { result, files: Vec::new(), copies: Vec::new(), failure: None }
    }

    pub fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    pub fn fail_if(mut self, bad: bool, msg: impl FnOnce() -> String) -> Self {
        if bad && self.failure.is_none() {
            self.failure = Some(msg());
        }
        self
    }
}

/// Flags shared by all commands; everything here except the output directory lands in the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a str>,
    result: &'a Value,
}

pub fn render_report(cfg: &RunConfig, done: &Done) -> String {
    let r = Report {
        schema_version: SCHEMA_VERSION,
        command: &cfg.command,
        config: cfg,
        ok: done.failure.is_none(),
        failure: done.failure.as_deref(),
        result: &done.result,
    };
    serde_json::to_string_pretty(&r).expect("report serializes") + "\n"
}

pub fn write_outputs(cfg: &RunConfig, done: &Done, elapsed: f64) -> Result<(), Failure> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir)?;
    let report = render_report(cfg, done);
    fs::write(dir.join("report.json"), &report)?;
    for (name, contents) in &done.files {
        fs::write(dir.join(name), contents)?;
    }
    for p in &done.copies {
        if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(p, &report)?;
    }
    fs::write(dir.join("run.log"), format!("command {}\nelapsed_seconds {elapsed:.3}\n", cfg.command))?;
    Ok(())
}

/// `"a,b,c"` into exactly `N` floats.
pub fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(Failure::BadInput(format!("expected {N} comma-separated numbers, got {s:?}")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| Failure::BadInput(format!("not a number: {p:?}")))?;
    }
    Ok(out)
}

pub fn read_text(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Failure::BadInput(format!("{}: {e}", p.display())))
}

pub fn csv_line(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}
