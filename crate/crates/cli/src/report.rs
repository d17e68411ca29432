use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Found,
    None,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Found => 0,
            Status::Fail | Status::None => 1,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Found => "found",
            Status::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: Status,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
    pub elapsed: f64,
}

impl Report {
    pub fn new(status: Status) -> Self {
        Report {
            status,
            residuals: BTreeMap::new(),
            messages: Vec::new(),
            payload: None,
            elapsed: 0.0,
        }
    }

    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }

    pub fn message(mut self, text: impl Into<String>) -> Self {
        self.messages.push(text.into());
        self
    }

    pub fn payload<T: Serialize>(mut self, value: &T) -> anyhow::Result<Self> {
        self.payload = Some(serde_json::to_value(value)?);
        Ok(self)
    }

    pub fn human(&self, show_payload: bool) -> String {
        let mut out = format!("status: {}\n", self.status);
        for m in &self.messages {
            out.push_str(&format!("  {m}\n"));
        }
        for (k, v) in &self.residuals {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                out.push_str(&format!("  {k} = {v}\n"));
            } else {
                out.push_str(&format!("  {k} = {v:e}\n"));
            }
        }
        if let (true, Some(p)) = (show_payload, &self.payload) {
            out.push_str(&serde_json::to_string_pretty(p).unwrap_or_default());
            out.push('\n');
        }
        out.push_str(&format!("elapsed: {:.3}s\n", self.elapsed));
        out
    }
}

/// Bad input: reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

/// Reads and parses a JSON file; failures name the file, line and column.
pub fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        input_error(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Library errors raised while interpreting an input file.
pub fn interpret<T>(path: &Path, r: qgph::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| input_error(format!("{}: {e}", path.display())))
}

pub fn write_payload(path: &PathBuf, payload: &Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(payload)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
