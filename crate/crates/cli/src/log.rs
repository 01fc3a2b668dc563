use std::io::Write;

use serde_json::{json, Value};

/// Diagnostics on stderr, plain or line-delimited JSON.
pub struct Logger {
    quiet: bool,
    json: bool,
}

impl Logger {
    pub fn new(quiet: bool, json: bool) -> Self {
        Self { quiet, json }
    }

    fn emit(&self, level: &str, msg: &str, fields: Option<Value>) {
        let mut err = std::io::stderr().lock();
        if self.json {
            let mut line = json!({ "level": level, "msg": msg });
            if let Some(Value::Object(f)) = fields {
                line.as_object_mut().unwrap().extend(f);
            }
            let _ = writeln!(err, "{line}");
        } else {
            match fields {
                Some(f) => {
                    let _ = writeln!(err, "qasynth: {level}: {msg} {f}");
                }
                None => {
                    let _ = writeln!(err, "qasynth: {level}: {msg}");
                }
            }
        }
    }

    pub fn info_with(&self, msg: &str, fields: Value) {
        if !self.quiet {
            self.emit("info", msg, Some(fields));
        }
    }

    pub fn warn(&self, msg: &str) {
        if !self.quiet {
            self.emit("warn", msg, None);
        }
    }

    pub fn error(&self, msg: &str) {
        self.emit("error", msg, None);
    }
}
