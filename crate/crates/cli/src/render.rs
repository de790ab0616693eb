//! Report documents: fixed float formatting, ordered tasks, CSV tables.

use std::io::{self, Write};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::scenario::{Format, Scenario};
use crate::tasks::TaskOutput;

/// 17 significant digits in scientific notation; non-finite values spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON whose floats always carry 17 significant digits.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(v: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("documents serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("json is utf-8")
}

/// `{scenario_hash, scenario, tasks: [{task, result}]}`; object keys sorted.
pub fn document(sc: &Scenario, hash: &str, results: &[(String, TaskOutput)]) -> Value {
    json!({
        "scenario_hash": hash,
        "scenario": serde_json::to_value(sc).expect("scenarios serialize"),
        "tasks": results.iter().map(|(t, o)| json!({"task": t, "result": o.json})).collect::<Vec<_>>(),
    })
}

/// JSON to `out` (or stdout); CSV as one file per task in the directory
/// `out`, or all tables on stdout each behind a `# task` line.
pub fn emit(sc: &Scenario, hash: &str, results: &[(String, TaskOutput)], format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    match (format, out) {
        (Format::Json, None) => {
            io::stdout().write_all(to_json_string(&document(sc, hash, results)).as_bytes())?;
        }
        (Format::Json, Some(p)) => {
            std::fs::write(p, to_json_string(&document(sc, hash, results))).with_context(|| format!("writing {}", p.display()))?;
        }
        (Format::Csv, None) => {
            let mut s = format!("# scenario_hash {hash}\n");
            for (t, o) in results {
                s.push_str(&format!("# task {t}\n{}", o.csv));
            }
            io::stdout().write_all(s.as_bytes())?;
        }
        (Format::Csv, Some(dir)) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (i, (t, o)) in results.iter().enumerate() {
                let stem = format!("{i:02}-{t}");
                let head = format!("# scenario_hash {hash}\n");
                std::fs::write(dir.join(format!("{stem}.csv")), format!("{head}{}", o.csv))?;
                if let Some(p) = &o.plot {
                    std::fs::write(dir.join(format!("{stem}.plot.csv")), format!("{head}{p}"))?;
                }
            }
        }
    }
    Ok(())
}
