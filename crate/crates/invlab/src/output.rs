//! Writers for JSON, CSV, SVG and OFF outputs. Each file carries the format
//! version and the resolved config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::FORMAT_VERSION;
use crate::error::{CliError, Result};

/// Output directory, created on first write.
#[derive(Debug, Clone)]
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        OutDir(path.into())
    }

    pub fn path(&self) -> &Path {
        &self.0
    }

    /// Writes `contents` to `name` inside the directory and returns the path.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.0).map_err(|e| CliError::io(&self.0, e))?;
        let p = self.0.join(name);
        std::fs::write(&p, contents).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }
}

/// Top-level JSON document: `body` fields plus `format_version`, `kind` and
/// `config`. Keys come out sorted because `serde_json` maps are ordered.
pub fn json_document(kind: &str, config: &Value, body: Value) -> Value {
    let mut m = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("data".into(), other);
            m
        }
    };
    m.insert("format_version".into(), json!(FORMAT_VERSION));
    m.insert("kind".into(), json!(kind));
    m.insert("config".into(), config.clone());
    Value::Object(m)
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Shortest round-trip decimal form, as used in CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// RFC 4180 CSV with `format_version` and `config` columns appended to every
/// row, the config as compact JSON.
pub fn csv_text(header: &[String], rows: &[Vec<String>], config: &Value) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let cfg = serde_json::to_string(config).unwrap_or_default();
    let io = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    let mut head = header.to_vec();
    head.push("format_version".into());
    head.push("config".into());
    w.write_record(&head).map_err(io)?;
    for r in rows {
        let mut r = r.clone();
        r.push(FORMAT_VERSION.to_string());
        r.push(cfg.clone());
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Config(format!("csv: {e}")))
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Minimal SVG 1.1 document builder with fixed-precision coordinates.
#[derive(Debug, Clone)]
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, closed: bool) {
        if pts.is_empty() {
            return;
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = write!(self.body, "<{tag} fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\" points=\"");
        for (i, (x, y)) in pts.iter().enumerate() {
            if i > 0 {
                self.body.push(' ');
            }
            let _ = write!(self.body, "{x:.3},{y:.3}");
        }
        self.body.push_str("\"/>\n");
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{r:.3}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\"/>"
        );
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\"/>",
            a.0, a.1, b.0, b.1
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{x:.3}\" y=\"{y:.3}\" font-family=\"sans-serif\" font-size=\"{size:.1}\">{}</text>",
            xml_escape(s)
        );
    }

    pub fn finish(&self, title: &str, config: &Value) -> String {
        let meta = json!({ "format_version": FORMAT_VERSION, "config": config });
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">",
            w = self.width,
            h = self.height
        );
        let _ = writeln!(s, "<title>{}</title>", xml_escape(title));
        let _ = writeln!(s, "<metadata>{}</metadata>", xml_escape(&meta.to_string()));
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

/// Comment lines embedded in OFF files.
pub fn off_comments(kind: &str, config: &Value) -> Vec<String> {
    vec![
        format!("kind: {kind}"),
        format!("format_version: {FORMAT_VERSION}"),
        format!("config: {}", serde_json::to_string(config).unwrap_or_default()),
    ]
}

/// OFF text for a triangle mesh with the given vertices.
pub fn off_text(comments: &[String], vertices: &[[f64; 3]], triangles: &[[u32; 3]]) -> String {
    let mut s = String::from("OFF\n");
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(s, "# {line}");
        }
    }
    let _ = writeln!(s, "{} {} 0", vertices.len(), triangles.len());
    for v in vertices {
        let _ = writeln!(s, "{:e} {:e} {:e}", v[0], v[1], v[2]);
    }
    for t in triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted_and_enveloped() {
        let cfg = json!({"zeta": 1, "alpha": 2});
        let doc = json_document("demo", &cfg, json!({"b": 1, "a": num(f64::NAN)}));
        let text = json_text(&doc);
        let keys: Vec<usize> = ["\"a\"", "\"b\"", "\"config\"", "\"format_version\"", "\"kind\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert_eq!(doc["a"], Value::Null);
        assert_eq!(doc["format_version"], FORMAT_VERSION);
    }

    #[test]
    fn csv_quotes_and_terminates_rows() {
        let cfg = json!({"eps": [0.4, 0.2]});
        let text = csv_text(&["eps".into(), "note".into()], &[vec!["0.4".into(), "a,\"b\"".into()]], &cfg).unwrap();
        let mut lines = text.split("\r\n");
        assert_eq!(lines.next().unwrap(), "eps,note,format_version,config");
        assert_eq!(lines.next().unwrap(), "0.4,\"a,\"\"b\"\"\",1,\"{\"\"eps\"\":[0.4,0.2]}\"");
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rec = r.records().next().unwrap().unwrap();
        assert_eq!(&rec[1], "a,\"b\"");
        let back: Value = serde_json::from_str(&rec[3]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn svg_embeds_escaped_metadata() {
        let mut s = Svg::new(100.0, 50.0);
        s.polyline(&[(0.0, 0.0), (1.0, 2.0)], "black", 1.0, false);
        s.text(1.0, 2.0, 10.0, "a < b");
        let text = s.finish("t & u", &json!({"k": "<x>"}));
        assert!(text.starts_with("<?xml"));
        assert!(text.contains("version=\"1.1\""));
        assert!(text.contains("<title>t &amp; u</title>"));
        assert!(text.contains("&lt;x&gt;"));
        assert!(text.contains("a &lt; b"));
        assert!(text.contains("points=\"0.000,0.000 1.000,2.000\""));
    }

    #[test]
    fn off_has_counts_after_comments() {
        let t = off_text(&["x".into()], &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "OFF");
        assert_eq!(lines[1], "# x");
        assert_eq!(lines[2], "3 1 0");
        assert_eq!(lines[6], "3 0 1 2");
    }
}
