//! Text and JSON rendering of chain reports.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::inequalities::ChainReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Both,
}

/// Formats a double with 17 significant digits, trailing zeros trimmed.
///
/// Exponents in [-5, 17) are written positionally, others in scientific
/// notation. Non-finite values have no JSON form and are written as `null`.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    if (-5..17).contains(&exp) {
        let point = exp + 1;
        let mut out = String::from(sign);
        if point <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-point) as usize));
            out.push_str(digits);
        } else {
            let point = point as usize;
            if digits.len() <= point {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', point - digits.len()));
                out.push_str(".0");
            } else {
                out.push_str(&digits[..point]);
                out.push('.');
                out.push_str(&digits[point..]);
            }
        }
        out
    } else {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Pretty JSON formatter that writes every double via [`format_f64`].
struct ReportFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Reports as a pretty-printed JSON array.
pub fn to_json(reports: &[ChainReport]) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter(PrettyFormatter::new()));
    reports
        .serialize(&mut ser)
        .expect("reports always serialize");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn from_json(s: &str) -> serde_json::Result<Vec<ChainReport>> {
    serde_json::from_str(s)
}

fn header(r: &ChainReport) -> String {
    let mut h = format!("[{}]", r.chain_id.as_str());
    if let Some(f) = &r.function {
        let _ = write!(h, " f = {f},");
    }
    let _ = write!(h, " α = {}", r.alpha);
    match (r.t_alpha, r.s_alpha) {
        (Some(t), Some(s)) => {
            let _ = write!(h, " (t_α = {t}, s_α = {s})");
        }
        (Some(t), None) => {
            let _ = write!(h, " (t_α = {t})");
        }
        _ => {}
    }
    h
}

/// Human-readable rendering: one block per report, members on their own
/// lines joined by "≤" markers.
pub fn to_text(reports: &[ChainReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}", header(r));
        if r.hypothesis_failed() {
            let _ = writeln!(out, "  HYPOTHESIS FAILED");
            if let Some(w) = &r.hypothesis.witness {
                let [x, y, z] = w.triple;
                let _ = writeln!(out, "    witness triple: ({x}, {y}, {z})");
                let _ = writeln!(out, "    {w}");
            }
        } else if !r.hypothesis.checked {
            let _ = writeln!(out, "  (convexity hypothesis not checked)");
        }
        if let Some(e) = &r.error {
            let _ = writeln!(out, "  ERROR: {e}");
        }
        if let Some(k) = &r.coefficients {
            let _ = writeln!(out, "  A1 = {}, A2 = {}, A3 = {}, A4 = {}", k.a1, k.a2, k.a3, k.a4);
        }
        for (i, m) in r.members.iter().enumerate() {
            if i == 0 {
                let _ = writeln!(out, "      {} = {}", m.label, m.value);
            } else {
                let v = &r.verdicts[i - 1];
                let mark = if v.satisfied { '✓' } else { '✗' };
                let _ = writeln!(out, "  ≤ {mark} {} = {}   (slack {:e})", m.label, m.value, v.slack);
            }
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out.push('\n');
    }
    out
}
