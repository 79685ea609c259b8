//! Text format for protocols: one statement per line, `key=value` fields in
//! any order, `#` comments, case-insensitive keywords. Angles accept a `pi`
//! suffix ("2pi", "-0.5pi"). Grating amplitudes accept `solve:<condition>`
//! to resolve a named amplitude condition at parse time.
//!
//! ```text
//! PULSE t=0.3 dur=0.3 amp=0.314 kx=0 phase=0
//! COUPLING t=0.1 dur=0.9 amp=56.55
//! GRATE t=1.3 shape=tri a=2pi kz=22 kx=0 zeta=0
//! READ t=3.2 dur=0.6
//! DETECT kind=apd t1=3.2 t2=3.8
//! SWEEP path=grate1.zeta from=0 to=2pi steps=13
//! ```

use crate::error::CoreError;
use crate::grating::{solve_equal_orders, GratingShape, GratingSpec, SolveCondition};
use crate::protocol::{DetectSpec, DetectorKind, Protocol, Step, SweepSpec};
use crate::pulse::{PulseSpec, DEFAULT_COUPLING_PEAK};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    /// 1-based line.
    pub line: usize,
    /// 1-based inclusive column range.
    pub col_start: usize,
    pub col_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, cols {}-{}: {}",
            self.span.line, self.span.col_start, self.span.col_end, self.message
        )
    }
}

impl std::error::Error for DslError {}

fn err(span: SourceSpan, message: impl Into<String>) -> DslError {
    DslError {
        span,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    span: SourceSpan,
}

fn tokenize(line_no: usize, line: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: line[s..i].to_string(),
                    span: SourceSpan {
                        line: line_no,
                        col_start: s + 1,
                        col_end: i,
                    },
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: line[s..].to_string(),
            span: SourceSpan {
                line: line_no,
                col_start: s + 1,
                col_end: line.len(),
            },
        });
    }
    out
}

/// Collected key=value fields of one statement.
struct Fields {
    entries: Vec<(String, String, SourceSpan, bool)>,
    statement: SourceSpan,
}

impl Fields {
    fn build(tokens: &[Token], statement: SourceSpan) -> Result<Fields, DslError> {
        let mut entries: Vec<(String, String, SourceSpan, bool)> = Vec::new();
        for t in tokens {
            let Some(eq) = t.text.find('=') else {
                return Err(err(t.span, format!("expected key=value, got '{}'", t.text)));
            };
            let key = t.text[..eq].to_ascii_lowercase();
            let value = t.text[eq + 1..].to_string();
            if key.is_empty() {
                return Err(err(t.span, "missing key before '='"));
            }
            if value.is_empty() {
                return Err(err(t.span, format!("missing value for '{key}'")));
            }
            if entries.iter().any(|(k, ..)| *k == key) {
                return Err(err(t.span, format!("duplicate key '{key}'")));
            }
            entries.push((key, value, t.span, false));
        }
        Ok(Fields { entries, statement })
    }

    fn take(&mut self, key: &str) -> Option<(String, SourceSpan)> {
        for e in self.entries.iter_mut() {
            if e.0 == key {
                e.3 = true;
                return Some((e.1.clone(), e.2));
            }
        }
        None
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<(f64, SourceSpan)>, DslError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, span)) => Ok(Some((parse_number(&v, span)?, span))),
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, DslError> {
        self.take_f64(key)?
            .map(|(v, _)| v)
            .ok_or_else(|| err(self.statement, format!("missing required key '{key}'")))
    }

    fn finish(self) -> Result<(), DslError> {
        for (k, _, span, used) in self.entries {
            if !used {
                return Err(err(span, format!("unknown key '{k}' for this statement")));
            }
        }
        Ok(())
    }
}

/// Plain float, or a multiple of pi written with a `pi` suffix.
fn parse_number(s: &str, span: SourceSpan) -> Result<f64, DslError> {
    let lower = s.to_ascii_lowercase();
    let v = if let Some(head) = lower.strip_suffix("pi") {
        let mult = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => head
                .parse::<f64>()
                .map_err(|_| err(span, format!("cannot parse '{s}' as a number")))?,
        };
        mult * std::f64::consts::PI
    } else {
        lower
            .parse::<f64>()
            .map_err(|_| err(span, format!("cannot parse '{s}' as a number")))?
    };
    if !v.is_finite() {
        return Err(err(span, format!("'{s}' is not finite")));
    }
    Ok(v)
}

fn whole_line_span(line_no: usize, line: &str) -> SourceSpan {
    SourceSpan {
        line: line_no,
        col_start: 1,
        col_end: line.len().max(1),
    }
}

/// The number grammar on its own, for callers outside protocol text
/// (command-line flags and the like).
pub fn parse_scalar(s: &str) -> Result<f64, String> {
    let span = SourceSpan {
        line: 1,
        col_start: 1,
        col_end: s.len().max(1),
    };
    parse_number(s, span).map_err(|e| e.message)
}

pub fn parse(text: &str) -> Result<Protocol, DslError> {
    let mut steps: Vec<Step> = Vec::new();
    let mut step_spans: Vec<SourceSpan> = Vec::new();
    let mut sweep: Option<SweepSpec> = None;
    let mut sweep_span = SourceSpan {
        line: 1,
        col_start: 1,
        col_end: 1,
    };

    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line_no, line);
        if tokens.is_empty() {
            continue;
        }
        let kw = tokens[0].text.to_ascii_uppercase();
        let kw_span = tokens[0].span;
        let mut fields = Fields::build(&tokens[1..], whole_line_span(line_no, line))?;
        match kw.as_str() {
            "PULSE" => {
                let t0 = fields.require_f64("t")?;
                let mut p = PulseSpec::at(t0);
                if let Some((v, _)) = fields.take_f64("dur")? {
                    p.duration = v;
                }
                if let Some((v, _)) = fields.take_f64("amp")? {
                    p.peak_rabi = v;
                }
                if let Some((v, _)) = fields.take_f64("kx")? {
                    p.kx = v;
                }
                if let Some((v, _)) = fields.take_f64("phase")? {
                    p.phase = v;
                }
                fields.finish()?;
                steps.push(Step::Pulse(p));
                step_spans.push(whole_line_span(line_no, line));
            }
            "COUPLING" => {
                let t0 = fields.require_f64("t")?;
                let duration = fields
                    .take_f64("dur")?
                    .map(|(v, _)| v)
                    .unwrap_or(0.9);
                let peak = fields
                    .take_f64("amp")?
                    .map(|(v, _)| v)
                    .unwrap_or(DEFAULT_COUPLING_PEAK);
                fields.finish()?;
                steps.push(Step::Coupling { t0, duration, peak });
                step_spans.push(whole_line_span(line_no, line));
            }
            "GRATE" => {
                let t = fields.require_f64("t")?;
                let (shape_str, shape_span) = fields.take("shape").ok_or_else(|| {
                    err(whole_line_span(line_no, line), "missing required key 'shape'")
                })?;
                let shape = GratingShape::from_name(&shape_str).ok_or_else(|| {
                    err(shape_span, format!("unknown grating shape '{shape_str}'"))
                })?;
                let mut solved_zeta: Option<f64> = None;
                let (amp_str, amp_span) = fields.take("a").ok_or_else(|| {
                    err(whole_line_span(line_no, line), "missing required key 'a'")
                })?;
                let amplitude = if let Some(cond_name) =
                    amp_str.to_ascii_lowercase().strip_prefix("solve:")
                {
                    let cond = SolveCondition::from_name(cond_name).ok_or_else(|| {
                        err(
                            amp_span,
                            format!("unknown amplitude condition '{cond_name}'"),
                        )
                    })?;
                    let sol = solve_equal_orders(shape, cond)
                        .map_err(|e| err(amp_span, e.to_string()))?;
                    solved_zeta = sol.zeta;
                    sol.amplitude
                } else {
                    parse_number(&amp_str, amp_span)?
                };
                let kx = fields.take_f64("kx")?.map(|(v, _)| v).unwrap_or(0.0);
                let kz = fields.take_f64("kz")?.map(|(v, _)| v).unwrap_or(0.0);
                let zeta = fields
                    .take_f64("zeta")?
                    .map(|(v, _)| v)
                    .or(solved_zeta)
                    .unwrap_or(0.0);
                fields.finish()?;
                steps.push(Step::Grate {
                    t,
                    spec: GratingSpec {
                        shape,
                        kx,
                        kz,
                        amplitude,
                        zeta,
                        duration: 0.0,
                    },
                });
                step_spans.push(whole_line_span(line_no, line));
            }
            "READ" => {
                let t0 = fields.require_f64("t")?;
                let duration = fields
                    .take_f64("dur")?
                    .map(|(v, _)| v)
                    .unwrap_or(0.6);
                fields.finish()?;
                steps.push(Step::Read { t0, duration });
                step_spans.push(whole_line_span(line_no, line));
            }
            "DETECT" => {
                let (kind_str, kind_span) = fields.take("kind").ok_or_else(|| {
                    err(whole_line_span(line_no, line), "missing required key 'kind'")
                })?;
                let kind = DetectorKind::from_name(&kind_str).ok_or_else(|| {
                    err(kind_span, format!("unknown detector kind '{kind_str}'"))
                })?;
                let t0 = fields.require_f64("t1")?;
                let t1 = fields.require_f64("t2")?;
                fields.finish()?;
                steps.push(Step::Detect(DetectSpec { kind, t0, t1 }));
                step_spans.push(whole_line_span(line_no, line));
            }
            "SWEEP" => {
                if sweep.is_some() {
                    return Err(err(kw_span, "a protocol can only have one SWEEP"));
                }
                let (path, _) = fields.take("path").ok_or_else(|| {
                    err(whole_line_span(line_no, line), "missing required key 'path'")
                })?;
                let from = fields.require_f64("from")?;
                let to = fields.require_f64("to")?;
                let (steps_str, steps_span) = fields.take("steps").ok_or_else(|| {
                    err(whole_line_span(line_no, line), "missing required key 'steps'")
                })?;
                let n: usize = steps_str
                    .parse()
                    .map_err(|_| err(steps_span, format!("bad step count '{steps_str}'")))?;
                fields.finish()?;
                sweep = Some(SweepSpec {
                    path,
                    from,
                    to,
                    steps: n,
                });
                sweep_span = whole_line_span(line_no, line);
            }
            _ => {
                return Err(err(
                    kw_span,
                    format!(
                        "unknown statement '{}'; expected PULSE, COUPLING, GRATE, READ, \
                         DETECT or SWEEP",
                        tokens[0].text
                    ),
                ));
            }
        }
    }

    let protocol = Protocol { steps, sweep };
    if let Err(e) = protocol.validate() {
        let span = match &e {
            CoreError::InvalidProtocol {
                step: Some(i), ..
            } if *i < step_spans.len() => step_spans[*i],
            _ => {
                if protocol.sweep.is_some() && format!("{e}").contains("sweep") {
                    sweep_span
                } else {
                    SourceSpan {
                        line: 1,
                        col_start: 1,
                        col_end: 1,
                    }
                }
            }
        };
        let msg = match &e {
            CoreError::InvalidProtocol { msg, .. } => msg.clone(),
            other => other.to_string(),
        };
        return Err(err(span, msg));
    }
    Ok(protocol)
}

fn fmt_angle(v: f64) -> String {
    // serialize exact multiples of pi in pi units for readability
    let in_pi = v / std::f64::consts::PI;
    if in_pi != 0.0 && in_pi == in_pi.round() && in_pi.abs() <= 64.0 {
        return format!("{}pi", in_pi);
    }
    format!("{}", v)
}

/// Canonical text form. `parse(serialize(p))` reproduces `p` exactly: floats
/// print with Rust's shortest round-trip formatting.
pub fn serialize(protocol: &Protocol) -> String {
    let mut out = String::new();
    for step in &protocol.steps {
        let line = match step {
            Step::Pulse(p) => format!(
                "PULSE t={} dur={} amp={} kx={} phase={}",
                p.t0, p.duration, p.peak_rabi, p.kx, p.phase
            ),
            Step::Coupling { t0, duration, peak } => {
                format!("COUPLING t={} dur={} amp={}", t0, duration, peak)
            }
            Step::Grate { t, spec } => format!(
                "GRATE t={} shape={} a={} kx={} kz={} zeta={}",
                t,
                spec.shape.name(),
                fmt_angle(spec.amplitude),
                spec.kx,
                spec.kz,
                fmt_angle(spec.zeta)
            ),
            Step::Read { t0, duration } => format!("READ t={} dur={}", t0, duration),
            Step::Detect(d) => format!(
                "DETECT kind={} t1={} t2={}",
                d.kind.name(),
                d.t0,
                d.t1
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    if let Some(sw) = &protocol.sweep {
        out.push_str(&format!(
            "SWEEP path={} from={} to={} steps={}\n",
            sw.path, sw.from, sw.to, sw.steps
        ));
    }
    out
}

