//! Transcript CSV.
//!
//! The first line is a `#` comment carrying the protocol and the order of
//! the cumulative divergence column. Then comes one row per round with the
//! two forecasts, the two bets, the outcome, both log-capitals, the running
//! sums of `D^[α]` and KL, and the exceptional pair with its violation flag
//! (empty outside the modified protocol). Numbers have 17 significant digits
//! so a transcript reads back exactly.

use std::io::{Read, Write};

use opinion_merge_core::{
    div_bracket, kl_divergence, mixture_densities, AlphaParam, BettingFunction, Distribution, ExceptionalPair, ExtReal,
    LogCapital, ProtocolKind, RoundRecord, Transcript,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed transcript: {0}")]
    Format(String),
}

fn bad(msg: impl Into<String>) -> ExportError {
    ExportError::Format(msg.into())
}

/// Header metadata of an exported transcript.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranscriptMeta {
    pub kind: ProtocolKind,
    pub reference_alpha: f64,
    pub outcomes: usize,
}

pub fn format_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64, ExportError> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| bad(format!("bad number '{s}'"))),
    }
}

fn format_log(l: LogCapital) -> String {
    match l {
        LogCapital::Value(v) => format_f64(v.value()),
        LogCapital::Indefinite => "indefinite".into(),
    }
}

fn parse_log(s: &str) -> Result<LogCapital, ExportError> {
    if s == "indefinite" {
        Ok(LogCapital::Indefinite)
    } else {
        Ok(LogCapital::Value(ExtReal::from_f64(parse_f64(s)?)))
    }
}

fn format_set(set: &[usize]) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(";"))
}

fn parse_set(s: &str) -> Result<Vec<usize>, ExportError> {
    let inner = s.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| bad(format!("bad set '{s}'")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(';').map(|x| x.parse().map_err(|_| bad(format!("bad set '{s}'")))).collect()
}

pub fn header(m: usize) -> Vec<String> {
    let mut h = vec!["n".to_string()];
    for name in ["p_I", "p_II", "f_I", "f_II"] {
        h.extend((0..m).map(|i| format!("{name}[{i}]")));
    }
    h.extend(
        ["omega", "logK_I", "logK_II", "D_bracket_alpha_cum", "D_kl_cum", "E_I", "E_II", "violation"].map(String::from),
    );
    h
}

pub fn write_transcript<W: Write>(mut out: W, t: &Transcript, reference_alpha: f64) -> Result<(), ExportError> {
    let alpha = AlphaParam::new(reference_alpha).map_err(|e| bad(e.to_string()))?;
    let m = t.rounds.first().map_or(0, |r| r.pair.len());
    writeln!(out, "# protocol={} reference_alpha={} outcomes={m}", t.kind, format_f64(reference_alpha))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(m))?;
    let (mut d_alpha, mut d_kl) = (ExtReal::ZERO, ExtReal::ZERO);
    for r in &t.rounds {
        if r.pair.len() != m {
            return Err(bad(format!("round {} has {} outcomes, expected {m}", r.n, r.pair.len())));
        }
        d_alpha = d_alpha.checked_add(div_bracket(&r.pair, alpha)).unwrap_or(ExtReal::INFINITY);
        d_kl = d_kl.checked_add(kl_divergence(&r.pair)).unwrap_or(ExtReal::INFINITY);
        let mut row = vec![r.n.to_string()];
        row.extend(r.p_i().probs().iter().map(|&x| format_f64(x)));
        row.extend(r.p_ii().probs().iter().map(|&x| format_f64(x)));
        row.extend(r.f_i.payoff().iter().map(|x| format_f64(x.value())));
        row.extend(r.f_ii.payoff().iter().map(|x| format_f64(x.value())));
        row.push(r.outcome.to_string());
        row.push(format_log(r.log_k_i));
        row.push(format_log(r.log_k_ii));
        row.push(format_f64(d_alpha.value()));
        row.push(format_f64(d_kl.value()));
        match &r.exceptional {
            Some(e) => {
                row.push(format_set(&e.e_i));
                row.push(format_set(&e.e_ii));
            }
            None => row.extend([String::new(), String::new()]),
        }
        row.push(r.violation.map_or_else(String::new, |v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_meta(line: &str) -> Result<TranscriptMeta, ExportError> {
    let body = line.strip_prefix('#').ok_or_else(|| bad("missing '#' header line"))?;
    let (mut kind, mut alpha, mut outcomes) = (None, None, None);
    for item in body.split_whitespace() {
        let (key, value) = item.split_once('=').ok_or_else(|| bad(format!("bad header item '{item}'")))?;
        match key {
            "protocol" => {
                kind = Some(match value {
                    "competitive" => ProtocolKind::Competitive,
                    "modified" => ProtocolKind::Modified,
                    _ => return Err(bad(format!("unknown protocol '{value}'"))),
                })
            }
            "reference_alpha" => alpha = Some(parse_f64(value)?),
            "outcomes" => outcomes = Some(value.parse().map_err(|_| bad(format!("bad outcome count '{value}'")))?),
            _ => return Err(bad(format!("unknown header key '{key}'"))),
        }
    }
    Ok(TranscriptMeta {
        kind: kind.ok_or_else(|| bad("header lacks protocol"))?,
        reference_alpha: alpha.ok_or_else(|| bad("header lacks reference_alpha"))?,
        outcomes: outcomes.ok_or_else(|| bad("header lacks outcomes"))?,
    })
}

pub fn read_transcript<R: Read>(mut input: R) -> Result<(Transcript, TranscriptMeta), ExportError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (first, rest) = text.split_once('\n').ok_or_else(|| bad("empty transcript"))?;
    let meta = parse_meta(first.trim_end())?;
    let m = meta.outcomes;
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let expected = header(m);
    if reader.headers()?.iter().ne(expected.iter().map(String::as_str)) {
        return Err(bad("column header does not match the outcome count"));
    }
    let mut rounds = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let field = |i: usize| rec.get(i).ok_or_else(|| bad("short row"));
        let floats = |start: usize| -> Result<Vec<f64>, ExportError> {
            (start..start + m).map(|i| parse_f64(field(i)?)).collect()
        };
        let n: usize = field(0)?.parse().map_err(|_| bad("bad round number"))?;
        let dist = |v: Vec<f64>| Distribution::exact(v).map_err(|e| bad(format!("round {n}: {e}")));
        let bet = |v: Vec<f64>| {
            BettingFunction::new(v.into_iter().map(ExtReal::from_f64).collect())
                .map_err(|e| bad(format!("round {n}: {e}")))
        };
        let p_i = dist(floats(1)?)?;
        let p_ii = dist(floats(1 + m)?)?;
        let f_i = bet(floats(1 + 2 * m)?)?;
        let f_ii = bet(floats(1 + 3 * m)?)?;
        let base = 1 + 4 * m;
        let outcome: usize = field(base)?.parse().map_err(|_| bad(format!("round {n}: bad outcome")))?;
        let log_k_i = parse_log(field(base + 1)?)?;
        let log_k_ii = parse_log(field(base + 2)?)?;
        let exceptional = match (field(base + 5)?, field(base + 6)?) {
            ("", "") => None,
            (a, b) => Some(ExceptionalPair { e_i: parse_set(a)?, e_ii: parse_set(b)? }),
        };
        let violation = match field(base + 7)? {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => return Err(bad(format!("round {n}: bad violation flag '{other}'"))),
        };
        let pair = mixture_densities(&p_i, &p_ii).map_err(|e| bad(format!("round {n}: {e}")))?;
        rounds.push(RoundRecord { n, pair, exceptional, violation, f_i, f_ii, outcome, log_k_i, log_k_ii });
    }
    Ok((Transcript { kind: meta.kind, rounds }, meta))
}
