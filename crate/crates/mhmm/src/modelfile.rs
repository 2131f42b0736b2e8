//! Model files and interaction dumps.
//!
//! A model file lists both variable blocks and then every probability,
//! keyed by 1-based categories:
//!
//! ```text
//! [latent]
//! E1 2
//! [observed]
//! F1 3
//! [transition]
//! 1 1 9.0000000000000000e-1      # p(E_t = 1 | E_{t-1} = 1)
//! [emission]
//! 1 1 5.0000000000000000e-1      # p(F_t = 1 | E_t = 1)
//! [initial]
//! 1 5.0000000000000000e-1
//! ```
//!
//! Conditions come first in each line, then the response. Multi-variable
//! states are comma-joined in declaration order.

use std::fmt::Write as _;
use std::path::Path;

use mhmm_core::{ConditionalTable, InteractionTable, MhmmModel, Parameterization, VarSet, VariableScheme};

use crate::error::{Error, Result};

fn key(scheme: &VariableScheme, state: usize) -> String {
    let cats: Vec<String> = scheme.decode(state).iter().map(|c| (c + 1).to_string()).collect();
    cats.join(",")
}

fn write_table(out: &mut String, cond: &VariableScheme, resp: &VariableScheme, table: &ConditionalTable) {
    for r in 0..table.rows() {
        for c in 0..table.cols() {
            let _ = writeln!(out, "{} {} {:.16e}", key(cond, r), key(resp, c), table.get(r, c));
        }
    }
}

pub fn format_model(model: &MhmmModel) -> String {
    let mut out = String::new();
    for (title, scheme) in [("latent", model.latent_scheme()), ("observed", model.observed_scheme())] {
        let _ = writeln!(out, "[{title}]");
        for v in scheme.variables() {
            let _ = writeln!(out, "{} {}", v.name, v.categories);
        }
    }
    out.push_str("[transition]\n");
    write_table(&mut out, model.latent_scheme(), model.latent_scheme(), model.transition());
    out.push_str("[emission]\n");
    write_table(&mut out, model.latent_scheme(), model.observed_scheme(), model.emission());
    out.push_str("[initial]\n");
    for (s, p) in model.initial().iter().enumerate() {
        let _ = writeln!(out, "{} {:.16e}", key(model.latent_scheme(), s), p);
    }
    out
}

pub fn write_model(path: &Path, model: &MhmmModel) -> Result<()> {
    std::fs::write(path, format_model(model)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<MhmmModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, &path.display().to_string())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Latent,
    Observed,
    Transition,
    Emission,
    Initial,
}

fn parse_key(scheme: &VariableScheme, s: &str) -> std::result::Result<usize, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != scheme.len() {
        return Err(format!("key '{s}' needs {} components", scheme.len()));
    }
    let mut cats = Vec::with_capacity(parts.len());
    for (j, p) in parts.iter().enumerate() {
        match p.parse::<usize>() {
            Ok(c) if c >= 1 && c <= scheme.categories(j) => cats.push(c - 1),
            _ => return Err(format!("'{p}' is not a category of {}", scheme.variables()[j].name)),
        }
    }
    Ok(scheme.encode(&cats))
}

fn parse_prob(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|p| p.is_finite() && *p >= 0.0)
        .ok_or_else(|| format!("'{s}' is not a probability"))
}

pub fn parse_model(text: &str, path: &str) -> Result<MhmmModel> {
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let mut section = Section::None;
    let mut latent: Vec<(String, usize)> = Vec::new();
    let mut observed: Vec<(String, usize)> = Vec::new();
    let mut schemes: Option<(VariableScheme, VariableScheme)> = None;
    let mut transition: Vec<Option<f64>> = Vec::new();
    let mut emission: Vec<Option<f64>> = Vec::new();
    let mut initial: Vec<Option<f64>> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name {
                "latent" => Section::Latent,
                "observed" => Section::Observed,
                "transition" => Section::Transition,
                "emission" => Section::Emission,
                "initial" => Section::Initial,
                _ => return Err(err(no, format!("unknown section [{name}]"))),
            };
            if matches!(section, Section::Transition | Section::Emission | Section::Initial) && schemes.is_none() {
                let l = VariableScheme::from_pairs(latent.iter().cloned())?;
                let o = VariableScheme::from_pairs(observed.iter().cloned())?;
                transition = vec![None; l.state_count() * l.state_count()];
                emission = vec![None; l.state_count() * o.state_count()];
                initial = vec![None; l.state_count()];
                schemes = Some((l, o));
            }
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(err(no, "entry outside any section".into())),
            Section::Latent | Section::Observed => {
                if schemes.is_some() {
                    return Err(err(no, "variables must precede the probability sections".into()));
                }
                let [name, k] = t[..] else {
                    return Err(err(no, "expected '<name> <categories>'".into()));
                };
                let k = k.parse().map_err(|_| err(no, format!("'{k}' is not a category count")))?;
                let list = if section == Section::Latent { &mut latent } else { &mut observed };
                list.push((name.to_string(), k));
            }
            Section::Transition | Section::Emission => {
                let (l, o) = schemes.as_ref().expect("schemes set on section entry");
                let resp = if section == Section::Transition { l } else { o };
                let [a, b, p] = t[..] else {
                    return Err(err(no, "expected '<condition> <response> <probability>'".into()));
                };
                let r = parse_key(l, a).map_err(|m| err(no, m))?;
                let c = parse_key(resp, b).map_err(|m| err(no, m))?;
                let p = parse_prob(p).map_err(|m| err(no, m))?;
                let slot = if section == Section::Transition {
                    &mut transition[r * l.state_count() + c]
                } else {
                    &mut emission[r * o.state_count() + c]
                };
                if slot.replace(p).is_some() {
                    return Err(err(no, "duplicate entry".into()));
                }
            }
            Section::Initial => {
                let (l, _) = schemes.as_ref().expect("schemes set on section entry");
                let [a, p] = t[..] else {
                    return Err(err(no, "expected '<state> <probability>'".into()));
                };
                let s = parse_key(l, a).map_err(|m| err(no, m))?;
                let p = parse_prob(p).map_err(|m| err(no, m))?;
                if initial[s].replace(p).is_some() {
                    return Err(err(no, "duplicate entry".into()));
                }
            }
        }
    }
    let end = text.lines().count();
    let Some((l, o)) = schemes else {
        return Err(err(end, "missing [transition], [emission] and [initial] sections".into()));
    };
    let complete = |v: Vec<Option<f64>>, what: &str| -> Result<Vec<f64>> {
        v.into_iter()
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| err(end, format!("[{what}] is incomplete")))
    };
    let n = l.state_count();
    let m = o.state_count();
    let transition = ConditionalTable::new(n, n, complete(transition, "transition")?)?;
    let emission = ConditionalTable::new(n, m, complete(emission, "emission")?)?;
    let initial = complete(initial, "initial")?;
    Ok(MhmmModel::with_initial(l, o, transition, emission, initial)?)
}

fn names(scheme: &VariableScheme, set: VarSet) -> String {
    if set.is_empty() {
        "-".into()
    } else {
        scheme.set_names(set).join(",")
    }
}

fn cats(c: &[u8]) -> String {
    if c.is_empty() {
        "-".into()
    } else {
        c.iter().map(|v| (*v as usize + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}

/// One line per coefficient, `THETA|DELTA <P> <Q> <f_P> <e_Q> <value>`, in
/// canonical order. Categories are 1-based and `-` marks an empty set.
pub fn format_interactions(param: &Parameterization, table: &InteractionTable) -> String {
    let layout = param.layout();
    let mut out = String::new();
    for (idx, v) in table.entries() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {:.16e}",
            idx.target.tag(),
            names(&layout.response, idx.response),
            names(&layout.condition, idx.condition),
            cats(&idx.response_categories),
            cats(&idx.condition_categories),
            v
        );
    }
    out
}

fn parse_names(scheme: &VariableScheme, s: &str) -> std::result::Result<VarSet, String> {
    if s == "-" {
        return Ok(VarSet::EMPTY);
    }
    let mut out = VarSet::EMPTY;
    for n in s.split(',') {
        out.insert(scheme.index_of(n).ok_or_else(|| format!("unknown variable '{n}'"))?);
    }
    Ok(out)
}

fn parse_cats(s: &str) -> std::result::Result<Vec<u8>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|c| match c.parse::<u8>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(format!("'{c}' is not a category")),
        })
        .collect()
}

/// Reads lines written by [`format_interactions`]. Lines may come in any
/// order but every coefficient must appear exactly once.
pub fn parse_interactions(param: &Parameterization, text: &str, path: &str) -> Result<InteractionTable> {
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let layout = param.layout();
    let mut values = vec![None; layout.len()];
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let [tag, p, q, fp, eq, v] = line.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(err(no, "expected '<tag> <P> <Q> <fP> <eQ> <value>'".into()));
        };
        if tag != param.target().tag() {
            return Err(err(no, format!("expected tag {}, found '{tag}'", param.target().tag())));
        }
        let index = mhmm_core::InteractionIndex {
            target: param.target(),
            response: parse_names(&layout.response, p).map_err(|m| err(no, m))?,
            condition: parse_names(&layout.condition, q).map_err(|m| err(no, m))?,
            response_categories: parse_cats(fp).map_err(|m| err(no, m))?,
            condition_categories: parse_cats(eq).map_err(|m| err(no, m))?,
        };
        let pos = layout
            .index_position(&index)
            .ok_or_else(|| err(no, "no such coefficient".into()))?;
        let v: f64 = v
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(no, format!("'{v}' is not a number")))?;
        if values[pos].replace(v).is_some() {
            return Err(err(no, "duplicate coefficient".into()));
        }
    }
    let values: Vec<f64> = values
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| err(text.lines().count(), "some coefficients are missing".into()))?;
    Ok(InteractionTable::from_values(param.target(), layout.clone(), values)?)
}
