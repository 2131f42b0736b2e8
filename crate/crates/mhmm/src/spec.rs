//! Model spec files: variables, graph edges, hypotheses and fit options.
//!
//! ```text
//! latent E1 2
//! observed FT 3
//! dir E1 -> E2
//! bidir E1 <-> E2
//! emit E1 -> FT
//! no_self_parents
//! hypothesis additivity emission
//! hypothesis invariant_association transition
//! hypothesis user_zero THETA FT,FO -
//! option restarts 10
//! ```
//!
//! `#` starts a comment. Duplicate edges are harmless. In `user_zero` the
//! response and conditioning sets are comma-joined names, `-` for empty.

use std::path::Path;

use mhmm_core::{FitOptions, GraphBuilder, Hypothesis, MixedChainGraph, ModelSpec, Target, VarSet, VariableScheme};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub latent: VariableScheme,
    pub observed: VariableScheme,
    pub graph: MixedChainGraph,
    pub hypotheses: Vec<Hypothesis>,
    pub options: FitOptions,
}

impl SpecFile {
    pub fn model_spec(&self) -> Result<ModelSpec> {
        Ok(ModelSpec::new(
            self.graph.clone(),
            self.latent.clone(),
            self.observed.clone(),
            &self.hypotheses,
        )?)
    }
}

pub fn read_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec(&text, &path.display().to_string())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

enum Node {
    Latent(usize),
    Observed(usize),
}

struct Names<'a> {
    latent: &'a [(String, usize)],
    observed: &'a [(String, usize)],
}

impl Names<'_> {
    fn node(&self, name: &str) -> Option<Node> {
        if let Some(i) = self.latent.iter().position(|(n, _)| n == name) {
            return Some(Node::Latent(i));
        }
        self.observed.iter().position(|(n, _)| n == name).map(Node::Observed)
    }

    fn set(&self, list: &str, latent: bool) -> std::result::Result<VarSet, String> {
        if list == "-" {
            return Ok(VarSet::EMPTY);
        }
        let mut out = VarSet::EMPTY;
        for name in list.split(',') {
            match (self.node(name), latent) {
                (Some(Node::Latent(i)), true) | (Some(Node::Observed(i)), false) => out.insert(i),
                (Some(_), true) => return Err(format!("'{name}' is not a latent variable")),
                (Some(_), false) => return Err(format!("'{name}' is not an observable variable")),
                (None, _) => return Err(format!("unknown variable '{name}'")),
            }
        }
        Ok(out)
    }
}

fn tokens(line: &str) -> Vec<&str> {
    line.split('#').next().unwrap_or("").split_whitespace().collect()
}

fn parse_target(s: &str) -> Option<Target> {
    match s {
        "emission" => Some(Target::Emission),
        "transition" => Some(Target::Transition),
        _ => None,
    }
}

pub fn parse_spec(text: &str, path: &str) -> Result<SpecFile> {
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let mut latent: Vec<(String, usize)> = Vec::new();
    let mut observed: Vec<(String, usize)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let t = tokens(line);
        let kind = match t.first() {
            Some(&k @ ("latent" | "observed")) => k,
            _ => continue,
        };
        let [_, name, k] = t[..] else {
            return Err(err(no + 1, format!("expected '{kind} <name> <categories>'")));
        };
        if !is_identifier(name) {
            return Err(err(no + 1, format!("'{name}' is not an identifier")));
        }
        let k: usize = k
            .parse()
            .ok()
            .filter(|&k| k >= 2)
            .ok_or_else(|| err(no + 1, format!("'{k}' is not a category count >= 2")))?;
        if latent.iter().chain(observed.iter()).any(|(n, _)| n == name) {
            return Err(err(no + 1, format!("variable '{name}' declared twice")));
        }
        let list = if kind == "latent" { &mut latent } else { &mut observed };
        list.push((name.to_string(), k));
    }
    let names = Names {
        latent: &latent,
        observed: &observed,
    };
    let mut builder = GraphBuilder::new(latent.len(), observed.len());
    let mut hypotheses = Vec::new();
    let mut options = FitOptions::default();
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        let t = tokens(line);
        let Some(&head) = t.first() else { continue };
        let node = |name: &str| names.node(name).ok_or_else(|| err(no, format!("unknown variable '{name}'")));
        match head {
            "latent" | "observed" => {}
            "no_self_parents" => {
                if t.len() != 1 {
                    return Err(err(no, "'no_self_parents' takes no arguments".into()));
                }
                builder = builder.no_self_parents();
            }
            "dir" | "emit" => {
                let [_, a, "->", b] = t[..] else {
                    return Err(err(no, format!("expected '{head} <from> -> <to>'")));
                };
                builder = match (head, node(a)?, node(b)?) {
                    ("dir", Node::Latent(x), Node::Latent(y)) => builder.directed(x, y),
                    ("emit", Node::Latent(x), Node::Observed(y)) => builder.emit(x, y),
                    ("dir", ..) => return Err(err(no, "'dir' joins two latent variables".into())),
                    _ => return Err(err(no, "'emit' goes from a latent to an observable variable".into())),
                };
            }
            "bidir" => {
                let [_, a, "<->", b] = t[..] else {
                    return Err(err(no, "expected 'bidir <a> <-> <b>'".into()));
                };
                builder = match (node(a)?, node(b)?) {
                    (Node::Latent(x), Node::Latent(y)) => builder.bidirected_latent(x, y),
                    (Node::Observed(x), Node::Observed(y)) => builder.bidirected_observed(x, y),
                    _ => return Err(err(no, "'bidir' joins two variables of the same block".into())),
                };
            }
            "hypothesis" => hypotheses.push(parse_hypothesis(&t, &names).map_err(|m| err(no, m))?),
            "option" => {
                let [_, key, value] = t[..] else {
                    return Err(err(no, "expected 'option <name> <value>'".into()));
                };
                let bad = || err(no, format!("'{value}' is not a valid value for option {key}"));
                let count = || value.parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(bad);
                match key {
                    "restarts" => options.restarts = count()?,
                    "max_iter" => options.max_iter = count()?,
                    "seed" => options.seed = value.parse().map_err(|_| bad())?,
                    "tol" => {
                        options.tol = value
                            .parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite() && *v > 0.0)
                            .ok_or_else(bad)?
                    }
                    _ => return Err(err(no, format!("unknown option '{key}'"))),
                }
            }
            other => return Err(err(no, format!("unknown directive '{other}'"))),
        }
    }
    let to_scheme = |v: &[(String, usize)]| VariableScheme::from_pairs(v.iter().map(|(n, k)| (n.clone(), *k)));
    Ok(SpecFile {
        latent: to_scheme(&latent)?,
        observed: to_scheme(&observed)?,
        graph: builder.build()?,
        hypotheses,
        options,
    })
}

fn parse_hypothesis(t: &[&str], names: &Names<'_>) -> std::result::Result<Hypothesis, String> {
    match t {
        [_, kind @ ("additivity" | "invariant_association"), target] => {
            let target = parse_target(target).ok_or_else(|| format!("'{target}' is not emission or transition"))?;
            Ok(if *kind == "additivity" {
                Hypothesis::Additivity(target)
            } else {
                Hypothesis::InvariantAssociation(target)
            })
        }
        [_, "user_zero", tag, p, q] => {
            let target = Target::from_tag(tag).ok_or_else(|| format!("'{tag}' is not THETA or DELTA"))?;
            let response = names.set(p, target == Target::Transition)?;
            if response.is_empty() {
                return Err("the response set of user_zero must be nonempty".into());
            }
            let condition = names.set(q, true)?;
            Ok(Hypothesis::UserZero {
                target,
                response,
                condition,
            })
        }
        _ => Err("expected 'hypothesis additivity|invariant_association emission|transition' \
                  or 'hypothesis user_zero THETA|DELTA <P> <Q>'"
            .into()),
    }
}
