//! Ordered lists of categorical variables and their joint state spaces.
//!
//! Categories are stored 0-based; category 0 is the baseline. Joint states are
//! mixed-radix integers with the first variable most significant, so state
//! order coincides with lexicographic order of the category tuples.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::varset::{VarSet, MAX_BLOCK};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub categories: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableScheme {
    vars: Vec<Variable>,
    strides: Vec<usize>,
    states: usize,
}

impl VariableScheme {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        if vars.len() > MAX_BLOCK {
            return Err(Error::Capacity {
                block: "scheme",
                count: vars.len(),
                limit: MAX_BLOCK,
            });
        }
        for (i, v) in vars.iter().enumerate() {
            if v.categories < 2 {
                return Err(Error::InvalidScheme(format!(
                    "variable {} has {} categories, need at least 2",
                    v.name, v.categories
                )));
            }
            if v.categories > u8::MAX as usize {
                return Err(Error::InvalidScheme(format!(
                    "variable {} has too many categories",
                    v.name
                )));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidScheme(format!("duplicate name {}", v.name)));
            }
        }
        let mut strides = alloc::vec![0; vars.len()];
        let mut acc = 1usize;
        for i in (0..vars.len()).rev() {
            strides[i] = acc;
            acc = acc
                .checked_mul(vars[i].categories)
                .ok_or_else(|| Error::InvalidScheme("state space too large".into()))?;
        }
        Ok(VariableScheme {
            vars,
            strides,
            states: acc,
        })
    }

    /// Convenience constructor from `(name, categories)` pairs.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(name, categories)| Variable {
                    name: name.into(),
                    categories,
                })
                .collect(),
        )
    }

    /// Unnamed scheme; variables are called `{prefix}1`, `{prefix}2`, ...
    pub fn anonymous(prefix: &str, categories: &[usize]) -> Result<Self> {
        Self::from_pairs(
            categories
                .iter()
                .enumerate()
                .map(|(i, &k)| (format!("{prefix}{}", i + 1), k)),
        )
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn categories(&self, var: usize) -> usize {
        self.vars[var].categories
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.len())
    }

    /// Number of joint states.
    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn encode(&self, cats: &[usize]) -> usize {
        debug_assert_eq!(cats.len(), self.len());
        cats.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn decode(&self, state: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        self.decode_into(state, &mut out);
        out
    }

    pub fn decode_into(&self, state: usize, out: &mut Vec<usize>) {
        out.clear();
        for (v, s) in self.vars.iter().zip(&self.strides) {
            out.push((state / s) % v.categories);
        }
    }

    /// Category of variable `var` in joint state `state`.
    pub fn category_of(&self, state: usize, var: usize) -> usize {
        (state / self.strides[var]) % self.vars[var].categories
    }

    /// Variables whose category in `state` is not the baseline.
    pub fn support(&self, state: usize) -> VarSet {
        let mut s = VarSet::EMPTY;
        for i in 0..self.len() {
            if self.category_of(state, i) != 0 {
                s.insert(i);
            }
        }
        s
    }

    /// Number of cells of the margin over `set`.
    pub fn margin_size(&self, set: VarSet) -> usize {
        set.iter().map(|i| self.vars[i].categories).product()
    }

    /// Index of the projection of `state` onto the margin `set`
    /// (mixed radix over the members of `set`, first member most significant).
    pub fn project(&self, state: usize, set: VarSet) -> usize {
        set.iter()
            .fold(0, |acc, i| acc * self.vars[i].categories + self.category_of(state, i))
    }

    /// Scheme restricted to the variables in `set`, in their original order.
    pub fn restrict(&self, set: VarSet) -> Result<VariableScheme> {
        VariableScheme::new(set.iter().map(|i| self.vars[i].clone()).collect())
    }

    pub fn set_names(&self, set: VarSet) -> Vec<&str> {
        set.iter().map(|i| self.vars[i].name.as_str()).collect()
    }
}

/// Enumerates all category tuples over the variables of `set` whose entries are
/// all non-baseline, in lexicographic order.
pub fn nonbaseline_combos(scheme: &VariableScheme, set: VarSet) -> Vec<Vec<u8>> {
    let members = set.to_vec();
    let mut out = Vec::new();
    let mut cur: Vec<u8> = alloc::vec![1; members.len()];
    loop {
        out.push(cur.clone());
        let mut pos = members.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (cur[pos] as usize) + 1 < scheme.categories(members[pos]) {
                cur[pos] += 1;
                for c in cur.iter_mut().skip(pos + 1) {
                    *c = 1;
                }
                break;
            }
        }
    }
}
