//! Run configuration: flat `key = value` files, overridden by flags.
//!
//! Keys: `family`, `rank`, `p`, `case`, `chi`, `lambda`, `c_beta`, `bound`,
//! `seed`, `trials`, `out`. `#` starts a comment. Unknown or repeated keys
//! are errors.

use std::path::PathBuf;

use modlie::leebasis::Case;
use modlie::{Family, LieAlgebra, RootSystem};
use thiserror::Error;

use crate::expr::{parse_in, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("unknown key {key:?} on line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub family: Family,
    pub rank: usize,
    pub p: u64,
    pub case: Case,
    /// `(basis label, value)` as written.
    pub chi: Vec<(String, i64)>,
    /// `(simple coroot, value)` as written.
    pub lambda: Vec<(String, i64)>,
    pub c_beta: Vec<i64>,
    pub bound: u32,
    pub seed: u64,
    pub trials: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: Family::B,
            rank: 2,
            p: 7,
            case: Case::I,
            chi: Vec::new(),
            lambda: Vec::new(),
            c_beta: Vec::new(),
            bound: 2,
            seed: 0,
            trials: 50,
            out: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "family", "rank", "p", "case", "chi", "lambda", "c_beta", "bound", "seed", "trials", "out",
];

/// `k=v,k=v` with integer values.
pub fn parse_pairs(s: &str) -> Result<Vec<(String, i64)>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {kv:?}"))?;
            let v = v
                .trim()
                .parse::<i64>()
                .map_err(|_| format!("not an integer: {:?}", v.trim()))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn parse_list(s: &str) -> Result<Vec<i64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<i64>()
                .map_err(|_| format!("not an integer: {:?}", v.trim()))
        })
        .collect()
}

impl RunConfig {
    /// Set one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = |v: &str| v.parse::<u64>().map_err(|_| format!("{key}: not a number: {v:?}"));
        match key {
            "family" => self.family = value.parse().map_err(|e| format!("{e}"))?,
            "rank" => self.rank = num(value)? as usize,
            "p" => self.p = num(value)?,
            "case" => self.case = value.parse()?,
            "chi" => self.chi = parse_pairs(value)?,
            "lambda" => self.lambda = parse_pairs(value)?,
            "c_beta" => self.c_beta = parse_list(value)?,
            "bound" => self.bound = u32::try_from(num(value)?).map_err(|_| "bound too large".to_string())?,
            "seed" => self.seed = num(value)?,
            "trials" => self.trials = num(value)? as usize,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Apply a config file on top of `self`.
    pub fn load_str(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen = std::collections::BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Line {
                line,
                msg: format!("expected key = value, got {content:?}"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey {
                    key: k.to_string(),
                    line,
                });
            }
            if !seen.insert(k.to_string()) {
                return Err(ConfigError::Line {
                    line,
                    msg: format!("key {k:?} given twice"),
                });
            }
            self.set(k, v).map_err(|msg| ConfigError::Line { line, msg })?;
        }
        Ok(())
    }

    pub fn root_system(&self) -> Result<RootSystem, ConfigError> {
        RootSystem::build(self.family, self.rank).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// The algebra; odd primes below 7 are admitted for `A1` only.
    pub fn algebra(&self) -> Result<LieAlgebra, ConfigError> {
        let rs = self.root_system()?;
        let small_ok = self.family == Family::A && self.rank == 1;
        LieAlgebra::build_with_override(&rs, self.p, small_ok).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// `χ` as `(basis index, value)`.
    pub fn chi_indices(&self, alg: &LieAlgebra) -> Result<Vec<(usize, i64)>, ConfigError> {
        self.chi.iter().map(|(k, v)| Ok((basis_index(alg, k)?, *v))).collect()
    }

    /// `λ` on the simple coroots, zero where unset.
    pub fn lambda_values(&self, alg: &LieAlgebra) -> Result<Vec<u64>, ConfigError> {
        let p = alg.characteristic();
        let mut out = vec![0u64; alg.rank()];
        for (k, v) in &self.lambda {
            let i = match k.parse::<usize>() {
                Ok(i) if i >= 1 && i <= alg.rank() => i - 1,
                Ok(i) => return Err(ConfigError::Invalid(format!("lambda: no simple coroot {i}"))),
                Err(_) => {
                    let idx = basis_index(alg, k)?;
                    if !alg.is_coroot(idx) {
                        return Err(ConfigError::Invalid(format!("lambda: {k} is not a simple coroot")));
                    }
                    idx - alg.coroot_offset()
                }
            };
            out[i] = v.rem_euclid(p as i64) as u64;
        }
        Ok(out)
    }
}

/// Basis position of a label such as `x(-e1)`, `h(2)` or `h(e1-e2)`.
pub fn basis_index(alg: &LieAlgebra, label: &str) -> Result<usize, ConfigError> {
    let rs = alg.root_system();
    let bad = |m: String| ConfigError::Invalid(format!("{label:?}: {m}"));
    match parse_in(label, rs).map_err(|e| bad(e.to_string()))? {
        Expr::X(r) => {
            let root = r.to_root(rs.ambient_dim()).unwrap();
            alg.root_vector_index(&root).map_err(|e| bad(e.to_string()))
        }
        Expr::HSimple(k) => Ok(alg.coroot_index(k - 1)),
        Expr::H(r) => {
            let root = r.to_root(rs.ambient_dim()).unwrap();
            rs.simple_index(&root)
                .map(|i| alg.coroot_index(i))
                .ok_or_else(|| bad("not a simple coroot".into()))
        }
        _ => Err(bad("not a basis element".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round() {
        let mut c = RunConfig::default();
        c.load_str("# demo\nfamily = B\nrank = 3\np = 11\ncase = II\nchi = x(-e1)=1, h(1)=0\nseed = 4\n")
            .unwrap();
        assert_eq!((c.rank, c.p, c.case, c.seed), (3, 11, Case::II, 4));
        assert_eq!(c.chi, vec![("x(-e1)".to_string(), 1), ("h(1)".to_string(), 0)]);
    }

    #[test]
    fn unknown_and_repeated_keys() {
        let mut c = RunConfig::default();
        assert_eq!(
            c.load_str("rnak = 2").unwrap_err(),
            ConfigError::UnknownKey {
                key: "rnak".into(),
                line: 1
            }
        );
        assert!(matches!(
            c.load_str("p = 7\np = 11"),
            Err(ConfigError::Line { line: 2, .. })
        ));
        assert!(matches!(
            c.load_str("p = seven"),
            Err(ConfigError::Line { line: 1, .. })
        ));
    }

    #[test]
    fn labels_to_indices() {
        let c = RunConfig::default();
        let alg = c.algebra().unwrap();
        assert_eq!(basis_index(&alg, "x(-e1-e2)").unwrap(), 0);
        assert_eq!(basis_index(&alg, "h(1)").unwrap(), 4);
        assert_eq!(basis_index(&alg, "h(e2)").unwrap(), 5);
        assert!(basis_index(&alg, "h(e1)").is_err());
        let mut c = c;
        c.lambda = vec![("2".into(), -1)];
        assert_eq!(c.lambda_values(&alg).unwrap(), vec![0, 6]);
    }
}
