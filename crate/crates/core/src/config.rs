//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored,
//! and unknown keys are errors. The same format describes training runs,
//! evaluation runs, and single-episode initial conditions.

use crate::engine::GameState;
use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, Method, PursuerPolicy};
use crate::learning::{default_horizon, TrainingConfig};
use crate::vec2::Vec2;
use std::collections::BTreeMap;
use std::path::Path;

/// Parsed assignments in file order, with duplicate detection.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {}: empty key or value", lineno + 1)));
            }
            if map.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(KeyValues { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{v}`"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.map.keys().next() {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

macro_rules! set_if_present {
    ($kv:expr, $cfg:expr, $($key:literal => $field:ident),+ $(,)?) => {
        $(
            if let Some(v) = $kv.take_parsed($key)? {
                $cfg.$field = v;
            }
        )+
    };
}

/// Training configuration file. Every field is optional and falls back to
/// the default training setup.
pub fn training_config(kv: &mut KeyValues) -> Result<TrainingConfig> {
    let mut cfg = TrainingConfig::default();
    set_if_present!(kv, cfg,
        "n_train" => n_train,
        "alpha" => alpha,
        "gamma" => gamma,
        "beta" => beta,
        "alpha_decay" => alpha_decay,
        "beta_decay" => beta_decay,
        "tol" => tol,
        "alpha_floor" => alpha_floor,
        "grid_size" => grid_size,
        "n" => n_pursuers,
        "v_e" => v_e,
        "v_p" => v_p,
        "dt" => dt,
        "ell" => ell,
        "eps" => eps,
        "seed" => seed,
    );
    cfg.t_max = match kv.take_parsed("t_max")? {
        Some(t) => t,
        None => default_horizon(cfg.grid_size, cfg.v_e),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn training_config_from_file(path: &Path) -> Result<TrainingConfig> {
    let mut kv = KeyValues::load(path)?;
    let cfg = training_config(&mut kv)?;
    kv.finish()?;
    Ok(cfg)
}

/// Evaluation configuration file.
pub fn experiment_config(kv: &mut KeyValues) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(m) = kv.take("method") {
        cfg.method = Method::parse(&m)
            .ok_or_else(|| Error::Config(format!("key `method`: expected m1|m2|m3, got `{m}`")))?;
    }
    if let Some(p) = kv.take("pursuer_policy") {
        cfg.pursuer_policy = PursuerPolicy::parse(&p).ok_or_else(|| {
            Error::Config(format!("key `pursuer_policy`: expected relay|matrix, got `{p}`"))
        })?;
    }
    set_if_present!(kv, cfg,
        "n" => n_pursuers,
        "v_e" => v_e,
        "v_p" => v_p,
        "grid_size" => grid_size,
        "episodes" => episodes,
        "seed" => seed,
        "dt" => dt,
        "ell" => ell,
        "eps" => eps,
    );
    if let Some(path) = kv.take("weights_path") {
        cfg.weights_path = Some(path);
    }
    cfg.t_max = match kv.take_parsed("t_max")? {
        Some(t) => t,
        None => default_horizon(cfg.grid_size, cfg.v_e),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn experiment_config_from_file(path: &Path) -> Result<ExperimentConfig> {
    let mut kv = KeyValues::load(path)?;
    let cfg = experiment_config(&mut kv)?;
    kv.finish()?;
    Ok(cfg)
}

/// A single-episode description: an experiment plus explicit initial
/// positions (`ex/ey`, `tx/ty`, and `p1x/p1y` through `pNx/pNy`).
pub fn init_state_from_file(path: &Path) -> Result<(ExperimentConfig, GameState)> {
    let mut kv = KeyValues::load(path)?;

    let ex: f64 = kv
        .take_parsed("ex")?
        .ok_or_else(|| Error::Config("missing key `ex`".into()))?;
    let ey: f64 = kv
        .take_parsed("ey")?
        .ok_or_else(|| Error::Config("missing key `ey`".into()))?;
    let tx: f64 = kv
        .take_parsed("tx")?
        .ok_or_else(|| Error::Config("missing key `tx`".into()))?;
    let ty: f64 = kv
        .take_parsed("ty")?
        .ok_or_else(|| Error::Config("missing key `ty`".into()))?;

    let cfg = experiment_config(&mut kv)?;

    let mut pursuers = Vec::with_capacity(cfg.n_pursuers);
    for i in 1..=cfg.n_pursuers {
        let px: f64 = kv
            .take_parsed(&format!("p{i}x"))?
            .ok_or_else(|| Error::Config(format!("missing key `p{i}x` (n = {})", cfg.n_pursuers)))?;
        let py: f64 = kv
            .take_parsed(&format!("p{i}y"))?
            .ok_or_else(|| Error::Config(format!("missing key `p{i}y` (n = {})", cfg.n_pursuers)))?;
        pursuers.push(Vec2::new(px, py));
    }
    kv.finish()?;

    let state = GameState::new(
        Vec2::new(ex, ey),
        pursuers,
        Vec2::new(tx, ty),
        cfg.v_e,
        vec![cfg.v_p; cfg.n_pursuers],
        cfg.dt,
        cfg.ell,
        cfg.eps,
        cfg.max_stage(),
    )?;
    Ok((cfg, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_blanks_and_values() {
        let mut kv = KeyValues::parse(
            "# training setup\n\
             n_train = 10\n\
             \n\
             gamma = 0.9  # discount\n\
             seed=7\n",
        )
        .unwrap();
        let cfg = training_config(&mut kv).unwrap();
        kv.finish().unwrap();
        assert_eq!(cfg.n_train, 10);
        assert_eq!(cfg.gamma, 0.9);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.alpha, 0.1);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut kv = KeyValues::parse("n_train = 10\nnn_train = 20\n").unwrap();
        training_config(&mut kv).unwrap();
        let err = kv.finish();
        match err {
            Err(Error::Config(msg)) => assert!(msg.contains("nn_train")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_and_duplicates_are_errors() {
        assert!(matches!(KeyValues::parse("just words\n"), Err(Error::Config(_))));
        assert!(matches!(KeyValues::parse("a = 1\na = 2\n"), Err(Error::Config(_))));
        assert!(matches!(KeyValues::parse("a =\n"), Err(Error::Config(_))));
    }

    #[test]
    fn unparseable_values_name_the_key() {
        let mut kv = KeyValues::parse("gamma = high\n").unwrap();
        match training_config(&mut kv) {
            Err(Error::Config(msg)) => assert!(msg.contains("gamma")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn experiment_defaults_and_overrides() {
        let mut kv = KeyValues::parse("method = m3\nepisodes = 25\nn = 4\nv_e = 0.9\n").unwrap();
        let cfg = experiment_config(&mut kv).unwrap();
        kv.finish().unwrap();
        assert_eq!(cfg.method, Method::M3);
        assert_eq!(cfg.episodes, 25);
        assert_eq!(cfg.n_pursuers, 4);
        assert_eq!(cfg.v_e, 0.9);
        let expect = default_horizon(cfg.grid_size, 0.9);
        assert!((cfg.t_max - expect).abs() < 1e-12);
    }

    #[test]
    fn init_state_builds_a_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("init.cfg");
        std::fs::write(
            &path,
            "method = m2\nn = 2\nex = 1\ney = 2\ntx = 8\nty = 8\n\
             p1x = 4\np1y = 4\np2x = 6\np2y = 1\n",
        )
        .unwrap();
        let (cfg, state) = init_state_from_file(&path).unwrap();
        assert_eq!(cfg.n_pursuers, 2);
        assert_eq!(state.evader, Vec2::new(1.0, 2.0));
        assert_eq!(state.pursuers.len(), 2);

        // A pursuer key beyond n is unknown.
        std::fs::write(
            &path,
            "method = m2\nn = 1\nex = 1\ney = 2\ntx = 8\nty = 8\np1x = 4\np1y = 4\np2x = 6\n",
        )
        .unwrap();
        assert!(matches!(init_state_from_file(&path), Err(Error::Config(_))));
    }
}
