//! Run configuration: strict TOML in, validated struct out, and back again
//! byte-for-byte through emit-config.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use xyergo::{PotentialSpec, SOLVER_TOL};

/// Commands accepted in the `commands` list and as subcommands.
pub const KNOWN_COMMANDS: [&str; 9] = [
    "twist",
    "alpha",
    "subaction",
    "mane",
    "barrier",
    "aubry",
    "descent",
    "gap",
    "tpo",
];

/// Default analysis chain: everything except the randomized experiments.
pub const DEFAULT_COMMANDS: [&str; 6] = ["twist", "alpha", "subaction", "mane", "barrier", "aubry"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_commands")]
    pub commands: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Zero threshold for Aubry membership; scale default when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_zero: Option<f64>,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    /// Barrier window is (node_count, multiplier * node_count).
    #[serde(default = "default_window_multiplier")]
    pub window_multiplier: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_zero: None,
            solver_tol: default_solver_tol(),
            window_multiplier: default_window_multiplier(),
        }
    }
}

fn default_n_cells() -> usize {
    128
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_commands() -> Vec<String> {
    DEFAULT_COMMANDS.iter().map(|s| s.to_string()).collect()
}

fn default_solver_tol() -> f64 {
    SOLVER_TOL
}

fn default_window_multiplier() -> usize {
    4
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config field {field}: {reason}")]
    Invalid { field: String, reason: String },
}

impl RunConfig {
    pub fn with_potential(potential: PotentialSpec) -> Self {
        RunConfig {
            potential,
            n_cells: default_n_cells(),
            seed: 0,
            output_dir: default_output_dir(),
            commands: default_commands(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, reason: String| ConfigError::Invalid {
            field: field.to_string(),
            reason,
        };
        if self.n_cells == 0 {
            return Err(invalid("n_cells", "must be at least 1, got 0".into()));
        }
        let t = &self.tolerances;
        if !(t.solver_tol > 0.0 && t.solver_tol.is_finite()) {
            return Err(invalid(
                "tolerances.solver_tol",
                format!("must be positive and finite, got {}", t.solver_tol),
            ));
        }
        if let Some(tz) = t.tol_zero {
            if !(tz > 0.0 && tz.is_finite()) {
                return Err(invalid(
                    "tolerances.tol_zero",
                    format!("must be positive and finite, got {tz}"),
                ));
            }
        }
        if t.window_multiplier < 1 {
            return Err(invalid(
                "tolerances.window_multiplier",
                "must be at least 1, got 0".into(),
            ));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(invalid("output_dir", "must not be empty".into()));
        }
        for (i, cmd) in self.commands.iter().enumerate() {
            if !KNOWN_COMMANDS.contains(&cmd.as_str()) {
                return Err(invalid(
                    &format!("commands[{i}]"),
                    format!("unknown command '{cmd}'"),
                ));
            }
        }
        Ok(())
    }

    pub fn tol_zero(&self) -> f64 {
        self.tolerances
            .tol_zero
            .unwrap_or_else(|| xyergo::default_tol_zero(self.n_cells))
    }

    pub fn window(&self) -> (usize, usize) {
        let nodes = self.n_cells + 1;
        (nodes, self.tolerances.window_multiplier * nodes)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text)?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_picks_defaults() {
        let cfg = parse_config("[potential]\nkind = \"product\"\n").unwrap();
        assert_eq!(cfg.potential, PotentialSpec::Product);
        assert_eq!(cfg.n_cells, 128);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert_eq!(cfg.commands, default_commands());
        assert_eq!(cfg.tolerances.solver_tol, SOLVER_TOL);
        assert_eq!(cfg.tolerances.window_multiplier, 4);
        assert_eq!(cfg.tol_zero(), xyergo::default_tol_zero(128));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("n_cell = 4\n[potential]\nkind = \"product\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n_cell"), "{msg}");

        // unknown keys inside the potential table are caught by the wire type
        let err = parse_config("[potential]\nkind = \"product\"\nwobble = 1\n").unwrap_err();
        assert!(err.to_string().contains("wobble"));
    }

    #[test]
    fn parse_errors_carry_a_location() {
        let err = parse_config("[potential]\nkind = product\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn zero_cells_name_the_field() {
        let err =
            parse_config("n_cells = 0\n[potential]\nkind = \"product\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n_cells"), "{msg}");
        assert!(msg.contains("at least 1"), "{msg}");
    }

    #[test]
    fn unknown_command_names_the_slot() {
        let err = parse_config(
            "commands = [\"alpha\", \"frobnicate\"]\n[potential]\nkind = \"product\"\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("commands[1]"), "{msg}");
        assert!(msg.contains("frobnicate"), "{msg}");
    }

    #[test]
    fn bad_tolerances_are_named() {
        let err = parse_config(
            "[potential]\nkind = \"product\"\n[tolerances]\nsolver_tol = -1.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("solver_tol"));

        let err = parse_config(
            "[potential]\nkind = \"product\"\n[tolerances]\nwindow_multiplier = 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("window_multiplier"));
    }

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = RunConfig::with_potential(PotentialSpec::SquaredDifferencePlusWell);
        cfg.n_cells = 64;
        cfg.seed = 7;
        cfg.commands = vec!["alpha".into(), "tpo".into()];
        cfg.tolerances.tol_zero = Some(1e-8);
        let text = cfg.to_toml();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, cfg);
        // and the emitted text itself is stable
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn polynomial_and_perturbed_round_trip() {
        let text = "\
[potential]
kind = \"sum-of-terms\"
coeffs = [0.09, -0.6, 1.0]
epsilon = 0.05

[potential.base]
kind = \"squared-difference\"
";
        let cfg = parse_config(text).unwrap();
        match &cfg.potential {
            PotentialSpec::Perturbed { epsilon, .. } => assert_eq!(*epsilon, 0.05),
            other => panic!("unexpected {other:?}"),
        }
        let back = parse_config(&cfg.to_toml()).unwrap();
        assert_eq!(back.potential, cfg.potential);
    }
}
