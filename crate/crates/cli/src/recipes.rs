//! Bundled experiment recipes, one per canonical figure of the study this
//! tool reproduces. Every recipe is a complete strict config.

pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

pub fn all() -> &'static [Recipe] {
    RECIPES
}

pub fn find(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}

static RECIPES: &[Recipe] = &[
    Recipe {
        name: "fig1b",
        description: "bath dispersion on the k_y = 0 plane at M = 0 (four Weyl points at +-pi/2)",
        config: r#"
experiment = "bands"
[lattice]
size = 4
offset = 0.0
[numerics]
mesh = 201
"#,
    },
    Recipe {
        name: "fig1c",
        description: "per-site density of states at M = 0 (quadratic near the Weyl frequency; grid 192 resolves the near-node shells)",
        config: r#"
experiment = "dos"
[lattice]
size = 4
offset = 0.0
[numerics]
grid = 192
eta = 0.02
"#,
    },
    Recipe {
        name: "fig1d",
        description: "single-emitter fractional decay at g = 0.5 J, Delta = 0, M = 0 with the Markovian reference (L = 22 avoids commensurate zero modes)",
        config: r#"
experiment = "dynamics"
[lattice]
size = 22
offset = 0.0
[[emitters]]
site = [0, 0, 0]
detuning = 0.0
coupling = 0.5
[numerics]
t_max = 40.0
dt_out = 0.1
markov = true
grid = 64
"#,
    },
    Recipe {
        name: "fig1d_inset",
        description: "long-time population Z^2 versus sublattice offset at the critical detuning",
        config: r#"
experiment = "boundstate"
[lattice]
size = 4
[[emitters]]
site = [0, 0, 0]
detuning = "critical"
coupling = 0.5
[numerics]
grid = 64
offsets = [0.0, 0.5, 1.0, 1.5, 2.0]
"#,
    },
    Recipe {
        name: "fig2a",
        description: "bound-state photon field over a 20^3 window, M = 0",
        config: BOUNDSTATE_M0,
    },
    Recipe {
        name: "fig2b",
        description: "bound-state photon field over a 20^3 window, M = J",
        config: BOUNDSTATE_M1,
    },
    Recipe {
        name: "fig2c",
        description: "bound-state photon field over a 20^3 window, M = 2J (xy-confined)",
        config: BOUNDSTATE_M2,
    },
    Recipe {
        name: "fig2d",
        description: "directional power-law decay of the bound state, M = 0 (gamma ~ 2 along xy and z)",
        config: BOUNDSTATE_M0,
    },
    Recipe {
        name: "fig2e",
        description: "directional power-law decay of the bound state, M = J",
        config: BOUNDSTATE_M1,
    },
    Recipe {
        name: "fig2f",
        description: "directional power-law decay of the bound state, M = 2J",
        config: BOUNDSTATE_M2,
    },
    Recipe {
        name: "fig3",
        description: "reversible two-emitter excitation exchange at separation a z, sublattice A, for M in {0, J, 2J} at the critical detuning",
        config: r#"
experiment = "dynamics"
[lattice]
size = 22
[[emitters]]
site = [0, 0, 0]
detuning = "critical"
coupling = 0.5
[[emitters]]
site = [0, 0, 1]
detuning = "critical"
coupling = 0.5
[numerics]
t_max = 300.0
dt_out = 0.1
offsets = [0.0, 1.0, 2.0]
"#,
    },
    Recipe {
        name: "fig4a",
        description: "spin-model dispersion along k_z (k_x = pi/2, k_y = 0) for ranges s/a in {1,3,5,7,9}, M = 0",
        config: SPINBANDS_M0,
    },
    Recipe {
        name: "fig4b",
        description: "spin-model dispersion along k_z for ranges s/a in {1,3,5,7,9}, M = J",
        config: SPINBANDS_M1,
    },
    Recipe {
        name: "fig4c",
        description: "spin-model dispersion along k_z for ranges s/a in {1,3,5,7,9}, M = 2J (no crossing)",
        config: SPINBANDS_M2,
    },
    Recipe {
        name: "fig4d",
        description: "spin-model Berry curvature on the k_y = 0 plane at s/a = 9, M = 0",
        config: r#"
experiment = "berry"
[lattice]
size = 4
offset = 0.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [9.0]
berry_mesh = 41
"#,
    },
    Recipe {
        name: "fig4e",
        description: "spin-model Berry curvature on the k_y = 0 plane at s/a = 9, M = J",
        config: r#"
experiment = "berry"
[lattice]
size = 4
offset = 1.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [9.0]
berry_mesh = 41
"#,
    },
    Recipe {
        name: "fig4f",
        description: "spin-model Berry curvature on the k_y = 0 plane at s/a = 9, M = 2J (no Weyl points)",
        config: r#"
experiment = "berry"
[lattice]
size = 4
offset = 2.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [9.0]
berry_mesh = 41
"#,
    },
];

const BOUNDSTATE_M0: &str = r#"
experiment = "boundstate"
[lattice]
size = 20
offset = 0.0
[[emitters]]
site = [10, 10, 10]
detuning = "critical"
coupling = 0.5
[numerics]
grid = 128
fit_min = 2.0
fit_max = 8.0
"#;

const BOUNDSTATE_M1: &str = r#"
experiment = "boundstate"
[lattice]
size = 20
offset = 1.0
[[emitters]]
site = [10, 10, 10]
detuning = "critical"
coupling = 0.5
[numerics]
grid = 128
fit_min = 2.0
fit_max = 8.0
"#;

const BOUNDSTATE_M2: &str = r#"
experiment = "boundstate"
[lattice]
size = 20
offset = 2.0
[[emitters]]
site = [10, 10, 10]
detuning = "critical"
coupling = 0.5
[numerics]
grid = 128
fit_min = 2.0
fit_max = 8.0
"#;

const SPINBANDS_M0: &str = r#"
experiment = "spinbands"
[lattice]
size = 4
offset = 0.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [1.0, 3.0, 5.0, 7.0, 9.0]
mesh = 400
"#;

const SPINBANDS_M1: &str = r#"
experiment = "spinbands"
[lattice]
size = 4
offset = 1.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [1.0, 3.0, 5.0, 7.0, 9.0]
mesh = 400
"#;

const SPINBANDS_M2: &str = r#"
experiment = "spinbands"
[lattice]
size = 4
offset = 2.0
[[emitters]]
site = [0, 0, 0]
coupling = 0.3
[numerics]
grid = 128
ranges = [1.0, 3.0, 5.0, 7.0, 9.0]
mesh = 400
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn catalog_has_at_least_fourteen_recipes() {
        assert!(all().len() >= 14, "{} recipes", all().len());
    }

    #[test]
    fn every_recipe_parses_through_the_strict_loader() {
        for r in all() {
            ExperimentConfig::from_toml(r.config)
                .unwrap_or_else(|e| panic!("recipe {} failed to parse: {e:#}", r.name));
        }
    }

    #[test]
    fn fig4d_declares_range_nine_at_zero_offset() {
        let cfg = ExperimentConfig::from_toml(find("fig4d").unwrap().config).unwrap();
        assert_eq!(cfg.lattice.offset, 0.0);
        assert_eq!(cfg.numerics.ranges, vec![9.0]);
    }

    #[test]
    fn recipe_names_are_unique() {
        let mut names: Vec<_> = all().iter().map(|r| r.name).collect();
        names.sort_unstable();
        let n = names.len();
        names.dedup();
        assert_eq!(n, names.len());
    }
}
