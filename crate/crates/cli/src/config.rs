//! Run configuration, read from a TOML file. Every key is optional; see the
//! README for the full key list and defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use mixnorm_core::ensemble::BumpSpec;
use mixnorm_core::littlewood_paley::LPFamily;
use mixnorm_core::mixed_grid::io::read_grid_function;
use mixnorm_core::multipliers::ShellGeometry;
use mixnorm_core::spaces::{SpaceKind, SpaceParams};
use mixnorm_core::{AnisotropyVector, ExponentVector, Grid, GridFunction};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub a: Vec<f64>,
    #[serde(serialize_with = "exps::ser_opt_vec", deserialize_with = "exps::de_opt_vec")]
    pub p: Option<Vec<f64>>,
    #[serde(serialize_with = "exps::ser", deserialize_with = "exps::de")]
    pub q: f64,
    pub s: f64,
    pub alpha: f64,
    pub t: Option<Vec<f64>>,
    /// Smoothness budget of the audited multipliers.
    #[serde(rename = "N")]
    pub budget: u32,
    /// Littlewood-Paley depth; defaults depend on the command.
    #[serde(rename = "J")]
    pub levels: Option<usize>,
    #[serde(rename = "J_audit")]
    pub j_audit: u32,
    pub seed: u64,
    pub kind: SpaceKind,
    pub grid: GridSection,
    pub ensemble: EnsembleSection,
    pub maximal: MaximalSection,
    pub audit: AuditSection,
    pub experiment: ExperimentSection,
    pub invariants: InvariantSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            a: vec![1.0],
            p: None,
            q: 2.0,
            s: 1.0,
            alpha: 0.0,
            t: None,
            budget: 2,
            levels: None,
            j_audit: 6,
            seed: 0,
            kind: SpaceKind::TriebelLizorkin,
            grid: GridSection::default(),
            ensemble: EnsembleSection::default(),
            maximal: MaximalSection::default(),
            audit: AuditSection::default(),
            experiment: ExperimentSection::default(),
            invariants: InvariantSection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub dims: Option<Vec<usize>>,
    pub extents: Option<Vec<f64>>,
    /// Grid function file; its grid replaces `dims` and `extents`.
    pub descriptor: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub count: usize,
    pub width: f64,
    pub max_dilation: Option<f64>,
    /// Level `c` of the spectral cutoff `Theta(2^{-c a} .)`.
    pub cutoff: Option<i32>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            count: 20,
            width: 1.5,
            max_dilation: None,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaximalSection {
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    pub symbol: String,
    pub geometries: Vec<ShellGeometry>,
    /// Geometry whose `L^t` audit feeds the theorem gate.
    pub gate_geometry: ShellGeometry,
    pub cells: usize,
    pub refine: bool,
}

impl Default for AuditSection {
    fn default() -> Self {
        Self {
            symbol: "1".into(),
            geometries: vec![ShellGeometry::Literal, ShellGeometry::Annular, ShellGeometry::Construction],
            gate_geometry: ShellGeometry::Construction,
            cells: 64,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// `lifting` for `<xi>_a^alpha`, otherwise a symbol expression.
    pub symbol: String,
    /// Extra runs, each doubling the samples per axis.
    pub refinements: u32,
    /// Also run the inverse multiplier (lifting only).
    pub inverse: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            symbol: "lifting".into(),
            refinements: 2,
            inverse: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvariantSection {
    /// Random points for the scalar checks.
    pub samples: usize,
    /// Random function pairs and fibers for the grid checks.
    pub pairs: usize,
}

impl Default for InvariantSection {
    fn default() -> Self {
        Self {
            samples: 1000,
            pairs: 50,
        }
    }
}

/// Exponents may be written as numbers or as the strings `"inf"`.
mod exps {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    fn value(r: Raw) -> Result<f64, String> {
        match r {
            Raw::Num(v) => Ok(v),
            Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Inf") => Ok(f64::INFINITY),
            Raw::Text(s) => Err(format!("`{s}` is not an exponent")),
        }
    }

    pub fn de<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        value(Raw::deserialize(d)?).map_err(serde::de::Error::custom)
    }

    pub fn de_opt_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Vec::<Raw>::deserialize(d)?
            .into_iter()
            .map(value)
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(serde::de::Error::custom)
    }

    fn put<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(v)
        }
    }

    pub fn ser<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        put(*v, s)
    }

    pub fn ser_opt_vec<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        match v {
            None => s.serialize_none(),
            Some(v) => {
                let mut seq = s.serialize_seq(Some(v.len()))?;
                for x in v {
                    seq.serialize_element(&Finite(*x))?;
                }
                seq.end()
            }
        }
    }

    struct Finite(f64);

    impl Serialize for Finite {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            put(self.0, s)
        }
    }
}

/// Configuration after validation, with every default filled in.
pub struct Setup {
    pub config: Config,
    pub a: AnisotropyVector,
    pub p: ExponentVector,
    pub t: ExponentVector,
    pub r: ExponentVector,
    pub grid: Grid,
    /// Function read from the grid descriptor, if any.
    pub input: Option<GridFunction>,
    pub bumps: BumpSpec,
}

impl Config {
    /// Parses a config file; relative descriptor paths are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Config = toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        if let Some(d) = cfg.grid.descriptor.as_mut() {
            if d.is_relative() {
                *d = path.parent().unwrap_or(Path::new(".")).join(&*d);
            }
        }
        Ok(cfg)
    }

    /// Validates the parameters and fills the dimension-dependent defaults.
    pub fn resolve(mut self) -> Result<Setup, CliError> {
        let a = AnisotropyVector::new(self.a.clone()).map_err(|e| bad("a", e))?;
        let n = a.dim();
        let p = self.p.get_or_insert_with(|| vec![2.0; n]).clone();
        let p = ExponentVector::new(p).map_err(|e| bad("p", e))?;
        let t = self.t.get_or_insert_with(|| vec![2.0; n]).clone();
        let t = ExponentVector::new(t).map_err(|e| bad("t", e))?;
        for (name, d) in [("p", p.dim()), ("t", t.dim())] {
            if d != n {
                return Err(CliError::usage(format!("{name} has {d} entries but a has {n}")));
            }
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return Err(CliError::usage(format!("q must lie in (0, inf], got {}", self.q)));
        }
        if !self.s.is_finite() || !self.alpha.is_finite() {
            return Err(CliError::usage("s and alpha must be finite"));
        }
        SpaceParams::new(self.kind, self.s, p.clone(), self.q, a.clone()).map_err(|e| bad("space parameters", e))?;

        let default_r = || {
            let mut bound = self.q.min(2.0);
            p.entries()
                .iter()
                .map(|pk| {
                    bound = bound.min(*pk);
                    0.75 * bound
                })
                .collect::<Vec<_>>()
        };
        let r = self.maximal.r.get_or_insert_with(default_r).clone();
        let r = ExponentVector::new(r).map_err(|e| bad("maximal.r", e))?;
        if r.dim() != n || r.entries().iter().any(|v| v.is_infinite()) {
            return Err(CliError::usage(format!("maximal.r needs {n} finite entries")));
        }

        let (grid, input) = match &self.grid.descriptor {
            Some(path) => {
                if self.grid.dims.is_some() || self.grid.extents.is_some() {
                    return Err(CliError::usage("grid.descriptor excludes grid.dims and grid.extents"));
                }
                let f = read_grid_function(path)
                    .map_err(|e| CliError::usage(format!("descriptor {}: {e}", path.display())))?;
                (f.grid().clone(), Some(f))
            }
            None => {
                let dims = self.grid.dims.get_or_insert_with(|| vec![if n == 1 { 256 } else { 64 }; n]).clone();
                let extents = self.grid.extents.get_or_insert_with(|| vec![16.0; n]).clone();
                (Grid::new(dims, extents).map_err(|e| bad("grid", e))?, None)
            }
        };
        if grid.ndim() != n {
            return Err(CliError::usage(format!("grid has dimension {} but a has {n}", grid.ndim())));
        }

        let ens = &mut self.ensemble;
        if let Some(c) = ens.cutoff {
            let resolved = LPFamily::max_resolved_level(&a, &grid).map_or(-1, |j| j as i32);
            if c < 0 || c > resolved {
                return Err(CliError::usage(format!(
                    "ensemble.cutoff = {c} is outside the resolved levels 0..={resolved}"
                )));
            }
        }
        let edges = match ens.cutoff {
            Some(c) => BumpSpec::cutoff_edges(c, &a),
            None => grid.nyquist(),
        };
        let limit = BumpSpec::dilation_limit(ens.width, &edges, &a);
        let bumps = BumpSpec {
            count: ens.count,
            width: ens.width,
            max_dilation: *ens.max_dilation.get_or_insert(limit),
        };
        if self.audit.cells == 0 {
            return Err(CliError::usage("audit.cells must be positive"));
        }
        Ok(Setup {
            config: self,
            a,
            p,
            t,
            r,
            grid,
            input,
            bumps,
        })
    }
}

fn bad(what: &str, e: mixnorm_core::Error) -> CliError {
    CliError::usage(format!("invalid {what}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let s = Config::default().resolve().unwrap();
        assert_eq!(s.grid.dims(), &[256]);
        assert_eq!(s.p.entries(), &[2.0]);
        assert_eq!(s.r.entries(), &[1.5]);
        assert!(s.bumps.max_dilation > 0.0);
    }

    #[test]
    fn toml_round_trip_with_infinite_exponent() {
        let cfg: Config = toml::from_str(
            "a = [1, 2]\np = [\"inf\", 1.5]\nq = inf\nN = 4\n[grid]\ndims = [32, 32]\nextents = [8, 8]\n",
        )
        .unwrap();
        assert_eq!(cfg.p.as_deref(), Some(&[f64::INFINITY, 1.5][..]));
        assert!(cfg.q.is_infinite());
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"p\":[\"inf\",1.5]"), "{json}");
    }

    #[test]
    fn rejects_unknown_and_mismatched() {
        assert!(toml::from_str::<Config>("bogus = 1").is_err());
        let cfg: Config = toml::from_str("a = [1, 2]\np = [2]").unwrap();
        assert_eq!(cfg.resolve().err().unwrap().code, 2);
        let cfg: Config = toml::from_str("[ensemble]\ncutoff = 40").unwrap();
        assert_eq!(cfg.resolve().err().unwrap().code, 2);
    }
}
