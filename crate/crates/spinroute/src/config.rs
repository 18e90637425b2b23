//! Run configuration: a flat `key = value` file (TOML) plus flag overrides.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `code` | `surface:3` | `surface:<d>` or a code file path |
//! | `margin` | 1 | free cells around the data block |
//! | `width`, `height` | derived | explicit grid size |
//! | `rounds` | 1 | extraction rounds |
//! | `basis` | `z` | memory basis |
//! | `policy` | `longest-first` | `longest-first`, `index` or `random` |
//! | `tailor` | false | basis-change pairs around Z-ancilla movement |
//! | `seed` | 0 | seed for the random policy |
//! | `per_edge_noise` | false | one phase-flip channel per shuttled edge |
//! | `exact_limit` | 12 | largest target set solved exactly |
//! | `t_*_ns` | see [`TimingConfig`] | durations in ns |
//! | `p_*`, `t1_ns`, `t2_ns` | see [`NoiseConfig`] | error model |

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spinroute_core::code::{surface_code, Basis, DataLayout};
use spinroute_core::compiler::{CompileOptions, OrderPolicy};
use spinroute_core::tsp::DEFAULT_EXACT_LIMIT;
use spinroute_core::{build_grid, ChipLayout, CssCode, NoiseConfig, TimingConfig};

use crate::codefile::{parse_code, write_code};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub code: String,
    pub margin: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    pub rounds: u32,
    pub basis: String,
    pub policy: String,
    pub tailor: bool,
    pub seed: u64,
    pub per_edge_noise: bool,
    pub exact_limit: usize,
    pub t_cx_ns: u64,
    pub t_h_ns: u64,
    pub t_init_ns: u64,
    pub t_meas_ns: u64,
    pub t_shuttle_ns: u64,
    pub t_displace_ns: u64,
    pub p_cx: f64,
    pub p_h: f64,
    pub p_init: f64,
    pub p_meas: f64,
    pub p_shuttle: f64,
    pub p_displace: f64,
    pub t1_ns: f64,
    pub t2_ns: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TimingConfig::default();
        let n = NoiseConfig::default();
        Self {
            code: "surface:3".into(),
            margin: 1,
            width: None,
            height: None,
            rounds: 1,
            basis: "z".into(),
            policy: OrderPolicy::LongestFirst.name().into(),
            tailor: false,
            seed: 0,
            per_edge_noise: false,
            exact_limit: DEFAULT_EXACT_LIMIT,
            t_cx_ns: t.t_cx,
            t_h_ns: t.t_h,
            t_init_ns: t.t_init,
            t_meas_ns: t.t_meas,
            t_shuttle_ns: t.t_shuttle,
            t_displace_ns: t.t_displace,
            p_cx: n.p_cx,
            p_h: n.p_h,
            p_init: n.p_init,
            p_meas: n.p_meas,
            p_shuttle: n.p_shuttle,
            p_displace: n.p_displace,
            t1_ns: n.t1_ns,
            t2_ns: n.t2_ns,
        }
    }
}

/// Flags that override individual configuration keys.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `surface:<d>` or a code file
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub margin: Option<u32>,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    #[arg(long)]
    pub rounds: Option<u32>,
    /// `x` or `z`
    #[arg(long)]
    pub basis: Option<String>,
    /// `longest-first`, `index` or `random`
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub tailor: bool,
    #[arg(long, conflicts_with = "tailor")]
    pub no_tailor: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub per_edge_noise: bool,
    #[arg(long)]
    pub exact_limit: Option<usize>,
    #[arg(long)]
    pub t_cx_ns: Option<u64>,
    #[arg(long)]
    pub t_h_ns: Option<u64>,
    #[arg(long)]
    pub t_init_ns: Option<u64>,
    #[arg(long)]
    pub t_meas_ns: Option<u64>,
    #[arg(long)]
    pub t_shuttle_ns: Option<u64>,
    #[arg(long)]
    pub t_displace_ns: Option<u64>,
    #[arg(long)]
    pub p_cx: Option<f64>,
    #[arg(long)]
    pub p_h: Option<f64>,
    #[arg(long)]
    pub p_init: Option<f64>,
    #[arg(long)]
    pub p_meas: Option<f64>,
    #[arg(long)]
    pub p_shuttle: Option<f64>,
    #[arg(long)]
    pub p_displace: Option<f64>,
    #[arg(long)]
    pub t1_ns: Option<f64>,
    #[arg(long)]
    pub t2_ns: Option<f64>,
}

macro_rules! take {
    ($cfg:ident, $o:ident, $($f:ident),*) => {
        $(if let Some(v) = $o.$f.clone() { $cfg.$f = v; })*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Config file (if any) with flags applied on top; flags win.
    pub fn resolve(o: &Overrides) -> Result<Self> {
        Self::resolve_over(Self::default(), o)
    }

    /// Like [`RunConfig::resolve`] but starting from `base` when no config
    /// file is given.
    pub fn resolve_over(base: Self, o: &Overrides) -> Result<Self> {
        let mut cfg = match &o.config {
            Some(p) => Self::load(p)?,
            None => base,
        };
        take!(cfg, o, code, margin, rounds, basis, policy, seed, exact_limit);
        take!(cfg, o, t_cx_ns, t_h_ns, t_init_ns, t_meas_ns, t_shuttle_ns, t_displace_ns);
        take!(cfg, o, p_cx, p_h, p_init, p_meas, p_shuttle, p_displace, t1_ns, t2_ns);
        if o.width.is_some() {
            cfg.width = o.width;
        }
        if o.height.is_some() {
            cfg.height = o.height;
        }
        if o.tailor {
            cfg.tailor = true;
        }
        if o.no_tailor {
            cfg.tailor = false;
        }
        if o.per_edge_noise {
            cfg.per_edge_noise = true;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        self.basis()?;
        self.policy()?;
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be positive".into()));
        }
        self.noise().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.timing().validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn basis(&self) -> Result<Basis> {
        match self.basis.to_ascii_lowercase().as_str() {
            "z" => Ok(Basis::Z),
            "x" => Ok(Basis::X),
            other => Err(Error::Config(format!("unknown basis `{other}`"))),
        }
    }

    pub fn policy(&self) -> Result<OrderPolicy> {
        OrderPolicy::parse(&self.policy).ok_or_else(|| Error::Config(format!("unknown policy `{}`", self.policy)))
    }

    pub fn timing(&self) -> TimingConfig {
        TimingConfig {
            t_cx: self.t_cx_ns,
            t_h: self.t_h_ns,
            t_init: self.t_init_ns,
            t_meas: self.t_meas_ns,
            t_shuttle: self.t_shuttle_ns,
            t_displace: self.t_displace_ns,
        }
    }

    pub fn noise(&self) -> NoiseConfig {
        NoiseConfig {
            p_cx: self.p_cx,
            p_h: self.p_h,
            p_init: self.p_init,
            p_meas: self.p_meas,
            p_shuttle: self.p_shuttle,
            p_displace: self.p_displace,
            t1_ns: self.t1_ns,
            t2_ns: self.t2_ns,
        }
    }

    pub fn compile_options(&self) -> Result<CompileOptions> {
        Ok(CompileOptions {
            timing: self.timing(),
            policy: self.policy()?,
            tailor: self.tailor,
            seed: self.seed,
            exact_limit: self.exact_limit,
        })
    }

    /// Loads the code and places it on a grid.
    pub fn instance(&self) -> Result<Instance> {
        let (code, layout, digest) = match self.code.strip_prefix("surface:") {
            Some(d) => {
                let d: u32 = d.parse().map_err(|_| Error::Config(format!("bad surface distance `{d}`")))?;
                let (code, layout) = surface_code(d)?;
                let digest = sha256_hex(write_code(&code, Some(&layout)).as_bytes());
                (code, Some(layout), digest)
            }
            None => {
                let bytes = std::fs::read(&self.code).map_err(|e| Error::io(&self.code, e))?;
                let text = String::from_utf8(bytes.clone()).map_err(|_| Error::parse(1, "code file is not UTF-8"))?;
                let file = parse_code(&text)?;
                (file.code, file.layout, sha256_hex(&bytes))
            }
        };
        let data = layout.unwrap_or_else(|| DataLayout::row_major(code.n())).normalized(self.margin);
        let (mut w, mut h) = data.cells().iter().fold((0, 0), |(w, h), c| (w.max(c.x + 1), h.max(c.y + 1)));
        w += self.margin;
        h += self.margin;
        while (w as usize) * (h as usize) < code.num_checks() {
            if w <= h {
                w += 1;
            } else {
                h += 1;
            }
        }
        let chip = build_grid(self.width.unwrap_or(w), self.height.unwrap_or(h))?;
        Ok(Instance {
            code,
            data,
            chip,
            inputs: vec![InputHash { name: "code".into(), source: self.code.clone(), sha256: digest }],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub name: String,
    pub source: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A code placed on a concrete chip.
#[derive(Clone, Debug)]
pub struct Instance {
    pub code: CssCode,
    pub data: DataLayout,
    pub chip: ChipLayout,
    pub inputs: Vec<InputHash>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "code = \"surface:5\"\nt_shuttle_ns = 2000\np_shuttle = 0.01\ntailor = true\n").unwrap();
        let o = Overrides { config: Some(path), p_shuttle: Some(1e-3), no_tailor: true, ..Overrides::default() };
        let cfg = RunConfig::resolve(&o).unwrap();
        assert_eq!(cfg.code, "surface:5");
        assert_eq!(cfg.t_shuttle_ns, 2000);
        assert_eq!(cfg.p_shuttle, 1e-3);
        assert!(!cfg.tailor);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(matches!(RunConfig::from_toml("colour = 3"), Err(Error::Config(_))));
        let o = Overrides { basis: Some("y".into()), ..Overrides::default() };
        assert!(matches!(RunConfig::resolve(&o), Err(Error::Config(_))));
        let o = Overrides { p_cx: Some(2.0), ..Overrides::default() };
        assert!(matches!(RunConfig::resolve(&o), Err(Error::Config(_))));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig { width: Some(9), ..RunConfig::default() };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn surface_instance_has_margin() {
        let cfg = RunConfig { code: "surface:5".into(), ..RunConfig::default() };
        let inst = cfg.instance().unwrap();
        assert_eq!((inst.chip.width(), inst.chip.height()), (7, 7));
        assert_eq!(inst.inputs[0].sha256.len(), 64);
    }
}
