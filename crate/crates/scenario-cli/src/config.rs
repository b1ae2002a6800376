//! Scenario files: TOML with fixed sections, validated into a fully resolved
//! [`ScenarioConfig`]. Every problem is reported with its dotted key and line.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};
use toml::Value;
use ws_lattice::{GridSpec, LatticeError, LatticeParams, ModulationSpec, D};

use crate::error::{ConfigError, ConfigIssue, IssueKind};

/// Keys without a default.
pub const REQUIRED_KEYS: [&str; 5] = ["name", "lattice.v0", "lattice.f", "run.engines", "run.length"];

const TABLES: [&str; 6] = ["lattice", "grid", "modulation", "packet", "run", "analysis"];

const KEYS: [&str; 31] = [
    "name",
    "description",
    "seed",
    "output",
    "lattice.v0",
    "lattice.f",
    "grid.n_sites",
    "grid.points_per_site",
    "modulation.kind",
    "modulation.a",
    "modulation.omega",
    "modulation.delta",
    "modulation.order",
    "packet.envelope",
    "packet.width",
    "packet.center",
    "packet.k0",
    "packet.picture",
    "run.engines",
    "run.length",
    "run.length_unit",
    "run.dt",
    "run.tb_dt",
    "run.tb_sites",
    "run.sample_interval",
    "run.snapshots",
    "run.frame",
    "run.p_max",
    "run.wall_tol",
    "analysis.kind",
    "analysis.compare_periods",
];

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($var:ident => $s:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $s)] $var),+
        }

        impl $name {
            pub const NAMES: &'static [&'static str] = &[$($s),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$var => $s),+
                }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s {
                    $($s => Some($name::$var),)+
                    _ => None,
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

named_enum!(DriveKind { None => "none", Phase => "phase", Force => "force" });
named_enum!(EnvelopeKind { Gaussian => "gaussian", SingleSite => "single-site", SublatticePair => "sublattice-pair" });
named_enum!(
    /// Which amplitudes the packet phase k0 is applied to.
    PictureKind { Interaction => "interaction", Bare => "bare" }
);
named_enum!(Engine { Full => "full", TightBinding => "tight-binding", Secular => "secular", Envelope => "envelope" });
named_enum!(LengthUnit { Bloch => "bloch", Beat => "beat", Drive => "drive", Time => "time" });
named_enum!(FrameKind { Accelerated => "accelerated", Lab => "lab" });
named_enum!(AnalysisKind {
    None => "none",
    Basis => "basis",
    Bloch => "bloch",
    Drift => "drift",
    Diffraction => "diffraction",
    Splitting => "splitting",
    Breathing => "breathing",
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub v0: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub n_sites: usize,
    pub points_per_site: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationSection {
    pub kind: DriveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// omega = order * omega_B + delta.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketSection {
    pub envelope: EnvelopeKind,
    /// RMS width of |amplitude|^2 in sites.
    pub width: f64,
    pub center: f64,
    pub k0: f64,
    pub picture: PictureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub engines: Vec<Engine>,
    pub length: f64,
    pub length_unit: LengthUnit,
    pub dt: f64,
    pub tb_dt: f64,
    pub tb_sites: usize,
    pub sample_interval: f64,
    pub snapshots: Vec<f64>,
    pub frame: FrameKind,
    pub p_max: usize,
    pub wall_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSection {
    pub kind: AnalysisKind,
    /// Window, in Bloch periods, of the windowed engine comparison.
    pub compare_periods: f64,
}

/// Fully resolved scenario. Serializing and parsing again gives the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub lattice: LatticeSection,
    pub grid: GridSection,
    pub modulation: ModulationSection,
    pub packet: PacketSection,
    pub run: RunSection,
    pub analysis: AnalysisSection,
}

impl ScenarioConfig {
    pub fn params(&self) -> Result<LatticeParams, LatticeError> {
        LatticeParams::new(self.lattice.v0, self.lattice.f)
    }

    pub fn grid(&self) -> Result<GridSpec, LatticeError> {
        GridSpec::centered(self.grid.n_sites, self.grid.points_per_site)
    }

    pub fn omega_b(&self) -> f64 {
        self.lattice.f * D
    }

    pub fn is_driven(&self) -> bool {
        self.modulation.kind != DriveKind::None
    }

    /// Drive frequency, from omega or from the detuning.
    pub fn drive_omega(&self) -> Option<f64> {
        if !self.is_driven() {
            return None;
        }
        let m = &self.modulation;
        m.omega.or_else(|| m.delta.map(|d| m.order as f64 * self.omega_b() + d))
    }

    /// omega - order * omega_B.
    pub fn detuning(&self) -> Option<f64> {
        if !self.is_driven() {
            return None;
        }
        let m = &self.modulation;
        m.delta.or_else(|| m.omega.map(|w| w - m.order as f64 * self.omega_b()))
    }

    pub fn modulation_spec(&self) -> Result<ModulationSpec, LatticeError> {
        let a = self.modulation.a.unwrap_or(0.0);
        match (self.modulation.kind, self.drive_omega()) {
            (DriveKind::Phase, Some(w)) => ModulationSpec::phase(a, w),
            (DriveKind::Force, Some(w)) => ModulationSpec::force(a, w),
            _ => Ok(ModulationSpec::none()),
        }
    }

    /// Period of one run-length unit; None when the unit has no meaning here.
    pub fn unit_period(&self) -> Option<f64> {
        match self.run.length_unit {
            LengthUnit::Time => Some(1.0),
            LengthUnit::Bloch => Some(2.0 * PI / self.omega_b()),
            LengthUnit::Drive => self.drive_omega().map(|w| 2.0 * PI / w),
            LengthUnit::Beat => self.detuning().filter(|d| d.abs() > 1e-12).map(|d| 2.0 * PI / d.abs()),
        }
    }

    pub fn t_end(&self) -> f64 {
        self.run.length * self.unit_period().unwrap_or(f64::NAN)
    }

    pub fn bloch_period(&self) -> f64 {
        2.0 * PI / self.omega_b()
    }

    pub fn has_engine(&self, e: Engine) -> bool {
        self.run.engines.contains(&e)
    }

    /// Steps between samples of the full propagator.
    pub fn sample_every(&self) -> usize {
        (self.run.sample_interval / self.run.dt).round().max(1.0) as usize
    }

    /// Steps between samples of the chain integrators.
    pub fn tb_sample_every(&self) -> usize {
        (self.run.sample_interval / self.run.tb_dt).round().max(1.0) as usize
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Serialize(e.to_string()))
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src.as_bytes()[..offset.min(src.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Dotted key -> line of its first appearance.
fn key_lines(src: &str, table: &DeTable<'_>, prefix: &str, out: &mut BTreeMap<String, usize>) {
    for (k, v) in table.iter() {
        let path = if prefix.is_empty() { k.get_ref().to_string() } else { format!("{prefix}.{}", k.get_ref()) };
        out.entry(path.clone()).or_insert_with(|| line_of(src, k.span().start));
        if let DeValue::Table(t) = v.get_ref() {
            key_lines(src, t, &path, out);
        }
    }
}

struct Reader<'a> {
    root: &'a toml::Table,
    lines: BTreeMap<String, usize>,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn line(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    fn issue(&mut self, key: &str, kind: IssueKind) {
        let line = self.line(key);
        self.issues.push(ConfigIssue { key: key.to_string(), line, kind });
    }

    fn raw(&self, key: &str) -> Option<&'a Value> {
        let mut parts = key.split('.');
        let mut v = self.root.get(parts.next()?)?;
        for p in parts {
            v = v.as_table()?.get(p)?;
        }
        Some(v)
    }

    fn present(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    fn f64_opt(&mut self, key: &str) -> Option<f64> {
        match self.raw(key)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.issue(key, IssueKind::WrongType { expected: "a number" });
                None
            }
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> f64 {
        self.f64_opt(key).unwrap_or(default)
    }

    fn f64_req(&mut self, key: &str) -> f64 {
        if !self.present(key) {
            self.issue(key, IssueKind::Missing);
            return f64::NAN;
        }
        self.f64_opt(key).unwrap_or(f64::NAN)
    }

    fn int_or(&mut self, key: &str, default: i64) -> i64 {
        match self.raw(key) {
            None => default,
            Some(Value::Integer(i)) => *i,
            Some(_) => {
                self.issue(key, IssueKind::WrongType { expected: "an integer" });
                default
            }
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> usize {
        let v = self.int_or(key, default as i64);
        if v < 0 {
            self.issue(key, IssueKind::OutOfRange(format!("{v} is negative")));
            return default;
        }
        v as usize
    }

    fn string_opt(&mut self, key: &str) -> Option<String> {
        match self.raw(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.issue(key, IssueKind::WrongType { expected: "a string" });
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, s: &str, parse: fn(&str) -> Option<T>, names: &[&str]) -> Option<T> {
        let v = parse(s);
        if v.is_none() {
            self.issue(key, IssueKind::OutOfRange(format!("`{s}` is not one of {}", names.join(", "))));
        }
        v
    }

    fn enum_or<T: Copy>(&mut self, key: &str, default: T, parse: fn(&str) -> Option<T>, names: &[&str]) -> T {
        match self.string_opt(key) {
            Some(s) => self.choice(key, &s, parse, names).unwrap_or(default),
            None => default,
        }
    }

    fn f64_list(&mut self, key: &str) -> Vec<f64> {
        let Some(v) = self.raw(key) else { return Vec::new() };
        let items: Option<Vec<f64>> = v.as_array().and_then(|a| {
            a.iter()
                .map(|x| match x {
                    Value::Float(f) => Some(*f),
                    Value::Integer(i) => Some(*i as f64),
                    _ => None,
                })
                .collect()
        });
        items.unwrap_or_else(|| {
            self.issue(key, IssueKind::WrongType { expected: "an array of numbers" });
            Vec::new()
        })
    }

    fn check(&mut self, key: &str, ok: bool, why: impl FnOnce() -> String) {
        if !ok {
            self.issue(key, IssueKind::OutOfRange(why()));
        }
    }

    /// Range check on a key the document sets explicitly.
    fn check_given(&mut self, key: &str, ok: bool, why: impl FnOnce() -> String) {
        if self.present(key) {
            self.check(key, ok, why);
        }
    }

    fn unknown_keys(&mut self) {
        let root = self.root;
        for (k, v) in root {
            if TABLES.contains(&k.as_str()) {
                let Some(t) = v.as_table() else {
                    self.issue(k, IssueKind::WrongType { expected: "a table" });
                    continue;
                };
                for sub in t.keys() {
                    let path = format!("{k}.{sub}");
                    if !KEYS.contains(&path.as_str()) {
                        self.issue(&path, IssueKind::Unknown);
                    }
                }
            } else if !KEYS.contains(&k.as_str()) {
                self.issue(k, IssueKind::Unknown);
            }
        }
    }
}

fn syntax_error(src: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| line_of(src, s.start)).unwrap_or(1);
    ConfigError::Syntax { line, message: e.message().trim().to_string() }
}

/// Parses and validates a scenario, filling every default.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let doc = DeTable::parse(text).map_err(|e| syntax_error(text, &e))?;
    let mut lines = BTreeMap::new();
    key_lines(text, doc.get_ref(), "", &mut lines);
    let root: toml::Table = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    let mut r = Reader { root: &root, lines, issues: Vec::new() };
    r.unknown_keys();

    let name = match r.string_opt("name") {
        Some(s) => s,
        None => {
            if !r.present("name") {
                r.issue("name", IssueKind::Missing);
            }
            String::new()
        }
    };
    let description = r.string_opt("description").unwrap_or_default();
    let seed = r.int_or("seed", 0);
    r.check("seed", seed >= 0, || format!("{seed} is negative"));
    let output = r.string_opt("output");

    let lattice = LatticeSection { v0: r.f64_req("lattice.v0"), f: r.f64_req("lattice.f") };
    let grid = GridSection { n_sites: r.usize_or("grid.n_sites", 64), points_per_site: r.usize_or("grid.points_per_site", 32) };

    let kind = r.enum_or("modulation.kind", DriveKind::None, DriveKind::parse, DriveKind::NAMES);
    let modulation = ModulationSection {
        kind,
        a: r.f64_opt("modulation.a"),
        omega: r.f64_opt("modulation.omega"),
        delta: r.f64_opt("modulation.delta"),
        order: r.usize_or("modulation.order", 1) as u32,
    };

    let packet = PacketSection {
        envelope: r.enum_or("packet.envelope", EnvelopeKind::Gaussian, EnvelopeKind::parse, EnvelopeKind::NAMES),
        width: r.f64_or("packet.width", 5.0),
        center: r.f64_or("packet.center", 0.0),
        k0: r.f64_or("packet.k0", 0.0),
        picture: r.enum_or("packet.picture", PictureKind::Interaction, PictureKind::parse, PictureKind::NAMES),
    };

    let engines = match r.raw("run.engines") {
        None => {
            r.issue("run.engines", IssueKind::Missing);
            Vec::new()
        }
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for it in items {
                match it.as_str() {
                    Some(s) => {
                        if let Some(e) = r.choice("run.engines", s, Engine::parse, Engine::NAMES) {
                            out.push(e);
                        }
                    }
                    None => r.issue("run.engines", IssueKind::WrongType { expected: "an array of engine names" }),
                }
            }
            out
        }
        Some(_) => {
            r.issue("run.engines", IssueKind::WrongType { expected: "an array of engine names" });
            Vec::new()
        }
    };
    let run = RunSection {
        engines,
        length: r.f64_req("run.length"),
        length_unit: r.enum_or("run.length_unit", LengthUnit::Time, LengthUnit::parse, LengthUnit::NAMES),
        dt: r.f64_or("run.dt", 0.005),
        tb_dt: r.f64_or("run.tb_dt", 0.01),
        tb_sites: r.usize_or("run.tb_sites", 512),
        sample_interval: r.f64_or("run.sample_interval", 0.5),
        snapshots: r.f64_list("run.snapshots"),
        frame: r.enum_or("run.frame", FrameKind::Accelerated, FrameKind::parse, FrameKind::NAMES),
        p_max: r.usize_or("run.p_max", 3),
        wall_tol: r.f64_or("run.wall_tol", 1e-6),
    };
    let analysis = AnalysisSection {
        kind: r.enum_or("analysis.kind", AnalysisKind::None, AnalysisKind::parse, AnalysisKind::NAMES),
        compare_periods: r.f64_or("analysis.compare_periods", 2.0),
    };

    let cfg = ScenarioConfig { name, description, seed: seed.max(0) as u64, output, lattice, grid, modulation, packet, run, analysis };
    validate(&cfg, &mut r);
    if r.issues.is_empty() {
        Ok(cfg)
    } else {
        let mut issues = r.issues;
        issues.sort_by_key(|i| (i.line.is_none(), i.line));
        Err(ConfigError::Invalid(issues))
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0) && x.round() >= 1.0
}

fn validate(c: &ScenarioConfig, r: &mut Reader<'_>) {
    let l = &c.lattice;
    r.check_given("name", !c.name.trim().is_empty(), || "must not be empty".into());
    r.check_given("lattice.v0", positive(l.v0), || format!("V0 = {} must be > 0", l.v0));
    r.check_given("lattice.f", positive(l.f), || format!("F = {} must be > 0", l.f));

    let g = &c.grid;
    r.check_given("grid.n_sites", g.n_sites >= 16 && g.n_sites % 2 == 0, || format!("{} must be even and >= 16", g.n_sites));
    r.check_given("grid.points_per_site", g.points_per_site >= 8, || format!("{} must be >= 8", g.points_per_site));

    let m = &c.modulation;
    if m.kind == DriveKind::None {
        for key in ["modulation.a", "modulation.omega", "modulation.delta"] {
            r.check_given(key, false, || "needs modulation.kind = \"phase\" or \"force\"".into());
        }
    } else {
        match m.a {
            None => r.issue("modulation.a", IssueKind::Missing),
            Some(a) => r.check("modulation.a", a >= 0.0 && a.is_finite(), || format!("a = {a} must be >= 0")),
        }
        match (m.omega, m.delta) {
            (None, None) => r.issue("modulation.omega", IssueKind::Missing),
            (Some(_), Some(_)) => r.check("modulation.delta", false, || "give either omega or delta, not both".into()),
            (Some(w), None) => r.check("modulation.omega", positive(w), || format!("omega = {w} must be > 0")),
            (None, Some(d)) => {
                let w = m.order as f64 * c.omega_b() + d;
                r.check("modulation.delta", d.is_finite() && (!l.f.is_finite() || w > 0.0), || {
                    format!("delta = {d} gives omega = {w}, which must be > 0")
                })
            }
        }
    }
    r.check_given("modulation.order", (1..=4).contains(&m.order), || format!("order {} must be in 1..=4", m.order));

    let p = &c.packet;
    r.check_given("packet.width", positive(p.width), || format!("width {} must be > 0", p.width));
    let half = g.n_sites as f64 / 2.0;
    r.check_given("packet.center", p.center.is_finite() && p.center.abs() < half, || format!("center {} lies outside the box", p.center));
    r.check_given("packet.k0", p.k0.is_finite(), || "k0 must be finite".into());

    let run = &c.run;
    let mut seen = Vec::new();
    for e in &run.engines {
        if seen.contains(e) {
            r.check("run.engines", false, || format!("engine `{e}` listed twice"));
        }
        seen.push(*e);
    }
    let engine_issue = r.issues.iter().any(|i| i.key == "run.engines");
    if r.present("run.engines") && run.engines.is_empty() && !engine_issue && c.analysis.kind != AnalysisKind::Basis {
        r.check("run.engines", false, || "at least one engine is needed".into());
    }
    if c.has_engine(Engine::Secular) && !c.is_driven() {
        r.check("run.engines", false, || "the secular engine needs a drive".into());
    }
    if c.has_engine(Engine::Envelope) {
        r.check("run.engines", c.is_driven(), || "the envelope engine needs a drive".into());
        r.check("run.engines", p.envelope == EnvelopeKind::Gaussian, || "the envelope engine needs a gaussian packet".into());
        r.check("run.engines", run.p_max >= 2, || "the envelope engine needs run.p_max >= 2".into());
    }
    r.check_given("run.length", positive(run.length), || format!("run length {} must be > 0", run.length));
    if c.unit_period().is_none() && l.f.is_finite() {
        let why = match run.length_unit {
            LengthUnit::Beat => "`beat` needs a drive with nonzero detuning",
            _ => "`drive` needs a drive",
        };
        r.check("run.length_unit", false, || why.into());
    }
    r.check_given("run.dt", positive(run.dt) && run.dt <= 0.1, || format!("dt = {} must be in (0, 0.1]", run.dt));
    r.check_given("run.tb_dt", positive(run.tb_dt) && run.tb_dt <= 0.5, || format!("tb_dt = {} must be in (0, 0.5]", run.tb_dt));
    r.check_given("run.tb_sites", run.tb_sites >= 64 && run.tb_sites % 2 == 0, || format!("{} must be even and >= 64", run.tb_sites));
    let si = run.sample_interval;
    r.check("run.sample_interval", positive(si), || format!("{si} must be > 0"));
    if positive(si) {
        if c.has_engine(Engine::Full) && positive(run.dt) {
            r.check("run.sample_interval", near_integer(si / run.dt), || format!("{si} is not a multiple of dt = {}", run.dt));
        }
        let chain = c.has_engine(Engine::TightBinding) || c.has_engine(Engine::Secular);
        if chain && positive(run.tb_dt) {
            r.check("run.sample_interval", near_integer(si / run.tb_dt), || format!("{si} is not a multiple of tb_dt = {}", run.tb_dt));
        }
    }
    let t_end = c.t_end();
    for &s in &run.snapshots {
        r.check("run.snapshots", s >= 0.0 && (!t_end.is_finite() || s <= t_end + 1e-9), || format!("time {s} is outside [0, {t_end}]"));
    }
    r.check_given("run.p_max", (1..=6).contains(&run.p_max), || format!("p_max {} must be in 1..=6", run.p_max));
    r.check_given("run.wall_tol", positive(run.wall_tol), || format!("{} must be > 0", run.wall_tol));
    if run.frame == FrameKind::Lab {
        r.check("run.frame", c.has_engine(Engine::Full), || "the lab frame only applies to the full engine".into());
    }

    let a = &c.analysis;
    r.check_given("analysis.compare_periods", positive(a.compare_periods), || format!("{} must be > 0", a.compare_periods));
    let needs_full = !matches!(a.kind, AnalysisKind::None | AnalysisKind::Basis);
    if needs_full {
        r.check("analysis.kind", c.has_engine(Engine::Full), || format!("`{}` analyses the full engine, which is not listed", a.kind));
        r.check("analysis.kind", run.frame == FrameKind::Accelerated, || format!("`{}` needs the accelerated frame", a.kind));
    }
    let needs_drive = matches!(a.kind, AnalysisKind::Drift | AnalysisKind::Diffraction | AnalysisKind::Splitting | AnalysisKind::Breathing);
    if needs_drive {
        r.check("analysis.kind", c.is_driven(), || format!("`{}` needs a drive", a.kind));
    }
    if matches!(a.kind, AnalysisKind::Diffraction | AnalysisKind::Breathing) {
        r.check("analysis.kind", run.p_max >= 2, || format!("`{}` compares with the envelope theory, which needs p_max >= 2", a.kind));
    }
}

/// Sets a dotted key in the source document to `value` (read as a TOML value, or
/// as a string when it does not parse as one) and re-validates.
pub fn with_override(text: &str, key: &str, value: &str) -> Result<(String, ScenarioConfig), ConfigError> {
    let err = |reason: String| ConfigError::Override { key: key.to_string(), reason };
    let mut root: toml::Table = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    let parsed: Value = match toml::from_str::<toml::Table>(&format!("v = {value}")) {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(value.to_string())),
        Err(_) => Value::String(value.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().ok_or_else(|| err("empty key".into()))?;
    let mut table = &mut root;
    for p in parents {
        let entry = table.entry(p.to_string()).or_insert_with(|| Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| err(format!("`{p}` is not a table")))?;
    }
    table.insert(last.to_string(), parsed);
    let out = toml::to_string(&root).map_err(|e| err(e.to_string()))?;
    let cfg = parse_config(&out)?;
    Ok((out, cfg))
}
