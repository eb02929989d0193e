//! Persistence: JSON configuration files, CSV tables and SVG drawings.
//!
//! Floats are written in the shortest decimal form that parses back to the
//! same double, so a write/read cycle reproduces coordinates bit for bit.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::diamgraph;
use crate::error::{invalid, Error, Result};
use crate::geometry::{self, Point, PointConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub n: usize,
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
}

impl ConfigFile {
    pub fn from_config(cfg: &PointConfig, meta: BTreeMap<String, Value>) -> Self {
        Self { schema_version: SCHEMA_VERSION, n: cfg.len(), points: cfg.to_xy(), meta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return invalid(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.points.len() != self.n {
            return invalid(format!("n = {} but {} points given", self.n, self.points.len()));
        }
        Ok(())
    }

    pub fn to_config(&self) -> Result<PointConfig> {
        self.validate()?;
        PointConfig::new(self.points.iter().map(|p| Point::new(p[0], p[1])).collect())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad config JSON: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_json())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// One line of the lower-bound table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub log_delta: f64,
    pub delta_bar: f64,
    /// Value of the arc construction, present only when 6 divides n.
    pub delta_bar_section4: Option<f64>,
}

impl TableRow {
    pub fn new(n: usize, log_delta: f64, delta_bar_section4: Option<f64>) -> Self {
        let nf = n as f64;
        Self { n, log_delta, delta_bar: (log_delta - nf * nf.ln()).exp(), delta_bar_section4 }
    }

    /// `|delta_bar − exp(log_delta − n ln n)|` relative to `delta_bar`.
    pub fn consistency_error(&self) -> f64 {
        let nf = self.n as f64;
        let want = (self.log_delta - nf * nf.ln()).exp();
        (self.delta_bar - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn write_table<W: std::io::Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: std::io::Read>(input: R) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(|e| Error::InvalidInput(format!("bad table row: {e}")))).collect()
}

pub fn write_table_file(rows: &[TableRow], path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    write_table(rows, f)
}

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 0.05;

/// 800×800 drawing: unit circle about the centroid, convex hull, diameter
/// edges and one marker per point.
pub fn svg(cfg: &PointConfig, rel_tol: f64) -> Result<String> {
    if cfg.is_empty() {
        return invalid("cannot draw an empty configuration");
    }
    let c = cfg.centroid();
    let pts = cfg.points();
    let mut lo = Point::new(c.re - 1.0, c.im - 1.0);
    let mut hi = Point::new(c.re + 1.0, c.im + 1.0);
    for p in pts {
        lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Point::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let span = (hi.re - lo.re).max(hi.im - lo.im);
    let inner = CANVAS * (1.0 - 2.0 * MARGIN);
    let scale = inner / span;
    let mid = (lo + hi) / 2.0;
    let map = |p: Point| -> (f64, f64) {
        (CANVAS / 2.0 + (p.re - mid.re) * scale, CANVAS / 2.0 - (p.im - mid.im) * scale)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(
        s,
        "<style>.guide{{fill:none;stroke:#bbb;stroke-dasharray:4 4}}.hull{{fill:none;stroke:#999;stroke-width:1}}\
         .diameter{{stroke:#c00;stroke-width:3}}.point{{fill:#000}}</style>"
    );
    let (cx, cy) = map(c);
    let _ = writeln!(s, r#"<circle class="guide" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, scale);
    if pts.len() >= 3 {
        let hull = geometry::convex_hull(cfg, geometry::DEFAULT_CONVEX_TOL)?;
        let coords: Vec<String> = hull
            .iter()
            .map(|&k| {
                let (x, y) = map(pts[k]);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon class="hull" points="{}"/>"#, coords.join(" "));
    }
    if pts.len() >= 2 {
        let dg = diamgraph::extract(cfg, rel_tol)?;
        for &(a, b) in dg.edges() {
            let (x1, y1) = map(pts[a]);
            let (x2, y2) = map(pts[b]);
            let _ = writeln!(s, r#"<line class="diameter" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
    }
    for p in pts {
        let (x, y) = map(*p);
        let _ = writeln!(s, r#"<circle class="point" cx="{x:.3}" cy="{y:.3}" r="5"/>"#);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(cfg: &PointConfig, rel_tol: f64, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), svg(cfg, rel_tol)?).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}
