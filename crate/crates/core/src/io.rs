//! File formats: profile JSON, set-spec JSON (profile + direction field),
//! and ASCII voxel grids (PGM-style for n = 2, slice-stacked CSV for n = 3).
//! All float output uses 17 significant digits, enough to round-trip f64
//! exactly.

use crate::direction::DirectionField;
use crate::error::{Error, Result};
use crate::profile::{BVSpec, Profile, RadialGrid};
use crate::sets::{CapFieldSet, VoxelSet};
use crate::sphere::Dimension;
use crate::make_profile;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Fixed float formatting for deterministic text output: 17 significant
/// digits round-trip every f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// On-disk profile: ambient dimension, radial grid, and the compositional
/// specification of the cap half-angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub n: u32,
    pub grid: RadialGrid,
    pub alpha: BVSpec,
}

impl ProfileSpec {
    pub fn from_profile(p: &Profile) -> Self {
        ProfileSpec {
            n: p.n.0,
            grid: p.grid,
            alpha: BVSpec {
                ac_samples: p.alpha.ac_samples.clone(),
                jumps: p.alpha.jumps.clone(),
                cantor: p.alpha.cantor,
            },
        }
    }

    pub fn build(&self) -> Result<Profile> {
        make_profile(Dimension::new(self.n)?, self.grid, self.alpha.clone())
    }
}

pub fn write_profile(path: &Path, p: &Profile) -> Result<()> {
    let spec = ProfileSpec::from_profile(p);
    fs::write(path, serde_json::to_string_pretty(&spec).map_err(parse_err)?)?;
    Ok(())
}

pub fn read_profile(path: &Path) -> Result<Profile> {
    let text = fs::read_to_string(path)?;
    let spec: ProfileSpec = serde_json::from_str(&text).map_err(parse_err)?;
    spec.build()
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Profile field of a set-spec: inline or a path to a profile JSON file,
/// resolved relative to the set-spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileRef {
    Path(String),
    Inline(ProfileSpec),
}

/// On-disk cap-field set: profile plus direction field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetSpec {
    pub profile: ProfileRef,
    pub direction: DirectionField,
}

impl SetSpec {
    pub fn from_set(e: &CapFieldSet) -> Self {
        SetSpec {
            profile: ProfileRef::Inline(ProfileSpec::from_profile(&e.profile)),
            direction: e.direction.clone(),
        }
    }

    /// Resolve to a cap-field set; `base` is the directory file references
    /// are relative to.
    pub fn build(&self, base: &Path) -> Result<CapFieldSet> {
        let profile = match &self.profile {
            ProfileRef::Inline(spec) => spec.build()?,
            ProfileRef::Path(rel) => {
                let p = Path::new(rel);
                let full = if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base.join(p)
                };
                read_profile(&full)?
            }
        };
        Ok(CapFieldSet {
            profile,
            direction: self.direction.clone(),
        })
    }
}

pub fn write_set_spec(path: &Path, e: &CapFieldSet) -> Result<()> {
    let spec = SetSpec::from_set(e);
    fs::write(path, serde_json::to_string_pretty(&spec).map_err(parse_err)?)?;
    Ok(())
}

pub fn read_set_spec(path: &Path) -> Result<CapFieldSet> {
    let text = fs::read_to_string(path)?;
    let spec: SetSpec = serde_json::from_str(&text).map_err(parse_err)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    spec.build(base)
}

/// Serialize a voxel set: n = 2 as a PGM-style ASCII grid (P2 header with
/// the spacing in a comment), n = 3 as slice-stacked CSV with a metadata
/// header line and a blank line between z slices.
pub fn write_voxel(path: &Path, v: &VoxelSet) -> Result<()> {
    let mut out = String::new();
    let [nx, ny, nz] = v.dims;
    if v.n.0 == 2 {
        writeln!(out, "P2").unwrap();
        writeln!(out, "# h={}", fmt_f64(v.h)).unwrap();
        writeln!(out, "{nx} {ny}").unwrap();
        writeln!(out, "1").unwrap();
        for j in 0..ny {
            let row: Vec<&str> = (0..nx)
                .map(|i| if v.cells[v.index(i, j, 0)] { "1" } else { "0" })
                .collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    } else {
        writeln!(out, "# voxel n=3 h={} dims={nx},{ny},{nz}", fmt_f64(v.h)).unwrap();
        for k in 0..nz {
            for j in 0..ny {
                let row: Vec<&str> = (0..nx)
                    .map(|i| if v.cells[v.index(i, j, k)] { "1" } else { "0" })
                    .collect();
                writeln!(out, "{}", row.join(",")).unwrap();
            }
            if k + 1 < nz {
                writeln!(out).unwrap();
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_voxel(path: &Path) -> Result<VoxelSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty voxel file".into()))?;
    if first.trim() == "P2" {
        let h_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing spacing header".into()))?;
        let h: f64 = h_line
            .trim()
            .strip_prefix("# h=")
            .ok_or_else(|| Error::Parse("expected '# h=<spacing>' header".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad spacing: {e}")))?;
        let dims_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing dimensions".into()))?;
        let mut it = dims_line.split_whitespace();
        let nx: usize = parse_field(it.next(), "width")?;
        let ny: usize = parse_field(it.next(), "height")?;
        lines.next(); // max-value line
        let mut v = VoxelSet::empty(Dimension(2), h, [nx, ny, 1])?;
        let mut j = 0;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            if j >= ny {
                return Err(Error::Parse("more rows than declared".into()));
            }
            for (i, tok) in line.split_whitespace().enumerate() {
                if i >= nx {
                    return Err(Error::Parse("row longer than declared width".into()));
                }
                let idx = v.index(i, j, 0);
                v.cells[idx] = tok != "0";
            }
            j += 1;
        }
        if j != ny {
            return Err(Error::Parse("fewer rows than declared".into()));
        }
        Ok(v)
    } else if let Some(meta) = first.trim().strip_prefix("# voxel n=3 ") {
        let mut h = None;
        let mut dims = None;
        for part in meta.split_whitespace() {
            if let Some(x) = part.strip_prefix("h=") {
                h = x.parse::<f64>().ok();
            } else if let Some(d) = part.strip_prefix("dims=") {
                let v: Vec<usize> = d.split(',').filter_map(|t| t.parse().ok()).collect();
                if v.len() == 3 {
                    dims = Some([v[0], v[1], v[2]]);
                }
            }
        }
        let h = h.ok_or_else(|| Error::Parse("missing h= in voxel header".into()))?;
        let dims = dims.ok_or_else(|| Error::Parse("missing dims= in voxel header".into()))?;
        let mut v = VoxelSet::empty(Dimension(3), h, dims)?;
        let mut row = 0usize;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (k, j) = (row / dims[1], row % dims[1]);
            if k >= dims[2] {
                return Err(Error::Parse("more rows than declared".into()));
            }
            for (i, tok) in line.split(',').enumerate() {
                if i >= dims[0] {
                    return Err(Error::Parse("row longer than declared width".into()));
                }
                let idx = v.index(i, j, k);
                v.cells[idx] = tok.trim() != "0";
            }
            row += 1;
        }
        if row != dims[1] * dims[2] {
            return Err(Error::Parse("fewer rows than declared".into()));
        }
        Ok(v)
    } else {
        Err(Error::Parse(
            "unrecognized voxel format (expected P2 or '# voxel n=3' header)".into(),
        ))
    }
}

fn parse_field(tok: Option<&str>, name: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse(format!("missing {name}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad {name}: {e}")))
}
