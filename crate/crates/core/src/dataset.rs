//! Landmark datasets: CSV and JSON readers and writers.
//!
//! CSV layout is one row per landmark under the header
//! `group,view,landmark,x1[,x2[,...]]`, preceded by optional `# key: value`
//! metadata lines (`name`, `m`, `pre_registered`, `provenance`). Rows of a
//! view are contiguous and numbered 1..k. In a pre-registered dataset each
//! row is one axial coordinate in ℝ^{m+1} instead of a landmark in ℝᵐ.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::AxialPoint;
use crate::shape::{assemble_sample, register, Configuration, DirectionalSample, ProjectiveShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Argument(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub name: String,
    pub landmarks: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub views: Vec<View>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkDataset {
    pub name: String,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub pre_registered: bool,
    #[serde(default)]
    pub provenance: String,
    pub groups: Vec<Group>,
}

impl LandmarkDataset {
    /// Coordinates per row: m for landmarks, m + 1 for registered axes.
    pub fn row_dim(&self) -> usize {
        if self.pre_registered {
            self.m + 1
        } else {
            self.m
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Validation("m must be at least 1".into()));
        }
        if self.groups.is_empty() {
            return Err(Error::Validation("dataset has no groups".into()));
        }
        let d = self.row_dim();
        for (i, g) in self.groups.iter().enumerate() {
            if self.groups[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Validation(format!("duplicate group name '{}'", g.name)));
            }
            if g.name.is_empty() || g.name.starts_with('#') || g.views.iter().any(|v| v.name.is_empty() || v.name.starts_with('#')) {
                return Err(Error::Validation(format!("group '{}' has an empty or '#'-prefixed name", g.name)));
            }
            if g.views.is_empty() {
                return Err(Error::Validation(format!("group '{}' has no views", g.name)));
            }
            for (j, v) in g.views.iter().enumerate() {
                if g.views[..j].iter().any(|w| w.name == v.name) {
                    return Err(Error::Validation(format!("duplicate view '{}' in group '{}'", v.name, g.name)));
                }
                if v.landmarks.len() != self.k {
                    return Err(Error::Validation(format!(
                        "view '{}' of group '{}' has {} landmarks, expected k = {}",
                        v.name,
                        g.name,
                        v.landmarks.len(),
                        self.k
                    )));
                }
                if let Some(bad) = v.landmarks.iter().position(|p| p.len() != d) {
                    return Err(Error::Validation(format!("landmark {} of view '{}' has {} coordinates, expected {d}", bad + 1, v.name, v.landmarks[bad].len())));
                }
                if v.landmarks.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::Validation(format!("view '{}' has non-finite coordinates", v.name)));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self, name: &str) -> Result<&Group> {
        self.groups.iter().find(|g| g.name == name).ok_or_else(|| Error::Argument(format!("no group named '{name}'")))
    }

    pub fn group_names(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.name.as_str()).collect()
    }

    /// Projective shapes of the views of a group. Raw landmarks are
    /// registered in `frame` (0-based, default the first m + 2); registered
    /// axes are taken as given and `frame` must be `None`.
    pub fn shapes(&self, group: &str, frame: Option<&[usize]>) -> Result<Vec<ProjectiveShape>> {
        let g = self.group(group)?;
        if self.pre_registered {
            if frame.is_some() {
                return Err(Error::Argument("a frame cannot be chosen for pre-registered data".into()));
            }
            return g
                .views
                .iter()
                .map(|v| ProjectiveShape::from_axes(v.landmarks.iter().map(|p| AxialPoint::from_slice(p)).collect::<Result<_>>()?))
                .collect();
        }
        g.views.iter().map(|v| register(&Configuration::new(v.landmarks.clone())?, frame)).collect()
    }

    /// Shapes of a group as sign-aligned unit vectors.
    pub fn directional_sample(&self, group: &str, frame: Option<&[usize]>) -> Result<DirectionalSample> {
        assemble_sample(&self.shapes(group, frame)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# name: {}", self.name);
        let _ = writeln!(s, "# m: {}", self.m);
        let _ = writeln!(s, "# pre_registered: {}", self.pre_registered);
        if !self.provenance.is_empty() {
            let _ = writeln!(s, "# provenance: {}", self.provenance);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["group".to_string(), "view".into(), "landmark".into()];
        header.extend((1..=self.row_dim()).map(|i| format!("x{i}")));
        let _ = w.write_record(&header);
        for g in &self.groups {
            for v in &g.views {
                for (i, p) in v.landmarks.iter().enumerate() {
                    let mut rec = vec![g.name.clone(), v.name.clone(), (i + 1).to_string()];
                    // `{}` on f64 prints the shortest string that parses back exactly.
                    rec.extend(p.iter().map(|x| format!("{x}")));
                    let _ = w.write_record(&rec);
                }
            }
        }
        s.push_str(&String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default());
        s
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }
}

fn parse_err(row: usize, message: impl Into<String>) -> Error {
    Error::Parse { row, message: message.into() }
}

pub fn parse_csv_str(text: &str) -> Result<LandmarkDataset> {
    let mut name = String::new();
    let mut provenance = String::new();
    let mut m_meta: Option<usize> = None;
    let mut pre_registered = false;
    for (i, line) in text.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix('#') else { continue };
        let Some((key, value)) = rest.split_once(':') else { continue };
        let value = value.trim();
        match key.trim() {
            "name" => name = value.to_string(),
            "provenance" => provenance = value.to_string(),
            "m" => m_meta = Some(value.parse().map_err(|_| parse_err(i + 1, format!("bad m '{value}'")))?),
            "pre_registered" => pre_registered = value.parse().map_err(|_| parse_err(i + 1, format!("bad pre_registered '{value}'")))?,
            _ => {}
        }
    }

    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(e.position().map_or(1, |p| p.line() as usize), e.to_string()))?.clone();
    let header_row = header.position().map_or(1, |p| p.line() as usize);
    if header.len() < 4 || &header[0] != "group" || &header[1] != "view" || &header[2] != "landmark" {
        return Err(parse_err(header_row.max(1), "expected header group,view,landmark,x1[,x2,...]"));
    }
    for (i, h) in header.iter().skip(3).enumerate() {
        if h != format!("x{}", i + 1) {
            return Err(parse_err(header_row.max(1), format!("unexpected column '{h}'")));
        }
    }
    let dim = header.len() - 3;
    let m = match (m_meta, pre_registered) {
        (Some(m), _) => m,
        (None, true) => dim.saturating_sub(1),
        (None, false) => dim,
    };

    let mut groups: Vec<Group> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(parse_err(row, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let (g, v) = (&rec[0], &rec[1]);
        if g.is_empty() || v.is_empty() {
            return Err(parse_err(row, "empty group or view name"));
        }
        let idx: usize = rec[2].parse().map_err(|_| parse_err(row, format!("bad landmark index '{}'", &rec[2])))?;
        let coords = rec
            .iter()
            .skip(3)
            .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| parse_err(row, format!("bad coordinate '{s}'"))))
            .collect::<Result<Vec<f64>>>()?;

        let continues_group = groups.last().is_some_and(|last| last.name == g);
        if !continues_group {
            if groups.iter().any(|x| x.name == g) {
                return Err(parse_err(row, format!("rows of group '{g}' are not contiguous")));
            }
            groups.push(Group { name: g.to_string(), views: Vec::new() });
        }
        let group = groups.last_mut().expect("group just ensured");
        let continues_view = group.views.last().is_some_and(|last| last.name == v);
        if !continues_view {
            if group.views.iter().any(|x| x.name == v) {
                return Err(parse_err(row, format!("rows of view '{v}' are not contiguous")));
            }
            group.views.push(View { name: v.to_string(), landmarks: Vec::new() });
        }
        let view = group.views.last_mut().expect("view just ensured");
        if idx != view.landmarks.len() + 1 {
            return Err(parse_err(row, format!("landmark index {idx} out of order (expected {})", view.landmarks.len() + 1)));
        }
        view.landmarks.push(coords);
    }
    if groups.is_empty() {
        return Err(parse_err(header_row.max(1), "no data rows"));
    }
    let k = groups[0].views[0].landmarks.len();
    let ds = LandmarkDataset { name, m, k, pre_registered, provenance, groups };
    ds.validate()?;
    Ok(ds)
}

pub fn parse_json_str(text: &str) -> Result<LandmarkDataset> {
    let ds: LandmarkDataset = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    ds.validate()?;
    Ok(ds)
}

pub fn parse_str(text: &str, format: Format) -> Result<LandmarkDataset> {
    match format {
        Format::Csv => parse_csv_str(text),
        Format::Json => parse_json_str(text),
    }
}

pub fn parse_dataset(path: &Path, format: Format) -> Result<LandmarkDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(parse_err(1, "empty file"));
    }
    parse_str(&text, format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SMALL: &str = "# name: toy\n# m: 1\ngroup,view,landmark,x1\na,1,1,0\na,1,2,1\na,1,3,3\na,1,4,7\nb,x,1,0.5\nb,x,2,1\nb,x,3,2\nb,x,4,4\n";

    #[test]
    fn parses_small_csv() {
        let ds = parse_csv_str(SMALL).unwrap();
        assert_eq!((ds.name.as_str(), ds.m, ds.k), ("toy", 1, 4));
        assert_eq!(ds.group_names(), ["a", "b"]);
        assert_eq!(ds.group("b").unwrap().views[0].landmarks[3], vec![4.0]);
        assert_eq!(ds.shapes("a", None).unwrap().len(), 1);
    }

    #[test]
    fn parse_errors_carry_rows() {
        let e = parse_csv_str("# m: 1\ngroup,view,landmark,x1\na,1,1,0\na,1,2,zz\n").unwrap_err();
        assert_eq!(e, Error::Parse { row: 4, message: "bad coordinate 'zz'".into() });
        let e = parse_csv_str("group,view,landmark,x1\na,1,1,0\na,1,3,1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { row: 3, .. }), "{e:?}");
        let e = parse_csv_str("group,view,landmark,x1\na,1,1,0\nb,1,1,1\na,2,1,1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { row: 4, .. }), "{e:?}");
        assert!(matches!(parse_csv_str("grp,view,landmark,x1\n"), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(parse_csv_str("group,view,landmark,x1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_csv_str(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_csv_str("group,view,landmark,x1\na,1,1,0,5\n"), Err(Error::Parse { row: 2, .. })));
    }

    #[test]
    fn inconsistent_k_is_a_validation_error() {
        let e = parse_csv_str("group,view,landmark,x1\na,1,1,0\na,1,2,1\na,2,1,0\n").unwrap_err();
        assert!(matches!(e, Error::Validation(_)), "{e:?}");
        let mut ds = parse_csv_str(SMALL).unwrap();
        ds.groups[1].name = "a".into();
        assert!(matches!(ds.validate(), Err(Error::Validation(_))));
        assert!(matches!(parse_json_str(r#"{"name":"x","m":1,"k":2,"groups":[{"name":"g","views":[{"name":"1","landmarks":[[1.0]]}]}]}"#), Err(Error::Validation(_))));
        assert!(matches!(parse_json_str("{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(matches!(parse_dataset(f.path(), Format::Csv), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(parse_dataset(Path::new("/nonexistent/file.csv"), Format::Csv), Err(Error::Io(_))));
    }

    #[test]
    fn format_selection() {
        assert_eq!(Format::from_path(Path::new("a/b.JSON")), Format::Json);
        assert_eq!(Format::from_path(Path::new("a/b.txt")), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }

    fn dataset_strategy() -> impl Strategy<Value = LandmarkDataset> {
        (1usize..=3, 1usize..=5, 1usize..=3, 1usize..=4, any::<bool>()).prop_flat_map(|(m, k, ngroups, nviews, pre)| {
            let d = if pre { m + 1 } else { m };
            let coord = prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e3f64..1e3, Just(-0.0), Just(1e-300)];
            let view = proptest::collection::vec(proptest::collection::vec(coord, d), k);
            let group = proptest::collection::vec(view, 1..=nviews);
            proptest::collection::vec(group, ngroups).prop_map(move |gs| LandmarkDataset {
                name: "prop".into(),
                m,
                k,
                pre_registered: pre,
                provenance: "generated".into(),
                groups: gs
                    .into_iter()
                    .enumerate()
                    .map(|(gi, views)| Group {
                        name: format!("g{gi}"),
                        views: views.into_iter().enumerate().map(|(vi, landmarks)| View { name: format!("v{vi}"), landmarks }).collect(),
                    })
                    .collect(),
            })
        })
    }

    fn bits(ds: &LandmarkDataset) -> Vec<u64> {
        ds.groups.iter().flat_map(|g| g.views.iter()).flat_map(|v| v.landmarks.iter()).flatten().map(|x| x.to_bits()).collect()
    }

    proptest! {
        #[test]
        fn round_trip_bit_exact(ds in dataset_strategy()) {
            let csv = parse_csv_str(&ds.to_csv_string()).unwrap();
            prop_assert_eq!(&csv, &ds);
            prop_assert_eq!(bits(&csv), bits(&ds));
            let json = parse_json_str(&ds.to_json_string()).unwrap();
            prop_assert_eq!(&json, &ds);
            prop_assert_eq!(bits(&json), bits(&ds));
        }
    }
}
