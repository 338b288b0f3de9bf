use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Which filtration a diagram came from.
///
/// Upper-level diagrams are stored in the scale of the negated function, so
/// `birth <= death` holds for every diagram and persistence is always
/// `death - birth`. [`PersistencePoint::function_values`] maps back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Distance,
    FunctionUpper,
    FunctionLower,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Distance => "distance",
            Scale::FunctionUpper => "function-upper",
            Scale::FunctionLower => "function-lower",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Scale::Distance),
            "function-upper" => Ok(Scale::FunctionUpper),
            "function-lower" => Ok(Scale::FunctionLower),
            other => Err(Error::Parse(format!("unknown diagram scale {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Self { dim, birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// (birth, death) in the units of the filtered function.
    pub fn function_values(&self, scale: Scale) -> (f64, f64) {
        match scale {
            Scale::FunctionUpper => (-self.birth, -self.death),
            _ => (self.birth, self.death),
        }
    }
}

/// A multiset of (dim, birth, death) points off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub points: Vec<PersistencePoint>,
    pub scale: Scale,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<PersistencePoint>, scale: Scale) -> Self {
        Self { points, scale }
    }

    pub fn empty(scale: Scale) -> Self {
        Self { points: Vec::new(), scale }
    }

    /// Finite points of homology dimension `dim`.
    pub fn finite(&self, dim: usize) -> impl Iterator<Item = &PersistencePoint> + '_ {
        self.points.iter().filter(move |p| p.dim == dim && !p.is_essential())
    }

    pub fn essential_count(&self, dim: usize) -> usize {
        self.points.iter().filter(|p| p.dim == dim && p.is_essential()).count()
    }

    /// Finite lifetimes of dimension `dim`, largest first.
    pub fn lifetimes(&self, dim: usize) -> Vec<f64> {
        let mut l: Vec<f64> = self.finite(dim).map(|p| p.persistence()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    /// Points sorted by (dim, birth, death) for stable output.
    pub fn canonicalize(&mut self) {
        self.points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.points
                .iter()
                .map(|p| {
                    json!({
                        "dim": p.dim,
                        "birth": float_value(p.birth),
                        "death": float_value(p.death),
                        "scale": self.scale.as_str(),
                    })
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("diagram serializes")
    }

    /// Parses the diagram JSON format. An empty array parses as a
    /// distance-scale diagram.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("diagram JSON must be an array".into()))?;
        let mut scale = None;
        let mut points = Vec::with_capacity(items.len());
        for item in items {
            let dim = item["dim"]
                .as_u64()
                .ok_or_else(|| Error::Parse("point is missing an integer \"dim\"".into()))?
                as usize;
            let birth = parse_float(&item["birth"])?;
            let death = parse_float(&item["death"])?;
            if death < birth {
                return Err(Error::Parse(format!("death {death} precedes birth {birth}")));
            }
            let s = Scale::parse(
                item["scale"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("point is missing \"scale\"".into()))?,
            )?;
            if *scale.get_or_insert(s) != s {
                return Err(Error::Parse("mixed scales in one diagram".into()));
            }
            points.push(PersistencePoint { dim, birth, death });
        }
        Ok(Self { points, scale: scale.unwrap_or(Scale::Distance) })
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn float_value(x: f64) -> Value {
    if x == f64::INFINITY {
        Value::String("inf".into())
    } else if x == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        json!(x)
    }
}

fn parse_float(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse("bad number".into())),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        other => Err(Error::Parse(format!("expected a number or \"inf\", got {other}"))),
    }
}
