//! JSON documents with 17 significant digits per float.
//!
//! Every reader accepts exactly what the matching writer emits, and floats
//! come back bit-for-bit.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::functions::{CompositionFunction, GridFunction, SimpleFunction};
use crate::geometry::{AxisBox, Polytope};

/// Pretty JSON, floats as `d.dddddddddddddddde±x`.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Document(e.to_string()))
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_str(&text).map_err(|e| match e {
        Error::Document(m) => Error::Document(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes `value` to `path`, or to standard output for `-`.
pub fn write<T: Serialize + ?Sized>(value: &T, path: &str) -> Result<()> {
    let text = to_string(value)?;
    if path == "-" {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(path, text).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    }
    Ok(())
}

/// Any integrable input, told apart by its fields.
#[derive(Clone, Debug)]
pub enum Geometry {
    Polytope(Polytope),
    Box(AxisBox),
    Simple(SimpleFunction),
    Grid(GridFunction),
}

impl Geometry {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let has = |k: &str| value.get(k).is_some();
        let out = if has("pieces") {
            Geometry::Simple(serde_json::from_value(value)?)
        } else if has("cells") {
            Geometry::Grid(serde_json::from_value(value)?)
        } else if has("vertices") {
            Geometry::Polytope(serde_json::from_value(value)?)
        } else if has("lower") {
            Geometry::Box(serde_json::from_value(value)?)
        } else {
            return Err(Error::Document(
                "expected a polytope (vertices), box (lower/upper), simple function (pieces) or grid function (cells)"
                    .into(),
            ));
        };
        Ok(out)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Document(m) => Error::Document(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Geometry::Polytope(p) => p.dim(),
            Geometry::Box(b) => b.dim(),
            Geometry::Simple(h) => h.dim(),
            Geometry::Grid(g) => g.dim(),
        }
    }

    /// The input as a simple function (polytopes and boxes get weight 1).
    pub fn to_simple(&self) -> SimpleFunction {
        match self {
            Geometry::Polytope(p) => SimpleFunction::indicator(1.0, p.clone()),
            Geometry::Box(b) => SimpleFunction::indicator(1.0, Polytope::from_box(b)),
            Geometry::Simple(h) => h.clone(),
            Geometry::Grid(g) => g.to_simple(),
        }
    }

    /// The support body, for inputs that are a single polytope.
    pub fn polytope(&self) -> Option<Polytope> {
        match self {
            Geometry::Polytope(p) => Some(p.clone()),
            Geometry::Box(b) => Some(Polytope::from_box(b)),
            _ => None,
        }
    }
}

/// A `xi` document, or a full spec from which `xi` is taken.
#[derive(Deserialize)]
#[serde(untagged)]
enum XiOrSpec {
    Spec { xi: CompositionFunction },
    Xi(CompositionFunction),
}

pub fn read_xi(path: impl AsRef<Path>) -> Result<CompositionFunction> {
    Ok(match read::<XiOrSpec>(path)? {
        XiOrSpec::Spec { xi } | XiOrSpec::Xi(xi) => xi,
    })
}
