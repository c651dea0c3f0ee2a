//! JSON encodings for graphs, tableaux, kernel grids and quadrature rules.
//!
//! Vertex and point indices in these encodings are 1-based.

use serde::{Deserialize, Serialize};
use starprod_core::algebra::{Rational, Scalar};
use starprod_core::combinat::{AdjacencyMatrix, TwoRowSsyt};
use starprod_core::fields::{KernelGrid, QuadratureRule};
use starprod_core::graphs::{graph_from_matrix, BernoulliGraph, FeynmanGraph};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub m: usize,
    pub matrix: Vec<Vec<u32>>,
}

impl GraphJson {
    pub fn from_graph(g: &BernoulliGraph) -> Self {
        GraphJson { m: g.boundary_count(), matrix: g.matrix().rows() }
    }

    pub fn to_graph(&self) -> Result<BernoulliGraph, Error> {
        Ok(graph_from_matrix(AdjacencyMatrix::new(self.matrix.clone())?, self.m)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeynmanJson {
    pub vertices: usize,
    /// `[i, j, multiplicity]`.
    pub edges: Vec<[usize; 3]>,
}

impl FeynmanJson {
    pub fn from_graph(g: &FeynmanGraph) -> Self {
        FeynmanJson {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(i, j, m)| [i + 1, j + 1, m as usize]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<FeynmanGraph, Error> {
        let mut g = FeynmanGraph::new(self.vertices);
        for &[i, j, m] in &self.edges {
            if i == 0 || j == 0 {
                return Err(Error::Format("vertices are numbered from 1".into()));
            }
            let m = u32::try_from(m).map_err(|_| Error::Format(format!("multiplicity {m} is too large")))?;
            g.add_edge(i - 1, j - 1, m)?;
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsytJson {
    pub row1: Vec<u32>,
    pub row2: Vec<u32>,
}

impl From<&TwoRowSsyt> for SsytJson {
    fn from(t: &TwoRowSsyt) -> Self {
        SsytJson { row1: t.row1.clone(), row2: t.row2.clone() }
    }
}

/// A number as written in grid and quadrature files: a JSON number or a
/// `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn rational(&self) -> Result<Rational, Error> {
        match self {
            Number::Int(v) => Ok(Rational::from_integer((*v).into())),
            Number::Text(s) => parse_rational(s),
            Number::Float(v) => Err(Error::Format(format!("{v} is not exact; write it as a \"p/q\" string"))),
        }
    }

    pub fn float(&self) -> Result<f64, Error> {
        match self {
            Number::Int(v) => Ok(*v as f64),
            Number::Float(v) => Ok(*v),
            Number::Text(s) => match s.trim().parse::<f64>() {
                Ok(v) => Ok(v),
                Err(_) => Ok(f64::from_rational(&parse_rational(s)?)),
            },
        }
    }
}

impl From<&Rational> for Number {
    fn from(r: &Rational) -> Self {
        Number::Text(r.to_string())
    }
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::Float(v)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    if s.split('/').nth(1).is_some_and(|den| den.trim_start_matches('+').bytes().all(|b| b == b'0')) {
        return Err(Error::Format(format!("`{s}` has a zero denominator")));
    }
    s.parse().map_err(|_| Error::Format(format!("`{s}` is not a rational of the form p/q")))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    pub kernel: Vec<Vec<Number>>,
    pub field: Vec<Number>,
    pub hbar: Number,
    #[serde(default)]
    pub mode: Mode,
}

/// A kernel grid in whichever number mode its file asked for.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Rational(KernelGrid<Rational>),
    Float(KernelGrid<f64>),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::Rational(g) => g.dim(),
            Grid::Float(g) => g.dim(),
        }
    }
}

fn build<S: Scalar>(json: &GridJson, convert: impl Fn(&Number) -> Result<S, Error>) -> Result<KernelGrid<S>, Error> {
    let kernel = json
        .kernel
        .iter()
        .map(|row| row.iter().map(&convert).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let field = json.field.iter().map(&convert).collect::<Result<Vec<_>, _>>()?;
    let hbar = convert(&json.hbar)?;
    let grid = if json.points.is_empty() {
        KernelGrid::unlabelled(kernel, field, hbar)?
    } else {
        KernelGrid::new(json.points.clone(), kernel, field, hbar)?
    };
    Ok(grid)
}

impl GridJson {
    pub fn to_grid(&self) -> Result<Grid, Error> {
        match self.mode {
            Mode::Rational => Ok(Grid::Rational(build(self, Number::rational)?)),
            Mode::Float => Ok(Grid::Float(build(self, Number::float)?)),
        }
    }

    pub fn from_grid(grid: &Grid) -> Self {
        fn encode<S: Scalar>(g: &KernelGrid<S>, num: impl Fn(&S) -> Number, mode: Mode) -> GridJson {
            GridJson {
                points: g.points().to_vec(),
                kernel: g.kernel().iter().map(|row| row.iter().map(&num).collect()).collect(),
                field: g.field().iter().map(&num).collect(),
                hbar: num(g.hbar()),
                mode,
            }
        }
        match grid {
            Grid::Rational(g) => encode(g, |r| Number::from(r), Mode::Rational),
            Grid::Float(g) => encode(g, |v| Number::from(*v), Mode::Float),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureJson {
    /// Tuples of grid point indices.
    pub nodes: Vec<Vec<usize>>,
    pub weights: Vec<Number>,
}

impl QuadratureJson {
    pub fn to_rule<S: Scalar>(
        &self,
        convert: impl Fn(&Number) -> Result<S, Error>,
    ) -> Result<QuadratureRule<S>, Error> {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            if node.contains(&0) {
                return Err(Error::Format("quadrature nodes index grid points from 1".into()));
            }
            nodes.push(node.iter().map(|p| p - 1).collect());
        }
        let weights = self.weights.iter().map(convert).collect::<Result<Vec<_>, _>>()?;
        Ok(QuadratureRule::new(nodes, weights)?)
    }
}
