//! The `starprod` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use starprod_core::algebra::{Poly, Rational, Scalar};
use starprod_core::combinat::{
    admissible_witness, enumerate_adjacency_by_degree, enumerate_adjacency_by_rowsums, is_admissible, ssyt_two_row,
    AdjacencyMatrix, IntSequence,
};
use starprod_core::fields::{field_expectation, field_star, field_star_direct, functional_star, KernelGrid};
use starprod_core::graphs::{
    bernoulli_dot, feynman_dot, graph_from_matrix, star_via_graphs, to_feynman, BernoulliGraph,
};
use starprod_core::star::{poisson_bracket, star_multi, PropagatorMatrix, TruncationOrder};
use starprod_core::wick::{
    expectation_formula, expectation_oracle, wick_power, wick_unpower, WickExpansion, WickMonomialSpec,
};

use crate::expr::{parse, Context};
use crate::formats::{FeynmanJson, GraphJson, Grid, GridJson, Number, QuadratureJson, SsytJson};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "starprod", version, about = "Exact Moyal-type star products, Wick calculus and graph expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// Number of variables; defaults to the largest index used.
    #[arg(long)]
    pub dim: Option<u32>,
    /// Propagator family (repeatable, or comma separated) whose symbols are symmetric.
    #[arg(long, value_delimiter = ',')]
    pub sym: Vec<String>,
    /// Propagator family of the product.
    #[arg(long, default_value = "K")]
    pub family: String,
    /// Output as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SequenceArgs {
    /// Comma-separated positive integers.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub n: Vec<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Symbolic product, then kernel specialization.
    Symbolic,
    /// Numeric derivatives on the sampled kernel.
    Direct,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Star product of one or more expressions.
    Star {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Highest power of hbar kept; defaults to the exact order.
        #[arg(long)]
        order: Option<u32>,
        #[arg(required = true, allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Star product through the sum over Bernoulli-type graphs.
    StarGraphs {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        order: Option<u32>,
        #[arg(required = true, allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Poisson bracket of two expressions.
    Poisson {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Wick power :x_i^l: as a polynomial.
    WickPower {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Variable index i.
        #[arg(long)]
        var: u32,
        /// Power l.
        #[arg(long)]
        power: u32,
    },
    /// x_i^l written in Wick powers.
    WickInvert {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        var: u32,
        #[arg(long)]
        power: u32,
    },
    /// Expectation of the Wick monomial with exponents n, summed over matrices.
    Expect {
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long, default_value = "K")]
        family: String,
    },
    /// Expectation read off the full star product of Wick powers.
    ExpectOracle {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Family of the star product.
        #[arg(long, default_value = "K")]
        family: String,
        /// Family of the Wick ordering; defaults to the product family.
        #[arg(long)]
        ordering: Option<String>,
        /// Keep the diagonal of the ordering family instead of setting it to zero.
        #[arg(long)]
        keep_diagonal: bool,
    },
    /// Adjacency matrices with given row sums, or with given size and degree.
    EnumAdj {
        /// Row sums.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with_all = ["dim", "degree"])]
        n: Vec<u32>,
        #[arg(long, requires = "degree")]
        dim: Option<usize>,
        /// Total degree (sum of all entries).
        #[arg(long, requires = "dim")]
        degree: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Whether n is the row-sum vector of some adjacency matrix.
    Admissible {
        #[command(flatten)]
        seq: SequenceArgs,
    },
    /// One adjacency matrix with row sums n.
    Witness {
        #[command(flatten)]
        seq: SequenceArgs,
    },
    /// Two-row semi-standard tableau for a weakly decreasing admissible n.
    Ssyt {
        #[command(flatten)]
        seq: SequenceArgs,
    },
    /// Feynman graph of an adjacency matrix (JSON `[[int]]` or `{"m":..,"matrix":..}`).
    Feynman {
        matrix: String,
        /// Write DOT to this file instead of standard output.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Draw the Bernoulli-type graph instead of the Feynman graph.
        #[arg(long)]
        bernoulli: bool,
        /// Print the graph as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Star product evaluated on a sampled kernel and field.
    FieldStar {
        /// KernelGrid JSON file.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, value_enum, default_value_t = Method::Symbolic)]
        method: Method,
        #[arg(long)]
        json: bool,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Wick-monomial expectation on a sampled kernel.
    FieldExpect {
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        seq: SequenceArgs,
    },
    /// Quadrature approximation of the star product of two functionals.
    FunctionalStar {
        #[arg(long)]
        grid: PathBuf,
        /// Quadrature JSON file `{"nodes":[[int]],"weights":[num]}`.
        #[arg(long)]
        quadrature: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        json: bool,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status: 0 on success, 1 on usage errors, 2 when a computation fails.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = String::new();
    match execute(&cli.command, &mut buf, err) {
        Ok(()) => {
            if out.write_all(buf.as_bytes()).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn parse_polys(texts: &[&str], algebra: &AlgebraArgs, min_dim: u32) -> Result<Vec<Poly>, Error> {
    let exprs = texts
        .iter()
        .map(|t| parse(t).map_err(|source| Error::Parse { text: (*t).to_string(), source }))
        .collect::<Result<Vec<_>, _>>()?;
    let dim = algebra.dim.unwrap_or_else(|| exprs.iter().map(|e| e.max_index()).max().unwrap_or(0).max(min_dim).max(1));
    let ctx = Context::new(dim).with_symmetric(algebra.sym.iter().cloned());
    Ok(exprs.iter().map(|e| e.to_poly(&ctx)).collect::<Result<Vec<_>, _>>()?)
}

fn parse_in_dim(text: &str, dim: usize) -> Result<Poly, Error> {
    let e = parse(text).map_err(|source| Error::Parse { text: text.to_string(), source })?;
    Ok(e.to_poly(&Context::new(dim as u32))?)
}

fn propagator(algebra: &AlgebraArgs, dim: u32) -> PropagatorMatrix {
    PropagatorMatrix::symbolic(&algebra.family, dim, algebra.sym.contains(&algebra.family))
}

fn order_for(order: Option<u32>, fs: &[Poly]) -> TruncationOrder {
    order.map(TruncationOrder::new).unwrap_or_else(|| TruncationOrder::exact_for(fs))
}

fn sequence(n: &[u32]) -> Result<IntSequence, Error> {
    IntSequence::new(n.to_vec()).map_err(|e| Error::Format(format!("--n: {e}")))
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })
}

fn load_grid(path: &Path) -> Result<Grid, Error> {
    serde_json::from_str::<GridJson>(&read(path)?)?.to_grid()
}

fn json_line(buf: &mut String, value: &impl Serialize) -> Result<(), Error> {
    buf.push_str(&serde_json::to_string(value)?);
    buf.push('\n');
    Ok(())
}

fn text_or_json(buf: &mut String, text: String, json: bool) -> Result<(), Error> {
    if json {
        json_line(buf, &text)
    } else {
        buf.push_str(&text);
        buf.push('\n');
        Ok(())
    }
}

fn number_line(buf: &mut String, value: Number, json: bool) -> Result<(), Error> {
    if json {
        return json_line(buf, &value);
    }
    let text = match value {
        Number::Int(v) => v.to_string(),
        Number::Float(v) => v.to_string(),
        Number::Text(s) => s,
    };
    text_or_json(buf, text, false)
}

fn wick_expansion_text(e: &WickExpansion) -> String {
    let mut out = String::new();
    for (pos, (c, j)) in e.terms.iter().enumerate() {
        let power = format!(":x{}^{}:", e.index, j);
        let text = c.to_string();
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) if c.len() == 1 => (true, rest.to_string()),
            _ if c.len() == 1 => (false, text),
            _ => (false, format!("({text})")),
        };
        match (pos == 0, negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        if body == "1" {
            out.push_str(&power);
        } else {
            out.push_str(&format!("{body}*{power}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Serialize)]
struct WickTermJson {
    power: u32,
    coefficient: String,
}

fn graph_input(text: &str) -> Result<BernoulliGraph, Error> {
    if let Ok(rows) = serde_json::from_str::<Vec<Vec<u32>>>(text) {
        let m = rows.len();
        return Ok(graph_from_matrix(AdjacencyMatrix::new(rows)?, m)?);
    }
    serde_json::from_str::<GraphJson>(text)?.to_graph()
}

fn rational_number(r: Rational) -> Number {
    Number::from(&r)
}

fn execute(command: &Command, buf: &mut String, err: &mut dyn Write) -> Result<(), Error> {
    match command {
        Command::Star { algebra, order, exprs } | Command::StarGraphs { algebra, order, exprs } => {
            let texts: Vec<&str> = exprs.iter().map(String::as_str).collect();
            let fs = parse_polys(&texts, algebra, 0)?;
            let k = propagator(algebra, fs[0].dim());
            let order = order_for(*order, &fs);
            let p = if matches!(command, Command::Star { .. }) {
                star_multi(&fs, &k, order)?
            } else {
                star_via_graphs(&fs, &k, order)?
            };
            text_or_json(buf, p.to_string(), algebra.json)
        }
        Command::Poisson { algebra, f, g } => {
            let fs = parse_polys(&[f, g], algebra, 0)?;
            let k = propagator(algebra, fs[0].dim());
            text_or_json(buf, poisson_bracket(&fs[0], &fs[1], &k)?.to_string(), algebra.json)
        }
        Command::WickPower { algebra, var, power } | Command::WickInvert { algebra, var, power } => {
            let dim = algebra.dim.unwrap_or(*var).max(1);
            let k = propagator(algebra, dim);
            if matches!(command, Command::WickPower { .. }) {
                return text_or_json(buf, wick_power(*var, *power, &k)?.to_string(), algebra.json);
            }
            let expansion = wick_unpower(*var, *power, &k)?;
            if algebra.json {
                let terms: Vec<WickTermJson> = expansion
                    .terms
                    .iter()
                    .map(|(c, j)| WickTermJson { power: *j, coefficient: c.to_string() })
                    .collect();
                json_line(buf, &terms)
            } else {
                text_or_json(buf, wick_expansion_text(&expansion), false)
            }
        }
        Command::Expect { seq, family } => {
            sequence(&seq.n)?;
            let spec = WickMonomialSpec::new(seq.n.clone(), family.as_str(), family.as_str());
            text_or_json(buf, expectation_formula(&spec).to_string(), seq.json)
        }
        Command::ExpectOracle { seq, family, ordering, keep_diagonal } => {
            sequence(&seq.n)?;
            let ordering = ordering.as_deref().unwrap_or(family);
            let mut spec = WickMonomialSpec::new(seq.n.clone(), ordering, family.as_str());
            if !keep_diagonal {
                spec = spec.with_zero_diagonal_ordering();
            }
            let oracle = expectation_oracle(&spec)?;
            if oracle.odd_total {
                let _ = writeln!(err, "warning: odd total degree; the expectation is zero by convention");
            }
            if oracle.nonzero_ordering_diagonal {
                let _ = writeln!(err, "warning: the ordering family keeps its diagonal; diagonal terms may appear");
            }
            text_or_json(buf, oracle.value.to_string(), seq.json)
        }
        Command::EnumAdj { n, dim, degree, json } => {
            let matrices = match (dim, degree) {
                (Some(d), Some(deg)) => enumerate_adjacency_by_degree(*d, *deg)?,
                _ if !n.is_empty() => enumerate_adjacency_by_rowsums(n),
                _ => return Err(Error::Format("give either --n or both --dim and --degree".into())),
            };
            if *json {
                json_line(buf, &matrices.iter().map(AdjacencyMatrix::rows).collect::<Vec<_>>())
            } else {
                for m in &matrices {
                    buf.push_str(&format!("{m}\n"));
                }
                Ok(())
            }
        }
        Command::Admissible { seq } => {
            let answer = is_admissible(&sequence(&seq.n)?);
            if seq.json {
                json_line(buf, &answer)
            } else {
                text_or_json(buf, answer.to_string(), false)
            }
        }
        Command::Witness { seq } => {
            let m = admissible_witness(&sequence(&seq.n)?)?;
            if seq.json {
                json_line(buf, &m.rows())
            } else {
                text_or_json(buf, m.to_string(), false)
            }
        }
        Command::Ssyt { seq } => {
            let t = ssyt_two_row(&sequence(&seq.n)?)?;
            if seq.json {
                json_line(buf, &SsytJson::from(&t))
            } else {
                let row = |r: &[u32]| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                buf.push_str(&format!("{}\n{}\n", row(&t.row1), row(&t.row2)));
                Ok(())
            }
        }
        Command::Feynman { matrix, dot, bernoulli, json } => {
            let g = graph_input(matrix)?;
            let f = to_feynman(&g);
            let text = if *bernoulli { bernoulli_dot(&g) } else { feynman_dot(&f) };
            if let Some(path) = dot {
                fs::write(path, &text).map_err(|source| Error::Write { path: path.clone(), source })?;
            }
            if *json {
                if *bernoulli {
                    json_line(buf, &GraphJson::from_graph(&g))
                } else {
                    json_line(buf, &FeynmanJson::from_graph(&f))
                }
            } else {
                if dot.is_none() {
                    buf.push_str(&text);
                }
                Ok(())
            }
        }
        Command::FieldStar { grid, order, method, json, f, g } => {
            let grid = load_grid(grid)?;
            let f = parse_in_dim(f, grid.dim())?;
            let g = parse_in_dim(g, grid.dim())?;
            let order = order_for(*order, &[f.clone(), g.clone()]);
            fn eval<S: Scalar>(
                f: &Poly,
                g: &Poly,
                grid: &KernelGrid<S>,
                o: TruncationOrder,
                m: Method,
            ) -> Result<S, Error> {
                Ok(match m {
                    Method::Symbolic => field_star(f, g, grid, o)?,
                    Method::Direct => field_star_direct(f, g, grid, o)?,
                })
            }
            let value = match &grid {
                Grid::Rational(grid) => rational_number(eval(&f, &g, grid, order, *method)?),
                Grid::Float(grid) => Number::Float(eval(&f, &g, grid, order, *method)?),
            };
            number_line(buf, value, *json)
        }
        Command::FieldExpect { grid, seq } => {
            let grid = load_grid(grid)?;
            let n = sequence(&seq.n)?;
            let value = match &grid {
                Grid::Rational(grid) => rational_number(field_expectation(&n, grid)?),
                Grid::Float(grid) => Number::Float(field_expectation(&n, grid)?),
            };
            number_line(buf, value, seq.json)
        }
        Command::FunctionalStar { grid, quadrature, order, json, f, g } => {
            let grid = load_grid(grid)?;
            let rule: QuadratureJson = serde_json::from_str(&read(quadrature)?)?;
            let dim = rule.nodes.first().map_or(0, Vec::len);
            let f = parse_in_dim(f, dim)?;
            let g = parse_in_dim(g, dim)?;
            let order = order_for(*order, &[f.clone(), g.clone()]);
            let value = match &grid {
                Grid::Rational(grid) => {
                    rational_number(functional_star(&f, &g, &rule.to_rule(Number::rational)?, grid, order)?)
                }
                Grid::Float(grid) => {
                    Number::Float(functional_star(&f, &g, &rule.to_rule(Number::float)?, grid, order)?)
                }
            };
            number_line(buf, value, *json)
        }
    }
}
