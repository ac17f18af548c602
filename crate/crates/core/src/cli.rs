//! The `qrel` command line: one subcommand per library operation, JSON
//! documents in, canonical JSON out.
//!
//! Every run prints `{"ok": bool, "result": …}` on stdout. Exit codes:
//! 0 success, 1 usage, 2 invalid input or I/O, 3 failed mathematical
//! precondition.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::StarAlgebra;
use crate::channel::{classical_channel, compose, CPMap};
use crate::error::Error;
use crate::format::{self, complex_value, Document};
use crate::linalg::{range_projection, Projection, Tolerance};
use crate::random::Sampler;
use crate::relation::{
    classical_to_quantum, diagonal_relation, quantum_to_classical, QuantumRelation,
};
use crate::space::OperatorSpace;
use crate::transport::{
    bipartite_graph, confusability, is_cp_morphism, kl_check, pullback, pushforward,
};
use crate::witness::{recover_space, separate_projections, separate_vectors};

#[derive(Parser, Debug)]
#[command(
    name = "qrel",
    version,
    about = "Quantum relations on finite-dimensional *-algebras"
)]
struct Cli {
    /// Relative tolerance; overrides QREL_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Algebra document for the (source) algebra; defaults to the full
    /// matrix algebra.
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
    /// Algebra document for the target of a channel.
    #[arg(long = "target-algebra", global = true)]
    target_algebra: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reflexive, symmetric, antisymmetric and transitive flags.
    Props(SpaceArg),
    /// Commutant of the algebra.
    Commutant(DimArg),
    /// Diagonal relation (the commutant as an operator space).
    Diagonal(DimArg),
    /// Restriction to a projection in the algebra.
    Restrict(SpaceProj),
    /// Whether the restriction to a projection is the diagonal.
    Independent(SpaceProj),
    /// Pushforward along a channel.
    Push(Transport),
    /// Pullback along a channel.
    Pull(Transport),
    /// Confusability graph of a channel.
    Confusability(ChannelArg),
    /// Span of the Kraus matrices.
    Bipartite(ChannelArg),
    /// Knill-Laflamme conditions for a code projection.
    KlCheck(KlArgs),
    /// Strong and weak CP-morphism tests.
    Morphism(MorphismArgs),
    /// Whether the relation connects two projections at level k.
    Connects(ConnectsArgs),
    /// Separating witness for a matrix outside the relation.
    Witness(WitnessArgs),
    /// Rebuild a relation from its separating witnesses.
    Recover(SpaceArg),
    /// Classical relation or stochastic matrix into the quantum setting.
    ClassicalEmbed(EmbedArgs),
    /// Classical relation of a bimodule over the diagonal algebra.
    ClassicalExtract(SpaceArg),
    /// Composition outer ∘ inner.
    Compose(ComposeArgs),
}

#[derive(Args, Debug)]
struct SpaceArg {
    #[arg(long)]
    space: PathBuf,
}

#[derive(Args, Debug)]
struct DimArg {
    /// Size of the full matrix algebra when --algebra is absent.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct SpaceProj {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    proj: PathBuf,
}

#[derive(Args, Debug)]
struct Transport {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    channel: PathBuf,
    /// Number of random projection pairs on which to test the
    /// connection law.
    #[arg(long, default_value_t = 0)]
    check: usize,
}

#[derive(Args, Debug)]
struct ChannelArg {
    #[arg(long)]
    channel: PathBuf,
}

#[derive(Args, Debug)]
struct KlArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    proj: PathBuf,
}

#[derive(Args, Debug)]
struct MorphismArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Args, Debug)]
struct ConnectsArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    p: PathBuf,
    #[arg(long)]
    q: PathBuf,
    #[arg(long, default_value_t = 1)]
    level: usize,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct EmbedArgs {
    #[arg(long)]
    relation: Option<PathBuf>,
    #[arg(long)]
    stochastic: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    outer: PathBuf,
    #[arg(long)]
    inner: PathBuf,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

struct Success {
    result: Value,
    check: Option<Value>,
}

impl From<Value> for Success {
    fn from(result: Value) -> Self {
        Success {
            result,
            check: None,
        }
    }
}

/// Run with explicit arguments (including the program name) and the value
/// of `QREL_TOL`, if any.
pub fn run<I, T>(args: I, env_tol: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: envelope_error("usage", &first_line(&text), None),
                    stderr: text,
                },
            };
        }
    };
    let outcome = tolerance(cli.tol, env_tol).and_then(|tol| Ctx { cli: &cli, tol }.dispatch());
    match outcome {
        Ok(s) => {
            let mut out = Map::new();
            out.insert("ok".into(), true.into());
            out.insert("result".into(), s.result);
            if let Some(c) = s.check {
                out.insert("check".into(), c);
            }
            Outcome {
                code: 0,
                stdout: format::emit_value(&Value::Object(out)),
                stderr: String::new(),
            }
        }
        Err(Failure::Io(path, e)) => {
            let msg = format!("{}: {e}", path.display());
            Outcome {
                code: 2,
                stdout: envelope_error("io", &msg, None),
                stderr: format!("error: {msg}\n"),
            }
        }
        Err(Failure::Lib(e)) => {
            let (code, kind) = if e.is_precondition() {
                (3, "precondition")
            } else {
                (2, "validation")
            };
            let path = match &e {
                Error::Format { path, .. } => Some(path.as_str()),
                _ => None,
            };
            Outcome {
                code,
                stdout: envelope_error(kind, &e.to_string(), path),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn first_line(s: &str) -> String {
    s.lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string()
}

fn envelope_error(kind: &str, message: &str, path: Option<&str>) -> String {
    let mut err = json!({ "kind": kind, "message": message });
    if let Some(p) = path {
        err["path"] = p.into();
    }
    format::emit_value(&json!({ "ok": false, "result": null, "error": err }))
}

fn tolerance(flag: Option<f64>, env: Option<&str>) -> Run<Tolerance> {
    let eps = match (flag, env) {
        (Some(x), _) => x,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidTolerance(format!("QREL_TOL={s:?}: {e}")))?,
        (None, None) => return Ok(Tolerance::default()),
    };
    Ok(Tolerance::with_rel_eps(eps)?)
}

struct Ctx<'a> {
    cli: &'a Cli,
    tol: Tolerance,
}

impl Ctx<'_> {
    fn load(&self, path: &Path) -> Run<Document> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
        format::parse_with(&bytes, self.tol).map_err(|e| match e {
            Error::Format { path: p, message } => Error::Format {
                path: format!("{}:{p}", path.display()),
                message,
            }
            .into(),
            e => e.into(),
        })
    }

    fn algebra_or_full(&self, file: Option<&PathBuf>, m: usize) -> Run<StarAlgebra> {
        match file {
            None => Ok(StarAlgebra::full(m)),
            Some(path) => {
                let a = self.load(path)?.to_algebra(self.tol)?;
                if a.dim() != m {
                    return Err(Error::ShapeMismatch {
                        op: "algebra",
                        left: (m, m),
                        right: (a.dim(), a.dim()),
                    }
                    .into());
                }
                Ok(a)
            }
        }
    }

    fn source(&self, m: usize) -> Run<StarAlgebra> {
        self.algebra_or_full(self.cli.algebra.as_ref(), m)
    }

    fn target(&self, n: usize) -> Run<StarAlgebra> {
        self.algebra_or_full(self.cli.target_algebra.as_ref(), n)
    }

    fn square_space(&self, path: &Path) -> Run<OperatorSpace> {
        let v = self.load(path)?.to_space(self.tol)?;
        if v.rows() != v.cols() {
            return Err(Error::NotSquare(v.rows(), v.cols()).into());
        }
        Ok(v)
    }

    fn relation_over(
        &self,
        path: &Path,
        algebra: impl FnOnce(usize) -> Run<StarAlgebra>,
    ) -> Run<QuantumRelation> {
        let v = self.square_space(path)?;
        let a = algebra(v.rows())?;
        Ok(QuantumRelation::new(a, v, self.tol)?)
    }

    fn relation(&self, path: &Path) -> Run<QuantumRelation> {
        self.relation_over(path, |m| self.source(m))
    }

    fn dim_algebra(&self, dim: Option<usize>) -> Run<StarAlgebra> {
        match (&self.cli.algebra, dim) {
            (Some(path), _) => Ok(self.load(path)?.to_algebra(self.tol)?),
            (None, Some(m)) if m > 0 && m <= format::MAX_DIM => Ok(StarAlgebra::full(m)),
            _ => Err(Error::format(
                "--dim",
                format!(
                    "give --algebra or a --dim between 1 and {}",
                    format::MAX_DIM
                ),
            )
            .into()),
        }
    }

    fn dispatch(&self) -> Run<Success> {
        let tol = self.tol;
        let space_doc = |v: &OperatorSpace| Document::space(v).to_value();
        Ok(match &self.cli.command {
            Command::Props(a) => {
                let p = self.relation(&a.space)?.properties(tol)?;
                json!({
                    "reflexive": p.reflexive,
                    "symmetric": p.symmetric,
                    "antisymmetric": p.antisymmetric,
                    "transitive": p.transitive,
                })
                .into()
            }
            Command::Commutant(a) => Document::algebra(&self.dim_algebra(a.dim)?.commutant(tol))
                .to_value()
                .into(),
            Command::Diagonal(a) => {
                space_doc(diagonal_relation(&self.dim_algebra(a.dim)?, tol).space()).into()
            }
            Command::Restrict(a) => {
                let v = self.relation(&a.space)?;
                let e = self.load(&a.proj)?.to_projection(tol)?;
                let r = v.restrict(&e, tol)?;
                json!({
                    "algebra": Document::algebra(r.relation().algebra()).to_value(),
                    "isometry": Document::matrix(r.compression().isometry()).to_value(),
                    "relation": space_doc(r.relation().space()),
                })
                .into()
            }
            Command::Independent(a) => {
                let v = self.relation(&a.space)?;
                let e = self.load(&a.proj)?.to_projection(tol)?;
                json!({ "independent": v.is_independent(&e, tol)? }).into()
            }
            Command::Push(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                let v = self.relation(&a.space)?;
                let n = self.target(phi.out_dim())?;
                let push = pushforward(&v, &phi, &n, tol)?;
                let check = (a.check > 0)
                    .then(|| self.push_law(&v, &phi, &push, a.check))
                    .transpose()?;
                Success {
                    result: space_doc(push.space()),
                    check,
                }
            }
            Command::Pull(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                let w = self.relation_over(&a.space, |n| self.target(n))?;
                let m = self.source(phi.in_dim())?;
                let back = pullback(&w, &phi, &m, tol)?;
                let check = (a.check > 0)
                    .then(|| self.pull_law(&w, &phi, &back, a.check))
                    .transpose()?;
                Success {
                    result: space_doc(back.space()),
                    check,
                }
            }
            Command::Confusability(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                let m = self.source(phi.in_dim())?;
                space_doc(confusability(&phi, &m, tol)?.space()).into()
            }
            Command::Bipartite(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                space_doc(&bipartite_graph(&phi, tol)).into()
            }
            Command::KlCheck(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                let e = self.load(&a.proj)?.to_projection(tol)?;
                let r = kl_check(&phi, &e, tol)?;
                json!({
                    "is_code": r.is_code,
                    "lambda": r.lambda.as_ref().map(|l| Document::matrix(l).to_value()),
                })
                .into()
            }
            Command::Morphism(a) => {
                let phi = self.load(&a.channel)?.to_channel(tol)?;
                let v = self.relation(&a.source)?;
                let w = self.relation_over(&a.target, |n| self.target(n))?;
                let r = is_cp_morphism(&phi, &v, &w, tol)?;
                json!({
                    "strong": r.strong,
                    "weak": r.weak,
                    "witness_generator": r.witness_generator.as_ref().map(|g| Document::matrix(g).to_value()),
                })
                .into()
            }
            Command::Connects(a) => {
                let v = self.relation(&a.space)?;
                let p = self.load(&a.p)?.to_projection(tol)?;
                let q = self.load(&a.q)?.to_projection(tol)?;
                let connects = v.connects(&p, &q, a.level, tol)?;
                json!({
                    "connects": connects,
                    "strength": v.connection_strength(&p, &q, a.level)?,
                })
                .into()
            }
            Command::Witness(a) => {
                let v = self.relation(&a.space)?;
                let b = self.load(&a.matrix)?.to_matrix()?;
                let vectors = separate_vectors(v.space(), &b, tol)?;
                let w = separate_projections(&v, &b, tol)?;
                let list = |x: &[crate::linalg::C64]| {
                    Value::Array(x.iter().copied().map(complex_value).collect())
                };
                json!({
                    "k": w.k,
                    "p": Document::projection(&w.p).to_value(),
                    "q": Document::projection(&w.q).to_value(),
                    "alpha": list(&vectors.alpha),
                    "beta": list(&vectors.beta),
                    "dual": Document::matrix(&vectors.dual).to_value(),
                })
                .into()
            }
            Command::Recover(a) => {
                space_doc(&recover_space(&self.relation(&a.space)?, tol)?).into()
            }
            Command::ClassicalEmbed(a) => match (&a.relation, &a.stochastic) {
                (Some(path), _) => {
                    let r = self.load(path)?.to_classical()?;
                    space_doc(classical_to_quantum(&r).space()).into()
                }
                (None, Some(path)) => {
                    let t = self.load(path)?.to_matrix()?;
                    Document::channel(&classical_channel(&t, tol)?)
                        .to_value()
                        .into()
                }
                (None, None) => unreachable!("clap enforces the argument group"),
            },
            Command::ClassicalExtract(a) => {
                let v = self.square_space(&a.space)?;
                let rel = QuantumRelation::new(StarAlgebra::diagonal(v.rows()), v, tol)?;
                Document::classical(&quantum_to_classical(&rel, tol)?)
                    .to_value()
                    .into()
            }
            Command::Compose(a) => {
                let outer = self.load(&a.outer)?.to_channel(tol)?;
                let inner = self.load(&a.inner)?.to_channel(tol)?;
                Document::channel(&compose(&outer, &inner)?)
                    .to_value()
                    .into()
            }
        })
    }

    /// Random level projections `P, Q` of the target algebra:
    /// `→V` connects them iff `V` connects the supports of `[Φ*(P)]`, `[Φ*(Q)]`.
    fn push_law(
        &self,
        v: &QuantumRelation,
        phi: &CPMap,
        push: &QuantumRelation,
        samples: usize,
    ) -> Run<Value> {
        let tol = self.tol;
        let mut s = Sampler::new(self.cli.seed);
        let mut disagreements = 0;
        for _ in 0..samples {
            let k = 1 + s.index(2);
            let p = s.level_projection(push.algebra(), k);
            let q = s.level_projection(push.algebra(), k);
            let back = |x: &Projection| -> Run<Projection> {
                let r = range_projection(&phi.adjoint_apply(x.matrix(), k)?, tol);
                Ok(v.algebra().level_support(&r, k, tol)?)
            };
            if push.connects(&p, &q, k, tol)? != v.connects(&back(&p)?, &back(&q)?, k, tol)? {
                disagreements += 1;
            }
        }
        Ok(json!({ "samples": samples, "disagreements": disagreements }))
    }

    /// `←W` connects `P, Q` iff `W` connects the supports of `←Ψ(P)`, `←Ψ(Q)`.
    fn pull_law(
        &self,
        w: &QuantumRelation,
        phi: &CPMap,
        back: &QuantumRelation,
        samples: usize,
    ) -> Run<Value> {
        let tol = self.tol;
        let mut s = Sampler::new(self.cli.seed);
        let mut disagreements = 0;
        for _ in 0..samples {
            let k = 1 + s.index(2);
            let p = s.level_projection(back.algebra(), k);
            let q = s.level_projection(back.algebra(), k);
            let fwd = |x: &Projection| -> Run<Projection> {
                let r = phi.backward_projection(x, k, tol)?;
                Ok(w.algebra().level_support(&r, k, tol)?)
            };
            if back.connects(&p, &q, k, tol)? != w.connects(&fwd(&p)?, &fwd(&q)?, k, tol)? {
                disagreements += 1;
            }
        }
        Ok(json!({ "samples": samples, "disagreements": disagreements }))
    }
}
