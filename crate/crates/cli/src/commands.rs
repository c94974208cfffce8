use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use divrel::applications::{d_star_point, n_star, redundancy_report, Interval, PoissonFamily, TypeClassProblem};
use divrel::contraction::{
    brute_force_mu_f, chi2_contraction, maximal_correlation, skew_contraction_sandwich, BruteForceConfig, SkewFamily,
    SourceChannelPair,
};
use divrel::identities::{
    check_chi2_half_identity, check_gv_identity, check_kl_chi2_identity, check_recursive_identity,
    check_substitution_form, IdentityReport,
};
use divrel::inequalities::{conditioned_measure_divergence, inequality_sweep};
use divrel::markov::{markov_mixing_report, ReversibleChain};
use divrel::moments::{attaining_pair, kl_moment_lower_bound, MomentTuple};
use divrel::{align, f_divergence, kl, Channel, DiscreteDistribution, DivergenceSpec, QuadratureConfig};

use crate::report::{num, Report};

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<divrel::Error> for CliError {
    fn from(e: divrel::Error) -> Self {
        if e.is_numerical() {
            Self::Numerical(e.to_string())
        } else {
            Self::Validation(e.to_string())
        }
    }
}

/// A report plus an optional failure detected after it was computed.
pub type Outcome = Result<(Report, Option<CliError>), CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid {what} in {}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DistributionFile {
    Full(DiscreteDistribution),
    Masses(Vec<f64>),
}

/// A distribution file holds `{"support": [...], "mass": [...]}` or a bare
/// array of masses on the atoms `0..n`.
fn read_distribution(path: &Path) -> Result<DiscreteDistribution, CliError> {
    match read_json::<DistributionFile>(path, "distribution")? {
        DistributionFile::Full(d) => Ok(d),
        DistributionFile::Masses(m) => Ok(DiscreteDistribution::categorical(m)?),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChannelFile {
    Full(Channel),
    Rows(Vec<Vec<f64>>),
}

/// A channel file holds `{"rows": [[...], ...]}` or a bare row-stochastic matrix.
fn read_channel(path: &Path) -> Result<Channel, CliError> {
    match read_json::<ChannelFile>(path, "channel")? {
        ChannelFile::Full(w) => Ok(w),
        ChannelFile::Rows(rows) => Ok(Channel::new(rows)?),
    }
}

fn parse_spec(text: &str) -> Result<DivergenceSpec, CliError> {
    let spec: DivergenceSpec = text.parse()?;
    spec.validate()?;
    Ok(spec)
}

fn spec_formula(spec: DivergenceSpec) -> String {
    match spec {
        DivergenceSpec::Kl => "D(P‖Q) = Σ p ln(p/q)".into(),
        DivergenceSpec::Chi2 => "χ²(P‖Q) = Σ (p-q)²/q".into(),
        DivergenceSpec::Tv => "|P-Q| = Σ |p-q|".into(),
        DivergenceSpec::Renyi(a) => format!("D_{a}(P‖Q) = ln(Σ p^a q^(1-a))/(a-1)"),
        DivergenceSpec::GyorfiVajda(s) => format!("Σ (p-q)²/((1-{s})p + {s}q)"),
        DivergenceSpec::SkewK(a) => format!("K_{a}(P‖Q) = D(P ‖ (1-{a})P + {a}Q)"),
        DivergenceSpec::SkewS(a) => {
            format!("S_{a}(P‖Q) = {a} D(P‖M) + (1-{a}) D(Q‖M), M = (1-{a})P + {a}Q")
        }
        DivergenceSpec::JensenShannon => "JS(P,Q) = ½D(P‖M) + ½D(Q‖M), M = ½(P+Q)".into(),
        DivergenceSpec::Polylog(k) => format!("Σ q Li_{k}(1 - p/q)"),
    }
}

#[derive(Debug, clap::Args, Serialize)]
pub struct DivergenceArgs {
    /// kl, chi2, tv, js, renyi:<a>, gv:<s>, skew-k:<a>, skew-s:<a>, polylog:<k>
    #[arg(long)]
    pub spec: String,
    /// Distribution file for P
    pub p: PathBuf,
    /// Distribution file for Q
    pub q: PathBuf,
}

pub fn divergence(args: &DivergenceArgs) -> Outcome {
    let spec = parse_spec(&args.spec)?;
    let (p, q) = align(&read_distribution(&args.p)?, &read_distribution(&args.q)?);
    let value = f_divergence(spec, &p, &q)?;
    Ok((
        Report {
            command: "divergence".into(),
            formula: spec_formula(spec),
            inputs: json!({"spec": spec.to_string(), "p": to_value(&p), "q": to_value(&q)}),
            results: json!({"value": to_value(&value), "atoms": p.len()}),
        },
        None,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityKind {
    /// D(P‖R_λ) = ∫₀^λ χ²(P‖R_s)/s ds
    KlChi2,
    /// D(P‖R_λ) = ∫₀^λ s D_{φ_s}(P‖Q) ds
    Gv,
    /// ½χ²(P‖Q) = ∫₀¹ χ²(sP + (1-s)Q ‖ Q)/s ds
    Chi2Half,
    /// D(P‖Q) = ∫₀^∞ χ²(P ‖ (tP+Q)/(1+t)) dt/(1+t)
    Substitution,
    /// D_{f_{k+1}}(R_λ‖P) = ∫₀^λ D_{f_k}(R_s‖P)/s ds
    Recursive,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct IdentityArgs {
    #[arg(long, value_enum)]
    pub which: IdentityKind,
    /// Mixture weight λ ∈ [0, 1] of Q in R_λ = (1-λ)P + λQ
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Polylogarithm order for the recursive identity
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Distribution file for P
    pub p: PathBuf,
    /// Distribution file for Q
    pub q: PathBuf,
}

pub fn identity_check(args: &IdentityArgs) -> Outcome {
    let cfg = QuadratureConfig::new(args.rel_tol, args.abs_tol, 60)?;
    let (p, q) = align(&read_distribution(&args.p)?, &read_distribution(&args.q)?);
    let (report, formula): (IdentityReport, String) = match args.which {
        IdentityKind::KlChi2 => (
            check_kl_chi2_identity(&p, &q, args.lambda, &cfg)?,
            "D(P‖R_λ) = ∫₀^λ χ²(P‖R_s)/s ds, R_s = (1-s)P + sQ".into(),
        ),
        IdentityKind::Gv => (
            check_gv_identity(&p, &q, args.lambda, &cfg)?,
            "D(P‖R_λ) = ∫₀^λ s D_{φ_s}(P‖Q) ds, D_{φ_s} = Σ (p-q)²/((1-s)p + sq)".into(),
        ),
        IdentityKind::Chi2Half => (
            check_chi2_half_identity(&p, &q, &cfg)?,
            "½χ²(P‖Q) = ∫₀¹ χ²(sP + (1-s)Q ‖ Q)/s ds".into(),
        ),
        IdentityKind::Substitution => (
            check_substitution_form(&p, &q, &cfg)?,
            "D(P‖Q) = ∫₀^∞ χ²(P ‖ (tP+Q)/(1+t)) dt/(1+t)".into(),
        ),
        IdentityKind::Recursive => (
            check_recursive_identity(args.k, &p, &q, args.lambda, &cfg)?,
            format!("D_f{}(R_λ‖P) = ∫₀^λ D_f{}(R_s‖P)/s ds, f_k(x) = Li_k(1-x)", args.k + 1, args.k),
        ),
    };
    let failure = (!report.passed).then(|| {
        CliError::Numerical(format!(
            "identity check failed: lhs {} vs rhs {} (rel err {:e})",
            report.lhs, report.rhs, report.rel_err
        ))
    });
    Ok((
        Report {
            command: "identity-check".into(),
            formula,
            inputs: json!({"args": to_value(args), "p": to_value(&p), "q": to_value(&q)}),
            results: to_value(&report),
        },
        failure,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct MomentArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mp: f64,
    #[arg(long)]
    pub varp: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mq: f64,
    #[arg(long)]
    pub varq: f64,
    /// Also emit the two-point pair attaining the bound
    #[arg(long)]
    pub attain: bool,
}

pub fn moment_bound(args: &MomentArgs) -> Outcome {
    let mt = MomentTuple::new(args.mp, args.varp, args.mq, args.varq)?;
    let cert = kl_moment_lower_bound(&mt);
    let mut results = json!({"certificate": to_value(&cert), "bound_nats": num(cert.bound_nats)});
    if args.attain {
        let (p, q) = attaining_pair(&mt)?;
        let d = kl(&p, &q)?;
        results["attaining_pair"] = json!({"p": to_value(&p), "q": to_value(&q), "kl_nats": to_value(&d)});
    }
    Ok((
        Report {
            command: "moment-bound".into(),
            formula: "min D(P‖Q) over laws with the given means and variances = d(r‖s), the binary divergence \
                      of a two-point pair on common atoms"
                .into(),
            inputs: to_value(args),
            results,
        },
        None,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct InequalityArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

pub fn inequalities(args: &InequalityArgs) -> Outcome {
    let summary = inequality_sweep(args.seed, args.trials)?;
    let violations = summary.total_violations();
    let failure = (violations > 0).then(|| CliError::Numerical(format!("{violations} inequality violations")));
    Ok((
        Report {
            command: "inequalities".into(),
            formula: "pairwise, skew, mixture and conditioning inequalities on seeded random pairs (2 to 8 atoms), \
                      grace 1e-10"
                .into(),
            inputs: to_value(args),
            results: json!({"total_violations": violations, "summary": to_value(&summary)}),
        },
        failure,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct ContractionArgs {
    /// Channel file: {"rows": [[...], ...]} or a bare matrix
    #[arg(long)]
    pub channel: PathBuf,
    /// Strictly positive input law file
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Skew family: K or S
    #[arg(long, default_value = "K")]
    pub family: String,
    /// Random input laws drawn by the search; 0 skips it
    #[arg(long, default_value_t = 10_000)]
    pub brute_budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn contraction(args: &ContractionArgs) -> Outcome {
    let family: SkewFamily = args.family.parse()?;
    let sc = SourceChannelPair::new(read_distribution(&args.input)?, read_channel(&args.channel)?)?;
    let mu = chi2_contraction(&sc)?;
    let sandwich = skew_contraction_sandwich(args.alpha, family, &sc)?;
    let mut results = json!({
        "chi2_contraction": num(mu),
        "maximal_correlation": num(maximal_correlation(&sc)?),
        "sandwich": to_value(&sandwich),
        "sandwich_upper": num(sandwich.upper()),
    });
    if args.brute_budget > 0 {
        let cfg = BruteForceConfig {
            draws: args.brute_budget,
            seed: args.seed,
            ..BruteForceConfig::default()
        };
        let est = brute_force_mu_f(family.spec(args.alpha), &sc, &cfg)?;
        results["search"] = to_value(&est);
        results["search_within_sandwich"] = json!(sandwich.contains(est.point_estimate, 1e-9));
    }
    Ok((
        Report {
            command: "contraction".into(),
            formula: format!(
                "μ_χ²(Q_X,W) ≤ μ_{family}_α(Q_X,W) ≤ min(μ_χ²(W), c(α)/min Q_X · μ_χ²(Q_X,W)); \
                 μ_χ² = second singular value² of [W(y|x) sqrt(Q_X(x)/Q_Y(y))]"
            ),
            inputs: json!({"args": to_value(args), "pair": to_value(&sc)}),
            results,
        },
        None,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct MixingArgs {
    /// Transition matrix file of a reversible chain
    #[arg(long)]
    pub chain: PathBuf,
    /// Initial law file
    #[arg(long)]
    pub p0: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 50)]
    pub n_max: u32,
}

pub fn mixing(args: &MixingArgs) -> Outcome {
    let chain = ReversibleChain::new(read_channel(&args.chain)?)?;
    let p0 = read_distribution(&args.p0)?;
    let rep = markov_mixing_report(&chain, &p0, args.alpha, args.n_max)?;
    let failure = (!rep.all_within_envelope()).then(|| CliError::Numerical("trajectory left its envelope".into()));
    Ok((
        Report {
            command: "mixing".into(),
            formula: "K_α(P_n‖Q) ≤ c_K(α)/min Q · μ^n · K_α(P_0‖Q) and likewise for S_α, \
                      with μ = μ_χ²(Q,W), P_n = P_0 Wⁿ"
                .into(),
            inputs: json!({"args": to_value(args), "transition": to_value(chain.transition()), "p0": to_value(&p0)}),
            results: to_value(&rep),
        },
        failure,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct RedundancyArgs {
    /// Poisson rates of the sources
    #[arg(long, num_args = 1.., required = true)]
    pub lambdas: Vec<f64>,
    /// "uniform" or one prior probability per source
    #[arg(long, num_args = 1.., default_value = "uniform")]
    pub weights: Vec<String>,
}

pub fn redundancy(args: &RedundancyArgs) -> Outcome {
    let family = if args.weights.len() == 1 && args.weights[0].eq_ignore_ascii_case("uniform") {
        PoissonFamily::uniform(args.lambdas.clone())?
    } else {
        let weights = args
            .weights
            .iter()
            .map(|w| w.parse::<f64>().map_err(|_| CliError::Validation(format!("bad weight '{w}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        PoissonFamily::new(args.lambdas.clone(), weights)?
    };
    let rep = redundancy_report(&family)?;
    Ok((
        Report {
            command: "redundancy".into(),
            formula: "D(P_i‖P̄) ≤ -log(α_i + (1-α_i) exp(-Σ_{j≠i} α_j D(P_i‖P_j)/(1-α_i))); \
                      D(Po(a)‖Po(b)) = a log(a/b) + (b-a) log e; ΣαD/(1+ΣαH) ≤ ν ≤ (1+ΣαD)/ΣαH, in bits"
                .into(),
            inputs: json!({"lambdas": args.lambdas, "weights": family.weights()}),
            results: to_value(&rep),
        },
        None,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct SampleSizeArgs {
    /// Mean of the sampling law Q
    #[arg(long, allow_negative_numbers = true)]
    pub mq: f64,
    /// Variance of the sampling law Q
    #[arg(long)]
    pub varq: f64,
    /// Mean box LO HI of the rare event
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub mean_box: Vec<f64>,
    /// Variance box LO HI of the rare event
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub var_box: Vec<f64>,
    /// Alphabet size |X| ≥ 2
    #[arg(long)]
    pub alphabet: usize,
    /// Target probability ε ∈ (0, 1)
    #[arg(long)]
    pub epsilon: f64,
}

pub fn sample_size(args: &SampleSizeArgs) -> Outcome {
    let tcp = TypeClassProblem::new(
        args.mq,
        args.varq,
        Interval::new(args.mean_box[0], args.mean_box[1])?,
        Interval::new(args.var_box[0], args.var_box[1])?,
        args.alphabet,
        args.epsilon,
    )?;
    let ds = d_star_point(&tcp);
    let ns = n_star(&tcp, ds.value)?;
    let failure = (!ns.verified).then(|| {
        CliError::Numerical(format!("threshold n* = {} failed the direct bound check", ns.n))
    });
    Ok((
        Report {
            command: "sample-size".into(),
            formula: "d* = min over the box of the moment lower bound; n* = max(⌈-(|X|-1) W₋₁(η)/d*⌉ - 1, 1), \
                      η = -d*(ε e^{-d*})^{1/(|X|-1)}/(|X|-1); bound (n+1)^{|X|-1} e^{-n d*}"
                .into(),
            inputs: to_value(args),
            results: json!({"d_star": to_value(&ds), "n_star": ns.n, "threshold": to_value(&ns)}),
        },
        failure,
    ))
}

#[derive(Debug, clap::Args, Serialize)]
pub struct SetDivergenceArgs {
    /// Distribution file for μ
    #[arg(long)]
    pub mu: PathBuf,
    /// Atom indices (0-based) of the conditioning set C
    #[arg(long, num_args = 1.., required = true)]
    pub set: Vec<usize>,
    #[arg(long, default_value = "kl")]
    pub spec: String,
}

pub fn set_divergence(args: &SetDivergenceArgs) -> Outcome {
    let spec = parse_spec(&args.spec)?;
    let mu = read_distribution(&args.mu)?;
    let (direct, closed) = conditioned_measure_divergence(spec, &mu, &args.set)?;
    let set: std::collections::BTreeSet<usize> = args.set.iter().copied().collect();
    let prob: f64 = set.iter().filter_map(|&i| mu.mass().get(i)).sum();
    Ok((
        Report {
            command: "set-divergence".into(),
            formula: "D_f(μ_C‖μ) = μ(C) f(1/μ(C)) + (1-μ(C)) f(0); Rényi: log(1/μ(C)) for every order".into(),
            inputs: json!({"args": to_value(args), "mu": to_value(&mu)}),
            results: json!({"direct": num(direct), "closed_form": num(closed), "set_probability": num(prob)}),
        },
        None,
    ))
}
