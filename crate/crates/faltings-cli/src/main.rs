//! `faltings` — heights of individual curves y² = x³ + Ax + B, the census of
//! curves with height below X, the area constant σ, the residue-class tables
//! behind weak minimality, and boundary instrumentation for the region R_X.
//!
//! Every subcommand renders one report to stdout (or `--out`) as text, JSON,
//! or CSV.  Exit codes: 2 bad input or violated precondition, 3 numeric
//! failure, 4 integrity failure (two exact counts disagreed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use faltings::minimality::{class_tables, Lambda};
use faltings::{census, heights, region, Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "faltings",
    version,
    about = "Faltings heights of rational elliptic curves and the census of curves below a height bound"
)]
struct Cli {
    /// Working precision in bits; only 53 (f64) is implemented.
    #[arg(long, global = true, env = "FALTINGS_PRECISION", default_value_t = 53)]
    precision: u32,

    /// Worker threads for the parallel scans (0 = one per core).
    #[arg(long, global = true, env = "FALTINGS_THREADS", default_value_t = 0)]
    threads: usize,

    /// Report format.
    #[arg(long, global = true, env = "FALTINGS_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, env = "FALTINGS_OUT")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Faltings height of y² = x³ + Ax + B (any integral model).
    #[command(allow_negative_numbers = true)]
    Height { a: i64, b: i64 },

    /// Census of curves with H_F < X: direct enumeration cross-checked
    /// against the Möbius sieve, with the asymptotic prediction.
    Count {
        /// Height bound X.
        #[arg(long, env = "FALTINGS_X", default_value_t = 1.0)]
        x: f64,

        /// Instead count weakly minimal pairs with max(|A|³, B²) < H.
        #[arg(long, value_name = "H", conflicts_with = "x")]
        naive: Option<f64>,
    },

    /// Area constant σ = Area(R₁) by adaptive quadrature, optionally
    /// cross-checked by Monte Carlo rejection sampling.
    Sigma {
        /// Relative tolerance for the quadrature.
        #[arg(long, env = "FALTINGS_TOL", default_value_t = 1e-8)]
        tol: f64,

        /// Rejection-sampling size for an independent estimate.
        #[arg(long, value_name = "N")]
        mc_samples: Option<u64>,

        /// RNG seed for the Monte Carlo estimate.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },

    /// The pinned analytic constants of the region and the census.
    Constants {
        /// Relative tolerance for the σ quadrature.
        #[arg(long, env = "FALTINGS_TOL", default_value_t = 1e-9)]
        tol: f64,
    },

    /// Residue-class tables of weak minimality at 2 and 3.
    Classes,

    /// Points on the region boundary ∂R_X with the gradient of
    /// F = 16|D̃| − X·G at each.
    Boundary {
        /// Height bound X.
        #[arg(long, env = "FALTINGS_X", default_value_t = 1.0)]
        x: f64,

        /// Number of samples (≥ 8): one quarter body edges, one quarter
        /// axis caps, the rest tongue points on both sheets.
        #[arg(long, default_value_t = 32)]
        n: usize,
    },
}

/// One report, rendered in all three formats so `emit` is format-agnostic.
struct Report {
    json: serde_json::Value,
    text: String,
    csv: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.precision < 53 {
        return Err(Error::Domain(format!(
            "--precision {} is below the 53-bit f64 working precision",
            cli.precision
        )));
    }
    if cli.precision > 53 {
        eprintln!("warning: requested {} bits, clamping to 53 (f64)", cli.precision);
    }
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
    }

    let report = match &cli.cmd {
        Cmd::Height { a, b } => render_height(&heights::faltings_hf(*a, *b)?),
        Cmd::Count { naive: Some(h), .. } => render_naive(&census::count_naive(*h)?),
        Cmd::Count { x, naive: None } => render_census(&census::census(*x)?),
        Cmd::Sigma { tol, mc_samples, seed } => {
            let quad = region::sigma_area_detailed(*tol)?;
            let mc = match mc_samples {
                Some(n) => Some(region::mc_sigma(*n, *seed)?),
                None => None,
            };
            render_sigma(&quad, mc.as_ref())
        }
        Cmd::Constants { tol } => render_constants(*tol)?,
        Cmd::Classes => render_classes(),
        Cmd::Boundary { x, n } => {
            let sweep = region::boundary_samples(*x, *n)?;
            let grads = sweep
                .points
                .iter()
                .map(|p| region::boundary_gradient(p, *x))
                .collect::<Result<Vec<_>>>()?;
            render_boundary(&sweep, &grads)
        }
    };

    let body = match cli.format {
        Format::Json => format!("{:#}\n", report.json),
        Format::Text => report.text,
        Format::Csv => report.csv,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn render_height(v: &heights::HeightValue) -> Report {
    let mut text = String::new();
    text += &format!("curve: y^2 = x^3 + ({})x + ({})\n", v.a, v.b);
    text += &format!(
        "minimal model: ({}, {}), lambda = {}\n",
        v.minimal_a, v.minimal_b, v.lambda
    );
    text += &format!("minimal discriminant: {}\n", v.min_disc);
    text += &format!("tau: {} + {}i\n", v.tau.re, v.tau.im);
    text += &format!("ln H_F = {}\n", v.log_hf);
    text += &format!("H_F = {}\n", v.hf);
    text += &format!("h_F = {}\n", v.faltings);
    let csv = format!(
        "a,b,minimal_a,minimal_b,lambda,min_disc,tau_re,tau_im,log_hf,hf,faltings\n\
         {},{},{},{},{},{},{},{},{},{},{}\n",
        v.a,
        v.b,
        v.minimal_a,
        v.minimal_b,
        v.lambda,
        v.min_disc,
        v.tau.re,
        v.tau.im,
        v.log_hf,
        v.hf,
        v.faltings
    );
    Report { json: serde_json::to_value(v).expect("serializable"), text, csv }
}

fn render_census(r: &census::CensusReport) -> Report {
    let mut text = format!("X = {}\n", r.x);
    text += "lambda   level           direct      sieve\n";
    for f in &r.families {
        text += &format!(
            "{:<8} {:<15} {:<11} {}\n",
            f.lambda.label(),
            f.level,
            f.direct,
            f.sieve
        );
    }
    text += &format!("count: {} (sieve {})\n", r.count, r.sieve_count);
    text += &format!("prediction: {}\n", r.prediction);
    text += &format!("ratio: {}\n", r.ratio);
    text += &format!("visited: {} pairs\n", r.visited);
    let mut csv = String::from("lambda,level,direct,sieve\n");
    for f in &r.families {
        csv += &format!("{},{},{},{}\n", f.lambda.label(), f.level, f.direct, f.sieve);
    }
    csv += &format!("total,{},{},{}\n", r.x, r.count, r.sieve_count);
    Report { json: serde_json::to_value(r).expect("serializable"), text, csv }
}

fn render_naive(r: &census::NaiveCount) -> Report {
    let ratio = r.count as f64 / r.prediction;
    let text = format!(
        "naive bound: {}\ncount: {}\nprediction: {}\nratio: {}\n",
        r.x, r.count, r.prediction, ratio
    );
    let csv = format!(
        "x,count,prediction,ratio\n{},{},{},{}\n",
        r.x, r.count, r.prediction, ratio
    );
    let json = json!({
        "x": r.x,
        "count": r.count,
        "prediction": r.prediction,
        "ratio": ratio,
    });
    Report { json, text, csv }
}

fn render_sigma(q: &region::SigmaReport, mc: Option<&region::McSigma>) -> Report {
    let mut text = format!(
        "sigma = {} (error bound {}, tol {})\n",
        q.sigma, q.error_bound, q.tol
    );
    for p in &q.pieces {
        text += &format!(
            "  {:<28} {:<23} err {:<12} {} intervals\n",
            p.name, p.value, p.error, p.intervals
        );
    }
    if let Some(m) = mc {
        text += &format!(
            "monte carlo: sigma = {} (std error {}, {} samples, {} hits)\n",
            m.sigma, m.std_error, m.samples, m.hits
        );
    }
    // Piece names contain commas, so the name column is quoted.
    let mut csv = String::from("piece,value,error,intervals\n");
    for p in &q.pieces {
        csv += &format!("\"{}\",{},{},{}\n", p.name, p.value, p.error, p.intervals);
    }
    csv += &format!("total,{},{},\n", q.sigma, q.error_bound);
    if let Some(m) = mc {
        csv += &format!("monte_carlo,{},{},{}\n", m.sigma, m.std_error, m.samples);
    }
    let json = json!({
        "quadrature": q,
        "monte_carlo": mc,
    });
    Report { json, text, csv }
}

fn render_constants(tol: f64) -> Result<Report> {
    let c = region::bound_constants();
    let s = region::sigma_area_detailed(tol)?;
    let zeta10 = census::zeta10();
    let census_constant = 12.0 * s.sigma / zeta10;
    let rows: [(&str, f64); 7] = [
        ("sup_g", c.sup_g),
        ("cusp_coeff", c.cusp_coeff),
        ("eps0", c.eps0),
        ("delta_i", c.delta_i),
        ("zeta10", zeta10),
        ("sigma", s.sigma),
        ("census_constant", census_constant),
    ];
    let mut text = String::new();
    let mut csv = String::from("name,value\n");
    for (name, value) in rows {
        text += &format!("{name} = {value}\n");
        csv += &format!("{name},{value}\n");
    }
    let json = json!({
        "sup_g": c.sup_g,
        "cusp_coeff": c.cusp_coeff,
        "eps0": c.eps0,
        "delta_i": c.delta_i,
        "zeta10": zeta10,
        "sigma": s.sigma,
        "sigma_error_bound": s.error_bound,
        "sigma_tol": s.tol,
        "census_constant": census_constant,
    });
    Ok(Report { json, text, csv })
}

fn render_classes() -> Report {
    let t = class_tables();
    let [min2, non2, nw2] = t.counts_at_2();
    let [min3, non3, nw3] = t.counts_at_3();
    let mut text = String::new();
    text += &format!("mod 64:  minimal {min2}, nonminimal {non2}, non-weakly-minimal {nw2}\n");
    text += &format!("mod 729: minimal {min3}, nonminimal {non3}, non-weakly-minimal {nw3}\n");
    for lam in Lambda::ALL {
        text += &format!("family lambda = {:<6} size {} (mod 46656)\n", lam.label(), t.family_size(lam));
    }
    text += &format!("nonminimal residues mod 64:  {:?}\n", t.nonminimal_residues_at_2());
    text += &format!("nonminimal residues mod 729: {:?}\n", t.nonminimal_residues_at_3());
    let mut csv = String::from("scope,key,value\n");
    for (key, value) in
        [("minimal", min2), ("nonminimal", non2), ("non_weakly_minimal", nw2)]
    {
        csv += &format!("mod64,{key},{value}\n");
    }
    for (key, value) in
        [("minimal", min3), ("nonminimal", non3), ("non_weakly_minimal", nw3)]
    {
        csv += &format!("mod729,{key},{value}\n");
    }
    for lam in Lambda::ALL {
        csv += &format!("family,{},{}\n", lam.label(), t.family_size(lam));
    }
    let residues = |pairs: &[(u16, u16)]| {
        pairs.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>()
    };
    let json = json!({
        "counts_mod_64": { "minimal": min2, "nonminimal": non2, "non_weakly_minimal": nw2 },
        "counts_mod_729": { "minimal": min3, "nonminimal": non3, "non_weakly_minimal": nw3 },
        "family_sizes": Lambda::ALL
            .iter()
            .map(|l| (l.label().to_string(), json!(t.family_size(*l))))
            .collect::<serde_json::Map<_, _>>(),
        "nonminimal_mod_64": residues(t.nonminimal_residues_at_2()),
        "nonminimal_mod_729": residues(t.nonminimal_residues_at_3()),
    });
    Report { json, text, csv }
}

fn render_boundary(sweep: &region::BoundarySweep, grads: &[(f64, f64)]) -> Report {
    let mut text = format!("X = {}, {} boundary points\n", sweep.x, sweep.points.len());
    let mut csv = String::from("a,b,eps,f_a,f_b\n");
    let mut rows = Vec::with_capacity(grads.len());
    for (p, (fa, fb)) in sweep.points.iter().zip(grads) {
        let eps_txt = match p.eps {
            Some(e) => format!("eps = {e}"),
            None => String::new(),
        };
        text += &format!("a = {}, b = {}, grad F = ({}, {}) {}\n", p.a, p.b, fa, fb, eps_txt);
        let eps_csv = p.eps.map(|e| e.to_string()).unwrap_or_default();
        csv += &format!("{},{},{},{},{}\n", p.a, p.b, eps_csv, fa, fb);
        rows.push(json!({
            "a": p.a,
            "b": p.b,
            "eps": p.eps,
            "f_a": fa,
            "f_b": fb,
        }));
    }
    let json = json!({ "x": sweep.x, "points": rows });
    Report { json, text, csv }
}
