use clap::Subcommand;
use hinge_minimax::bounds::{
    fano_lower_bound, fano_lower_bound_clamped, lecam_lower_bound, lecam_pipeline, lower_bound_pipeline, oracle_rhs,
    rate_exponent, tail_integral_bound, write_lower_bound_csv, OracleParams,
};
use hinge_minimax::dist::{LowerBoundParams, QuadSpec};
use hinge_minimax::estimators::hyperparam_schedule;
use hinge_minimax::Result;
use serde_json::json;

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        other => other.parse().map_err(|e| format!("{e}")),
    }
}

#[derive(Subcommand)]
pub enum Calc {
    /// Right-hand side of the oracle inequality.
    Oracle {
        #[arg(long)]
        n: usize,
        /// Class size (or covering number) W ≥ 3.
        #[arg(long)]
        w: f64,
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long = "big-gamma")]
        big_gamma: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 0.0)]
        h: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        approx: f64,
    },
    /// Fano bound from separation v, mean KL u and M alternatives.
    Fano {
        #[arg(long)]
        v: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Le Cam bound `v/4 · affinity`.
    Lecam {
        #[arg(long)]
        v: f64,
        #[arg(long)]
        affinity: f64,
    },
    /// Minimax rate exponent.
    Rate {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        q: usize,
        #[arg(long = "d-lower")]
        d_lower: usize,
        #[arg(long, value_parser = parse_f64)]
        s: f64,
    },
    /// Tail integral and its closed-form bound.
    Tail {
        #[arg(long = "big-a")]
        big_a: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Network class schedule (G, N, S, B, F).
    Schedule {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        q: usize,
        #[arg(long = "d-lower")]
        d_lower: usize,
        #[arg(long, value_parser = parse_f64)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    /// Two-point pipeline for s = ∞ at each n.
    TwoPoint {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 16, 64])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Fano pipeline for finite s; prints the CSV n,eps,separation,kl,fano_value.
    LowerBound {
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 256, 1024])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

pub fn run(calc: Calc) -> Result<()> {
    let value = match calc {
        Calc::Oracle { n, w, m, big_gamma, theta, gamma, j, h, eps, approx } => {
            let p = OracleParams { n, w, m, big_gamma, theta, gamma, j, h, eps, approx_term: approx };
            p.validate()?;
            json!({ "rhs": oracle_rhs(&p) })
        }
        Calc::Fano { v, u, m, n } => {
            json!({ "raw": fano_lower_bound(v, u, m, n), "clamped": fano_lower_bound_clamped(v, u, m, n) })
        }
        Calc::Lecam { v, affinity } => json!({ "bound": lecam_lower_bound(v, affinity) }),
        Calc::Rate { beta, q, d_lower, s } => {
            let e = rate_exponent(beta, q, d_lower, s);
            json!({ "exponent": e, "slope": -e })
        }
        Calc::Tail { big_a, a, b } => serde_json::to_value(tail_integral_bound(big_a, a, b)?)?,
        Calc::Schedule { n, beta, q, d_lower, s, a, b } => serde_json::to_value(hyperparam_schedule(n, beta, q, d_lower, s, a, b)?)?,
        Calc::TwoPoint { lambda, n, d } => {
            let rows = n
                .iter()
                .map(|&n| lecam_pipeline(lambda, n, 1.0, 0, 1, d, 1, QuadSpec::new(256, 1)))
                .collect::<Result<Vec<_>>>()?;
            serde_json::to_value(rows)?
        }
        Calc::LowerBound { grid, s, alpha, lambda, beta, d, n, seed } => {
            let params = LowerBoundParams::new(grid, s, alpha, lambda, beta, 0, 1, d, 1, seed);
            let rows = n
                .iter()
                .map(|&n| lower_bound_pipeline(&params, n, QuadSpec::new(4096, 1)))
                .collect::<Result<Vec<_>>>()?;
            write_lower_bound_csv(&rows, std::io::stdout())?;
            return Ok(());
        }
    };
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}
