//! `coxinv`: basis listing, invariant evaluation on versal torsors, and the
//! verification suites, with text or JSON reports.
//!
//! Exit codes: 0 on success / suite pass, 1 on verification failure, 2 on
//! usage errors (bad flags, parse errors, cap violations).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coxinv::config::Config;
use coxinv::coxeter::WeylType;
use coxinv::stiefel::{self, InvariantExpr, InvariantType};
use coxinv::torsors;
use coxinv::verify::{self, VerificationReport};

#[derive(Parser)]
#[command(
    name = "coxinv",
    version,
    about = "Mod-2 cohomological invariants of classical Weyl groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Work over a base field where -1 need not be a square
    #[arg(long = "no-minus-one-square", global = true)]
    no_minus_one_square: bool,
    /// Work over a base field where 2 need not be a square
    #[arg(long = "no-two-square", global = true)]
    no_two_square: bool,
    /// Override a resource cap, e.g. --cap fingerprint_b=12 (repeatable;
    /// the COXINV_CAPS environment variable is applied first)
    #[arg(long = "cap", value_name = "NAME=VALUE")]
    cap: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariant basis index set of a type
    Basis {
        #[arg(long = "type", value_name = "A|B|C|D")]
        ty: String,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate an invariant expression on the canonical versal torsor
    Restrict {
        #[arg(long = "type", value_name = "A|B|C|D")]
        ty: String,
        #[arg(long)]
        rank: usize,
        /// Expression in the w<i>/wt<j> grammar, e.g. "w1*wt3+wt2"
        #[arg(long)]
        expr: String,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, value_name = "SUITE")]
        suite: String,
        #[arg(long = "type", value_name = "A|B|C|D")]
        ty: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Decide negligibility of a mod-2 class of a 2-elementary group
    Negligible {
        /// Number of order-2 generators
        #[arg(long)]
        n: usize,
        /// Polynomial in the x<k> grammar, e.g. "x1^2*x2 + x1*x2^2"
        #[arg(long)]
        poly: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn build_config(common: &CommonOpts) -> Result<Config, String> {
    let mut cfg = Config {
        minus_one_square: !common.no_minus_one_square,
        two_square: !common.no_two_square,
        ..Config::default()
    };
    if let Ok(env_caps) = std::env::var("COXINV_CAPS") {
        cfg.caps.apply_overrides(&env_caps)?;
    }
    for spec in &common.cap {
        cfg.caps.apply_overrides(spec)?;
    }
    Ok(cfg)
}

fn invariant_type(ty: &str) -> Result<InvariantType, String> {
    match ty {
        "A" | "a" => Ok(InvariantType::A),
        // the type-C Weyl group is the type-B one
        "B" | "b" | "C" | "c" => Ok(InvariantType::B),
        "D" | "d" => Ok(InvariantType::D),
        other => Err(format!("unknown type `{other}` (expected A, B, C or D)")),
    }
}

fn weyl_type(ty: &str) -> Result<WeylType, String> {
    match ty {
        "A" | "a" => Ok(WeylType::A),
        "B" | "b" => Ok(WeylType::B),
        "C" | "c" => Ok(WeylType::C),
        "D" | "d" => Ok(WeylType::D),
        other => Err(format!("unknown type `{other}` (expected A, B, C or D)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Basis { ty, rank, common } => cmd_basis(&ty, rank, &common),
        Command::Restrict {
            ty,
            rank,
            expr,
            q,
            common,
        } => cmd_restrict(&ty, rank, &expr, q, &common),
        Command::Verify {
            suite,
            ty,
            rank,
            common,
        } => cmd_verify(&suite, ty.as_deref(), rank, &common),
        Command::Negligible { n, poly, common } => cmd_negligible(n, &poly, &common),
    }
}

fn cmd_basis(ty: &str, rank: usize, common: &CommonOpts) -> ExitCode {
    let ty = match invariant_type(ty) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let basis = match verify::basis_index_set(ty, rank) {
        Ok(b) => b,
        Err(e) => return usage_error(&e.to_string()),
    };
    let rendered: Vec<String> = basis
        .pairs
        .iter()
        .map(|&(i, j)| {
            InvariantExpr::new(ty, rank, [(i, j)])
                .expect("basis pairs are valid")
                .render()
        })
        .collect();
    if common.json {
        let out = serde_json::json!({
            "type": ty.letter().to_string(),
            "rank": rank,
            "pairs": basis.pairs,
            "entries": rendered,
            "count": basis.pairs.len(),
        });
        println!("{out}");
    } else {
        for r in &rendered {
            println!("{r}");
        }
        println!("{} entries", rendered.len());
    }
    ExitCode::SUCCESS
}

fn cmd_restrict(ty: &str, rank: usize, expr: &str, q: usize, common: &CommonOpts) -> ExitCode {
    let ty = match invariant_type(ty) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let cfg = match build_config(common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let cap_name = match ty {
        InvariantType::D => "fingerprint_d",
        _ => "fingerprint_b",
    };
    if rank as u64 > cfg.caps.get(cap_name) {
        return usage_error(&format!(
            "rank {rank} exceeds cap `{cap_name}` = {} (raise it with --cap)",
            cfg.caps.get(cap_name)
        ));
    }
    let parsed = match InvariantExpr::parse(ty, rank, expr) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let m = rank / 2;
    let family = match ty {
        InvariantType::A | InvariantType::B => {
            if q > m {
                return usage_error(&format!("q = {q} out of range 0..={m}"));
            }
            torsors::versal_hq(rank, q, cfg.minus_one_square, cfg.two_square)
        }
        InvariantType::D => {
            if q != m {
                return usage_error(&format!("type D restricts at q = {m} only"));
            }
            if !rank.is_multiple_of(2) && cfg.caps.get("odd_d") != 1 {
                return usage_error(
                    "odd type-D ranks are experimental; pass --cap odd_d=1 to enable",
                );
            }
            torsors::versal_dn(rank, cfg.minus_one_square, cfg.two_square)
        }
    };
    let family = match family {
        Ok(f) => f,
        Err(e) => return usage_error(&e.to_string()),
    };
    let value = match stiefel::eval(&family.ctx, &parsed, &family.torsor) {
        Ok(v) => v,
        Err(e) => return usage_error(&e.to_string()),
    };
    let rendered = family.ctx.render_class(&value);
    if common.json {
        let out = serde_json::json!({
            "type": ty.letter().to_string(),
            "rank": rank,
            "q": q,
            "expr": parsed.render(),
            "torsor": family.torsor.render(&family.ctx),
            "value": rendered,
            "flags": {
                "minus_one_square": cfg.minus_one_square,
                "two_square": cfg.two_square,
            },
        });
        println!("{out}");
    } else {
        println!("{rendered}");
    }
    ExitCode::SUCCESS
}

fn require_rank(rank: Option<usize>) -> Result<usize, String> {
    rank.ok_or_else(|| "this suite needs --rank".to_owned())
}

fn cmd_verify(suite: &str, ty: Option<&str>, rank: Option<usize>, common: &CommonOpts) -> ExitCode {
    let cfg = match build_config(common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let inv_ty = |default: InvariantType| -> Result<InvariantType, String> {
        match ty {
            Some(t) => invariant_type(t),
            None => Ok(default),
        }
    };
    let report: Result<VerificationReport, String> = (|| {
        let r = match suite {
            "reld4" => verify::verify_reld4(),
            "d4-freeness" => verify::verify_d4_basis_freeness(),
            "freeness" => {
                verify::verify_freeness(inv_ty(InvariantType::B)?, require_rank(rank)?, &cfg)
            }
            "vanishing" => {
                if let Some(t) = ty {
                    if invariant_type(t)? != InvariantType::B {
                        return Err("the vanishing suite is specific to type B".to_owned());
                    }
                }
                verify::verify_vanishing(require_rank(rank)?, &cfg)
            }
            "h0" => verify::verify_h0(require_rank(rank)?, &cfg),
            "siw0" => verify::verify_siw0(require_rank(rank)?, &cfg),
            "fixed-basis" => {
                verify::verify_fixed_basis(inv_ty(InvariantType::B)?, require_rank(rank)?, &cfg)
            }
            "eq24" => verify::verify_eq24(require_rank(rank)?, &cfg),
            "generation-dn" => verify::verify_generation_dn(require_rank(rank)?, &cfg),
            "subgroups" => {
                let wt = match ty {
                    Some(t) => weyl_type(t)?,
                    None => WeylType::B,
                };
                verify::verify_subgroups(wt, require_rank(rank)?, &cfg)
            }
            other => {
                return Err(format!(
                    "unknown suite `{other}` (expected one of: reld4, d4-freeness, siw0, h0, \
                     vanishing, freeness, fixed-basis, eq24, generation-dn, subgroups)"
                ))
            }
        };
        r.map_err(|e| e.to_string())
    })();
    let report = match report {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    if common.json {
        // elapsed_ms is normalized so identical invocations give identical bytes
        let mut normalized = report.clone();
        normalized.elapsed_ms = 0;
        println!(
            "{}",
            serde_json::to_string(&normalized).expect("report serializes")
        );
    } else {
        println!(
            "suite {}: {}",
            report.suite,
            if report.pass { "PASS" } else { "FAIL" }
        );
        println!(
            "flags: minus_one_square={} two_square={}",
            report.flags.minus_one_square, report.flags.two_square
        );
        for note in &report.notes {
            println!("note: {note}");
        }
        println!("witness: {}", report.witness);
        println!("elapsed_ms: {}", report.elapsed_ms);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_negligible(n: usize, poly: &str, common: &CommonOpts) -> ExitCode {
    let cfg = match build_config(common) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    if n as u64 > cfg.caps.get("negligible_vars") {
        return usage_error(&format!(
            "n = {n} exceeds cap `negligible_vars` = {} (2^n subgroup restrictions)",
            cfg.caps.get("negligible_vars")
        ));
    }
    let class = match verify::GradedPolynomialClass::parse(n, poly) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    let negligible = verify::negligible_2elementary(&class);
    if common.json {
        let out = serde_json::json!({
            "n": n,
            "poly": class.render(),
            "negligible": negligible,
        });
        println!("{out}");
    } else {
        println!("{negligible}");
    }
    ExitCode::SUCCESS
}
