//! The single-purpose subcommands: greedy, widths, gamma and bm-bound.

use std::path::Path;

use greedy_widths_core::geometry::{gamma_table, john_ellipsoid, GammaSpaceKind};
use greedy_widths_core::greedy::{replay_verify, run_greedy};
use greedy_widths_core::grothendieck::gamma_n;
use greedy_widths_core::linalg::{self, Vector};
use greedy_widths_core::sampling::derive_seed;
use greedy_widths_core::subspaces::Subspace;
use greedy_widths_core::widths::{gelfand_width, kolmogorov_widths, WidthOptions};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result, EXIT_OK, EXIT_VIOLATION};
use crate::formats::{num, read_document, OperatorFile, SetFile, SubspaceFile, Table};

/// Result of a subcommand, rendered as JSON or CSV by the caller.
#[derive(Debug)]
pub struct CommandOutput {
    pub kind: &'static str,
    pub data: serde_json::Value,
    pub table: Table,
    pub exit_code: i32,
}

/// The serialized name of a unit enum variant.
pub fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("command records serialize")
}

#[derive(Serialize)]
struct GreedyRecord {
    space: String,
    n_max: usize,
    sigmas: Vec<f64>,
    selected_indices: Vec<usize>,
    exhausted: bool,
    set_fingerprint: String,
    replay_pass: bool,
    replay_max_violation: f64,
}

pub fn greedy(set_path: &Path, n: Option<usize>, cfg: &RunConfig) -> Result<CommandOutput> {
    let doc: SetFile = read_document(set_path, |d: &SetFile| &d.schema_version)?;
    let (set, space) = doc.build()?;
    let n_max = n.unwrap_or(cfg.commands.n_max);
    let trace = run_greedy(&set, &space, n_max)?;
    let replay = replay_verify(&trace, &set)?;
    let mut table = Table::new(&["k", "sigma", "selected_index"]);
    for (k, (&s, &i)) in trace.sigmas.iter().zip(&trace.selected_indices).enumerate() {
        table.push(vec![k.to_string(), num(s), i.to_string()]);
    }
    let record = GreedyRecord {
        space: space.describe(),
        n_max,
        sigmas: trace.sigmas.clone(),
        selected_indices: trace.selected_indices.clone(),
        exhausted: trace.exhausted,
        set_fingerprint: trace.set_fingerprint.clone(),
        replay_pass: replay.pass,
        replay_max_violation: replay.max_violation,
    };
    Ok(CommandOutput {
        kind: "greedy_trace",
        data: to_value(&record),
        table,
        exit_code: if replay.pass { EXIT_OK } else { EXIT_VIOLATION },
    })
}

#[derive(Serialize)]
struct WidthRow {
    n: usize,
    kolmogorov: f64,
    kolmogorov_kind: String,
    kolmogorov_method: String,
    gelfand: f64,
    gelfand_kind: String,
    gelfand_method: String,
}

pub fn widths(op_path: &Path, n: Option<usize>, cfg: &RunConfig) -> Result<CommandOutput> {
    let doc: OperatorFile = read_document(op_path, |d: &OperatorFile| &d.schema_version)?;
    let (t, domain, target) = doc.build()?;
    let top = n
        .unwrap_or(cfg.commands.n_max)
        .min(t.nrows().min(t.ncols()));
    let opts = WidthOptions {
        restarts: cfg.commands.restarts,
        seed: cfg.seed,
        ..WidthOptions::default()
    };
    let kol = kolmogorov_widths(&t, &domain, &target, 0..=top, &opts)?;
    let mut rows = Vec::new();
    for (k, d) in kol.iter().enumerate() {
        let sub = WidthOptions {
            seed: derive_seed(cfg.seed, k as u64),
            ..opts.clone()
        };
        let g = gelfand_width(&t, &domain, &target, k, &sub)?;
        rows.push(WidthRow {
            n: k,
            kolmogorov: d.value,
            kolmogorov_kind: tag(&d.kind),
            kolmogorov_method: tag(&d.method),
            gelfand: g.value,
            gelfand_kind: tag(&g.kind),
            gelfand_method: tag(&g.method),
        });
    }
    let mut table = Table::new(&[
        "n",
        "kolmogorov",
        "kolmogorov_kind",
        "kolmogorov_method",
        "gelfand",
        "gelfand_kind",
        "gelfand_method",
    ]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            num(r.kolmogorov),
            r.kolmogorov_kind.clone(),
            r.kolmogorov_method.clone(),
            num(r.gelfand),
            r.gelfand_kind.clone(),
            r.gelfand_method.clone(),
        ]);
    }
    Ok(CommandOutput {
        kind: "widths",
        data: to_value(&rows),
        table,
        exit_code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct GammaRow {
    n: usize,
    gamma: f64,
    kind: String,
    method: String,
    target_gamma_table: f64,
}

pub fn gamma(op_path: &Path, n: Option<usize>, cfg: &RunConfig) -> Result<CommandOutput> {
    let doc: OperatorFile = read_document(op_path, |d: &OperatorFile| &d.schema_version)?;
    let (t, domain, target) = doc.build()?;
    let top = n
        .unwrap_or(cfg.commands.n_max)
        .min(t.nrows().min(t.ncols()));
    let kind = GammaSpaceKind::of(&target);
    let mut rows = Vec::new();
    for k in 1..=top {
        let est = gamma_n(
            &t,
            &domain,
            &target,
            k,
            cfg.commands.gamma_budget,
            derive_seed(cfg.seed, k as u64),
        )?;
        rows.push(GammaRow {
            n: k,
            gamma: est.value,
            kind: tag(&est.kind),
            method: tag(&est.method),
            target_gamma_table: gamma_table(kind, k),
        });
    }
    let mut table = Table::new(&["n", "gamma", "kind", "method", "target_gamma_table"]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            num(r.gamma),
            r.kind.clone(),
            r.method.clone(),
            num(r.target_gamma_table),
        ]);
    }
    Ok(CommandOutput {
        kind: "grothendieck_numbers",
        data: to_value(&rows),
        table,
        exit_code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct BmRecord {
    space: String,
    dim: usize,
    lambda: f64,
    lambda_kind: String,
    sqrt_dim: f64,
    /// k^{|1/2−1/p|}·1.05 for ℓ_p ambients.
    lp_section_bound: Option<f64>,
}

pub fn bm_bound(subspace_path: &Path, cfg: &RunConfig) -> Result<CommandOutput> {
    let doc: SubspaceFile = read_document(subspace_path, |d: &SubspaceFile| &d.schema_version)?;
    let space = doc.space.build()?;
    if doc.basis.is_empty() {
        return Err(CliError::config("the subspace basis is empty"));
    }
    let vectors: Vec<Vector> = doc
        .basis
        .iter()
        .map(|v| Vector::from_column_slice(v))
        .collect();
    let v = Subspace::new(linalg::from_columns(&vectors, space.dim()), space.clone())?;
    let sandwich = john_ellipsoid(&v, cfg.commands.ellipsoid_samples, cfg.seed)?;
    let k = v.dim() as f64;
    let record = BmRecord {
        space: space.describe(),
        dim: v.dim(),
        lambda: sandwich.lambda,
        lambda_kind: tag(&sandwich.lambda_kind),
        sqrt_dim: k.sqrt(),
        lp_section_bound: space
            .exponent()
            .map(|p| k.powf(p.euclidean_distortion_exponent()) * 1.05),
    };
    let mut table = Table::new(&[
        "dim",
        "lambda",
        "lambda_kind",
        "sqrt_dim",
        "lp_section_bound",
    ]);
    table.push(vec![
        record.dim.to_string(),
        num(record.lambda),
        record.lambda_kind.clone(),
        num(record.sqrt_dim),
        record.lp_section_bound.map(num).unwrap_or_default(),
    ]);
    let exceeds = record.lambda > record.sqrt_dim * (1.0 + 1e-6);
    Ok(CommandOutput {
        kind: "banach_mazur_bound",
        data: to_value(&record),
        table,
        exit_code: if exceeds { EXIT_VIOLATION } else { EXIT_OK },
    })
}
