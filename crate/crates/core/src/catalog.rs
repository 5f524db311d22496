//! String-addressable catalog of the varieties under study, and the bound
//! orchestration shared by the CLI and the acceptance suite.

use serde::Serialize;

use crate::curves::low_genus_curve_bound;
use crate::discrepancy::optimize_multiplicities;
use crate::divisor::degree_sum_bound;
use crate::error::CatalogError;
use crate::field::Field;
use crate::varieties::{
    determinantal_variety, elliptic_quartic, elliptic_quintic, rational_normal_curve,
    EmbeddingCase, VarietySpec,
};

/// A parsed catalog label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Case(EmbeddingCase),
    /// Rational normal curve of degree `m` in `P^m`.
    Rnc(usize),
    /// Elliptic normal curve of the given embedding degree (4 or 5).
    Elliptic(usize),
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Case(c) => c.label(),
            Target::Rnc(m) => format!("rnc:{m}"),
            Target::Elliptic(d) => format!("elliptic:{d}"),
        }
    }

    /// `(genus, divisor degree)` for curve targets: the embedding is by a
    /// degree-`d` divisor plus the canonical class, so a rational normal
    /// curve of degree `m` has `d = m + 2` and an elliptic curve has `d`
    /// equal to its embedding degree.
    pub fn curve_params(&self) -> Option<(i64, i64)> {
        match self {
            Target::Rnc(m) => Some((0, *m as i64 + 2)),
            Target::Elliptic(d) => Some((1, *d as i64)),
            Target::Case(_) => None,
        }
    }
}

/// Parse labels like `segre:2x3`, `veronese:3`, `pluecker:5`, `rnc:4`,
/// `elliptic:4`. `generic:`, `symmetric:`, `skew:` are accepted synonyms.
pub fn parse_label(label: &str) -> Result<Target, CatalogError> {
    let unknown = || CatalogError::UnknownLabel(label.to_string());
    let (kind, arg) = label.split_once(':').ok_or_else(unknown)?;
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| unknown());
    match kind {
        "segre" | "generic" => {
            let (a, b) = arg.split_once('x').ok_or_else(unknown)?;
            Ok(Target::Case(EmbeddingCase::Generic {
                rows: parse_usize(a)?,
                cols: parse_usize(b)?,
            }))
        }
        "veronese" | "symmetric" => Ok(Target::Case(EmbeddingCase::Symmetric {
            size: parse_usize(arg)?,
        })),
        "pluecker" | "plucker" | "skew" => Ok(Target::Case(EmbeddingCase::Skew {
            size: parse_usize(arg)?,
        })),
        "rnc" => Ok(Target::Rnc(parse_usize(arg)?)),
        "elliptic" => {
            let d = parse_usize(arg)?;
            if d != 4 && d != 5 {
                return Err(unknown());
            }
            Ok(Target::Elliptic(d))
        }
        _ => Err(unknown()),
    }
}

/// Build the defining ideal for a target. The seed only matters for the
/// randomized elliptic constructions.
pub fn build_target<K: Field>(target: &Target, seed: u64) -> Result<VarietySpec<K>, CatalogError> {
    match target {
        Target::Case(case) => determinantal_variety(case),
        Target::Rnc(m) => rational_normal_curve(*m),
        Target::Elliptic(4) => elliptic_quartic(seed),
        Target::Elliptic(5) => elliptic_quintic(seed),
        Target::Elliptic(d) => Err(CatalogError::UnknownLabel(format!("elliptic:{d}"))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub n: usize,
    pub codim: usize,
    pub d_y: i64,
    pub generators: usize,
}

/// The standard menu shown by `list`. Any label within parameter ranges is
/// accepted by [`parse_label`], not only these.
pub fn standard_entries() -> Vec<Target> {
    let mut out = Vec::new();
    for rows in 2..=3usize {
        for cols in rows..=4usize {
            out.push(Target::Case(EmbeddingCase::Generic { rows, cols }));
        }
    }
    for size in 2..=4usize {
        out.push(Target::Case(EmbeddingCase::Symmetric { size }));
    }
    for size in 4..=6usize {
        out.push(Target::Case(EmbeddingCase::Skew { size }));
    }
    for m in 2..=5usize {
        out.push(Target::Rnc(m));
    }
    out.push(Target::Elliptic(4));
    out.push(Target::Elliptic(5));
    out
}

pub fn describe<K: Field>(target: &Target, seed: u64) -> Result<CatalogEntry, CatalogError> {
    let spec: VarietySpec<K> = build_target(target, seed)?;
    Ok(CatalogEntry {
        label: spec.label.clone(),
        n: spec.n,
        codim: spec.codim,
        d_y: spec.d_y,
        generators: spec.ideal.num_generators(),
    })
}

/// The two bounds for a target: the degree-sum bound from its defining
/// degrees, and the strategy bound (multiplicity-vector optimum for the
/// determinantal cases, the low-genus divisor class for curves).
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub n: usize,
    pub codim: usize,
    pub degree_sum_bound: i64,
    pub strategy_bound: i64,
    pub strategy: String,
    pub f_class: Option<String>,
}

pub fn bound_report<K: Field>(target: &Target, seed: u64) -> Result<BoundReport, CatalogError> {
    let spec: VarietySpec<K> = build_target(target, seed)?;
    let mut degrees = spec.ideal.degrees();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let t1 = degree_sum_bound(&degrees, spec.n, spec.codim)
        .map_err(|e| CatalogError::BadCase(e.to_string()))?;
    let (strategy_bound, strategy, f_class) = match target {
        Target::Case(case) => {
            let (nv, report) =
                optimize_multiplicities(case).map_err(|e| CatalogError::BadCase(e.to_string()))?;
            let e = report
                .e_bound
                .expect("optimizer returns feasible vectors only");
            let kind = match case {
                EmbeddingCase::Skew { .. } => "pfaffian-strategy optimum",
                _ => "minor-strategy optimum",
            };
            (
                e,
                format!("{kind} with multiplicities {:?}", nv.values()),
                Some(report.f_class.to_string()),
            )
        }
        Target::Rnc(_) | Target::Elliptic(_) => {
            let (g, d) = target.curve_params().unwrap();
            let e =
                low_genus_curve_bound(g, d).map_err(|e| CatalogError::BadCase(e.to_string()))?;
            (
                e,
                format!("low-genus curve divisor class (g = {g}, d = {d})"),
                None,
            )
        }
    };
    Ok(BoundReport {
        label: spec.label,
        n: spec.n,
        codim: spec.codim,
        degree_sum_bound: t1,
        strategy_bound,
        strategy: strategy.to_string(),
        f_class,
    })
}
