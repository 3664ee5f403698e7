//! Membership in S, S⁻¹, S_B and S_B¹ by two independent routes: sampled
//! modulus bounds, and positivity of the defect kernels on point sets. The
//! two routes are expected to agree via
//!
//! * S_B = S ∪ S⁻¹
//! * S_B¹ = S ∪ {1 < |f| ≤ √2}
//!
//! and [`consistency_report`] checks that they do. Sampling can disprove
//! positivity but never prove it, so non-PSD searches escalate to denser
//! sets and finally to a 2×2 determinant at a unimodular point.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermit::{psd_verdict, psd_verdict_floor, HermitianMatrix, Verdict, DEFAULT_TOL_REL};
use crate::kernels::{gram, kernel_value, KernelFamily, KernelSpec};
use crate::opcomp::{defect_compression, DefectVariant, Space};
use crate::points::{random_points, PointSet};
use crate::symbol::{DiskPoint, Symbol};

pub const DEFAULT_MARGIN: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 20240917;
/// Tolerance on |f(λ0)| = 1 accepted by [`boundary_witness`].
pub const UNIMODULAR_TOL: f64 = 1e-9;
const ESCALATION_SIZES: [usize; 2] = [50, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "no")]
    No,
    #[serde(rename = "margin-fail")]
    MarginFail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusLabels {
    pub schur: Label,
    pub inverse_schur: Label,
    pub sqrt2_bounded: Label,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub margin: f64,
}

/// Sampled modulus labels. `schur` is yes iff max |f| ≤ 1 + margin;
/// `inverse_schur` is yes iff min |f| > 1 + margin and margin-fail when
/// min |f| lies within `margin` of 1; `sqrt2_bounded` is yes iff
/// max |f| ≤ √2 + margin.
pub fn classify_modulus(f: &Symbol, pts: &PointSet, margin: f64) -> ModulusLabels {
    let mods: Vec<f64> = pts.points().iter().map(|&p| f.eval(p).norm()).collect();
    let min = mods.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = mods.iter().cloned().fold(0.0, f64::max);
    let schur = if max <= 1.0 + margin { Label::Yes } else { Label::No };
    let inverse_schur = if min > 1.0 + margin {
        Label::Yes
    } else if (min - 1.0).abs() <= margin {
        Label::MarginFail
    } else {
        Label::No
    };
    let sqrt2_bounded = if max <= std::f64::consts::SQRT_2 + margin {
        Label::Yes
    } else {
        Label::No
    };
    ModulusLabels {
        schur,
        inverse_schur,
        sqrt2_bounded,
        min_modulus: min,
        max_modulus: max,
        margin,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelVerdicts {
    pub sb: Verdict,
    pub sb1_lower: Verdict,
    pub sb1_upper: Verdict,
}

impl KernelVerdicts {
    pub fn sb1_psd(&self) -> bool {
        self.sb1_lower.psd && self.sb1_upper.psd
    }
}

/// Rounding floor for defect Gram matrices: the kernels are differences of
/// terms of size up to (1 + |f|²)² / (1 - |λ|²)², which can cancel exactly.
fn rounding_floor(f: &Symbol, pts: &[DiskPoint]) -> f64 {
    let big = pts
        .iter()
        .map(|&p| {
            let w = f.eval(p).norm_sqr();
            let d = 1.0 - p.value().norm_sqr();
            (1.0 + w) * (1.0 + w) / (d * d)
        })
        .fold(0.0, f64::max);
    64.0 * f64::EPSILON * pts.len() as f64 * big
}

fn family_verdict(family: KernelFamily, f: &Symbol, pts: &PointSet, tol_rel: f64) -> Verdict {
    let spec = KernelSpec::with_symbol(family, f).expect("defect kernels carry no range flag");
    psd_verdict_floor(&gram(&spec, pts), tol_rel, rounding_floor(f, pts.points()))
}

pub fn kernel_membership(f: &Symbol, pts: &PointSet, tol_rel: f64) -> KernelVerdicts {
    KernelVerdicts {
        sb: family_verdict(KernelFamily::SbDefect, f, pts, tol_rel),
        sb1_lower: family_verdict(KernelFamily::Sb1Lower, f, pts, tol_rel),
        sb1_upper: family_verdict(KernelFamily::Sb1Upper, f, pts, tol_rel),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryWitness {
    pub lambda0: C64,
    pub mu: C64,
    pub det: f64,
    pub verdict: Verdict,
}

/// Determinant of the sb-defect Gram matrix on {λ0, μ}. When |f(λ0)| = 1
/// the (λ0, λ0) entry vanishes, so det = -|K(λ0, μ)|² and any nonzero
/// off-diagonal entry certifies that the kernel is not positive.
pub fn boundary_witness(f: &Symbol, lambda0: C64, mu: C64) -> Result<BoundaryWitness> {
    let l = DiskPoint::new(lambda0)?;
    let m = DiskPoint::new(mu)?;
    let fl = f.eval(l).norm();
    if (fl - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::Precondition(format!(
            "|f(λ0)| = {fl} is not unimodular within {UNIMODULAR_TOL}"
        )));
    }
    let spec = KernelSpec::with_symbol(KernelFamily::SbDefect, f)?;
    let pts = [l, m];
    let g = HermitianMatrix::from_fn_symmetrized(2, |i, j| kernel_value(&spec, pts[j], pts[i]));
    let det = g.get(0, 0).re * g.get(1, 1).re - g.get(0, 1).norm_sqr();
    Ok(BoundaryWitness {
        lambda0,
        mu,
        det,
        verdict: psd_verdict_floor(&g, DEFAULT_TOL_REL, rounding_floor(f, &pts)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub margin: f64,
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            margin: DEFAULT_MARGIN,
            tol_rel: DEFAULT_TOL_REL,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionVerdicts {
    pub space: Space,
    pub order: usize,
    pub sb: Verdict,
    pub sb1_lower: Verdict,
    pub sb1_upper: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassLabel {
    pub schur: Label,
    pub inverse_schur: Label,
    pub sqrt2_bounded: Label,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub margin: f64,
    pub sb_member: Verdict,
    pub sb1_member: (Verdict, Verdict),
    pub compressions: CompressionVerdicts,
    /// Predicted by the modulus labels; `None` when a label is margin-fail.
    pub expected_sb: Option<bool>,
    pub expected_sb1: Option<bool>,
    pub consistent: bool,
    pub inconclusive: bool,
    /// Where the reported kernel verdicts were computed: "input", "random-50",
    /// "random-100" or "boundary-witness".
    pub stage: String,
    /// Points carrying most of the weight of the sb witness vector.
    pub witness_points: Vec<C64>,
    pub boundary_witness: Option<BoundaryWitness>,
    pub notes: Vec<String>,
}

fn expected_sets(m: &ModulusLabels) -> (Option<bool>, Option<bool>) {
    use Label::*;
    let sb = match (m.schur, m.inverse_schur) {
        (Yes, _) | (_, Yes) => Some(true),
        (No, No) => Some(false),
        _ => None,
    };
    let sb1 = if m.schur == Yes || (m.inverse_schur == Yes && m.sqrt2_bounded == Yes) {
        Some(true)
    } else if m.inverse_schur == No || m.sqrt2_bounded == No {
        Some(false)
    } else {
        None
    };
    (sb, sb1)
}

fn heavy_points(pts: &PointSet, v: &Verdict) -> Vec<C64> {
    let vals = pts.values();
    let top = v.witness.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..v.witness.len())
        .filter(|&i| v.witness[i].norm() >= 0.1 * top)
        .collect();
    idx.sort_by(|&a, &b| v.witness[b].norm().total_cmp(&v.witness[a].norm()));
    idx.truncate(5);
    idx.into_iter().map(|i| vals[i]).collect()
}

/// Bisects the segment [a, b] for |f| = 1, given |f(a)| < 1 < |f(b)|.
fn unimodular_on_segment(f: &Symbol, a: C64, b: C64) -> C64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let at = |t: f64| a + (b - a) * t;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = f.value(at(mid)).norm();
        if m < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    at(0.5 * (lo + hi))
}

/// Searches the sampled points for a unimodular crossing and returns the
/// most negative 2×2 witness found.
fn search_boundary_witness(f: &Symbol, sets: &[&PointSet]) -> Option<BoundaryWitness> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut all = Vec::new();
    for s in sets {
        for &p in s.points() {
            let m = f.eval(p).norm();
            if m < 1.0 {
                inside.push((m, p.value()));
            } else if m > 1.0 {
                outside.push((m, p.value()));
            }
            all.push(p.value());
        }
    }
    inside.sort_by(|a, b| b.0.total_cmp(&a.0));
    outside.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<BoundaryWitness> = None;
    for &(_, a) in inside.iter().take(4) {
        for &(_, b) in outside.iter().take(4) {
            let l0 = unimodular_on_segment(f, a, b);
            for &mu in &all {
                if (mu - l0).norm() < 1e-6 {
                    continue;
                }
                let Ok(w) = boundary_witness(f, l0, mu) else { continue };
                let rel = |w: &BoundaryWitness| w.verdict.min_eigenvalue / w.verdict.scale.max(f64::MIN_POSITIVE);
                if best.as_ref().is_none_or(|b| rel(&w) < rel(b)) {
                    best = Some(w);
                }
            }
        }
    }
    best
}

pub fn consistency_report(f: &Symbol, pts: &PointSet, n: usize) -> ClassLabel {
    consistency_report_with(f, pts, n, &ClassifyOptions::default())
}

pub fn consistency_report_with(f: &Symbol, pts: &PointSet, n: usize, opts: &ClassifyOptions) -> ClassLabel {
    let labels = classify_modulus(f, pts, opts.margin);
    let (expected_sb, expected_sb1) = expected_sets(&labels);
    let mut notes = vec!["modulus labels are decided on the sampled points only".to_string()];

    let mut verdicts = kernel_membership(f, pts, opts.tol_rel);
    let mut stage = "input".to_string();
    let mut used = pts.clone();
    let mut boundary = None;

    let missing_failure = |v: &KernelVerdicts| {
        (expected_sb == Some(false) && v.sb.psd) || (expected_sb1 == Some(false) && v.sb1_psd())
    };

    if missing_failure(&verdicts) {
        let mut tried: Vec<PointSet> = vec![pts.clone()];
        for (k, &size) in ESCALATION_SIZES.iter().enumerate() {
            let Ok(set) = random_points(size, pts.rho_max, opts.seed.wrapping_add(k as u64)) else {
                continue;
            };
            let v = kernel_membership(f, &set, opts.tol_rel);
            let found = !missing_failure(&v);
            tried.push(set.clone());
            if found {
                verdicts = v;
                used = set;
                stage = format!("random-{size}");
                break;
            }
        }
        if missing_failure(&verdicts) {
            let refs: Vec<&PointSet> = tried.iter().collect();
            if let Some(w) = search_boundary_witness(f, &refs) {
                if !w.verdict.psd {
                    if let Ok(set) = PointSet::from_points(vec![w.lambda0, w.mu], pts.rho_max.max(w.lambda0.norm()).min(1.0 - 1e-15)) {
                        verdicts = kernel_membership(f, &set, opts.tol_rel);
                        used = set;
                        stage = "boundary-witness".to_string();
                    }
                }
                boundary = Some(w);
            }
        }
    }

    let compressions = CompressionVerdicts {
        space: Space::Bergman,
        order: n + 1,
        sb: psd_verdict(&defect_compression(f, n, Space::Bergman, DefectVariant::Sb), opts.tol_rel),
        sb1_lower: psd_verdict(&defect_compression(f, n, Space::Bergman, DefectVariant::Sb1Lower), opts.tol_rel),
        sb1_upper: psd_verdict(&defect_compression(f, n, Space::Bergman, DefectVariant::Sb1Upper), opts.tol_rel),
    };

    let mut consistent = true;
    let mut inconclusive = false;
    if let Some(e) = expected_sb {
        if verdicts.sb.psd != e {
            consistent = false;
        }
        if e && !compressions.sb.psd {
            consistent = false;
            notes.push("sb compression is not PSD although the modulus route predicts membership".into());
        }
    } else {
        inconclusive = true;
        notes.push("modulus within margin of 1: S_B decision deferred".into());
    }
    if let Some(e) = expected_sb1 {
        if verdicts.sb1_psd() != e {
            consistent = false;
        }
        if e && !(compressions.sb1_lower.psd && compressions.sb1_upper.psd) {
            consistent = false;
            notes.push("sb1 compressions are not PSD although the modulus route predicts membership".into());
        }
    } else {
        inconclusive = true;
        notes.push("modulus within margin of 1: S_B¹ decision deferred".into());
    }
    if missing_failure(&verdicts) {
        inconclusive = true;
        notes.push("inconclusive: refine sampling (no negative eigenvalue found although the modulus crosses a threshold)".into());
    }
    if verdicts.sb.psd {
        notes.push("PSD verdicts are evidence on finite point sets, not proof of membership".into());
    }
    if (labels.max_modulus - std::f64::consts::SQRT_2).abs() <= opts.margin {
        notes.push("max |f| equals √2 within margin; counted as bounded".into());
    }
    if f.is_constant() && (f.at_zero().norm() - 1.0).abs() <= opts.margin {
        notes.push("unimodular constant: the sb kernel vanishes identically; reported as an S member".into());
    }

    ClassLabel {
        schur: labels.schur,
        inverse_schur: labels.inverse_schur,
        sqrt2_bounded: labels.sqrt2_bounded,
        min_modulus: labels.min_modulus,
        max_modulus: labels.max_modulus,
        margin: labels.margin,
        witness_points: heavy_points(&used, &verdicts.sb),
        sb_member: verdicts.sb,
        sb1_member: (verdicts.sb1_lower, verdicts.sb1_upper),
        compressions,
        expected_sb,
        expected_sb1,
        consistent,
        inconclusive,
        stage,
        boundary_witness: boundary,
        notes,
    }
}
