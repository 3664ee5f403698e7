//! Kernel-section models of the spaces
//!
//! * K(φ) with kernel (conj φ(λ) φ(z) - 1) / (1 - conj(λ) z), for |φ| > 1,
//! * L(φ) with kernel (2 - conj φ(λ) φ(z)) / (1 - conj(λ) z), for 1 < |φ| < √2,
//! * H(1/φ), the de Branges–Rovnyak space of b = 1/φ,
//!
//! and numerical checks of the backward-shift structure on them. An element
//! is a finite combination h = Σ c_i K_{μ_i}, so inner products are exact
//! Gram sums and pairings with an arbitrary g reduce to Σ c_i conj(g(μ_i)).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermit::{
    condition_number, lstsq, numerical_rank, sqrt_psd, CMatrix, HermitianMatrix,
};
use crate::kernels::{kernel_sum_residual, kernel_value, KernelFamily, KernelSpec};
use crate::opcomp::{product_compression, Space};
use crate::points::{random_points, PointSet, SplitMix64};
use crate::symbol::{DiskPoint, Symbol};

/// Relative singular-value threshold for the rank of the perturbation D.
pub const RANK_TOL: f64 = 1e-8;
const CAUCHY_RADIUS: f64 = 0.6;
const CAUCHY_NODES: usize = 128;
const DIRECT_QUOTIENT_MIN: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SectionSpace {
    #[serde(rename = "k_space")]
    K,
    #[serde(rename = "l_space")]
    L,
    #[serde(rename = "h_space")]
    H,
}

impl SectionSpace {
    fn family(self) -> KernelFamily {
        match self {
            SectionSpace::K => KernelFamily::KSpace,
            SectionSpace::L => KernelFamily::LSpace,
            SectionSpace::H => KernelFamily::HSpace,
        }
    }
}

impl fmt::Display for SectionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family().name())
    }
}

/// h = Σ c_i K_{μ_i} in K(φ), L(φ) or H(1/φ).
#[derive(Debug, Clone)]
pub struct KernelSection {
    space: SectionSpace,
    phi: Symbol,
    spec: KernelSpec,
    nodes: Vec<DiskPoint>,
    coeffs: Vec<C64>,
}

impl KernelSection {
    fn spec_for(space: SectionSpace, phi: &Symbol) -> Result<KernelSpec> {
        let sym = match space {
            SectionSpace::H => phi.reciprocal()?,
            _ => phi.clone(),
        };
        KernelSpec::new(space.family(), Some(sym))
    }

    /// Fails when the range flag of the space does not hold for φ.
    pub fn new(space: SectionSpace, phi: &Symbol, nodes: &PointSet, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != nodes.len() {
            return Err(Error::Parameter(format!(
                "{} coefficients for {} nodes",
                coeffs.len(),
                nodes.len()
            )));
        }
        Ok(KernelSection {
            space,
            phi: phi.clone(),
            spec: Self::spec_for(space, phi)?,
            nodes: nodes.points().to_vec(),
            coeffs,
        })
    }

    /// The reproducing kernel K_μ of the space.
    pub fn kernel(space: SectionSpace, phi: &Symbol, mu: DiskPoint) -> Result<Self> {
        Ok(KernelSection {
            space,
            phi: phi.clone(),
            spec: Self::spec_for(space, phi)?,
            nodes: vec![mu],
            coeffs: vec![C64::new(1.0, 0.0)],
        })
    }

    pub fn zero(space: SectionSpace, phi: &Symbol) -> Result<Self> {
        Ok(KernelSection {
            space,
            phi: phi.clone(),
            spec: Self::spec_for(space, phi)?,
            nodes: Vec::new(),
            coeffs: Vec::new(),
        })
    }

    pub fn space(&self) -> SectionSpace {
        self.space
    }

    pub fn phi(&self) -> &Symbol {
        &self.phi
    }

    pub fn nodes(&self) -> &[DiskPoint] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, z: DiskPoint) -> C64 {
        self.nodes
            .iter()
            .zip(&self.coeffs)
            .map(|(&mu, &c)| c * kernel_value(&self.spec, mu, z))
            .sum()
    }

    /// Σ c_i conj(g(μ_i)), which equals <h, g> whenever g lies in the space.
    pub fn pair_with(&self, g: impl Fn(DiskPoint) -> C64) -> C64 {
        self.nodes
            .iter()
            .zip(&self.coeffs)
            .map(|(&mu, &c)| c * g(mu).conj())
            .sum()
    }

    /// Same element with coefficients scaled node by node.
    fn reweighted(&self, space: SectionSpace, w: impl Fn(DiskPoint) -> C64) -> Result<Self> {
        Ok(KernelSection {
            space,
            phi: self.phi.clone(),
            spec: Self::spec_for(space, &self.phi)?,
            nodes: self.nodes.clone(),
            coeffs: self.nodes.iter().zip(&self.coeffs).map(|(&mu, &c)| c * w(mu)).collect(),
        })
    }
}

/// <h, g> = Σ_i Σ_j c_i conj(d_j) K_{μ_i}(ν_j).
pub fn inner_product(h: &KernelSection, g: &KernelSection) -> Result<C64> {
    if h.space != g.space || h.phi != g.phi {
        return Err(Error::SpaceMismatch(format!(
            "{} over {} vs {} over {}",
            h.space, h.phi, g.space, g.phi
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (&mu, &c) in h.nodes.iter().zip(&h.coeffs) {
        for (&nu, &d) in g.nodes.iter().zip(&g.coeffs) {
            acc += c * d.conj() * kernel_value(&h.spec, mu, nu);
        }
    }
    Ok(acc)
}

/// Backward shift S*g = (g(z) - g(0)) / z of an analytic symbol, exact.
pub fn sstar_symbol(g: &Symbol) -> Symbol {
    g.backward_shift()
}

/// S*(1/φ), exact; requires φ(0) ≠ 0.
pub fn sstar_reciprocal(phi: &Symbol) -> Result<Symbol> {
    if phi.at_zero().norm() == 0.0 {
        return Err(Error::Precondition("φ(0) = 0, so 1/φ is not analytic at the origin".into()));
    }
    Ok(phi.reciprocal()?.backward_shift())
}

/// An analytic function on the disk assembled from sections and symbols.
#[derive(Debug, Clone)]
pub enum Func {
    Zero,
    Section(Box<KernelSection>),
    Symbol(Symbol),
    Scaled(C64, Box<Func>),
    Sum(Box<Func>, Box<Func>),
    Product(Box<Func>, Box<Func>),
    TimesZ(Box<Func>),
    BackShift(Box<Func>),
}

impl Func {
    pub fn plus(self, other: Func) -> Func {
        Func::Sum(Box::new(self), Box::new(other))
    }

    pub fn minus(self, other: Func) -> Func {
        self.plus(other.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn scaled(self, c: C64) -> Func {
        Func::Scaled(c, Box::new(self))
    }

    pub fn times(self, other: Func) -> Func {
        Func::Product(Box::new(self), Box::new(other))
    }

    pub fn times_z(self) -> Func {
        Func::TimesZ(Box::new(self))
    }

    pub fn back_shift(self) -> Func {
        Func::BackShift(Box::new(self))
    }

    /// Value at a point of the open disk.
    pub fn eval(&self, z: DiskPoint) -> C64 {
        match self {
            Func::Zero => C64::new(0.0, 0.0),
            Func::Section(h) => h.eval(z),
            Func::Symbol(s) => s.eval(z),
            Func::Scaled(c, f) => c * f.eval(z),
            Func::Sum(a, b) => a.eval(z) + b.eval(z),
            Func::Product(a, b) => a.eval(z) * b.eval(z),
            Func::TimesZ(f) => z.value() * f.eval(z),
            Func::BackShift(f) => back_shift_value(f, z),
        }
    }

    pub fn sample(&self, pts: &[DiskPoint]) -> Vec<C64> {
        pts.iter().map(|&z| self.eval(z)).collect()
    }
}

/// Difference quotient away from the origin; near it, the Cauchy integral
/// S*g(z) = (1/2π) ∮ g(ζ) / (ζ - z) dθ over |ζ| = 0.6, which avoids the
/// cancellation in g(z) - g(0).
fn back_shift_value(f: &Func, z: DiskPoint) -> C64 {
    let zv = z.value();
    if zv.norm() >= DIRECT_QUOTIENT_MIN {
        return (f.eval(z) - f.eval(DiskPoint::origin())) / zv;
    }
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..CAUCHY_NODES {
        let zeta = C64::from_polar(CAUCHY_RADIUS, 2.0 * std::f64::consts::PI * k as f64 / CAUCHY_NODES as f64);
        let p = DiskPoint::new(zeta).expect("contour lies inside the disk");
        acc += f.eval(p) / (zeta - zv);
    }
    acc / CAUCHY_NODES as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adjoint {
    Xstar,
    Ystar,
    Zstar,
}

impl FromStr for Adjoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xstar" | "Xstar" => Ok(Adjoint::Xstar),
            "ystar" | "Ystar" => Ok(Adjoint::Ystar),
            "zstar" | "Zstar" => Ok(Adjoint::Zstar),
            _ => Err(Error::Parameter(format!("unknown adjoint '{s}'"))),
        }
    }
}

/// Adjoints of the restricted backward shifts X = S*|H(1/φ), Y = S*|K(φ),
/// Z = S*|L(φ), and the map V: K(φ) → H(1/φ), h ↦ h/φ.
#[derive(Debug, Clone)]
pub struct ShiftModel {
    phi: Symbol,
    sstar_phi: Symbol,
    inv_phi: Option<Symbol>,
    sstar_inv_phi: Option<Symbol>,
}

impl ShiftModel {
    pub fn new(phi: &Symbol) -> Result<Self> {
        let inv_phi = phi.reciprocal().ok();
        let sstar_inv_phi = inv_phi.as_ref().map(|b| b.backward_shift());
        Ok(ShiftModel {
            phi: phi.clone(),
            sstar_phi: phi.backward_shift(),
            inv_phi,
            sstar_inv_phi,
        })
    }

    pub fn phi(&self) -> &Symbol {
        &self.phi
    }

    pub fn sstar_phi(&self) -> &Symbol {
        &self.sstar_phi
    }

    fn inverse(&self) -> Result<(&Symbol, &Symbol)> {
        match (&self.inv_phi, &self.sstar_inv_phi) {
            (Some(b), Some(sb)) => Ok((b, sb)),
            _ => Err(Error::NotInvertible(format!("1/φ for φ = {}", self.phi))),
        }
    }

    /// X*h = zh - <h, S*(1/φ)> (1/φ); Y*h = zh + <h, S*φ> φ; Z*h = zh - <h, S*φ> φ.
    pub fn apply_adjoint(&self, which: Adjoint, h: &KernelSection) -> Result<Func> {
        let want = match which {
            Adjoint::Xstar => SectionSpace::H,
            Adjoint::Ystar => SectionSpace::K,
            Adjoint::Zstar => SectionSpace::L,
        };
        if h.space != want || h.phi != self.phi {
            return Err(Error::SpaceMismatch(format!(
                "{which:?} acts on {want} over {}, got {} over {}",
                self.phi, h.space, h.phi
            )));
        }
        let shifted = Func::Section(Box::new(h.clone())).times_z();
        Ok(match which {
            Adjoint::Xstar => {
                let (b, sb) = self.inverse()?;
                let s = h.pair_with(|p| sb.eval(p));
                shifted.minus(Func::Symbol(b.clone()).scaled(s))
            }
            Adjoint::Ystar => {
                let s = h.pair_with(|p| self.sstar_phi.eval(p));
                shifted.plus(Func::Symbol(self.phi.clone()).scaled(s))
            }
            Adjoint::Zstar => {
                let s = h.pair_with(|p| self.sstar_phi.eval(p));
                shifted.minus(Func::Symbol(self.phi.clone()).scaled(s))
            }
        })
    }

    /// V h = h/φ. On kernels V K^K_μ = conj(φ(μ)) K^H_μ, so V is a
    /// coefficient reweighting.
    pub fn v(&self, h: &KernelSection) -> Result<KernelSection> {
        if h.space != SectionSpace::K {
            return Err(Error::SpaceMismatch(format!("V acts on k_space, got {}", h.space)));
        }
        h.reweighted(SectionSpace::H, |mu| self.phi.eval(mu).conj())
    }

    /// V⁻¹ g = φ g.
    pub fn v_inv(&self, g: &KernelSection) -> Result<KernelSection> {
        if g.space != SectionSpace::H {
            return Err(Error::SpaceMismatch(format!("V⁻¹ acts on h_space, got {}", g.space)));
        }
        g.reweighted(SectionSpace::K, |mu| 1.0 / self.phi.eval(mu).conj())
    }
}

/// max over point pairs of |K_K(λ,z) - conj φ(λ) K_H(λ,z) φ(z)|, the kernel
/// form of K(φ) = T_φ H(1/φ).
pub fn v_isometry_residual(phi: &Symbol, pairs: &[(DiskPoint, DiskPoint)]) -> Result<f64> {
    let k = KernelSpec::new(KernelFamily::KSpace, Some(phi.clone()))?;
    let h = KernelSpec::new(KernelFamily::HSpace, Some(phi.reciprocal()?))?;
    Ok(pairs
        .iter()
        .map(|&(l, z)| {
            let lhs = kernel_value(&k, l, z);
            let rhs = phi.eval(l).conj() * kernel_value(&h, l, z) * phi.eval(z);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max))
}

/// All ordered pairs of a point set.
pub fn all_pairs(pts: &PointSet) -> Vec<(DiskPoint, DiskPoint)> {
    let p = pts.points();
    p.iter().flat_map(|&a| p.iter().map(move |&b| (a, b))).collect()
}

/// `n` seeded pairs of points in the disk of radius `rho`.
pub fn random_pairs(n: usize, rho: f64, seed: u64) -> Result<Vec<(DiskPoint, DiskPoint)>> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| Ok((DiskPoint::new(rng.disk(rho))?, DiskPoint::new(rng.disk(rho))?)))
        .collect()
}

/// |<h, g>_K - <Vh, Vg>_H| for sections of K(φ).
pub fn section_isometry_residual(model: &ShiftModel, h: &KernelSection, g: &KernelSection) -> Result<f64> {
    let lhs = inner_product(h, g)?;
    let rhs = inner_product(&model.v(h)?, &model.v(g)?)?;
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOneReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// σ₂/σ₁, or 0 when σ₁ vanishes.
    pub sigma_ratio: f64,
    /// Max deviation of the sampled outputs from multiples of
    /// 1 - 1/(conj φ(0) φ(z)), relative to the largest output.
    pub proportionality_defect: f64,
    /// Max deviation from s_j (1 - 1/(conj φ(0) φ(z))) with
    /// s_j = conj(S*φ(μ_j) / φ(μ_j)), relative to the largest output.
    pub formula_mismatch: f64,
    pub degenerate: bool,
    pub notes: Vec<String>,
}

/// Builds D = V Y* V⁻¹ - X* on the kernels K^H_{μ_j} of H(1/φ), samples the
/// outputs at `eval_pts`, and measures how far D is from the predicted rank
/// one operator g ↦ <φg, S*φ>_K (1 - 1/(conj φ(0) φ)).
pub fn rank_one_perturbation_check(phi: &Symbol, nodes: &PointSet, eval_pts: &PointSet) -> Result<RankOneReport> {
    let phi0 = phi.at_zero();
    if phi0.norm() == 0.0 {
        return Err(Error::Precondition("φ(0) = 0".into()));
    }
    KernelSpec::new(KernelFamily::KSpace, Some(phi.clone()))?;
    let model = ShiftModel::new(phi)?;
    let evals = eval_pts.points();
    let mut outputs = CMatrix::zeros(evals.len(), nodes.len());
    let mut xstar_scale: f64 = 0.0;
    for (j, &mu) in nodes.points().iter().enumerate() {
        let g = KernelSection::kernel(SectionSpace::H, phi, mu)?;
        let inv_phi = phi.reciprocal()?;
        let y = model.apply_adjoint(Adjoint::Ystar, &model.v_inv(&g)?)?;
        let vy = y.times(Func::Symbol(inv_phi));
        let x = model.apply_adjoint(Adjoint::Xstar, &g)?;
        for (k, &z) in evals.iter().enumerate() {
            let xv = x.eval(z);
            xstar_scale = xstar_scale.max(xv.norm());
            outputs[(k, j)] = vy.eval(z) - xv;
        }
    }

    let profile: Vec<C64> = evals
        .iter()
        .map(|&z| 1.0 - 1.0 / (phi0.conj() * phi.eval(z)))
        .collect();
    let profile_norm2: f64 = profile.iter().map(|c| c.norm_sqr()).sum();
    let out_scale = outputs.max_abs();
    let rel = |x: f64| if out_scale > 0.0 { x / out_scale } else { x };

    let mut defect: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for (j, &mu) in nodes.points().iter().enumerate() {
        let col = outputs.column(j);
        let alpha = if profile_norm2 > 0.0 {
            profile.iter().zip(&col).map(|(p, c)| p.conj() * c).sum::<C64>() / profile_norm2
        } else {
            C64::new(0.0, 0.0)
        };
        let s = (model.sstar_phi.eval(mu) / phi.eval(mu)).conj();
        for (k, c) in col.iter().enumerate() {
            defect = defect.max((c - alpha * profile[k]).norm());
            mismatch = mismatch.max((c - s * profile[k]).norm());
        }
    }

    let degenerate = phi.is_constant() || out_scale <= 1e-13 * xstar_scale.max(1.0);
    let (mut rank, sigma) = numerical_rank(&outputs, RANK_TOL);
    if degenerate {
        rank = 0;
    }
    let sigma_ratio = if sigma.len() > 1 && sigma[0] > 0.0 { sigma[1] / sigma[0] } else { 0.0 };
    let mut notes = vec![
        "predicted scalar uses <φh, S*φ> (the S*φ reading of the closing formula)".to_string(),
    ];
    if degenerate {
        notes.push("degenerate: D vanishes (S*φ = 0)".into());
    }
    Ok(RankOneReport {
        rank,
        singular_values: sigma,
        sigma_ratio,
        proportionality_defect: rel(defect),
        formula_mismatch: rel(mismatch),
        degenerate,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    /// max |S*(h1 + h2) - (S*h1 + S*h2)| over the evaluation points.
    pub diagram_residual: f64,
    /// max |(Y*h1 + Z*h2 - z(h1 + h2)) - (<h1,S*φ>_K - <h2,S*φ>_L) φ|.
    pub rank_one_residual: f64,
    pub scalar: C64,
}

/// Checks for the sum map T(h1 ⊕ h2) = h1 + h2 from K(φ) ⊕ L(φ) to H².
pub fn pairing_checks(phi: &Symbol, h1: &KernelSection, h2: &KernelSection, eval_pts: &PointSet) -> Result<PairingReport> {
    KernelSpec::new(KernelFamily::LSpace, Some(phi.clone()))?;
    let model = ShiftModel::new(phi)?;
    let f1 = Func::Section(Box::new(h1.clone()));
    let f2 = Func::Section(Box::new(h2.clone()));
    let shift_of_sum = f1.clone().plus(f2.clone()).back_shift();
    let sum_of_shifts = f1.clone().back_shift().plus(f2.clone().back_shift());

    let lhs = model
        .apply_adjoint(Adjoint::Ystar, h1)?
        .plus(model.apply_adjoint(Adjoint::Zstar, h2)?)
        .minus(f1.plus(f2).times_z());
    let scalar = h1.pair_with(|p| model.sstar_phi.eval(p)) - h2.pair_with(|p| model.sstar_phi.eval(p));
    let rhs = Func::Symbol(phi.clone()).scaled(scalar);

    let mut diagram: f64 = 0.0;
    let mut rank_one: f64 = 0.0;
    for &z in eval_pts.points() {
        diagram = diagram.max((shift_of_sum.eval(z) - sum_of_shifts.eval(z)).norm());
        rank_one = rank_one.max((lhs.eval(z) - rhs.eval(z)).norm());
    }
    Ok(PairingReport {
        diagram_residual: diagram,
        rank_one_residual: rank_one,
        scalar,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// Kernel form of H² = K(φ) + L(φ).
    pub kernel_residual: f64,
    pub order: usize,
    /// ||[I - √P √P]^{1/2} - √Q|| with P, Q the compressions of
    /// 2I - T_φT_φ* and T_φT_φ* - I.
    pub identity4_residual: f64,
    /// ||[I - √Q √Q]^{1/2} - √P||.
    pub identity5_residual: f64,
    pub min_eig_p: f64,
    pub min_eig_q: f64,
}

pub fn hardy_decomposition_check(phi: &Symbol, pts: &PointSet, n: usize) -> Result<DecompositionReport> {
    let k = KernelSpec::new(KernelFamily::KSpace, Some(phi.clone()))?;
    let l = KernelSpec::new(KernelFamily::LSpace, Some(phi.clone()))?;
    let kernel_residual = kernel_sum_residual(&k, &l, &KernelSpec::szego(), pts);

    let a = product_compression(phi, n, Space::Hardy);
    let id = HermitianMatrix::identity(n + 1);
    let p = id.combine(2.0, &a, -1.0);
    let q = a.combine(1.0, &id, -1.0);
    let sp = sqrt_psd(&p);
    let sq = sqrt_psd(&q);
    let square = |s: &HermitianMatrix| {
        let m = s.as_matrix();
        HermitianMatrix::from_fn_symmetrized(n + 1, |i, j| (m * m)[(i, j)])
    };
    let lhs4 = sqrt_psd(&id.combine(1.0, &square(&sp), -1.0));
    let lhs5 = sqrt_psd(&id.combine(1.0, &square(&sq), -1.0));
    Ok(DecompositionReport {
        kernel_residual,
        order: n,
        identity4_residual: lhs4.max_diff(&sq),
        identity5_residual: lhs5.max_diff(&sp),
        min_eig_p: crate::hermit::min_eig(&p).0,
        min_eig_q: crate::hermit::min_eig(&q).0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceEvidence {
    /// ||A x - S*h|| / ||S*h|| for the least-squares fit over the refined kernels.
    pub relative_residual: f64,
    pub refined_nodes: usize,
    pub sample_points: usize,
}

/// Least-squares fit of S*h by kernels of the same space at the nodes of h
/// plus 3× as many seeded nodes, sampled on twice as many points again.
pub fn shift_invariance_evidence(h: &KernelSection, rho_max: f64, seed: u64) -> Result<InvarianceEvidence> {
    let base = h.nodes.len().max(1);
    let extra = random_points(3 * base, rho_max, seed)?;
    let mut nodes: Vec<DiskPoint> = h.nodes.clone();
    for &p in extra.points() {
        if nodes.iter().all(|q| (q.value() - p.value()).norm() > 1e-6) {
            nodes.push(p);
        }
    }
    let samples = random_points(2 * nodes.len() + 8, rho_max, seed.wrapping_add(1))?;
    let target = Func::Section(Box::new(h.clone())).back_shift().sample(samples.points());
    let a = CMatrix::from_fn(samples.len(), nodes.len(), |k, i| {
        kernel_value(&h.spec, nodes[i], samples.points()[k])
    });
    let x = lstsq(&a, &target, 1e-13);
    let fit = a.mul_vec(&x);
    let num: f64 = fit.iter().zip(&target).map(|(f, t)| (f - t).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = target.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
    Ok(InvarianceEvidence {
        relative_residual: if den > 0.0 { num / den } else { num },
        refined_nodes: nodes.len(),
        sample_points: samples.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproducingReport {
    /// max_j |<h, K_{μ_j}> - h(μ_j)| / max_j |h(μ_j)|.
    pub relative_residual: f64,
    pub condition_number: f64,
}

/// Checks <h, K_μ> = h(μ) at every node for a seeded random section, with
/// the inner product taken through the Gram matrix and h(μ) by direct
/// evaluation.
pub fn reproducing_property_check(space: SectionSpace, phi: &Symbol, nodes: &PointSet, seed: u64) -> Result<ReproducingReport> {
    let mut rng = SplitMix64::new(seed);
    let coeffs: Vec<C64> = (0..nodes.len())
        .map(|_| C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    let h = KernelSection::new(space, phi, nodes, coeffs)?;
    let cond = condition_number(&crate::kernels::gram(&h.spec, nodes));
    // the nodes themselves plus as many points away from them
    let rho = nodes.values().iter().fold(0.0, |a: f64, z| a.max(z.norm())).max(0.1);
    let extra = crate::points::random_points(nodes.len(), rho, seed ^ 0x5eed)?;
    let mut worst: f64 = 0.0;
    let mut top: f64 = 0.0;
    for &mu in nodes.points().iter().chain(extra.points()) {
        let via_kernel = inner_product(&h, &KernelSection::kernel(space, phi, mu)?)?;
        let direct = h.eval(mu);
        top = top.max(direct.norm());
        worst = worst.max((via_kernel - direct).norm());
    }
    Ok(ReproducingReport {
        relative_residual: if top > 0.0 { worst / top } else { worst },
        condition_number: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::polar_grid;

    fn sym(s: &str) -> Symbol {
        s.parse().unwrap()
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn origin() -> DiskPoint {
        DiskPoint::origin()
    }

    #[test]
    fn inner_product_examples() {
        let two = Symbol::real_constant(2.0).unwrap();
        let h = KernelSection::kernel(SectionSpace::K, &two, origin()).unwrap();
        assert!((inner_product(&h, &h).unwrap() - c(3.0)).norm() < 1e-15);

        let k = Symbol::real_constant(1.2).unwrap();
        let h = KernelSection::kernel(SectionSpace::L, &k, origin()).unwrap();
        assert!((inner_product(&h, &h).unwrap() - c(0.56)).norm() < 1e-15);

        let other = KernelSection::kernel(SectionSpace::K, &k, origin()).unwrap();
        assert!(matches!(inner_product(&h, &other), Err(Error::SpaceMismatch(_))));

        // L(φ) needs |φ| < √2
        assert!(KernelSection::kernel(SectionSpace::L, &two, origin()).is_err());
    }

    #[test]
    fn random_sections_have_nonnegative_norm() {
        let phi = sym("poly:1.2,0.1");
        let nodes = random_points(8, 0.8, 3).unwrap();
        for seed in 0..100 {
            let mut rng = SplitMix64::new(seed);
            let coeffs = (0..8).map(|_| C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))).collect();
            let h = KernelSection::new(SectionSpace::K, &phi, &nodes, coeffs).unwrap();
            let n = inner_product(&h, &h).unwrap();
            assert!(n.re >= -1e-12 && n.im.abs() < 1e-12, "seed {seed}: {n}");
        }
    }

    #[test]
    fn sstar_examples() {
        let s = sstar_symbol(&sym("poly:1.2,0.1"));
        assert!(s.is_constant());
        assert!((s.at_zero() - c(0.1)).norm() < 1e-16);
        assert!(sstar_symbol(&Symbol::real_constant(3.0).unwrap()).at_zero() == c(0.0));

        // S*(1/φ) + S*φ / (φ(0) φ) = 0
        let phi = sym("scale:4(recip(poly:2,1))");
        let a = sstar_reciprocal(&phi).unwrap();
        let b = sstar_symbol(&phi);
        let phi0 = phi.at_zero();
        for &z in random_points(50, 0.95, 9).unwrap().points() {
            let r = a.eval(z) + b.eval(z) / (phi0 * phi.eval(z));
            assert!(r.norm() < 1e-12, "{r}");
        }
        assert!(matches!(sstar_reciprocal(&sym("poly:0,1.5")), Err(Error::Precondition(_))));
    }

    #[test]
    fn backward_shift_of_sections_matches_difference_quotient() {
        let phi = sym("poly:1.2,0.1");
        let h = KernelSection::kernel(SectionSpace::K, &phi, DiskPoint::new(C64::new(0.3, 0.2)).unwrap()).unwrap();
        let f = Func::Section(Box::new(h.clone())).back_shift();
        // exact: h = (αφ - 1)/(1 - m z) with m = conj(μ); S*h = (N1 + N0 m)/(1 - m z)
        let mu = C64::new(0.3, 0.2);
        let alpha = phi.eval(DiskPoint::new(mu).unwrap()).conj();
        let (n0, n1) = (alpha * 1.2 - 1.0, alpha * 0.1);
        for z in [C64::new(0.0, 0.0), C64::new(0.1, -0.05), C64::new(0.5, 0.4), C64::new(-0.8, 0.0)] {
            let want = (n1 + n0 * mu.conj()) / (1.0 - mu.conj() * z);
            assert!((f.eval(DiskPoint::new(z).unwrap()) - want).norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn adjoint_examples() {
        let phi = sym("poly:1.2,0.1");
        let model = ShiftModel::new(&phi).unwrap();
        let h = KernelSection::kernel(SectionSpace::K, &phi, origin()).unwrap();
        let y = model.apply_adjoint(Adjoint::Ystar, &h).unwrap();
        for z in [0.0, 0.3, -0.7] {
            let p = DiskPoint::real(z).unwrap();
            let want = 0.12 + 0.45 * z + 0.12 * z * z;
            assert!((y.eval(p) - c(want)).norm() < 1e-15);
        }

        let k = Symbol::real_constant(1.3).unwrap();
        let m = ShiftModel::new(&k).unwrap();
        let h = KernelSection::kernel(SectionSpace::K, &k, DiskPoint::real(0.4).unwrap()).unwrap();
        let y = m.apply_adjoint(Adjoint::Ystar, &h).unwrap();
        let p = DiskPoint::new(C64::new(0.2, 0.5)).unwrap();
        assert!((y.eval(p) - p.value() * h.eval(p)).norm() < 1e-15);

        let two = Symbol::real_constant(2.0).unwrap();
        let m = ShiftModel::new(&two).unwrap();
        let h = KernelSection::kernel(SectionSpace::H, &two, origin()).unwrap();
        let x = m.apply_adjoint(Adjoint::Xstar, &h).unwrap();
        assert!((x.eval(p) - p.value() * h.eval(p)).norm() < 1e-15);
        assert!(m.apply_adjoint(Adjoint::Ystar, &h).is_err());
    }

    #[test]
    fn v_isometry_examples() {
        let two = Symbol::real_constant(2.0).unwrap();
        assert_eq!(v_isometry_residual(&two, &[(origin(), origin())]).unwrap(), 0.0);
        let grid = polar_grid(2, 10, 0.9).unwrap();
        assert!(v_isometry_residual(&sym("scale:4(recip(poly:2,1))"), &all_pairs(&grid)).unwrap() < 1e-12);
        let pairs = random_pairs(50, 0.9, 11).unwrap();
        assert!(v_isometry_residual(&sym("poly:1.2,0.1"), &pairs).unwrap() < 1e-12);
        assert!(v_isometry_residual(&sym("poly:0.5,0.1"), &pairs).is_err());
    }

    #[test]
    fn v_preserves_inner_products() {
        let phi = sym("poly:1.2,0.1");
        let model = ShiftModel::new(&phi).unwrap();
        let nodes = random_points(6, 0.8, 21).unwrap();
        let mut rng = SplitMix64::new(4);
        let mut coeffs = || (0..6).map(|_| C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))).collect();
        let h = KernelSection::new(SectionSpace::K, &phi, &nodes, coeffs()).unwrap();
        let g = KernelSection::new(SectionSpace::K, &phi, &nodes, coeffs()).unwrap();
        assert!(section_isometry_residual(&model, &h, &g).unwrap() < 1e-10);
        // V⁻¹ V = id on coefficients
        let back = model.v_inv(&model.v(&h).unwrap()).unwrap();
        for (a, b) in back.coeffs().iter().zip(h.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
        // V h = h / φ pointwise
        let vh = model.v(&h).unwrap();
        for &z in random_points(10, 0.9, 8).unwrap().points() {
            assert!((vh.eval(z) - h.eval(z) / phi.eval(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_one_examples() {
        let nodes = random_points(12, 0.7, 31).unwrap();
        let evals = random_points(30, 0.9, 32).unwrap();
        let two = Symbol::real_constant(2.0).unwrap();
        let r = rank_one_perturbation_check(&two, &nodes, &evals).unwrap();
        assert_eq!(r.rank, 0);
        assert!(r.degenerate);

        for s in ["poly:1.2,0.1", "scale:4(recip(poly:2,1))"] {
            let r = rank_one_perturbation_check(&sym(s), &nodes, &evals).unwrap();
            assert_eq!(r.rank, 1, "{s}: {:?}", r.singular_values);
            assert!(r.sigma_ratio < 1e-8, "{s}: {}", r.sigma_ratio);
            assert!(r.proportionality_defect < 1e-9, "{s}: {}", r.proportionality_defect);
            assert!(r.formula_mismatch < 1e-9, "{s}: {}", r.formula_mismatch);
        }
        assert!(rank_one_perturbation_check(&sym("poly:0,2"), &nodes, &evals).is_err());
    }

    #[test]
    fn pairing_examples() {
        let phi = sym("poly:1.2,0.1");
        let evals = random_points(30, 0.9, 5).unwrap();
        let z1 = KernelSection::zero(SectionSpace::K, &phi).unwrap();
        let z2 = KernelSection::zero(SectionSpace::L, &phi).unwrap();
        let r = pairing_checks(&phi, &z1, &z2, &evals).unwrap();
        assert_eq!((r.diagram_residual, r.rank_one_residual), (0.0, 0.0));

        let h1 = KernelSection::kernel(SectionSpace::K, &phi, origin()).unwrap();
        let h2 = KernelSection::kernel(SectionSpace::L, &phi, DiskPoint::real(0.3).unwrap()).unwrap();
        let r = pairing_checks(&phi, &h1, &h2, &evals).unwrap();
        assert!(r.diagram_residual < 1e-12, "{}", r.diagram_residual);
        assert!(r.rank_one_residual < 1e-10, "{}", r.rank_one_residual);
    }

    #[test]
    fn decomposition_examples() {
        let k = Symbol::real_constant(1.2).unwrap();
        let r = hardy_decomposition_check(&k, &PointSet::from_points(vec![C64::new(0.0, 0.0)], 0.5).unwrap(), 32).unwrap();
        assert!(r.kernel_residual < 1e-15);
        assert!(r.identity4_residual < 1e-12 && r.identity5_residual < 1e-12, "{r:?}");

        let r = hardy_decomposition_check(&sym("poly:1.2,0.1"), &polar_grid(1, 19, 0.9).unwrap(), 32).unwrap();
        assert!(r.kernel_residual < 1e-12);
        assert!(r.identity4_residual < 1e-8 && r.identity5_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn reproducing_property_holds() {
        let phi = sym("poly:1.2,0.1");
        let nodes = random_points(10, 0.7, 2).unwrap();
        for space in [SectionSpace::K, SectionSpace::L, SectionSpace::H] {
            let r = reproducing_property_check(space, &phi, &nodes, 17).unwrap();
            assert!(r.relative_residual < 1e-11, "{space}: {r:?}");
            assert!(r.condition_number.is_finite());
        }
    }

    #[test]
    fn shift_invariance_is_reported() {
        let phi = sym("poly:1.2,0.1");
        let nodes = random_points(4, 0.7, 12).unwrap();
        let h = KernelSection::new(SectionSpace::K, &phi, &nodes, vec![c(1.0), c(-0.5), C64::new(0.0, 0.3), c(0.2)]).unwrap();
        let e = shift_invariance_evidence(&h, 0.7, 99).unwrap();
        assert!(e.relative_residual.is_finite());
        assert_eq!(e.refined_nodes, 16);
    }
}
