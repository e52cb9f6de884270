//! Truncated Fock spaces: `N` catalog modes, each with occupations
//! `0..=n_max`, realized as dense matrices.
//!
//! Basis vectors are indexed by `Σ_a n_a (n_max+1)^a`, so the vacuum has index
//! 0. The Hamiltonian `H = Σ_a ω_a a_a† a_a` is diagonal in this basis.

use alloc::vec::Vec;
use num_traits::Float;

use super::{Moments, StateSpec};
use crate::{
    error::invalid, linalg, mode_catalog::ModeCatalog, window::Bump, CMat, CVec, Error,
    Result, C64,
};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct FockTruncation {
    modes: Vec<usize>,
    omegas: Vec<f64>,
    n_max: usize,
    dim: usize,
    lowering: Vec<CMat>,
    energies: Vec<f64>,
}

impl FockTruncation {
    /// The first `n_modes` catalog modes with occupancy cap `n_max`.
    pub fn new(cat: &ModeCatalog, n_modes: usize, n_max: usize) -> Result<Self> {
        Self::with_modes(cat, &(0..n_modes).collect::<Vec<_>>(), n_max, DEFAULT_DIMENSION_CAP)
    }

    /// Explicit catalog mode list and dimension cap.
    pub fn with_modes(cat: &ModeCatalog, modes: &[usize], n_max: usize, cap: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(invalid!("truncation needs at least one mode"));
        }
        if n_max < 1 {
            return Err(invalid!("occupancy cap must be at least 1"));
        }
        for (i, &j) in modes.iter().enumerate() {
            cat.check_mode(j)?;
            if modes[..i].contains(&j) {
                return Err(invalid!("mode {j} listed twice in truncation"));
            }
        }
        let base = n_max + 1;
        let mut dim = 1usize;
        for _ in modes {
            dim = match dim.checked_mul(base) {
                Some(d) if d <= cap => d,
                _ => {
                    return Err(Error::DimensionCap {
                        dim: base.saturating_pow(modes.len() as u32),
                        cap,
                    })
                }
            };
        }
        let omegas: Vec<f64> = modes.iter().map(|&j| cat.omegas()[j]).collect();
        let mut lowering = Vec::with_capacity(modes.len());
        let mut stride = 1usize;
        for _ in modes {
            let mut a = CMat::zeros(dim, dim);
            for idx in 0..dim {
                let n = (idx / stride) % base;
                if n > 0 {
                    a[(idx - stride, idx)] = C64::new((n as f64).sqrt(), 0.0);
                }
            }
            lowering.push(a);
            stride *= base;
        }
        let mut energies = alloc::vec![0.0; dim];
        for (idx, e) in energies.iter_mut().enumerate() {
            let mut rest = idx;
            for w in &omegas {
                *e += w * (rest % base) as f64;
                rest /= base;
            }
        }
        Ok(Self {
            modes: modes.to_vec(),
            omegas,
            n_max,
            dim,
            lowering,
            energies,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Catalog indices of the included modes.
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Diagonal of `H`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn hamiltonian(&self) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(self.dim, self.energies.iter().map(|&e| C64::new(e, 0.0))))
    }

    /// Annihilator of the `a`-th included mode.
    pub fn annihilation(&self, a: usize) -> &CMat {
        &self.lowering[a]
    }

    pub fn creation(&self, a: usize) -> CMat {
        self.lowering[a].adjoint()
    }

    pub fn number(&self, a: usize) -> CMat {
        self.creation(a) * &self.lowering[a]
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim, self.dim)
    }

    /// Slot of a catalog mode within the truncation.
    pub fn slot_of(&self, catalog_mode: usize) -> Result<usize> {
        self.modes
            .iter()
            .position(|&j| j == catalog_mode)
            .ok_or_else(|| invalid!("mode {catalog_mode} is not part of the truncation"))
    }

    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes.len() {
            return Err(invalid!("expected {} occupations, got {}", self.modes.len(), occupations.len()));
        }
        let base = self.n_max + 1;
        let mut idx = 0usize;
        for &n in occupations.iter().rev() {
            if n > self.n_max {
                return Err(invalid!("occupation {n} exceeds cap {}", self.n_max));
            }
            idx = idx * base + n;
        }
        Ok(idx)
    }

    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let base = self.n_max + 1;
        self.modes
            .iter()
            .map(|_| {
                let n = idx % base;
                idx /= base;
                n
            })
            .collect()
    }

    pub fn basis_vector(&self, idx: usize) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[idx] = C64::new(1.0, 0.0);
        v
    }

    pub fn vacuum(&self) -> CVec {
        self.basis_vector(0)
    }

    fn is_top(&self, idx: usize) -> bool {
        self.occupations(idx).contains(&self.n_max)
    }

    /// Norm of the component of `v` with some mode at the occupancy cap.
    pub fn top_level_norm(&self, v: &CVec) -> f64 {
        (0..self.dim).filter(|&i| self.is_top(i)).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of the top occupancy level in a density matrix.
    pub fn top_level_probability(&self, rho: &CMat) -> f64 {
        (0..self.dim).filter(|&i| self.is_top(i)).map(|i| rho[(i, i)].re).sum()
    }

    /// Tensor product of single-mode vectors given as amplitude lists.
    fn product(&self, factors: &[Vec<C64>]) -> CVec {
        let mut v = CVec::zeros(self.dim);
        for idx in 0..self.dim {
            let occ = self.occupations(idx);
            let mut amp = C64::new(1.0, 0.0);
            for (a, &n) in occ.iter().enumerate() {
                amp *= factors[a][n];
            }
            v[idx] = amp;
        }
        v
    }

    fn vacuum_factors(&self) -> Vec<Vec<C64>> {
        let mut f = alloc::vec![alloc::vec![C64::new(0.0, 0.0); self.n_max + 1]; self.modes.len()];
        for row in &mut f {
            row[0] = C64::new(1.0, 0.0);
        }
        f
    }

    /// Truncated vector of a pure state (not renormalized, so the norm defect
    /// measures truncation loss). Mixed states are rejected.
    pub fn pure_vector(&self, spec: &StateSpec) -> Result<CVec> {
        let mut f = self.vacuum_factors();
        let nm = self.n_max;
        match spec {
            StateSpec::Ground => {}
            StateSpec::Coherent { amplitudes } => {
                for &(j, alpha) in amplitudes {
                    let a = self.slot_of(j)?;
                    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
                    f[a][0] = c;
                    for n in 1..=nm {
                        c = c * alpha / (n as f64).sqrt();
                        f[a][n] = c;
                    }
                }
            }
            StateSpec::Squeezed { modes } => {
                for &(j, r, phi) in modes {
                    let a = self.slot_of(j)?;
                    let z = -C64::from_polar(r.tanh(), phi);
                    // amplitude of |2k⟩: (cosh r)^{−1/2} z^k √((2k)!)/(2^k k!)
                    let mut c = C64::new(r.cosh().powf(-0.5), 0.0);
                    f[a][0] = c;
                    let mut k = 1;
                    while 2 * k <= nm {
                        let kf = k as f64;
                        c = c * z * ((2.0 * kf) * (2.0 * kf - 1.0)).sqrt() / (2.0 * kf);
                        f[a][2 * k] = c;
                        k += 1;
                    }
                }
            }
            StateSpec::SingleParticle { mode } => {
                let a = self.slot_of(*mode)?;
                f[a][0] = C64::new(0.0, 0.0);
                f[a][1] = C64::new(1.0, 0.0);
            }
            StateSpec::SuperposedPair { mode, epsilon } => {
                if nm < 2 {
                    return Err(invalid!("pair state needs an occupancy cap of at least 2"));
                }
                let a = self.slot_of(*mode)?;
                let s = (1.0 + epsilon.norm_sqr()).sqrt().recip();
                f[a][0] = C64::new(s, 0.0);
                f[a][2] = *epsilon * s;
            }
            other => return Err(invalid!("{} state is not pure", other.kind())),
        }
        Ok(self.product(&f))
    }

    /// Thermal state `e^{−βH}/Tr e^{−βH}` on the truncation.
    pub fn kms_density(&self, beta: f64) -> Result<CMat> {
        if !(beta > 0.0) {
            return Err(invalid!("KMS inverse temperature must be positive, got {beta}"));
        }
        let weights: Vec<f64> = self.energies.iter().map(|e| (-beta * e).exp()).collect();
        let z: f64 = weights.iter().sum();
        Ok(CMat::from_diagonal(&CVec::from_iterator(
            self.dim,
            weights.iter().map(|w| C64::new(w / z, 0.0)),
        )))
    }

    /// Density matrix of any state specification.
    pub fn density_matrix(&self, spec: &StateSpec) -> Result<CMat> {
        match spec {
            StateSpec::Kms { beta } => self.kms_density(*beta),
            StateSpec::Mixture { components } => {
                let mut rho = CMat::zeros(self.dim, self.dim);
                for (p, s) in components {
                    rho += self.density_matrix(s)? * C64::new(*p, 0.0);
                }
                Ok(rho)
            }
            pure => {
                let v = self.pure_vector(pure)?;
                Ok(&v * v.adjoint())
            }
        }
    }
}

/// `ℓ(B) = ⟨ψ, B φ⟩` on a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFunctional {
    pub left: CVec,
    pub right: CVec,
}

impl MatrixFunctional {
    pub fn new(left: CVec, right: CVec) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::Mismatch(alloc::format!(
                "functional vectors have lengths {} and {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Self { left, right })
    }

    /// The state functional of a vector, `ℓ(B) = ⟨ψ, Bψ⟩`.
    pub fn expectation(v: CVec) -> Self {
        Self {
            left: v.clone(),
            right: v,
        }
    }

    pub fn eval(&self, b: &CMat) -> C64 {
        self.left.dotc(&(b * &self.right))
    }

    /// `ℓ(1) = ⟨ψ, φ⟩`.
    pub fn unit(&self) -> C64 {
        self.left.dotc(&self.right)
    }

    /// Quadratic moments over the catalog modes of `trunc`.
    pub fn moments(&self, trunc: &FockTruncation) -> Result<Moments> {
        if self.left.len() != trunc.dim() {
            return Err(Error::Mismatch(alloc::format!(
                "functional of dimension {} on truncation of dimension {}",
                self.left.len(),
                trunc.dim()
            )));
        }
        let n = trunc.modes().len();
        let a_right: Vec<CVec> = (0..n).map(|a| trunc.annihilation(a) * &self.right).collect();
        let ad_right: Vec<CVec> = (0..n).map(|a| trunc.annihilation(a).adjoint() * &self.right).collect();
        let a_left: Vec<CVec> = (0..n).map(|a| trunc.annihilation(a) * &self.left).collect();
        let ad_left: Vec<CVec> = (0..n).map(|a| trunc.annihilation(a).adjoint() * &self.left).collect();
        let mut m = Moments::zero();
        m.unit = self.unit();
        let modes = trunc.modes();
        for j in 0..n {
            for k in 0..n {
                // ℓ(a_j a_k) = ⟨a_j† ψ, a_k φ⟩, ℓ(a_j† a_k) = ⟨a_j ψ, a_k φ⟩,
                // ℓ(a_j† a_k†) = ⟨a_j ψ, a_k† φ⟩
                m.aa.push((modes[j], modes[k], ad_left[j].dotc(&a_right[k])));
                m.ada.push((modes[j], modes[k], a_left[j].dotc(&a_right[k])));
                m.adad.push((modes[j], modes[k], a_left[j].dotc(&ad_right[k])));
            }
        }
        Ok(m)
    }
}

/// `Φ(t,x) = Σ_a (φ_a(t,x) a_a + φ̄_a(t,x) a_a†)` over the included modes.
pub fn field_operator(trunc: &FockTruncation, cat: &ModeCatalog, t: f64, x: f64) -> Result<CMat> {
    let mut coeffs = Vec::with_capacity(trunc.modes().len());
    for &j in trunc.modes() {
        coeffs.push(cat.solution_jet(j, t, x)?.v);
    }
    Ok(ladder_combination(trunc, &coeffs))
}

/// `∂_t Φ(t,x)`.
pub fn field_velocity_operator(trunc: &FockTruncation, cat: &ModeCatalog, t: f64, x: f64) -> Result<CMat> {
    let mut coeffs = Vec::with_capacity(trunc.modes().len());
    for &j in trunc.modes() {
        let jet = cat.solution_jet(j, t, x)?;
        coeffs.push(jet.v * C64::new(0.0, -cat.omegas()[j]));
    }
    Ok(ladder_combination(trunc, &coeffs))
}

/// `Σ_a (z_a a_a + z̄_a a_a†)`.
fn ladder_combination(trunc: &FockTruncation, z: &[C64]) -> CMat {
    let mut op = CMat::zeros(trunc.dim(), trunc.dim());
    for (a, &za) in z.iter().enumerate() {
        op += trunc.annihilation(a) * za;
    }
    let ad = op.adjoint();
    op + ad
}

/// `Φ(c) = Σ_a (c̄_a a_a + c_a a_a†)`, the field smeared against the real
/// solution `u = Σ_a (c_a φ_a + c.c.)` so that `[Φ(c), Φ(d)] = iσ(u_c, u_d)`
/// with `σ = 2 Im(c̄·d)`.
pub fn smeared_field(trunc: &FockTruncation, c: &[C64]) -> Result<CMat> {
    if c.len() > trunc.modes().len() {
        return Err(invalid!(
            "{} smearing coefficients for a truncation of {} modes",
            c.len(),
            trunc.modes().len()
        ));
    }
    let z: Vec<C64> = c.iter().map(|v| v.conj()).collect();
    Ok(ladder_combination(trunc, &z))
}

/// Weyl operator `W(u) = e^{iΦ(c)}`.
pub fn weyl_operator(trunc: &FockTruncation, c: &[C64]) -> Result<CMat> {
    Ok(linalg::expi_hermitian(&smeared_field(trunc, c)?))
}

/// `α_f A = ∫ f(t) e^{iHt} A e^{−iHt} dt`, i.e. `(α_f A)_{ab} = A_{ab} f̂(E_a − E_b)`.
///
/// Each distinct transform value is certified by panel doubling to `1e−10`
/// relative to `‖f‖_{L¹}`.
pub fn smear_operator(trunc: &FockTruncation, a: &CMat, f: &Bump) -> Result<CMat> {
    if a.nrows() != trunc.dim() || a.ncols() != trunc.dim() {
        return Err(Error::Mismatch(alloc::format!(
            "operator of shape {}x{} on truncation of dimension {}",
            a.nrows(),
            a.ncols(),
            trunc.dim()
        )));
    }
    let scale = f.l1_norm().max(f64::MIN_POSITIVE);
    let e = trunc.energies();
    let mut cache: Vec<(f64, C64)> = Vec::new();
    let mut out = CMat::zeros(trunc.dim(), trunc.dim());
    for r in 0..trunc.dim() {
        for c in 0..trunc.dim() {
            let v = a[(r, c)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let k = e[r] - e[c];
            let fh = match cache.iter().find(|(kk, _)| (kk - k).abs() <= 1e-13 * (1.0 + k.abs())) {
                Some(&(_, fh)) => fh,
                None => {
                    let (fh, err) = f.fourier_certified(k);
                    if err > 1e-10 * scale {
                        return Err(Error::Quadrature {
                            disagreement: err,
                            tolerance: 1e-10 * scale,
                        });
                    }
                    cache.push((k, fh));
                    fh
                }
            };
            out[(r, c)] = v * fh;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_catalog::build_cylinder_catalog;
    use core::f64::consts::PI;

    fn cat() -> ModeCatalog {
        build_cylinder_catalog(2.0 * PI, 1.0, 5).unwrap()
    }

    #[test]
    fn single_mode_spectrum() {
        let t = FockTruncation::new(&cat(), 1, 4).unwrap();
        assert_eq!(t.dim(), 5);
        assert_eq!(t.energies(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn independent_modes_commute_and_ccr_holds_below_cap() {
        let t = FockTruncation::new(&cat(), 2, 3).unwrap();
        assert_eq!(t.dim(), 16);
        let c = linalg::commutator(t.annihilation(0), &t.creation(1));
        assert_eq!(c.norm(), 0.0);
        let ccr = linalg::commutator(t.annihilation(0), &t.creation(0));
        for i in 0..t.dim() {
            if !t.is_top(i) {
                assert!((ccr[(i, i)] - 1.0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dimension_cap_and_indexing() {
        let c = cat();
        assert!(matches!(
            FockTruncation::with_modes(&c, &[0, 1, 2], 20, 4096),
            Err(Error::DimensionCap { .. })
        ));
        let t = FockTruncation::new(&c, 3, 2).unwrap();
        for idx in 0..t.dim() {
            assert_eq!(t.index_of(&t.occupations(idx)).unwrap(), idx);
        }
    }

    #[test]
    fn coherent_vector_norm() {
        let t = FockTruncation::new(&cat(), 1, 12).unwrap();
        let v = t
            .pure_vector(&StateSpec::Coherent {
                amplitudes: alloc::vec![(0, C64::new(0.5, 0.0))],
            })
            .unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn squeezed_vector_moments_match_closed_form() {
        let c = cat();
        let t = FockTruncation::with_modes(&c, &[1], 60, 4096).unwrap();
        let spec = StateSpec::Squeezed {
            modes: alloc::vec![(1, 0.4, 1.1)],
        };
        let v = t.pure_vector(&spec).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let m = MatrixFunctional::expectation(v).moments(&t).unwrap();
        let closed = spec.moments(&c).unwrap();
        assert!((m.aa[0].2 - closed.aa[0].2).norm() < 1e-12);
        assert!((m.ada[0].2 - closed.ada[0].2).norm() < 1e-12);
    }
}
