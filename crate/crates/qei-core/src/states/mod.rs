//! States in mode space and their one- and two-point structure.
//!
//! Every state, and more generally every linear functional `ℓ` on polynomials
//! in the ladder operators, enters the field-theoretic formulas only through
//! its quadratic moments
//! `ℓ(1)`, `ℓ(a_j a_k)`, `ℓ(a_j† a_k)`, `ℓ(a_j† a_k†)`, collected in [`Moments`].
//! The normal-ordered two-point function is
//!
//! `:w₂:(p,q) = Σ ℓ(a_j a_k) φ_j(p)φ_k(q) + Σ ℓ(a_j† a_k)[φ̄_j(p)φ_k(q) + φ̄_j(q)φ_k(p)]
//!            + Σ ℓ(a_j† a_k†) φ̄_j(p)φ̄_k(q)`
//!
//! and the full one adds `ℓ(1)` times the ground-state two-point function.

mod fock;

pub use fock::{
    field_operator, field_velocity_operator, smear_operator, smeared_field, weyl_operator, FockTruncation,
    MatrixFunctional, DEFAULT_DIMENSION_CAP,
};

use alloc::{collections::BTreeSet, vec::Vec};
use num_traits::Float;

use crate::{error::invalid, mode_catalog::ModeCatalog, Error, Result, C64};

/// Test states of the laboratory. Mode indices are 0-based catalog indices.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Ground,
    Kms { beta: f64 },
    /// Displaced vacuum with `⟨a_j⟩ = α_j`.
    Coherent { amplitudes: Vec<(usize, C64)> },
    /// Product of single-mode squeezed vacua `S(r e^{iφ})|0⟩`.
    Squeezed { modes: Vec<(usize, f64, f64)> },
    SingleParticle { mode: usize },
    /// `(|0⟩ + ε|2_j⟩)/√(1+|ε|²)`.
    SuperposedPair { mode: usize, epsilon: C64 },
    Mixture { components: Vec<(f64, StateSpec)> },
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            StateSpec::Ground => "ground",
            StateSpec::Kms { .. } => "kms",
            StateSpec::Coherent { .. } => "coherent",
            StateSpec::Squeezed { .. } => "squeezed",
            StateSpec::SingleParticle { .. } => "particle",
            StateSpec::SuperposedPair { .. } => "pair",
            StateSpec::Mixture { .. } => "mixture",
        }
    }

    /// Checks parameter ranges and mode indices against a catalog of
    /// `modes` modes.
    pub fn validate(&self, modes: usize) -> Result<()> {
        let check = |j: usize| {
            if j < modes {
                Ok(())
            } else {
                Err(Error::ModeOutOfRange { index: j, count: modes })
            }
        };
        match self {
            StateSpec::Ground => Ok(()),
            StateSpec::Kms { beta } => {
                if *beta > 0.0 && !beta.is_nan() {
                    Ok(())
                } else {
                    Err(invalid!("KMS inverse temperature must be positive, got {beta}"))
                }
            }
            StateSpec::Coherent { amplitudes } => {
                for (j, a) in amplitudes {
                    check(*j)?;
                    if !(a.re.is_finite() && a.im.is_finite()) {
                        return Err(invalid!("coherent amplitude of mode {j} is not finite"));
                    }
                }
                Ok(())
            }
            StateSpec::Squeezed { modes: list } => {
                for &(j, r, phi) in list {
                    check(j)?;
                    if !(r >= 0.0 && r.is_finite()) {
                        return Err(invalid!("squeezing parameter must be non-negative, got {r}"));
                    }
                    if !(0.0..2.0 * core::f64::consts::PI).contains(&phi) {
                        return Err(invalid!("squeezing angle must lie in [0, 2π), got {phi}"));
                    }
                }
                Ok(())
            }
            StateSpec::SingleParticle { mode } => check(*mode),
            StateSpec::SuperposedPair { mode, epsilon } => {
                check(*mode)?;
                if epsilon.re.is_finite() && epsilon.im.is_finite() {
                    Ok(())
                } else {
                    Err(invalid!("pair amplitude is not finite"))
                }
            }
            StateSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(invalid!("mixture needs at least one component"));
                }
                let mut total = 0.0;
                for (p, s) in components {
                    if !(*p > 0.0) {
                        return Err(invalid!("mixture weights must be positive, got {p}"));
                    }
                    total += p;
                    s.validate(modes)?;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid!("mixture weights sum to {total}, expected 1"));
                }
                Ok(())
            }
        }
    }

    /// Quadratic moments of the state on `cat`.
    pub fn moments(&self, cat: &ModeCatalog) -> Result<Moments> {
        self.validate(cat.len())?;
        let mut m = Moments::unit();
        match self {
            StateSpec::Ground => {}
            StateSpec::Kms { beta } => {
                for (j, &w) in cat.omegas().iter().enumerate() {
                    let n = bose_occupation(*beta, w);
                    if n > 0.0 {
                        m.ada.push((j, j, C64::new(n, 0.0)));
                    }
                }
            }
            StateSpec::Coherent { amplitudes } => {
                for &(j, aj) in amplitudes {
                    for &(k, ak) in amplitudes {
                        m.aa.push((j, k, aj * ak));
                        m.ada.push((j, k, aj.conj() * ak));
                        m.adad.push((j, k, (aj * ak).conj()));
                    }
                }
            }
            StateSpec::Squeezed { modes } => {
                for &(j, r, phi) in modes {
                    let s = -C64::from_polar(r.sinh() * r.cosh(), phi);
                    m.ada.push((j, j, C64::new(r.sinh().powi(2), 0.0)));
                    m.aa.push((j, j, s));
                    m.adad.push((j, j, s.conj()));
                }
            }
            StateSpec::SingleParticle { mode } => m.ada.push((*mode, *mode, C64::new(1.0, 0.0))),
            StateSpec::SuperposedPair { mode, epsilon } => {
                let norm = 1.0 + epsilon.norm_sqr();
                let pair = *epsilon * (2.0f64.sqrt() / norm);
                m.ada.push((*mode, *mode, C64::new(2.0 * epsilon.norm_sqr() / norm, 0.0)));
                m.aa.push((*mode, *mode, pair));
                m.adad.push((*mode, *mode, pair.conj()));
            }
            StateSpec::Mixture { components } => {
                let mut acc = Moments::zero();
                for (p, s) in components {
                    acc = acc.add(&s.moments(cat)?.scaled(C64::new(*p, 0.0)));
                }
                m = acc;
            }
        }
        Ok(m)
    }
}

/// `1/(e^{βω} − 1)`.
pub fn bose_occupation(beta: f64, omega: f64) -> f64 {
    let x = beta * omega;
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Quadratic moments of a linear functional, stored as sparse triplets over
/// catalog mode indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub unit: C64,
    /// `(j, k, ℓ(a_j a_k))`
    pub aa: Vec<(usize, usize, C64)>,
    /// `(j, k, ℓ(a_j† a_k))`
    pub ada: Vec<(usize, usize, C64)>,
    /// `(j, k, ℓ(a_j† a_k†))`
    pub adad: Vec<(usize, usize, C64)>,
}

impl Moments {
    pub fn zero() -> Self {
        Self {
            unit: C64::new(0.0, 0.0),
            aa: Vec::new(),
            ada: Vec::new(),
            adad: Vec::new(),
        }
    }

    /// The ground state (normalized, all normal-ordered moments zero).
    pub fn unit() -> Self {
        Self {
            unit: C64::new(1.0, 0.0),
            ..Self::zero()
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        let sc = |v: &Vec<(usize, usize, C64)>| v.iter().map(|&(j, k, x)| (j, k, x * c)).collect();
        Self {
            unit: self.unit * c,
            aa: sc(&self.aa),
            ada: sc(&self.ada),
            adad: sc(&self.adad),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cat = |a: &Vec<(usize, usize, C64)>, b: &Vec<(usize, usize, C64)>| {
            let mut v = a.clone();
            v.extend_from_slice(b);
            v
        };
        Self {
            unit: self.unit + other.unit,
            aa: cat(&self.aa, &other.aa),
            ada: cat(&self.ada, &other.ada),
            adad: cat(&self.adad, &other.adad),
        }
    }

    /// Sorted distinct mode indices carrying nonzero normal-ordered moments.
    pub fn modes(&self) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for &(j, k, _) in self.aa.iter().chain(&self.ada).chain(&self.adad) {
            set.insert(j);
            set.insert(k);
        }
        set.into_iter().collect()
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.modes().last().copied()
    }

    /// Applies a bilinear pairing of mode-solution data to the normal-ordered
    /// expansion: `Σ aa B(X_j(p), X_k(q)) + Σ ada [B(X̄_j(p), X_k(q)) + B(X_k(p), X̄_j(q))]
    /// + Σ adad B(X̄_j(p), X̄_k(q))`, where `at_p(j)` / `at_q(j)` return `X_j`.
    pub fn pair<T: Copy>(
        &self,
        at_p: impl Fn(usize) -> T,
        at_q: impl Fn(usize) -> T,
        conj: impl Fn(T) -> T,
        b: impl Fn(T, T) -> C64,
    ) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(j, k, c) in &self.aa {
            acc += c * b(at_p(j), at_q(k));
        }
        for &(j, k, c) in &self.ada {
            acc += c * (b(conj(at_p(j)), at_q(k)) + b(at_p(k), conj(at_q(j))));
        }
        for &(j, k, c) in &self.adad {
            acc += c * b(conj(at_p(j)), conj(at_q(k)));
        }
        acc
    }
}

/// Per-mode data of a Gaussian product state: occupation `n_j`, connected pair
/// amplitude `s_j = ⟨a_j a_j⟩ − d_j²` and displacement `d_j = ⟨a_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPointData {
    pub occupation: Vec<f64>,
    pub pair: Vec<C64>,
    pub displacement: Vec<C64>,
    /// True for the fixed reference (the ground state of the catalog).
    pub reference: bool,
}

impl TwoPointData {
    pub fn ground(modes: usize) -> Self {
        Self {
            occupation: alloc::vec![0.0; modes],
            pair: alloc::vec![C64::new(0.0, 0.0); modes],
            displacement: alloc::vec![C64::new(0.0, 0.0); modes],
            reference: true,
        }
    }

    /// Gaussian data for `Ground`, `Kms`, `Coherent` and `Squeezed`.
    pub fn from_spec(spec: &StateSpec, cat: &ModeCatalog) -> Result<Self> {
        spec.validate(cat.len())?;
        let mut d = Self::ground(cat.len());
        match spec {
            StateSpec::Ground => {}
            StateSpec::Kms { beta } => {
                d.reference = false;
                for (j, &w) in cat.omegas().iter().enumerate() {
                    d.occupation[j] = bose_occupation(*beta, w);
                }
            }
            StateSpec::Coherent { amplitudes } => {
                d.reference = false;
                for &(j, a) in amplitudes {
                    d.displacement[j] += a;
                }
            }
            StateSpec::Squeezed { modes } => {
                d.reference = false;
                for &(j, r, phi) in modes {
                    d.occupation[j] = r.sinh().powi(2);
                    d.pair[j] = -C64::from_polar(r.sinh() * r.cosh(), phi);
                }
            }
            other => {
                return Err(invalid!("{} state is not a Gaussian product state", other.kind()));
            }
        }
        Ok(d)
    }

    pub fn modes(&self) -> usize {
        self.occupation.len()
    }

    /// Smallest eigenvalue over modes of `[[n+1, s], [s̄, n]]`; non-negative
    /// exactly when `|s|² ≤ n(n+1)`.
    pub fn covariance_min_eigenvalue(&self) -> f64 {
        self.occupation
            .iter()
            .zip(&self.pair)
            .map(|(&n, s)| n + 0.5 - (0.25 + s.norm_sqr()).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_moments(&self) -> Moments {
        let mut m = Moments::unit();
        let displaced: Vec<usize> = (0..self.modes()).filter(|&j| self.displacement[j] != C64::new(0.0, 0.0)).collect();
        for j in 0..self.modes() {
            if self.occupation[j] != 0.0 {
                m.ada.push((j, j, C64::new(self.occupation[j], 0.0)));
            }
            if self.pair[j] != C64::new(0.0, 0.0) {
                m.aa.push((j, j, self.pair[j]));
                m.adad.push((j, j, self.pair[j].conj()));
            }
        }
        for &j in &displaced {
            for &k in &displaced {
                let (dj, dk) = (self.displacement[j], self.displacement[k]);
                m.aa.push((j, k, dj * dk));
                m.ada.push((j, k, dj.conj() * dk));
                m.adad.push((j, k, (dj * dk).conj()));
            }
        }
        m
    }
}

/// A spacetime point `(t, x)`.
pub type Point = (f64, f64);

fn value_jets(cat: &ModeCatalog, modes: &[usize], p: Point) -> Result<Vec<(usize, C64)>> {
    modes.iter().map(|&j| Ok((j, cat.solution_jet(j, p.0, p.1)?.v))).collect()
}

fn lookup<T: Copy>(table: &[(usize, T)], j: usize) -> T {
    let i = table.binary_search_by_key(&j, |e| e.0).unwrap_or_else(|_| unreachable!("mode {j} not tabulated"));
    table[i].1
}

/// Normal-ordered two-point function `Φ⊗²[ℓ] − ℓ(1)Φ⊗²[ω₀]` at `(p, q)`.
pub fn normal_ordered_two_point(m: &Moments, cat: &ModeCatalog, p: Point, q: Point) -> Result<C64> {
    let modes = m.modes();
    if let Some(&j) = modes.last() {
        cat.check_mode(j)?;
    }
    let jp = value_jets(cat, &modes, p)?;
    let jq = value_jets(cat, &modes, q)?;
    Ok(m.pair(|j| lookup(&jp, j), |j| lookup(&jq, j), |z| z.conj(), |a, b| a * b))
}

/// Ground-state two-point function `Σ_j φ_j(p) φ̄_j(q)` over the whole catalog.
pub fn ground_two_point(cat: &ModeCatalog, p: Point, q: Point) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..cat.len() {
        acc += cat.solution_jet(j, p.0, p.1)?.v * cat.solution_jet(j, q.0, q.1)?.v.conj();
    }
    Ok(acc)
}

/// Full two-point function `ℓ(Φ(p)Φ(q))` with the catalog cutoff. At
/// coincident points the value depends on the cutoff.
pub fn two_point(m: &Moments, cat: &ModeCatalog, p: Point, q: Point) -> Result<C64> {
    Ok(normal_ordered_two_point(m, cat, p, q)? + m.unit * ground_two_point(cat, p, q)?)
}

/// Convenience wrapper evaluating [`two_point`] for a state specification.
pub fn state_two_point(spec: &StateSpec, cat: &ModeCatalog, p: Point, q: Point) -> Result<C64> {
    two_point(&spec.moments(cat)?, cat, p, q)
}

/// Classical field `Σ_j (d_j φ_j + c.c.)` at `p`.
pub fn classical_field(cat: &ModeCatalog, coefficients: &[(usize, C64)], p: Point) -> Result<f64> {
    let mut acc = 0.0;
    for &(j, c) in coefficients {
        acc += 2.0 * (c * cat.solution_jet(j, p.0, p.1)?.v).re;
    }
    Ok(acc)
}
