//! Reaction terms `f`, `g` and the combined nonlinearity
//! `h(w) = α f(w⁺/α) − g(−w⁻)` of the segregation limit, with its a.e.
//! derivative and the primitive `H` normalized to `H(0) = 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Upper end of the sampled range used when checking the sign conditions.
pub const SIGN_CHECK_MAX: f64 = 4.0;

#[derive(Clone)]
pub struct CustomReactions {
    pub f: ScalarFn,
    pub f_prime: ScalarFn,
    pub g: ScalarFn,
    pub g_prime: ScalarFn,
}

impl fmt::Debug for CustomReactions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomReactions { .. }")
    }
}

#[derive(Debug, Clone)]
pub enum KineticsKind {
    /// `f(s) = g(s) = s(1 − s)`.
    Logistic,
    /// Polynomials in ascending powers, `f(s) = Σ f[j] s^j`.
    Polynomial { f: Vec<f64>, g: Vec<f64> },
    Custom(CustomReactions),
}

#[derive(Debug, Clone)]
pub struct Kinetics {
    alpha: f64,
    kind: KineticsKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NonzeroAtOrigin,
    NotPositiveBelowOne,
    NotNegativeAboveOne,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub species: Species,
    pub kind: ViolationKind,
    pub s: f64,
    pub value: f64,
}

/// Sampled findings against the sign conditions on `f` and `g`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HypothesisReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

fn poly_prime(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (j, &a)| acc * s + j as f64 * a)
}

fn poly_primitive(c: &[f64], s: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (j, &a)| acc * s + a / (j as f64 + 1.0))
        * s
}

impl Kinetics {
    pub fn logistic(alpha: f64) -> Result<Self> {
        Self::checked(alpha, KineticsKind::Logistic)
    }

    pub fn polynomial(alpha: f64, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if f.iter().chain(&g).any(|c| !c.is_finite()) {
            return Err(Error::InvalidKinetics("non-finite polynomial coefficient".into()));
        }
        Self::checked(alpha, KineticsKind::Polynomial { f, g })
    }

    /// `f ≡ g ≡ 0`, so `h ≡ 0`. Useful for linear test problems.
    pub fn inert(alpha: f64) -> Result<Self> {
        Self::polynomial(alpha, vec![], vec![])
    }

    pub fn custom<F, Fp, G, Gp>(alpha: f64, f: F, f_prime: Fp, g: G, g_prime: Gp) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        Fp: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        Gp: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let kin = Self::checked(
            alpha,
            KineticsKind::Custom(CustomReactions {
                f: Arc::new(f),
                f_prime: Arc::new(f_prime),
                g: Arc::new(g),
                g_prime: Arc::new(g_prime),
            }),
        )?;
        // The primitive is computed by quadrature; make sure it converges on
        // the range the solvers visit.
        for s in [0.5, 1.0, 2.0, SIGN_CHECK_MAX] {
            for w in [s, -s] {
                kin.try_primitive(w)?;
            }
        }
        Ok(kin)
    }

    fn checked(alpha: f64, kind: KineticsKind) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidKinetics(format!("alpha must be positive, got {alpha}")));
        }
        let kin = Kinetics { alpha, kind };
        let (f0, g0) = (kin.f(0.0), kin.g(0.0));
        if f0 != 0.0 || g0 != 0.0 {
            return Err(Error::InvalidKinetics(format!(
                "reactions must vanish at 0, got f(0) = {f0}, g(0) = {g0}"
            )));
        }
        Ok(kin)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> &KineticsKind {
        &self.kind
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::checked(alpha, self.kind.clone())
    }

    pub fn f(&self, s: f64) -> f64 {
        match &self.kind {
            KineticsKind::Logistic => s * (1.0 - s),
            KineticsKind::Polynomial { f, .. } => poly(f, s),
            KineticsKind::Custom(c) => (c.f)(s),
        }
    }

    pub fn g(&self, s: f64) -> f64 {
        match &self.kind {
            KineticsKind::Logistic => s * (1.0 - s),
            KineticsKind::Polynomial { g, .. } => poly(g, s),
            KineticsKind::Custom(c) => (c.g)(s),
        }
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        match &self.kind {
            KineticsKind::Logistic => 1.0 - 2.0 * s,
            KineticsKind::Polynomial { f, .. } => poly_prime(f, s),
            KineticsKind::Custom(c) => (c.f_prime)(s),
        }
    }

    pub fn g_prime(&self, s: f64) -> f64 {
        match &self.kind {
            KineticsKind::Logistic => 1.0 - 2.0 * s,
            KineticsKind::Polynomial { g, .. } => poly_prime(g, s),
            KineticsKind::Custom(c) => (c.g_prime)(s),
        }
    }

    pub fn h(&self, w: f64) -> f64 {
        if w >= 0.0 {
            self.alpha * self.f(w / self.alpha)
        } else {
            -self.g(-w)
        }
    }

    /// Derivative of `h` away from 0. At `w = 0` the one-sided limits are
    /// `f'(0)` and `g'(0)`; their mean is returned (see
    /// [`Kinetics::h_prime_kink_at_zero`]).
    pub fn h_prime(&self, w: f64) -> f64 {
        if w > 0.0 {
            self.f_prime(w / self.alpha)
        } else if w < 0.0 {
            self.g_prime(-w)
        } else {
            let (a, b) = (self.f_prime(0.0), self.g_prime(0.0));
            if a == b {
                a
            } else {
                0.5 * (a + b)
            }
        }
    }

    /// True when `f'(0) ≠ g'(0)`, i.e. `h` has a genuine kink at 0.
    pub fn h_prime_kink_at_zero(&self) -> bool {
        self.f_prime(0.0) != self.g_prime(0.0)
    }

    /// `H(w) = ∫₀^w h`. Closed form for logistic and polynomial kinetics,
    /// adaptive Simpson otherwise.
    pub fn primitive(&self, w: f64) -> f64 {
        match self.try_primitive(w) {
            Ok(v) => v,
            Err(_) => adaptive_simpson(|s| self.h(s), 0.0, w, 1e-10, 40).value,
        }
    }

    pub fn try_primitive(&self, w: f64) -> Result<f64> {
        let a = self.alpha;
        match &self.kind {
            // ∫₀^w αf(s/α) ds = α² F(w/α),  ∫₀^w −g(−s) ds = G(−w)
            KineticsKind::Logistic => {
                let p = |s: f64| s * s / 2.0 - s * s * s / 3.0;
                Ok(if w >= 0.0 { a * a * p(w / a) } else { p(-w) })
            }
            KineticsKind::Polynomial { f, g } => Ok(if w >= 0.0 {
                a * a * poly_primitive(f, w / a)
            } else {
                poly_primitive(g, -w)
            }),
            KineticsKind::Custom(_) => {
                let q = adaptive_simpson(|s| self.h(s), 0.0, w, 1e-12, 48);
                if q.converged && q.value.is_finite() {
                    Ok(q.value)
                } else {
                    Err(Error::InvalidKinetics(format!(
                        "quadrature of h on [0, {w}] did not converge"
                    )))
                }
            }
        }
    }

    /// Samples the sign conditions: `f, g > 0` on `(0,1)`, `f, g < 0` on
    /// `(1, SIGN_CHECK_MAX]`, and `f(0) = g(0) = 0`.
    pub fn validate_hypothesis_a(&self, n_samples: usize) -> HypothesisReport {
        let n = n_samples.max(10);
        let mut violations = Vec::new();
        let species: [(Species, &dyn Fn(f64) -> f64); 2] =
            [(Species::F, &|s| self.f(s)), (Species::G, &|s| self.g(s))];
        for (sp, fun) in species {
            let at0 = fun(0.0);
            if at0 != 0.0 {
                violations.push(Violation {
                    species: sp,
                    kind: ViolationKind::NonzeroAtOrigin,
                    s: 0.0,
                    value: at0,
                });
            }
            for j in 1..=n {
                let s = j as f64 / (n as f64 + 1.0);
                let val = fun(s);
                if !val.is_finite() {
                    violations.push(Violation { species: sp, kind: ViolationKind::NonFinite, s, value: val });
                } else if val <= 0.0 {
                    violations.push(Violation {
                        species: sp,
                        kind: ViolationKind::NotPositiveBelowOne,
                        s,
                        value: val,
                    });
                }
                let s = 1.0 + j as f64 * (SIGN_CHECK_MAX - 1.0) / n as f64;
                let val = fun(s);
                if !val.is_finite() {
                    violations.push(Violation { species: sp, kind: ViolationKind::NonFinite, s, value: val });
                } else if val >= 0.0 {
                    violations.push(Violation {
                        species: sp,
                        kind: ViolationKind::NotNegativeAboveOne,
                        s,
                        value: val,
                    });
                }
            }
        }
        HypothesisReport {
            samples: 2 * n,
            violations,
        }
    }

    /// Sampled bounds `K_f = sup |f'|`, `K_g = sup |g'|` over `[0, m]`.
    pub fn lipschitz_constants(&self, m: f64) -> (f64, f64) {
        let n = 2000;
        let mut kf: f64 = 0.0;
        let mut kg: f64 = 0.0;
        for j in 0..=n {
            let s = m * j as f64 / n as f64;
            kf = kf.max(self.f_prime(s).abs());
            kg = kg.max(self.g_prime(s).abs());
        }
        (kf, kg)
    }
}

pub(crate) struct Quadrature {
    pub value: f64,
    pub converged: bool,
}

/// Adaptive Simpson with Richardson correction.
pub(crate) fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Quadrature {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        ok: &mut bool,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        if depth == 0 || !delta.is_finite() {
            *ok = false;
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
    }
    if a == b {
        return Quadrature { value: 0.0, converged: true };
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    let mut ok = true;
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth, &mut ok);
    Quadrature { value, converged: ok }
}
