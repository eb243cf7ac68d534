use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Estimate, QuadValue, Quadrature};
use crate::scalar::{cis, Real};

/// Point mass `weight · δ_location`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub location: T,
    pub weight: T,
}

/// Absolutely continuous part of a spectral measure. Every family is even in `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density<T> {
    /// `mass · a / (π (a² + λ²))`
    Cauchy { scale: T, mass: T },
    /// Normal density with standard deviation `std`, total mass `mass`.
    Gaussian { std: T, mass: T },
    /// `height` on `[-half_width, half_width]`.
    Box { half_width: T, height: T },
    /// `level · dλ`
    Lebesgue { level: T },
    /// `level · |λ|^exponent`, `-1 < exponent < 1`.
    Power { exponent: T, level: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthClass {
    Finite,
    /// `∫ dμ / (1 + λ^{2M}) < ∞`
    TemperedOfOrder(u32),
}

impl<T: Real> Density<T> {
    pub fn eval(&self, lambda: T) -> T {
        let l = lambda.abs();
        match *self {
            Density::Cauchy { scale, mass } => mass * scale / (T::PI() * (scale * scale + l * l)),
            Density::Gaussian { std, mass } => {
                let u = l / std;
                mass / (std * T::TAU().sqrt()) * (-u * u / T::lit(2.0)).exp()
            }
            Density::Box { half_width, height } => {
                if l <= half_width {
                    height
                } else {
                    T::zero()
                }
            }
            Density::Lebesgue { level } => level,
            Density::Power { exponent, level } => {
                if l == T::zero() {
                    if exponent > T::zero() {
                        T::zero()
                    } else {
                        T::infinity()
                    }
                } else {
                    level * l.powf(exponent)
                }
            }
        }
    }

    /// `dρ/dλ` for `λ > 0`.
    pub fn derivative(&self, lambda: T) -> T {
        let l = lambda.abs();
        match *self {
            Density::Cauchy { scale, mass } => {
                let d = scale * scale + l * l;
                -T::lit(2.0) * mass * scale * l / (T::PI() * d * d)
            }
            Density::Gaussian { std, .. } => -l / (std * std) * self.eval(l),
            Density::Box { .. } | Density::Lebesgue { .. } => T::zero(),
            Density::Power { exponent, level } => level * exponent * l.powf(exponent - T::one()),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Density::Lebesgue { .. } | Density::Power { .. })
    }

    /// Length scale used to place the first quadrature panels.
    pub fn scale(&self) -> T {
        match *self {
            Density::Cauchy { scale, .. } => scale,
            Density::Gaussian { std, .. } => std,
            Density::Box { half_width, .. } => half_width,
            Density::Lebesgue { .. } | Density::Power { .. } => T::one(),
        }
    }

    /// `ρ` is decreasing and convex on `[convex_beyond, ∞)`.
    pub fn convex_beyond(&self) -> T {
        match *self {
            Density::Cauchy { scale, .. } => scale / T::lit(3.0).sqrt(),
            Density::Gaussian { std, .. } => std,
            Density::Box { half_width, .. } => half_width,
            Density::Lebesgue { .. } => T::zero(),
            Density::Power { exponent, .. } => {
                if exponent <= T::zero() {
                    T::zero()
                } else {
                    T::infinity()
                }
            }
        }
    }

    /// Support bound: zero outside `[-support_radius, support_radius]`.
    pub fn support_radius(&self) -> T {
        match *self {
            Density::Box { half_width, .. } => half_width,
            _ => T::infinity(),
        }
    }

    /// `∫ ρ` (infinite for tempered families).
    pub fn mass(&self) -> T {
        match *self {
            Density::Cauchy { mass, .. } | Density::Gaussian { mass, .. } => mass,
            Density::Box { half_width, height } => T::lit(2.0) * half_width * height,
            Density::Lebesgue { .. } | Density::Power { .. } => T::infinity(),
        }
    }

    /// `∫_{|λ|>L} ρ`.
    pub fn tail_mass(&self, cutoff: T) -> T {
        self.weighted_tail(cutoff, T::zero())
    }

    /// Upper bound on `∫_{|λ|>L} ρ(λ) |λ|^{-s} dλ` (exact where a closed form is cheap).
    pub fn weighted_tail(&self, cutoff: T, s: T) -> T {
        let two = T::lit(2.0);
        let l = cutoff.abs();
        match *self {
            Density::Cauchy { scale, mass } => {
                let a = scale;
                if s == T::zero() {
                    two * mass / T::PI() * (a / l).atan()
                } else if s == two {
                    // ∫_L^∞ dλ / (λ²(a²+λ²)) in partial fractions
                    let v = (T::one() / l - (a / l).atan() / a) / (a * a);
                    two * mass * a / T::PI() * v.max(T::zero())
                } else {
                    two * mass * a / T::PI() * l.powf(-T::one() - s) / (T::one() + s)
                }
            }
            Density::Gaussian { std, mass } => {
                let t = mass * (l / (std * two.sqrt())).erfc();
                if s == T::zero() {
                    t
                } else {
                    t * l.powf(-s)
                }
            }
            Density::Box { half_width, height } => {
                if l >= half_width {
                    T::zero()
                } else if s == T::one() {
                    two * height * (half_width / l).ln()
                } else {
                    two * height * (half_width.powf(T::one() - s) - l.powf(T::one() - s)) / (T::one() - s)
                }
            }
            Density::Lebesgue { level } => {
                if s > T::one() {
                    two * level * l.powf(T::one() - s) / (s - T::one())
                } else {
                    T::infinity()
                }
            }
            Density::Power { exponent, level } => {
                let q = s - exponent - T::one();
                if q > T::zero() {
                    two * level * l.powf(-q) / q
                } else {
                    T::infinity()
                }
            }
        }
    }

    /// `(bound, estimate)` for `∫_{|λ|>L} cos(λu) ρ(λ)/λ² dλ`.
    ///
    /// Beyond the convexity point `h = ρ/λ²` is decreasing and convex, so two integrations
    /// by parts leave a remainder of at most `2|h'(L)|/u²`.
    pub(crate) fn cosine_tail(&self, cutoff: T, u: T) -> (T, T) {
        let two = T::lit(2.0);
        let l = cutoff.abs();
        let w = self.weighted_tail(l, two);
        let w_exact = !matches!(self, Density::Gaussian { .. });
        let mut best = if w_exact && u == T::zero() { (T::zero(), w) } else { (w / two, w / two) };
        if u == T::zero() || l < self.convex_beyond() || l == T::zero() {
            return best;
        }
        let h = self.eval(l) / (l * l);
        let dh = self.derivative(l) / (l * l) - two * self.eval(l) / (l * l * l);
        let first = -two * (l * u).sin() * h / u;
        for (bound, est) in [
            (two * h / u.abs(), first),
            (two * dh.abs() / (u * u), first - two * (l * u).cos() * dh / (u * u)),
        ] {
            if bound < best.0 {
                best = (bound, est);
            }
        }
        best
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: T, what: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidMeasure(format!("{what} must be positive and finite, got {v}")))
            }
        };
        match *self {
            Density::Cauchy { scale, mass } => pos(scale, "cauchy scale").and(pos(mass, "cauchy mass")),
            Density::Gaussian { std, mass } => pos(std, "gaussian std").and(pos(mass, "gaussian mass")),
            Density::Box { half_width, height } => pos(half_width, "box half width").and(pos(height, "box height")),
            Density::Lebesgue { level } => pos(level, "lebesgue level"),
            Density::Power { exponent, level } => {
                pos(level, "power level")?;
                if exponent > -T::one() && exponent < T::one() {
                    Ok(())
                } else {
                    Err(Error::InvalidMeasure(format!("power exponent {exponent} outside (-1, 1)")))
                }
            }
        }
    }
}

/// Positive measure on the line: finitely many atoms plus an optional density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure<T> {
    atoms: Vec<Atom<T>>,
    density: Option<Density<T>>,
    growth_class: GrowthClass,
}

/// Hard ceiling on the frequency cutoff when chasing a tail bound.
const MAX_CUTOFF_SCALES: f64 = 1e12;
/// Panel budget for oscillatory integrands.
const MAX_PANELS: usize = 400_000;

impl<T: Real> SpectralMeasure<T> {
    /// Validates the parts and infers the growth class (finite unless the density is
    /// Lebesgue or power-law, which are tempered of order 1).
    pub fn new(atoms: Vec<Atom<T>>, density: Option<Density<T>>) -> Result<Self> {
        let growth = match &density {
            Some(d) if !d.is_finite() => GrowthClass::TemperedOfOrder(1),
            _ => GrowthClass::Finite,
        };
        Self::with_growth(atoms, density, growth)
    }

    pub fn with_growth(mut atoms: Vec<Atom<T>>, density: Option<Density<T>>, growth_class: GrowthClass) -> Result<Self> {
        for a in &atoms {
            if !(a.weight > T::zero()) || !a.weight.is_finite() || !a.location.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom at {} has weight {}", a.location, a.weight)));
            }
        }
        atoms.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap_or(std::cmp::Ordering::Equal));
        if atoms.windows(2).any(|w| w[0].location == w[1].location) {
            return Err(Error::InvalidMeasure("atom locations must be distinct".into()));
        }
        if let Some(d) = &density {
            d.validate()?;
        }
        match growth_class {
            GrowthClass::Finite => {
                if density.is_some_and(|d| !d.is_finite()) {
                    return Err(Error::InvalidMeasure("density has infinite mass".into()));
                }
            }
            GrowthClass::TemperedOfOrder(m) => {
                if m == 0 {
                    return Err(Error::InvalidMeasure("tempered order must be positive".into()));
                }
                if let Some(d) = &density {
                    if !d.weighted_tail(T::one(), T::from_usize_lossy(2 * m as usize)).is_finite() {
                        return Err(Error::InvalidMeasure(format!("density is not tempered of order {m}")));
                    }
                }
            }
        }
        Ok(Self { atoms, density, growth_class })
    }

    pub fn atoms_only(atoms: Vec<Atom<T>>) -> Result<Self> {
        Self::new(atoms, None)
    }

    pub fn from_density(density: Density<T>) -> Result<Self> {
        Self::new(Vec::new(), Some(density))
    }

    /// `w · δ_λ`.
    pub fn dirac(location: T, weight: T) -> Result<Self> {
        Self::atoms_only(vec![Atom { location, weight }])
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density<T>> {
        self.density.as_ref()
    }

    pub fn growth_class(&self) -> GrowthClass {
        self.growth_class
    }

    pub fn is_finite(&self) -> bool {
        self.growth_class == GrowthClass::Finite
    }

    pub fn total_mass(&self) -> Result<T> {
        if !self.is_finite() {
            return Err(Error::TemperedWithoutCutoff);
        }
        let atoms: T = self.atoms.iter().map(|a| a.weight).sum();
        Ok(atoms + self.density.map_or(T::zero(), |d| d.mass()))
    }

    /// Invariant under `λ ↦ -λ`.
    pub fn is_symmetric(&self) -> bool {
        // densities are even by construction
        self.atoms.iter().all(|a| {
            self.atoms.iter().any(|b| b.location == -a.location && b.weight == a.weight)
        })
    }

    /// `(μ + μ∘(-·)) / 2`.
    pub fn mirrored(&self) -> Self {
        if self.is_symmetric() {
            return self.clone();
        }
        let half = T::lit(0.5);
        let mut atoms: Vec<Atom<T>> = Vec::new();
        for a in &self.atoms {
            for loc in [a.location, -a.location] {
                match atoms.iter_mut().find(|b| b.location == loc) {
                    Some(b) => b.weight = b.weight + a.weight * half,
                    None => atoms.push(Atom { location: loc, weight: a.weight * half }),
                }
            }
        }
        Self::with_growth(atoms, self.density, self.growth_class).expect("mirror of a valid measure")
    }

    /// `∫ dμ / (1 + λ^{2M})`, the temperedness integral.
    pub fn tempered_integral(&self, order: u32, tol: T) -> Result<T> {
        let m = 2 * order.max(1) as i32;
        let f = |l: T| T::one() / (T::one() + l.powi(m));
        let s = T::from_usize_lossy(m as usize);
        self.integrate_against(f, T::zero(), |d: &Density<T>, l: T| (d.weighted_tail(l, s), T::zero()), tol)
            .map(|e| e.value)
    }

    /// `∫ g dμ` over the whole line.
    ///
    /// `tail(ρ, L)` must return an upper bound on `|∫_{|λ|>L} g ρ dλ - correction|`
    /// together with that correction. The cutoff doubles until the bound drops below
    /// `tol/2`; the window `[-L, L]` is then integrated to `tol/2`. `oscillation` is the
    /// angular frequency of `g`, used to size panels.
    pub fn integrate_against<V, F, B>(&self, g: F, oscillation: T, tail: B, tol: T) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
        B: Fn(&Density<T>, T) -> (T, V),
    {
        let half = tol / T::lit(2.0);
        let mut value = self.atom_sum(&g);
        let Some(d) = self.density else {
            return Ok(Estimate { value, error: T::zero() });
        };
        let mut cutoff = d.support_radius();
        let mut correction = V::zero();
        let mut tail_err = T::zero();
        if !cutoff.is_finite() {
            cutoff = T::lit(8.0) * d.scale();
            let ceiling = d.scale() * T::lit(MAX_CUTOFF_SCALES);
            loop {
                let (bound, corr) = tail(&d, cutoff);
                if bound <= half {
                    correction = corr;
                    tail_err = bound;
                    break;
                }
                cutoff = cutoff * T::lit(2.0);
                if cutoff > ceiling {
                    return Err(Error::NonConvergent { estimate: bound.to_f64_lossy(), tolerance: half.to_f64_lossy() });
                }
            }
        }
        let window = self.density_window(&g, &d, cutoff, oscillation, half)?;
        value = value + window.value + correction;
        Ok(Estimate { value, error: window.error + tail_err })
    }

    /// `∫_{|λ|≤cutoff} g dμ`.
    pub fn integrate_window<V, F>(&self, g: F, cutoff: T, oscillation: T, tol: T) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
    {
        let mut value = V::zero();
        for a in self.atoms.iter().filter(|a| a.location.abs() <= cutoff) {
            value = value + g(a.location) * a.weight;
        }
        let Some(d) = self.density else {
            return Ok(Estimate { value, error: T::zero() });
        };
        let w = self.density_window(&g, &d, cutoff.min(d.support_radius()), oscillation, tol)?;
        Ok(Estimate { value: value + w.value, error: w.error })
    }

    fn atom_sum<V: QuadValue<T>>(&self, g: &impl Fn(T) -> V) -> V {
        self.atoms.iter().fold(V::zero(), |acc, a| acc + g(a.location) * a.weight)
    }

    /// `∫_{-L}^{L} g ρ`.
    fn density_window<V, F>(&self, g: &F, d: &Density<T>, cutoff: T, oscillation: T, tol: T) -> Result<Estimate<V, T>>
    where
        V: QuadValue<T>,
        F: Fn(T) -> V,
    {
        let q = Quadrature::new(tol).with_rel_tol(T::lit(1e-14));
        if let Density::Power { exponent, level } = *d {
            // λ = r v^{1/(p+1)} flattens the power singularity at the origin
            let p1 = exponent + T::one();
            let inner = cutoff.min(T::one());
            let jac = level * inner.powf(p1) / p1;
            let sub = |v: T| {
                let l = inner * v.powf(T::one() / p1);
                g(l) + g(-l)
            };
            let core_panels = ((inner * oscillation.abs()) / T::PI()).ceil().to_f64_lossy() as usize + 1;
            let breaks: Vec<T> = (0..=core_panels).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(core_panels)).collect();
            let core = integrate(sub, &breaks, &q.with_rel_tol(T::lit(1e-14)))?;
            let mut value = core.value * jac;
            let mut error = core.error * jac;
            if cutoff > T::one() {
                let breaks = panel_breaks(T::one(), cutoff, oscillation)?;
                let outer = integrate(|l: T| (g(l) + g(-l)) * d.eval(l), &breaks, &q)?;
                value = value + outer.value;
                error = error + outer.error;
            }
            return Ok(Estimate { value, error });
        }
        let scale = d.scale();
        let mut breaks = panel_breaks(T::zero(), cutoff, oscillation)?;
        let mut edge = scale / T::lit(8.0);
        while edge < cutoff {
            breaks.push(edge);
            edge = edge * T::lit(2.0);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        breaks.dedup();
        let mirrored: Vec<T> = breaks.iter().rev().map(|b| -*b).chain(breaks.iter().copied()).collect();
        integrate(|l: T| g(l) * d.eval(l), &mirrored, &q)
    }

    /// `∫ e^{ixλ} dμ(λ)`: the Bochner transform, with absolute error at most `tol`.
    pub fn bochner_eval(&self, x: T, tol: T) -> Result<Complex<T>> {
        if !self.is_finite() {
            return Err(Error::TemperedWithoutCutoff);
        }
        if x == T::zero() {
            return Ok(Complex::new(self.total_mass()?, T::zero()));
        }
        let two = T::lit(2.0);
        let tail = |d: &Density<T>, l: T| -> (T, Complex<T>) {
            let mass = d.tail_mass(l);
            if l >= d.convex_beyond() {
                // one integration by parts on the even density: 2∫_L^∞ ρ cos(xλ) dλ
                let ibp = T::lit(4.0) * d.derivative(l).abs() / (x * x);
                if ibp < mass {
                    let corr = -two * d.eval(l) * (x * l).sin() / x;
                    return (ibp, Complex::new(corr, T::zero()));
                }
            }
            (mass, Complex::new(T::zero(), T::zero()))
        };
        self.integrate_against(|l: T| cis(l * x), x.abs(), tail, tol).map(|e| e.value)
    }

    /// `∫_{|λ|≤cutoff} e^{ixλ} dμ(λ)`; the only pointwise evaluation allowed for tempered measures.
    pub fn bochner_eval_cutoff(&self, x: T, cutoff: T, tol: T) -> Result<Complex<T>> {
        self.integrate_window(|l: T| cis(l * x), cutoff, x.abs(), tol).map(|e| e.value)
    }
}

/// Panel boundaries on `[lo, hi]` with at most about two oscillations per panel.
pub(crate) fn panel_breaks<T: Real>(lo: T, hi: T, oscillation: T) -> Result<Vec<T>> {
    let len = hi - lo;
    let n = (len * oscillation.abs() / (T::lit(4.0) * T::PI())).ceil().to_f64_lossy();
    if !(n <= MAX_PANELS as f64) {
        return Err(Error::NonConvergent { estimate: f64::INFINITY, tolerance: 0.0 });
    }
    let n = (n as usize).max(1);
    let h = len / T::from_usize_lossy(n);
    let mut out: Vec<T> = (0..=n).map(|i| lo + h * T::from_usize_lossy(i)).collect();
    out[n] = hi;
    Ok(out)
}
