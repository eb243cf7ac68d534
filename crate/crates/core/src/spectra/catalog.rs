//! Registry of matched kernel / spectral-measure pairs and its JSON form.
//!
//! In the JSON document every frequency, weight and parameter is written as a decimal
//! string holding the shortest round-trip representation of an IEEE double.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::kernel::{ClosedForm, KernelForm, PdKernel, Regularization};
use super::measure::{Atom, Density, GrowthClass, SpectralMeasure};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CATALOG_VERSION: &str = "1.0";

/// Hurst index of the built-in fractional entry.
pub const FBM_HURST: f64 = 0.75;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelCatalogEntry<T> {
    pub name: String,
    pub kernel: PdKernel<T>,
    pub measure: SpectralMeasure<T>,
}

impl<T: Real> KernelCatalogEntry<T> {
    /// Pairs a kernel with its measure after checking `μ̂ = f` on a short grid.
    pub fn new(name: impl Into<String>, kernel: PdKernel<T>, measure: SpectralMeasure<T>) -> Result<Self> {
        let entry = Self { name: name.into(), kernel, measure };
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        let dev = entry.max_deviation(11, tol)?;
        if dev > T::lit(10.0) * tol {
            return Err(Error::MeasureMismatch(format!("{}: |μ̂ - f| reaches {:e}", entry.name, dev.to_f64_lossy())));
        }
        Ok(entry)
    }

    /// `max |μ̂(x) - f(x)|` over `points` equispaced samples of the kernel's window.
    /// Tempered pairs are matched by construction and report zero.
    pub fn max_deviation(&self, points: usize, tol: T) -> Result<T> {
        if !self.kernel.is_continuous() || !self.measure.is_finite() {
            return match self.kernel.form() {
                KernelForm::BochnerOf(m) if *m == self.measure => Ok(T::zero()),
                _ => Err(Error::MeasureMismatch(format!("{}: tempered pair is not self-describing", self.name))),
            };
        }
        let r = self.kernel.effective_radius();
        let n = points.max(2) - 1;
        let mut worst = T::zero();
        for i in 0..=n {
            let x = -r + T::lit(2.0) * r * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let lhs = self.measure.bochner_eval(x, tol)?;
            let rhs = self.kernel.eval(x, tol)?;
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }
}

/// Catalog names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: [&str; 7] = ["cos", "exp", "gaussian", "constant", "sinc", "lebesgue", "fbm"];

fn build<T: Real>(name: &str) -> Result<KernelCatalogEntry<T>> {
    let one = T::one();
    let closed = |form: ClosedForm<T>| -> Result<KernelCatalogEntry<T>> {
        let measure = form.spectral_measure()?;
        KernelCatalogEntry::new(name, PdKernel::closed(form), measure)
    };
    match name {
        "cos" => closed(ClosedForm::Cos { frequency: one }),
        "exp" => closed(ClosedForm::Exponential { rate: one }),
        "gaussian" => closed(ClosedForm::Gaussian { sigma: one }),
        "constant" => closed(ClosedForm::Constant { value: one }),
        "sinc" => closed(ClosedForm::Sinc { a: one }),
        "lebesgue" => {
            let m = SpectralMeasure::from_density(Density::Lebesgue { level: one })?;
            KernelCatalogEntry::new(name, PdKernel::bochner(m.clone()), m)
        }
        "fbm" => {
            let p = T::one() - T::lit(2.0 * FBM_HURST);
            let m = SpectralMeasure::from_density(Density::Power { exponent: p, level: one })?;
            KernelCatalogEntry::new(name, PdKernel::bochner(m.clone()), m)
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

pub fn catalog_entry<T: Real>(name: &str) -> Result<KernelCatalogEntry<T>> {
    build(name)
}

/// Every built-in pair, each checked at construction.
pub fn builtin_catalog<T: Real>() -> Result<Vec<KernelCatalogEntry<T>>> {
    CATALOG_NAMES.iter().map(|n| build(n)).collect()
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    name: String,
    kernel: KernelDoc,
    measure: MeasureDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
enum KernelDoc {
    ClosedForm { function: String, params: BTreeMap<String, String> },
    BochnerOf { measure: MeasureDoc },
    RegularizedSeries { frequencies: Vec<String>, regularization: String, n: usize },
}

#[derive(Serialize, Deserialize, PartialEq)]
struct MeasureDoc {
    atoms: Vec<[String; 2]>,
    density: Option<DensityDoc>,
    growth_class: String,
}

#[derive(Serialize, Deserialize, PartialEq)]
struct DensityDoc {
    kind: String,
    params: BTreeMap<String, String>,
}

fn num<T: Real>(v: T) -> String {
    format!("{:?}", v.to_f64_lossy())
}

fn parse<T: Real>(s: &str) -> Result<T> {
    s.parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

fn param<T: Real>(params: &BTreeMap<String, String>, key: &str) -> Result<T> {
    params.get(key).ok_or_else(|| Error::Parse(format!("missing parameter `{key}`"))).and_then(|s| parse(s))
}

fn params<T: Real>(pairs: &[(&str, T)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), num(*v))).collect()
}

fn measure_doc<T: Real>(m: &SpectralMeasure<T>) -> MeasureDoc {
    let density = m.density().map(|d| {
        let (kind, p) = match *d {
            Density::Cauchy { scale, mass } => ("cauchy", params(&[("scale", scale), ("mass", mass)])),
            Density::Gaussian { std, mass } => ("gaussian", params(&[("std", std), ("mass", mass)])),
            Density::Box { half_width, height } => {
                ("box", params(&[("half_width", half_width), ("height", height)]))
            }
            Density::Lebesgue { level } => ("lebesgue", params(&[("level", level)])),
            Density::Power { exponent, level } => ("power", params(&[("exponent", exponent), ("level", level)])),
        };
        DensityDoc { kind: kind.into(), params: p }
    });
    MeasureDoc {
        atoms: m.atoms().iter().map(|a| [num(a.location), num(a.weight)]).collect(),
        density,
        growth_class: match m.growth_class() {
            GrowthClass::Finite => "finite".into(),
            GrowthClass::TemperedOfOrder(k) => format!("tempered:{k}"),
        },
    }
}

fn measure_from_doc<T: Real>(d: &MeasureDoc) -> Result<SpectralMeasure<T>> {
    let atoms = d
        .atoms
        .iter()
        .map(|[l, w]| Ok(Atom { location: parse(l)?, weight: parse(w)? }))
        .collect::<Result<Vec<_>>>()?;
    let density = match &d.density {
        None => None,
        Some(dd) => Some(match dd.kind.as_str() {
            "cauchy" => Density::Cauchy { scale: param(&dd.params, "scale")?, mass: param(&dd.params, "mass")? },
            "gaussian" => Density::Gaussian { std: param(&dd.params, "std")?, mass: param(&dd.params, "mass")? },
            "box" => Density::Box {
                half_width: param(&dd.params, "half_width")?,
                height: param(&dd.params, "height")?,
            },
            "lebesgue" => Density::Lebesgue { level: param(&dd.params, "level")? },
            "power" => {
                Density::Power { exponent: param(&dd.params, "exponent")?, level: param(&dd.params, "level")? }
            }
            other => return Err(Error::Parse(format!("unknown density kind `{other}`"))),
        }),
    };
    let growth = match d.growth_class.as_str() {
        "finite" => GrowthClass::Finite,
        g => match g.strip_prefix("tempered:").and_then(|k| k.parse().ok()) {
            Some(k) => GrowthClass::TemperedOfOrder(k),
            None => return Err(Error::Parse(format!("unknown growth class `{g}`"))),
        },
    };
    SpectralMeasure::with_growth(atoms, density, growth)
}

fn kernel_doc<T: Real>(k: &PdKernel<T>) -> KernelDoc {
    match k.form() {
        KernelForm::ClosedForm(c) => {
            let p = match *c {
                ClosedForm::Cos { frequency } => params(&[("frequency", frequency)]),
                ClosedForm::Exponential { rate } => params(&[("rate", rate)]),
                ClosedForm::Gaussian { sigma } => params(&[("sigma", sigma)]),
                ClosedForm::Constant { value } => params(&[("value", value)]),
                ClosedForm::Sinc { a } => params(&[("a", a)]),
            };
            KernelDoc::ClosedForm { function: c.name().into(), params: p }
        }
        KernelForm::BochnerOf(m) => KernelDoc::BochnerOf { measure: measure_doc(m) },
        KernelForm::RegularizedSeries { frequencies, regularization } => {
            let (kind, n) = match *regularization {
                Regularization::Truncate(n) => ("truncate", n),
                Regularization::Fejer(n) => ("fejer", n),
            };
            KernelDoc::RegularizedSeries {
                frequencies: frequencies.iter().map(|f| num(*f)).collect(),
                regularization: kind.into(),
                n,
            }
        }
    }
}

fn kernel_from_doc<T: Real>(d: &KernelDoc) -> Result<PdKernel<T>> {
    Ok(match d {
        KernelDoc::ClosedForm { function, params } => PdKernel::closed(match function.as_str() {
            "cos" => ClosedForm::Cos { frequency: param(params, "frequency")? },
            "exponential" => ClosedForm::Exponential { rate: param(params, "rate")? },
            "gaussian" => ClosedForm::Gaussian { sigma: param(params, "sigma")? },
            "constant" => ClosedForm::Constant { value: param(params, "value")? },
            "sinc" => ClosedForm::Sinc { a: param(params, "a")? },
            other => return Err(Error::Parse(format!("unknown closed form `{other}`"))),
        }),
        KernelDoc::BochnerOf { measure } => PdKernel::bochner(measure_from_doc(measure)?),
        KernelDoc::RegularizedSeries { frequencies, regularization, n } => {
            let freqs = frequencies.iter().map(|s| parse(s)).collect::<Result<Vec<T>>>()?;
            let reg = match regularization.as_str() {
                "truncate" => Regularization::Truncate(*n),
                "fejer" => Regularization::Fejer(*n),
                other => return Err(Error::Parse(format!("unknown regularization `{other}`"))),
            };
            PdKernel::series(freqs, reg)
        }
    })
}

pub fn entry_to_json<T: Real>(e: &KernelCatalogEntry<T>) -> Result<String> {
    let doc = EntryDoc { name: e.name.clone(), kernel: kernel_doc(&e.kernel), measure: measure_doc(&e.measure) };
    serde_json::to_string_pretty(&doc).map_err(|err| Error::Parse(err.to_string()))
}

/// Parses and re-verifies an entry.
pub fn entry_from_json<T: Real>(s: &str) -> Result<KernelCatalogEntry<T>> {
    let doc: EntryDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    KernelCatalogEntry::new(doc.name, kernel_from_doc(&doc.kernel)?, measure_from_doc(&doc.measure)?)
}

/// The catalog as a JSON value, one object per entry.
pub fn catalog_to_json<T: Real>(entries: &[KernelCatalogEntry<T>]) -> Result<serde_json::Value> {
    let docs: Vec<EntryDoc> = entries
        .iter()
        .map(|e| EntryDoc { name: e.name.clone(), kernel: kernel_doc(&e.kernel), measure: measure_doc(&e.measure) })
        .collect();
    serde_json::to_value(docs).map_err(|e| Error::Parse(e.to_string()))
}
