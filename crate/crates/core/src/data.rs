//! Per-source Rayleigh coefficients `(u_j^+, u_j^-)`, the inverse problem's data.

use std::ops::RangeInclusive;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::forward::IncidentSpec;
use crate::medium::MediumParams;
use crate::real::{czero, Real};

/// Where a source's coefficients came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataOrigin<T> {
    /// Volume quadrature on the solver grid.
    Volume,
    /// Fourier projection of a scattered trace on `x2 = +-r`.
    Trace { r: T },
    /// Read from a file.
    External,
}

/// Identity of one illumination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceRecord<T> {
    pub id: usize,
    pub incident: Option<IncidentSpec<T>>,
}

/// Coefficients of every source on a common contiguous mode window that
/// contains all propagating modes. Above the slab the scattered field is
/// `sum_j u_j^+ e^{i alpha_j x1 + i beta_j (x2 - h)}`, below it
/// `sum_j u_j^- e^{i alpha_j x1 - i beta_j (x2 + h)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighData<T> {
    params: MediumParams<T>,
    j_min: i64,
    j_max: i64,
    sources: Vec<SourceRecord<T>>,
    coeffs: Vec<Vec<[Complex<T>; 2]>>,
    origin: DataOrigin<T>,
}

impl<T: Real> RayleighData<T> {
    /// No sources yet; `window` must cover the propagating set.
    pub fn new(params: MediumParams<T>, window: RangeInclusive<i64>, origin: DataOrigin<T>) -> Result<Self> {
        let (j_min, j_max) = (*window.start(), *window.end());
        let prop = params.propagating_set();
        if let Some(&j) = prop.iter().find(|&&j| j < j_min || j > j_max) {
            return Err(Error::Format(format!(
                "mode window [{j_min}, {j_max}] misses propagating mode {j}"
            )));
        }
        Ok(Self {
            params,
            j_min,
            j_max,
            sources: Vec::new(),
            coeffs: Vec::new(),
            origin,
        })
    }

    /// Appends a source; `coeffs[j - j_min]` holds `[u_j^+, u_j^-]`.
    pub fn push_source(&mut self, record: SourceRecord<T>, coeffs: Vec<[Complex<T>; 2]>) -> Result<()> {
        if coeffs.len() != self.window_len() {
            return Err(Error::Format(format!(
                "source {} has {} coefficient pairs, window holds {}",
                record.id,
                coeffs.len(),
                self.window_len()
            )));
        }
        self.sources.push(record);
        self.coeffs.push(coeffs);
        Ok(())
    }

    /// Concatenates single- or multi-source data sets sharing parameters and window.
    pub fn merge(parts: Vec<Self>) -> Result<Self> {
        let mut it = parts.into_iter();
        let mut out = it.next().ok_or_else(|| Error::Format("nothing to merge".into()))?;
        for part in it {
            if part.params != out.params || part.j_min != out.j_min || part.j_max != out.j_max {
                return Err(Error::Format("cannot merge data with different parameters or mode windows".into()));
            }
            out.sources.extend(part.sources);
            out.coeffs.extend(part.coeffs);
        }
        Ok(out)
    }

    pub fn params(&self) -> &MediumParams<T> {
        &self.params
    }

    pub fn window(&self) -> RangeInclusive<i64> {
        self.j_min..=self.j_max
    }

    pub fn window_len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn origin(&self) -> DataOrigin<T> {
        self.origin
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[SourceRecord<T>] {
        &self.sources
    }

    pub fn set_source_record(&mut self, l: usize, record: SourceRecord<T>) {
        self.sources[l] = record;
    }

    /// `{j : beta_j real}`, ascending.
    pub fn prop_set(&self) -> Vec<i64> {
        self.params.propagating_set()
    }

    /// `[u_j^+, u_j^-]` of source slot `l`, zero outside the window.
    pub fn coeff(&self, l: usize, j: i64) -> [Complex<T>; 2] {
        if j < self.j_min || j > self.j_max {
            return [czero(), czero()];
        }
        self.coeffs[l][(j - self.j_min) as usize]
    }

    pub fn coeff_mut(&mut self, l: usize, j: i64) -> Option<&mut [Complex<T>; 2]> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        self.coeffs[l].get_mut((j - self.j_min) as usize)
    }

    /// All pairs of source slot `l`, indexed by `j - j_min`.
    pub fn source_coeffs(&self, l: usize) -> &[[Complex<T>; 2]] {
        &self.coeffs[l]
    }

    pub fn source_coeffs_mut(&mut self, l: usize) -> &mut [[Complex<T>; 2]] {
        &mut self.coeffs[l]
    }

    /// Keeps only the source slots selected by `order`, in that order.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            sources: order.iter().map(|&l| self.sources[l]).collect(),
            coeffs: order.iter().map(|&l| self.coeffs[l].clone()).collect(),
            ..self.clone()
        }
    }

    /// Every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        for pairs in &mut out.coeffs {
            for p in pairs.iter_mut() {
                p[0] = p[0] * c;
                p[1] = p[1] * c;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .flatten()
            .all(|p| p.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }
}
