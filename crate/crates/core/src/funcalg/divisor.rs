//! Finite divisors: zeros (positive multiplicity) and poles (negative).

use num_complex::Complex;
use serde::Serialize;

use crate::scalar::{angle_0_2pi, Real};

/// Points closer than `MERGE_TOL * (1 + |z|)` are treated as one location.
pub const MERGE_TOL: f64 = 1e-10;

/// Zeros and poles inside `|z| < radius`, in canonical order (modulus, then
/// argument in `[0, 2π)`), with pairwise distinct locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor<T> {
    entries: Vec<(Complex<T>, i32)>,
    radius: T,
}

/// One divisor entry in serializable form.
#[derive(Debug, Clone, Serialize)]
pub struct DivisorEntry {
    pub location: [f64; 2],
    pub multiplicity: i32,
}

impl<T: Real> Divisor<T> {
    /// Canonicalizes raw entries: drops points outside the disk, merges
    /// coincident locations, removes cancelled multiplicities and sorts.
    pub fn from_raw(raw: impl IntoIterator<Item = (Complex<T>, i32)>, radius: T) -> Self {
        let mut pts: Vec<(Complex<T>, i32)> = raw.into_iter().filter(|(z, m)| *m != 0 && z.norm() < radius).collect();
        pts.sort_by(|a, b| canonical(&a.0, &b.0));
        let mut merged: Vec<(Complex<T>, i32)> = Vec::with_capacity(pts.len());
        for (z, m) in pts {
            let tol = T::lit(MERGE_TOL) * (T::one() + z.norm());
            let hit = merged
                .iter_mut()
                .rev()
                .take_while(|(w, _)| z.norm() - w.norm() <= tol)
                .find(|(w, _)| (*w - z).norm() <= tol);
            match hit {
                Some(entry) => entry.1 += m,
                None => merged.push((z, m)),
            }
        }
        merged.retain(|(_, m)| *m != 0);
        Self { entries: merged, radius }
    }

    pub fn empty(radius: T) -> Self {
        Self { entries: Vec::new(), radius }
    }

    pub fn entries(&self) -> &[(Complex<T>, i32)] {
        &self.entries
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Zeros with positive multiplicities.
    pub fn zeros(&self) -> impl Iterator<Item = (Complex<T>, u32)> + '_ {
        self.entries.iter().filter(|e| e.1 > 0).map(|&(z, m)| (z, m as u32))
    }

    /// Poles with positive orders.
    pub fn poles(&self) -> impl Iterator<Item = (Complex<T>, u32)> + '_ {
        self.entries.iter().filter(|e| e.1 < 0).map(|&(z, m)| (z, (-m) as u32))
    }

    /// The divisor of `1/f`.
    pub fn inverted(&self) -> Self {
        Self { entries: self.entries.iter().map(|&(z, m)| (z, -m)).collect(), radius: self.radius }
    }

    /// Restriction to `|z| < r` (`r` no larger than the enumeration radius).
    pub fn restrict(&self, r: T) -> Self {
        let r = r.min(self.radius);
        Self { entries: self.entries.iter().copied().filter(|(z, _)| z.norm() < r).collect(), radius: r }
    }

    /// Multiplicity-weighted `(poles, zeros)` with modulus below `r`.
    pub fn counts(&self, r: T) -> (u64, u64) {
        let mut poles = 0u64;
        let mut zeros = 0u64;
        for &(z, m) in &self.entries {
            if z.norm() < r {
                if m < 0 {
                    poles += (-m) as u64;
                } else {
                    zeros += m as u64;
                }
            }
        }
        (poles, zeros)
    }

    /// Integrated counting function of the poles:
    /// `Σ_{0<|b|<r} log(r/|b|) + n(0) log r`.
    pub fn counting_poles(&self, r: T) -> T {
        integrated(self.poles(), r)
    }

    /// Integrated counting function of the zeros.
    pub fn counting_zeros(&self, r: T) -> T {
        integrated(self.zeros(), r)
    }

    /// Locations `|z|` of all entries (zeros and poles).
    pub fn moduli(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().map(|(z, _)| z.norm())
    }

    pub fn to_entries(&self) -> Vec<DivisorEntry> {
        self.entries
            .iter()
            .map(|&(z, m)| DivisorEntry { location: [z.re.as_f64(), z.im.as_f64()], multiplicity: m })
            .collect()
    }
}

fn integrated<T: Real>(pts: impl Iterator<Item = (Complex<T>, u32)>, r: T) -> T {
    let lr = r.ln();
    pts.filter(|(z, _)| z.norm() < r)
        .map(|(z, m)| {
            let a = z.norm();
            let w = if a == T::zero() { lr } else { (r / a).ln() };
            w * T::count(m as usize)
        })
        .sum()
}

fn canonical<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.norm().total_order(&b.norm()).then_with(|| angle_0_2pi(*a).total_order(&angle_0_2pi(*b)))
}
