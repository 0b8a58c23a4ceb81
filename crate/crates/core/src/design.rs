// SPDX-License-Identifier: Apache-2.0

//! Dark-state architectures: null spaces of the dissipation matrix, Bell-pair
//! superpositions, and the catalogued cross and multi-row layouts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dynamics::{assemble_hamiltonian, evolve_exact_with, PureState, StepConfig};
use crate::error::{Error, Result};
use crate::lattice::{ModeTable, Orientation, Site};
use crate::rates::{crosstalk_map, lamb_shift, steady_rates, AtomSet, RateMatrix};

/// Relative singular-value cutoff below which a direction counts as dark.
pub const NULL_SPACE_CUTOFF: f64 = 1e-9;

/// Single-excitation amplitudes `c_j` over the atoms, `|ψ⟩ = Σ c_j σ_j⁺|0…0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkVector {
    pub amps: Vec<C64>,
}

impl DarkVector {
    pub fn from_real(values: &[f64]) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("dark vector must be nonzero".into()));
        }
        Ok(Self { amps: values.iter().map(|v| C64::new(v / norm, 0.0)).collect() })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// `‖M v‖` for a real symmetric `M`.
    pub fn apply_norm(&self, m: &DMatrix<f64>) -> f64 {
        let v = DVector::from_column_slice(&self.amps);
        (m.map(|x| C64::new(x, 0.0)) * v).norm()
    }

    /// `‖M v − (v†M v) v‖`: distance from being an eigenvector of `M`.
    pub fn eigen_residual(&self, m: &DMatrix<f64>) -> f64 {
        let v = DVector::from_column_slice(&self.amps);
        let mv = m.map(|x| C64::new(x, 0.0)) * &v;
        let rayleigh = v.dotc(&mv);
        (mv - v * rayleigh).norm()
    }
}

/// Per-atom annotations of a catalogued layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleTag {
    Free,
    CrossArm,
    CrossCenter,
    CrossVertex,
    /// Member of row `row` of a multi-row layout; `parity` is `sin(πx/2)`.
    Row { row: usize, parity: i8 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub positions: Vec<Site>,
    pub role_tags: Vec<RoleTag>,
}

impl Layout {
    pub fn free(positions: Vec<Site>) -> Self {
        let role_tags = vec![RoleTag::Free; positions.len()];
        Self { positions, role_tags }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn atoms(&self, omega: f64, lambda: f64) -> Result<AtomSet> {
        AtomSet::new(self.positions.clone(), omega, lambda)
    }

    /// Atom indices grouped by row tag; atoms without a row tag are skipped.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, tag) in self.role_tags.iter().enumerate() {
            if let RoleTag::Row { row, .. } = *tag {
                match rows.iter_mut().find(|(r, _)| *r == row) {
                    Some((_, members)) => members.push(i),
                    None => rows.push((row, vec![i])),
                }
            }
        }
        rows.sort_by_key(|(r, _)| *r);
        rows.into_iter().map(|(_, m)| m).collect()
    }
}

/// Orthonormal basis of `{c : Γc = 0}` from the SVD of `Γ`, keeping singular
/// directions below `tol × σ_max`. Ordered by increasing singular value.
pub fn dark_basis(gamma: &RateMatrix, tol: f64) -> Vec<DarkVector> {
    let n = gamma.dim();
    if n == 0 {
        return Vec::new();
    }
    let svd = gamma.gamma.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let mut dark: Vec<(f64, Vec<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * sigma_max || sigma_max == 0.0)
        .map(|(i, &s)| (s, v_t.row(i).iter().copied().collect()))
        .collect();
    dark.sort_by(|a, b| a.0.total_cmp(&b.0));
    dark.into_iter()
        .map(|(_, v)| DarkVector { amps: v.into_iter().map(|x| C64::new(x, 0.0)).collect() })
        .collect()
}

/// `Σ_p s_p (σ_i⁺ + σ_j⁺)/√2` over disjoint pairs, normalized. The sign
/// multiplies the amplitude of the first atom of each pair relative to the
/// second, matching `(|01⟩ ± |10⟩)/√2`; further the pairs are superposed
/// with equal weight.
pub fn bell_superposition(n: usize, pairs: &[(usize, usize)], signs: &[f64]) -> Result<DarkVector> {
    if pairs.len() != signs.len() {
        return Err(Error::Domain("one sign per pair is required".into()));
    }
    if pairs.is_empty() {
        return Err(Error::Domain("at least one pair is required".into()));
    }
    let mut used = vec![false; n];
    let mut amps = vec![C64::new(0.0, 0.0); n];
    let a = 1.0 / ((2 * pairs.len()) as f64).sqrt();
    for (&(i, j), &s) in pairs.iter().zip(signs) {
        if i >= n || j >= n || i == j {
            return Err(Error::Domain(format!("invalid pair ({i}, {j}) for {n} atoms")));
        }
        if used[i] || used[j] {
            return Err(Error::Domain(format!("pair ({i}, {j}) overlaps another pair")));
        }
        used[i] = true;
        used[j] = true;
        amps[i] = C64::new(s.signum() * a, 0.0);
        amps[j] = C64::new(a, 0.0);
    }
    Ok(DarkVector { amps })
}

/// The cross layout on an odd `N × N` standard lattice: the central row and
/// column without the center, then the center, then four vertex atoms on
/// the diagonals through the center.
///
/// The vertex offset `d` is the smallest diagonal distance at which the
/// center's cross-talk map reaches `|Γ_1r/Γ_11| = 1` again, or 1 (the
/// diagonal-adjacent sites) when the map has no such recurrence.
pub fn cross_layout(table: &ModeTable) -> Result<Layout> {
    let spec = table.spec();
    if spec.orientation() != Orientation::Standard || spec.nx() != spec.ny() {
        return Err(Error::UnsupportedConfiguration(
            "cross layout needs a square standard-orientation lattice".into(),
        ));
    }
    let n = spec.nx();
    if n % 2 == 0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "cross layout needs an odd lattice size, got {n}"
        )));
    }
    let c = (n + 1) / 2;
    let center = Site::new(c, c);
    let map = crosstalk_map(table, center, 0.0)?;
    let offset = (1..c)
        .find(|&d| (map.get(Site::new(c + d, c + d)).abs() - 1.0).abs() < 1e-9)
        .unwrap_or(1);

    let mut positions = Vec::with_capacity(2 * n + 3);
    let mut role_tags = Vec::with_capacity(2 * n + 3);
    for i in (1..=n).filter(|&i| i != c) {
        positions.push(Site::new(c, i));
        role_tags.push(RoleTag::CrossArm);
    }
    for i in (1..=n).filter(|&i| i != c) {
        positions.push(Site::new(i, c));
        role_tags.push(RoleTag::CrossArm);
    }
    positions.push(center);
    role_tags.push(RoleTag::CrossCenter);
    for (sx, sy) in [(1i64, 1i64), (-1, 1), (-1, -1), (1, -1)] {
        let x = (c as i64 + sx * offset as i64) as usize;
        let y = (c as i64 + sy * offset as i64) as usize;
        positions.push(Site::new(x, y));
        role_tags.push(RoleTag::CrossVertex);
    }
    Ok(Layout { positions, role_tags })
}

/// Radiatively independent rows on an odd×odd tilted lattice: rows at even
/// `y = 2, 4, …` and atoms at every odd `x`.
pub fn multiline_layout(table: &ModeTable, rows_requested: usize) -> Result<Layout> {
    let spec = table.spec();
    if spec.orientation() != Orientation::Tilted {
        return Err(Error::UnsupportedConfiguration("multi-row layout needs the tilted orientation".into()));
    }
    if spec.nx() % 2 == 0 || spec.ny() % 2 == 0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "multi-row layout needs odd dimensions, got {}x{}",
            spec.nx(),
            spec.ny()
        )));
    }
    let capacity = (spec.ny() - 1) / 2;
    if rows_requested > capacity {
        return Err(Error::Capacity(format!(
            "{rows_requested} rows requested, at most {capacity} fit"
        )));
    }
    let mut positions = Vec::new();
    let mut role_tags = Vec::new();
    for row in 0..rows_requested {
        let y = 2 * (row + 1);
        for x in (1..=spec.nx()).step_by(2) {
            positions.push(Site::new(x, y));
            let parity = if x % 4 == 1 { 1 } else { -1 };
            role_tags.push(RoleTag::Row { row, parity });
        }
    }
    Ok(Layout { positions, role_tags })
}

/// Max `|Γ_ij|` over atom pairs in different row groups.
pub fn max_inter_block(gamma: &DMatrix<f64>, groups: &[Vec<usize>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &i in ga {
                for &j in gb {
                    worst = worst.max(gamma[(i, j)].abs());
                }
            }
        }
    }
    worst
}

/// Connected components of the graph `|Γ_ij| > tol · max|Γ|`.
pub fn radiative_blocks(gamma: &DMatrix<f64>, tol: f64) -> Vec<Vec<usize>> {
    let n = gamma.nrows();
    let threshold = tol * gamma.amax();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            cursor += 1;
            for j in 0..n {
                if label[j] == usize::MAX && gamma[(i, j)].abs() > threshold {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkReport {
    /// `‖Γv‖ / ‖Γ‖₂`.
    pub steady_residual: f64,
    /// `‖H_LS v − (v†H_LS v) v‖` in units of `λ²/J`.
    pub lamb_residual: f64,
    /// `Σ_j |c_j(T)|²` from the exact dynamics.
    pub retained_population: f64,
    /// `|‖ψ(T)‖² − 1|` of that run.
    pub norm_drift: f64,
    /// `|⟨H⟩(T) − ⟨H⟩(0)|` of that run.
    pub energy_drift: f64,
}

/// Certifies a candidate dark vector on `layout`: steady residual, Lamb-shift
/// invariance, and the atomic population kept by the exact dynamics at `t_final`.
pub fn certify_dark(
    layout: &Layout,
    vector: &DarkVector,
    table: &ModeTable,
    omega: f64,
    lambda: f64,
    t_final: f64,
    dt: f64,
) -> Result<DarkReport> {
    if vector.len() != layout.len() {
        return Err(Error::Domain(format!(
            "vector has {} entries for {} atoms",
            vector.len(),
            layout.len()
        )));
    }
    let atoms = layout.atoms(omega, lambda)?;
    // Residuals are scale-free; evaluate them at unit coupling so that λ = 0
    // certification still reports the geometry.
    let unit = atoms.with_lambda(1.0)?;
    let rates = steady_rates(table, &unit)?;
    let gamma_norm = rates.gamma.clone().svd(false, false).singular_values.max();
    let steady_residual = if gamma_norm > 0.0 { vector.apply_norm(&rates.gamma) / gamma_norm } else { 0.0 };
    let lamb = lamb_shift(table, &unit)?;
    let lamb_residual = vector.eigen_residual(&lamb.shift);

    let h = assemble_hamiltonian(table, &atoms)?;
    let psi0 = PureState::atomic(&vector.amps, table.len())?;
    let stride = ((t_final / dt).round() as usize).max(1);
    let last = evolve_exact_with(&h, &psi0, &StepConfig::new(dt, t_final, stride), |_| {})?;
    Ok(DarkReport {
        steady_residual,
        lamb_residual,
        retained_population: last.atomic_population(),
        norm_drift: (last.norm_sqr() - 1.0).abs(),
        energy_drift: (h.expectation(&last) - h.expectation(&psi0)).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_modes, LatticeSpec};

    fn rank_one(signs: &[f64]) -> RateMatrix {
        let n = signs.len();
        RateMatrix { gamma: DMatrix::from_fn(n, n, |i, j| signs[i] * signs[j]), manifold_size: 1 }
    }

    #[test]
    fn four_atom_null_space() {
        let g = rank_one(&[1.0, -1.0, 1.0, -1.0]);
        let basis = dark_basis(&g, NULL_SPACE_CUTOFF);
        assert_eq!(basis.len(), 3);
        for (a, u) in basis.iter().enumerate() {
            assert!(u.apply_norm(&g.gamma) < 1e-12);
            for v in &basis[a..] {
                let dot: C64 = u.amps.iter().zip(&v.amps).map(|(x, y)| x.conj() * y).sum();
                let expect = if std::ptr::eq(u, v) { 1.0 } else { 0.0 };
                assert!((dot.norm() - expect).abs() < 1e-12);
            }
        }
        let example = DarkVector::from_real(&[1.0, 3.0, 1.0, -1.0]).unwrap();
        assert!((example.amps[1].re - 3.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!(example.apply_norm(&g.gamma) < 1e-12);
    }

    #[test]
    fn two_atom_null_space() {
        let g = rank_one(&[1.0, 1.0]);
        let basis = dark_basis(&g, NULL_SPACE_CUTOFF);
        assert_eq!(basis.len(), 1);
        let v = &basis[0].amps;
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re.abs() - a).abs() < 1e-12 && (v[0].re + v[1].re).abs() < 1e-12);
        let identity = RateMatrix { gamma: DMatrix::identity(2, 2), manifold_size: 2 };
        assert!(dark_basis(&identity, NULL_SPACE_CUTOFF).is_empty());
    }

    #[test]
    fn bell_superpositions() {
        let v = bell_superposition(4, &[(0, 1), (2, 3)], &[1.0, 1.0]).unwrap();
        assert!(v.amps.iter().all(|c| (c.re - 0.5).abs() < 1e-15));
        assert!(v.apply_norm(&rank_one(&[1.0, -1.0, 1.0, -1.0]).gamma) < 1e-15);
        let single = bell_superposition(2, &[(0, 1)], &[-1.0]).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!((single.amps[0].re + a).abs() < 1e-15 && (single.amps[1].re - a).abs() < 1e-15);
        assert!(bell_superposition(4, &[(0, 1), (1, 2)], &[1.0, 1.0]).is_err());
        assert!(bell_superposition(4, &[(0, 1)], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn layout_preconditions() {
        let even = enumerate_modes(&LatticeSpec::standard(8, 8).unwrap());
        assert!(matches!(cross_layout(&even), Err(Error::UnsupportedConfiguration(_))));
        let tilted = enumerate_modes(&LatticeSpec::tilted(9, 9).unwrap());
        assert!(cross_layout(&tilted).is_err());
        assert!(matches!(multiline_layout(&tilted, 5), Err(Error::Capacity(_))));
        assert_eq!(multiline_layout(&tilted, 4).unwrap().len(), 20);
        let standard = enumerate_modes(&LatticeSpec::standard(9, 9).unwrap());
        assert!(multiline_layout(&standard, 1).is_err());
    }

    #[test]
    fn blocks_of_a_block_diagonal_matrix() {
        let mut g = DMatrix::zeros(4, 4);
        g[(0, 0)] = 1.0;
        g[(1, 1)] = 1.0;
        g[(0, 1)] = -1.0;
        g[(1, 0)] = -1.0;
        g[(2, 2)] = 1.0;
        g[(3, 3)] = 1.0;
        g[(2, 3)] = 1.0;
        g[(3, 2)] = 1.0;
        let blocks = radiative_blocks(&g, 1e-12);
        assert_eq!(blocks, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(max_inter_block(&g, &blocks), 0.0);
    }
}
