// SPDX-License-Identifier: Apache-2.0

//! Finite square tight-binding lattices with reflecting boundaries.
//!
//! Eigenmodes of an `Nx × Ny` lattice with hard-wall boundaries are product
//! sine waves with pseudomomenta `k_α = π l_α / (N_α + 1)`, `l_α ∈ [1, N_α]`.
//! Two orientations are supported:
//!
//! * [`Orientation::Standard`]: `ω = −2J(cos kx + cos ky) − 4J̃ cos kx cos ky`
//! * [`Orientation::Tilted`]: lattice rotated by 45°, `ω = −2J cos kx cos ky`

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default half-width of the resonance window, in units of `J`.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Standard,
    Tilted,
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Orientation::Standard),
            "tilted" => Ok(Orientation::Tilted),
            other => Err(Error::Config(format!(
                "orientation: expected \"standard\" or \"tilted\", got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Orientation::Standard => f.write_str("standard"),
            Orientation::Tilted => f.write_str("tilted"),
        }
    }
}

/// Geometry and hoppings of a finite lattice. Energies are in units of `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    nx: usize,
    ny: usize,
    hopping: f64,
    diagonal_hopping: f64,
    orientation: Orientation,
}

impl LatticeSpec {
    pub fn new(
        nx: usize,
        ny: usize,
        hopping: f64,
        diagonal_hopping: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Config(format!(
                "lattice must be at least 2x2, got {nx}x{ny}"
            )));
        }
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(Error::Config(format!("hopping J must be > 0, got {hopping}")));
        }
        if !(diagonal_hopping.is_finite() && diagonal_hopping >= 0.0) {
            return Err(Error::Config(format!(
                "diagonal hopping must be >= 0, got {diagonal_hopping}"
            )));
        }
        if orientation == Orientation::Tilted && diagonal_hopping != 0.0 {
            return Err(Error::UnsupportedConfiguration(
                "tilted orientation does not support a diagonal hopping term".into(),
            ));
        }
        Ok(Self { nx, ny, hopping, diagonal_hopping, orientation })
    }

    /// Standard orientation, `J = 1`, no diagonal hopping.
    pub fn standard(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, 1.0, 0.0, Orientation::Standard)
    }

    /// Tilted orientation with `J = 1`.
    pub fn tilted(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, 1.0, 0.0, Orientation::Tilted)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn diagonal_hopping(&self) -> f64 {
        self.diagonal_hopping
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn num_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// Closed-form band energy at pseudomomentum `(kx, ky)`.
    pub fn energy(&self, kx: f64, ky: f64) -> f64 {
        let (cx, cy) = (kx.cos(), ky.cos());
        match self.orientation {
            Orientation::Standard => {
                -2.0 * self.hopping * (cx + cy) - 4.0 * self.diagonal_hopping * cx * cy
            }
            Orientation::Tilted => -2.0 * self.hopping * cx * cy,
        }
    }

    /// Normalization of the product-sine mode profile on this rectangle.
    pub fn mode_norm(&self) -> f64 {
        2.0 / (((self.nx + 1) * (self.ny + 1)) as f64).sqrt()
    }

    pub fn contains(&self, site: Site) -> bool {
        (1..=self.nx).contains(&site.x) && (1..=self.ny).contains(&site.y)
    }

    pub fn check_site(&self, site: Site) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "site ({}, {}) outside the {}x{} lattice",
                site.x, site.y, self.nx, self.ny
            )))
        }
    }

    /// Row-major (y outer, x inner) index of a site.
    pub fn site_index(&self, site: Site) -> usize {
        (site.y - 1) * self.nx + (site.x - 1)
    }

    /// All sites, y-major then x, matching [`LatticeSpec::site_index`].
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (1..=self.ny).flat_map(move |y| (1..=self.nx).map(move |x| Site { x, y }))
    }
}

/// Band energy for `spec`, with the validation of [`LatticeSpec::new`]
/// re-applied so that hand-built specs cannot bypass the tilted restriction.
pub fn dispersion(spec: &LatticeSpec, kx: f64, ky: f64) -> Result<f64> {
    if spec.orientation == Orientation::Tilted && spec.diagonal_hopping != 0.0 {
        return Err(Error::UnsupportedConfiguration(
            "tilted orientation does not support a diagonal hopping term".into(),
        ));
    }
    Ok(spec.energy(kx, ky))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl From<(usize, usize)> for Site {
    fn from((x, y): (usize, usize)) -> Self {
        Self { x, y }
    }
}

/// One standing-wave eigenmode of the finite lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub lx: usize,
    pub ly: usize,
    pub kx: f64,
    pub ky: f64,
    pub omega: f64,
}

/// Every eigenmode of a lattice in `lx`-major order, together with the
/// per-axis sine tables needed to evaluate mode profiles quickly.
#[derive(Debug, Clone)]
pub struct ModeTable {
    spec: LatticeSpec,
    modes: Vec<Mode>,
    // sin_x[(lx-1) * nx + (x-1)] = sin(kx x), likewise for y.
    sin_x: Vec<f64>,
    sin_y: Vec<f64>,
}

fn sine_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n * n);
    for l in 1..=n {
        let k = PI * l as f64 / (n + 1) as f64;
        table.extend((1..=n).map(|x| (k * x as f64).sin()));
    }
    table
}

/// Enumerates all `Nx·Ny` modes, `lx`-major.
pub fn enumerate_modes(spec: &LatticeSpec) -> ModeTable {
    let mut modes = Vec::with_capacity(spec.num_sites());
    for lx in 1..=spec.nx {
        let kx = PI * lx as f64 / (spec.nx + 1) as f64;
        for ly in 1..=spec.ny {
            let ky = PI * ly as f64 / (spec.ny + 1) as f64;
            modes.push(Mode { lx, ly, kx, ky, omega: spec.energy(kx, ky) });
        }
    }
    ModeTable {
        spec: *spec,
        modes,
        sin_x: sine_table(spec.nx),
        sin_y: sine_table(spec.ny),
    }
}

impl ModeTable {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Profile `f_{r,k}` of the mode at `index`; the site must be in range.
    #[inline]
    pub fn profile(&self, index: usize, site: Site) -> f64 {
        let m = &self.modes[index];
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        self.spec.mode_norm()
            * self.sin_x[(m.lx - 1) * nx + site.x - 1]
            * self.sin_y[(m.ly - 1) * ny + site.y - 1]
    }

    /// Profiles of every mode at one site, in table order.
    pub fn profiles_at(&self, site: Site) -> Vec<f64> {
        (0..self.modes.len()).map(|i| self.profile(i, site)).collect()
    }

    /// Indices of the modes with `|ω_k − omega0| ≤ tol`, in table order.
    pub fn resonant_indices(&self, omega0: f64, tol: f64) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| (m.omega - omega0).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// `sin(kx·x)` for mode index `lx`, without normalization.
    #[inline]
    pub fn sin_x(&self, lx: usize, x: usize) -> f64 {
        self.sin_x[(lx - 1) * self.spec.nx + x - 1]
    }

    /// `sin(ky·y)` for mode index `ly`, without normalization.
    #[inline]
    pub fn sin_y(&self, ly: usize, y: usize) -> f64 {
        self.sin_y[(ly - 1) * self.spec.ny + y - 1]
    }

    pub fn index_of(&self, lx: usize, ly: usize) -> Option<usize> {
        if (1..=self.spec.nx).contains(&lx) && (1..=self.spec.ny).contains(&ly) {
            Some((lx - 1) * self.spec.ny + (ly - 1))
        } else {
            None
        }
    }
}

/// Evaluates `f_{r,k} = 2/√((Nx+1)(Ny+1)) · sin(kx x)·sin(ky y)`.
pub fn mode_amplitude(spec: &LatticeSpec, mode: &Mode, site: Site) -> Result<f64> {
    spec.check_site(site)?;
    Ok(spec.mode_norm() * (mode.kx * site.x as f64).sin() * (mode.ky * site.y as f64).sin())
}

/// Modes degenerate with `omega0` within `tol`. An empty result means the
/// emitter has no resonant decay channel.
pub fn resonant_manifold(table: &ModeTable, omega0: f64, tol: f64) -> Vec<Mode> {
    table
        .resonant_indices(omega0, tol)
        .into_iter()
        .map(|i| table.modes[i])
        .collect()
}

/// One connected piece of an iso-frequency contour.
#[derive(Debug, Clone)]
pub struct ContourBranch {
    pub points: Vec<(f64, f64)>,
    /// Largest perpendicular distance from the total-least-squares line.
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct IsoContour {
    pub omega0: f64,
    pub branches: Vec<ContourBranch>,
}

impl IsoContour {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.branches.iter().flat_map(|b| b.points.iter().copied())
    }

    pub fn max_deviation(&self) -> f64 {
        self.branches.iter().map(|b| b.max_deviation).fold(0.0, f64::max)
    }
}

const BISECTION_TOL: f64 = 1e-12;
const SUBDIVISIONS: usize = 8;

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Roots of `f` on `[0, π]` found by sign changes on a `cells`-cell grid.
fn roots_on_line(f: impl Fn(f64) -> f64, cells: usize) -> Vec<f64> {
    let h = PI / cells as f64;
    let mut roots = Vec::new();
    let mut a = 0.0;
    let mut fa = f(a);
    for i in 1..=cells {
        let b = h * i as f64;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(&f, a, b));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(a);
    }
    roots
}

/// Links roots on consecutive scan lines into chains; a root continues the
/// nearest chain whose last point lies within `gap`.
fn chain_roots(lines: &[Vec<(f64, f64)>], gap: f64) -> Vec<Vec<(f64, f64)>> {
    let mut open: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut closed = Vec::new();
    for line in lines {
        let mut next_open: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut taken = vec![false; open.len()];
        for &p in line {
            let best = open
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(i, c)| {
                    let q = c.last().unwrap();
                    (i, ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt())
                })
                .filter(|(_, d)| *d <= gap)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, _)) => {
                    taken[i] = true;
                    let mut chain = std::mem::take(&mut open[i]);
                    chain.push(p);
                    next_open.push(chain);
                }
                None => next_open.push(vec![p]),
            }
        }
        for (i, chain) in open.into_iter().enumerate() {
            if !taken[i] {
                closed.push(chain);
            }
        }
        open = next_open;
    }
    closed.extend(open);
    closed
}

/// Joins chains where an endpoint of one lies within `gap` of a point of the
/// other. Crossing branches touch only mid-chain and stay separate.
fn merge_touching(mut chains: Vec<Vec<(f64, f64)>>, gap: f64) -> Vec<Vec<(f64, f64)>> {
    let near = |p: &(f64, f64), c: &[(f64, f64)]| {
        c.iter().any(|q| (p.0 - q.0).hypot(p.1 - q.1) <= gap)
    };
    let touches = |a: &[(f64, f64)], b: &[(f64, f64)]| {
        [a.first(), a.last()].into_iter().flatten().any(|p| near(p, b))
            || [b.first(), b.last()].into_iter().flatten().any(|p| near(p, a))
    };
    'outer: loop {
        for i in 0..chains.len() {
            for j in i + 1..chains.len() {
                if touches(&chains[i], &chains[j]) {
                    let other = chains.swap_remove(j);
                    chains[i].extend(other);
                    continue 'outer;
                }
            }
        }
        return chains;
    }
}

/// Max perpendicular distance of `points` from their total-least-squares line.
fn line_deviation(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.0, sy + p.1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.0 - mx, p.1 - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Principal direction of the 2x2 scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (ux, uy) = (theta.cos(), theta.sin());
    points
        .iter()
        .map(|p| ((p.0 - mx) * uy - (p.1 - my) * ux).abs())
        .fold(0.0, f64::max)
}

/// Traces the iso-frequency contour `ω(k) = omega0` over `[0, π]²`.
///
/// `samples` horizontal and `samples` vertical scan lines are root-found by
/// bisection; the vertical scans pick up nearly-horizontal pieces.
pub fn isofrequency_contour(spec: &LatticeSpec, omega0: f64, samples: usize) -> Result<IsoContour> {
    if samples < 3 {
        return Err(Error::Domain(format!("need at least 3 scan lines, got {samples}")));
    }
    dispersion(spec, 0.0, 0.0)?;
    let spacing = PI / samples as f64;
    let gap = 3.0 * spacing;
    let cells = SUBDIVISIONS * samples;
    let offsets: Vec<f64> = (0..samples).map(|i| (i as f64 + 0.5) * spacing).collect();

    let horizontal: Vec<Vec<(f64, f64)>> = offsets
        .iter()
        .map(|&ky| {
            roots_on_line(|kx| spec.energy(kx, ky) - omega0, cells)
                .into_iter()
                .map(|kx| (kx, ky))
                .collect()
        })
        .collect();
    let vertical: Vec<Vec<(f64, f64)>> = offsets
        .iter()
        .map(|&kx| {
            roots_on_line(|ky| spec.energy(kx, ky) - omega0, cells)
                .into_iter()
                .map(|ky| (kx, ky))
                .collect()
        })
        .collect();

    let mut chains = chain_roots(&horizontal, gap);
    chains.extend(chain_roots(&vertical, gap));
    let chains = merge_touching(chains, gap);
    if chains.is_empty() {
        return Err(Error::NoContour(omega0));
    }
    let branches = chains
        .into_iter()
        .map(|points| ContourBranch { max_deviation: line_deviation(&points), points })
        .collect();
    Ok(IsoContour { omega0, branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn dispersion_closed_forms() {
        let s = LatticeSpec::standard(3, 3).unwrap();
        assert_eq!(dispersion(&s, FRAC_PI_2, FRAC_PI_2).unwrap().abs() < 1e-15, true);
        let v = dispersion(&s, PI / 4.0, PI / 4.0).unwrap();
        assert!((v + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let t = LatticeSpec::tilted(3, 3).unwrap();
        assert!(dispersion(&t, FRAC_PI_2, 0.3).unwrap().abs() < 1e-15);
        let d = LatticeSpec::new(3, 3, 1.0, 0.2, Orientation::Standard).unwrap();
        assert!(dispersion(&d, FRAC_PI_2, FRAC_PI_2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn tilted_rejects_diagonal_hopping() {
        let err = LatticeSpec::new(5, 5, 1.0, 0.1, Orientation::Tilted).unwrap_err();
        assert!(matches!(err, Error::UnsupportedConfiguration(_)));
        let mut spec = LatticeSpec::tilted(5, 5).unwrap();
        spec.diagonal_hopping = 0.1;
        assert!(matches!(
            dispersion(&spec, 0.1, 0.2),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LatticeSpec::standard(1, 5).is_err());
        assert!(LatticeSpec::new(3, 3, 0.0, 0.0, Orientation::Standard).is_err());
        assert!(LatticeSpec::new(3, 3, 1.0, -0.1, Orientation::Standard).is_err());
        assert!("diagonal".parse::<Orientation>().is_err());
    }

    #[test]
    fn enumerates_three_by_three() {
        let table = enumerate_modes(&LatticeSpec::standard(3, 3).unwrap());
        assert_eq!(table.len(), 9);
        let allowed = [PI / 4.0, FRAC_PI_2, 3.0 * PI / 4.0];
        for m in table.modes() {
            assert!(allowed.iter().any(|k| (k - m.kx).abs() < 1e-15));
            assert!(allowed.iter().any(|k| (k - m.ky).abs() < 1e-15));
        }
        let center = table.index_of(2, 2).unwrap();
        assert!(table.modes()[center].omega.abs() < 1e-15);
        let big = enumerate_modes(&LatticeSpec::tilted(49, 29).unwrap());
        assert_eq!(big.len(), 1421);
    }

    #[test]
    fn mode_amplitude_values() {
        let spec = LatticeSpec::standard(3, 3).unwrap();
        let table = enumerate_modes(&spec);
        let m = table.modes()[table.index_of(2, 2).unwrap()];
        assert!((mode_amplitude(&spec, &m, Site::new(1, 1)).unwrap() - 0.5).abs() < 1e-15);
        for ly in 1..=3 {
            let m = table.modes()[table.index_of(2, ly).unwrap()];
            for y in 1..=3 {
                assert!(mode_amplitude(&spec, &m, Site::new(2, y)).unwrap().abs() < 1e-15);
            }
        }
        assert!(matches!(
            mode_amplitude(&spec, &m, Site::new(4, 1)),
            Err(Error::Domain(_))
        ));
        assert!(mode_amplitude(&spec, &m, Site::new(0, 1)).is_err());

        let spec4 = LatticeSpec::standard(4, 4).unwrap();
        let t4 = enumerate_modes(&spec4);
        let m = t4.modes()[t4.index_of(1, 3).unwrap()];
        let norm: f64 = spec4
            .sites()
            .map(|s| mode_amplitude(&spec4, &m, s).unwrap().powi(2))
            .sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_profile_matches_direct_formula() {
        let spec = LatticeSpec::standard(7, 4).unwrap();
        let table = enumerate_modes(&spec);
        for (i, m) in table.modes().iter().enumerate() {
            for s in spec.sites() {
                let direct = mode_amplitude(&spec, m, s).unwrap();
                assert!((direct - table.profile(i, s)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn resonant_manifold_counts() {
        let t9 = enumerate_modes(&LatticeSpec::standard(9, 9).unwrap());
        let res = resonant_manifold(&t9, 0.0, 1e-12);
        assert_eq!(res.len(), 9);
        assert!(res.iter().all(|m| m.lx + m.ly == 10));

        let t5 = enumerate_modes(&LatticeSpec::tilted(5, 5).unwrap());
        let res = resonant_manifold(&t5, 0.0, 1e-12);
        assert_eq!(res.len(), 9);
        assert!(res.iter().all(|m| m.lx == 3 || m.ly == 3));

        let t4 = enumerate_modes(&LatticeSpec::tilted(4, 4).unwrap());
        assert!(resonant_manifold(&t4, 0.0, 1e-12).is_empty());
    }

    #[test]
    fn straight_contours() {
        let s = LatticeSpec::standard(9, 9).unwrap();
        let c = isofrequency_contour(&s, 0.0, 64).unwrap();
        assert_eq!(c.branches.len(), 1);
        assert!(c.max_deviation() <= 1e-9);
        for (kx, ky) in c.points() {
            assert!((kx + ky - PI).abs() < 1e-9);
            assert!(s.energy(kx, ky).abs() <= 1e-10);
        }

        let t = LatticeSpec::tilted(9, 9).unwrap();
        let c = isofrequency_contour(&t, 0.0, 64).unwrap();
        assert_eq!(c.branches.len(), 2);
        assert!(c.max_deviation() <= 1e-9);
        for (kx, ky) in c.points() {
            let on_line = (kx - FRAC_PI_2).abs() < 1e-9 || (ky - FRAC_PI_2).abs() < 1e-9;
            assert!(on_line, "({kx}, {ky})");
        }
    }

    #[test]
    fn contour_outside_band_is_an_error() {
        let s = LatticeSpec::standard(9, 9).unwrap();
        assert!(matches!(isofrequency_contour(&s, 4.5, 32), Err(Error::NoContour(_))));
        assert!(isofrequency_contour(&s, 0.0, 2).is_err());
    }
}
