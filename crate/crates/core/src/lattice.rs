//! Joint spectrum `(m, g_l^m)` and unit-cell transport around the origin.
//!
//! A cell is transported along a closed path of anchors in the `(m, g)` plane.
//! At every step the first corner is placed on the lattice point of the
//! anchor's column nearest to the anchor; the remaining corners are predicted
//! by translating the current cell and snapped to the nearest lattice point in
//! their column. Comparing the labels of the final cell with those of the
//! initial one gives an integer matrix.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{balanced_l_star, boundary_parabolas};
use crate::spectral::{
    spheroidal_eigenvalues, symmetry_class, Parity, SpectralConfig, SpectralError,
    SpheroidalParams, SymmetryClass,
};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum LatticeError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid spectrum range m_max={m_max}, l_max={l_max}; need l_max >= m_max >= 0")]
    InvalidRange { m_max: i64, l_max: i64 },
    #[error("spectrum check failed at (m={m}, l={l}): {reason}")]
    Inconsistent { m: i64, l: i64, reason: String },
    #[error("state (m={m}, l={l}) not in the spectrum")]
    MissingState { m: i64, l: i64 },
    #[error("column m={0} not in the spectrum")]
    MissingColumn(i64),
    #[error("m=0 column ends at l={l_max} with g={g} < 0; extend l_max")]
    ColumnTruncated { l_max: i64, g: f64 },
    #[error("lattice is degenerate at gamma = 0; cells are not defined")]
    Degenerate,
    #[error("only {0} negative states on m=0; too few for a loop around the origin")]
    TooFewNegative(usize),
    #[error("predicted corner (m={m}, g={g}) lies off the lattice")]
    OffLattice { m: i64, g: f64 },
    #[error("ambiguous snap at (m={m}, g={g}): candidates l={first} and l={second}")]
    AmbiguousSnap { m: i64, g: f64, first: i64, second: i64 },
    #[error("loop spans only {half_width} sublattice columns on each side; gamma too small")]
    LoopTooCoarse { half_width: i64 },
    #[error("loop is not closed")]
    LoopNotClosed,
    #[error("loop needs at least two anchors")]
    LoopTooShort,
    #[error("anchor columns {from} -> {to} not compatible with column step {step}")]
    BadAnchorStep { from: i64, to: i64, step: i64 },
    #[error("final cell is not an integer unimodular image of the initial cell")]
    NonIntegral,
    #[error("initial cell is degenerate")]
    DegenerateCell,
}

/// One joint eigenvalue with its symmetry labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub m: i64,
    pub l: i64,
    pub g: f64,
    pub class: SymmetryClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub gamma: f64,
    /// Sorted by `(m, l)`.
    pub points: Vec<SpectrumPoint>,
    index: HashMap<(i64, i64), usize>,
    /// Per column, indices into `points` in ascending `g`.
    columns: BTreeMap<i64, Vec<usize>>,
}

impl JointSpectrum {
    pub fn from_points(gamma: f64, mut points: Vec<SpectrumPoint>) -> Self {
        points.sort_by_key(|p| (p.m, p.l));
        let index = points
            .iter()
            .enumerate()
            .map(|(i, p)| ((p.m, p.l), i))
            .collect();
        let mut columns: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            columns.entry(p.m).or_default().push(i);
        }
        for col in columns.values_mut() {
            col.sort_by(|&a, &b| points[a].g.total_cmp(&points[b].g));
        }
        Self {
            gamma,
            points,
            index,
            columns,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, m: i64, l: i64) -> Option<f64> {
        self.index.get(&(m, l)).map(|&i| self.points[i].g)
    }

    pub fn point(&self, m: i64, l: i64) -> Option<&SpectrumPoint> {
        self.index.get(&(m, l)).map(|&i| &self.points[i])
    }

    /// Points of column `m`, ascending in `g`.
    pub fn column(&self, m: i64) -> Vec<&SpectrumPoint> {
        self.columns
            .get(&m)
            .map(|c| c.iter().map(|&i| &self.points[i]).collect())
            .unwrap_or_default()
    }

    pub fn m_range(&self) -> Option<(i64, i64)> {
        let lo = *self.columns.keys().next()?;
        let hi = *self.columns.keys().next_back()?;
        Some((lo, hi))
    }

    /// `(ħ m, ħ² g)` for display.
    pub fn scaled(&self, hbar: f64) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (hbar * p.m as f64, hbar * hbar * p.g))
            .collect()
    }

    /// CSV with header `gamma,m,l,g,parity_lm,parity_m,s2`, rows sorted by `(m, l)`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma,m,l,g,parity_lm,parity_m,s2\n");
        let tag = |p: Parity| match p {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        for p in &self.points {
            s.push_str(&format!(
                "{:.16e},{},{},{:.16e},{},{},{}\n",
                self.gamma,
                p.m,
                p.l,
                p.g,
                tag(p.class.parity_lm),
                tag(p.class.parity_m),
                if p.class.s2_invariant { "even" } else { "odd" }
            ));
        }
        s
    }
}

/// All states with `|m| <= m_max`, `|m| <= l <= l_max` at the given `γ`.
///
/// Columns are solved in parallel; negative `m` reuse the `|m|` column.
pub fn build_joint_spectrum(
    gamma: f64,
    m_max: i64,
    l_max: i64,
    cfg: &SpectralConfig,
) -> Result<JointSpectrum, LatticeError> {
    if m_max < 0 || l_max < m_max {
        return Err(LatticeError::InvalidRange { m_max, l_max });
    }
    let columns: Vec<Vec<(i64, f64)>> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let params = SpheroidalParams::from_gamma(m, gamma)?;
            let eig = spheroidal_eigenvalues(params, l_max, cfg)?;
            Ok(eig.into_iter().map(|e| (e.l, e.g)).collect())
        })
        .collect::<Result<_, SpectralError>>()?;

    let mut points = Vec::new();
    for (m, col) in columns.iter().enumerate() {
        let m = m as i64;
        let floor = (m * m) as f64 - gamma * gamma;
        for w in col.windows(2) {
            if w[1].1 <= w[0].1 {
                return Err(LatticeError::Inconsistent {
                    m,
                    l: w[1].0,
                    reason: "eigenvalues not increasing in l".into(),
                });
            }
        }
        for &(l, g) in col {
            if g < floor - 1e-6 {
                return Err(LatticeError::Inconsistent {
                    m,
                    l,
                    reason: format!("g={g} below the lower boundary {floor}"),
                });
            }
            let signs: &[i64] = if m == 0 { &[0] } else { &[m, -m] };
            for &sm in signs {
                points.push(SpectrumPoint {
                    m: sm,
                    l,
                    g,
                    class: symmetry_class(l, sm)?,
                });
            }
        }
    }
    Ok(JointSpectrum::from_points(gamma, points))
}

/// `#{l : g_l^0 < 0}`.
pub fn count_negative(spectrum: &JointSpectrum) -> Result<usize, LatticeError> {
    let col = spectrum.column(0);
    let top = col.last().ok_or(LatticeError::MissingColumn(0))?;
    if top.g < 0.0 {
        return Err(LatticeError::ColumnTruncated {
            l_max: top.l,
            g: top.g,
        });
    }
    Ok(col.iter().filter(|p| p.g < 0.0).count())
}

/// Sub-spectrum selectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetrySelector {
    All,
    /// Fixed parities of `l - m` and of `m`.
    Parity { lm: Parity, m: Parity },
    S2Even,
    S2Odd,
}

impl SymmetrySelector {
    pub fn accepts(&self, c: &SymmetryClass) -> bool {
        match *self {
            SymmetrySelector::All => true,
            SymmetrySelector::Parity { lm, m } => c.parity_lm == lm && c.parity_m == m,
            SymmetrySelector::S2Even => c.s2_invariant,
            SymmetrySelector::S2Odd => !c.s2_invariant,
        }
    }

    /// Column spacing of the sublattice.
    pub fn column_step(&self) -> i64 {
        match self {
            SymmetrySelector::Parity { .. } => 2,
            _ => 1,
        }
    }

    /// Column nearest to the origin that the sublattice occupies.
    pub fn base_column(&self) -> i64 {
        match self {
            SymmetrySelector::Parity { m: Parity::Odd, .. } => 1,
            _ => 0,
        }
    }

    pub const PARITY_CLASSES: [SymmetrySelector; 4] = [
        SymmetrySelector::Parity { lm: Parity::Even, m: Parity::Even },
        SymmetrySelector::Parity { lm: Parity::Even, m: Parity::Odd },
        SymmetrySelector::Parity { lm: Parity::Odd, m: Parity::Even },
        SymmetrySelector::Parity { lm: Parity::Odd, m: Parity::Odd },
    ];
}

pub fn filter_symmetry(spectrum: &JointSpectrum, selector: SymmetrySelector) -> JointSpectrum {
    let points = spectrum
        .points
        .iter()
        .filter(|p| selector.accepts(&p.class))
        .copied()
        .collect();
    JointSpectrum::from_points(spectrum.gamma, points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    B,
    T,
    Generic,
}

/// Four lattice labels `(m, l)` in counterclockwise order. `corners[1] - corners[0]`
/// is the horizontal edge, `corners[3] - corners[0]` the vertical edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitCell {
    pub corners: [(i64, i64); 4],
    pub kind: CellKind,
}

impl UnitCell {
    /// `(g_l^m, g_{l+1}^{m+1}, g_{l+2}^{m+1}, g_{l+1}^m)`.
    pub fn b(l: i64, m: i64) -> Self {
        Self {
            corners: [(m, l), (m + 1, l + 1), (m + 1, l + 2), (m, l + 1)],
            kind: CellKind::B,
        }
    }

    /// `(g_l^m, g_l^{m+1}, g_{l+1}^{m+1}, g_{l+1}^m)`.
    pub fn t(l: i64, m: i64) -> Self {
        Self {
            corners: [(m, l), (m + 1, l), (m + 1, l + 1), (m, l + 1)],
            kind: CellKind::T,
        }
    }

    /// Cell at the point of column `m` nearest to `g`: first and fourth corner
    /// are consecutive points of column `m`, second and third the lowest point
    /// of column `m + step` not below the first corner, and the one above it.
    pub fn near(spectrum: &JointSpectrum, m: i64, g: f64, step: i64) -> Result<Self, LatticeError> {
        let col = spectrum.column(m);
        let right = spectrum.column(m + step);
        if col.is_empty() {
            return Err(LatticeError::MissingColumn(m));
        }
        if right.is_empty() {
            return Err(LatticeError::MissingColumn(m + step));
        }
        let i = nearest_index(&col, g);
        let j = right
            .iter()
            .position(|p| p.g >= col[i].g)
            .ok_or(LatticeError::OffLattice { m: m + step, g: col[i].g })?;
        if i + 1 >= col.len() || j + 1 >= right.len() {
            return Err(LatticeError::OffLattice { m, g });
        }
        Ok(Self {
            corners: [
                (m, col[i].l),
                (m + step, right[j].l),
                (m + step, right[j + 1].l),
                (m, col[i + 1].l),
            ],
            kind: CellKind::Generic,
        })
    }

    /// Horizontal and vertical edge in label space.
    pub fn edges(&self) -> ((i64, i64), (i64, i64)) {
        let c = &self.corners;
        (
            (c[1].0 - c[0].0, c[1].1 - c[0].1),
            (c[3].0 - c[0].0, c[3].1 - c[0].1),
        )
    }

    fn positions(&self, spectrum: &JointSpectrum) -> Result<[(f64, f64); 4], LatticeError> {
        let mut out = [(0.0, 0.0); 4];
        for (k, &(m, l)) in self.corners.iter().enumerate() {
            let g = spectrum.get(m, l).ok_or(LatticeError::MissingState { m, l })?;
            out[k] = (m as f64, g);
        }
        Ok(out)
    }
}

fn nearest_index(col: &[&SpectrumPoint], g: f64) -> usize {
    let mut best = 0;
    for (i, p) in col.iter().enumerate() {
        if (p.g - g).abs() < (col[best].g - g).abs() {
            best = i;
        }
    }
    best
}

/// Relative gap below which two snap candidates count as tied.
const AMBIGUITY_MARGIN: f64 = 0.1;

/// Nearest point of column `m` to `g`, with the distance measured in units of
/// the local vertical spacing.
fn snap(spectrum: &JointSpectrum, m: i64, g: f64) -> Result<i64, LatticeError> {
    let col = spectrum.column(m);
    if col.is_empty() {
        return Err(LatticeError::MissingColumn(m));
    }
    if col.len() == 1 {
        return Err(LatticeError::OffLattice { m, g });
    }
    let i = nearest_index(&col, g);
    let spacing = if i + 1 < col.len() {
        col[i + 1].g - col[i].g
    } else {
        col[i].g - col[i - 1].g
    };
    let d = (col[i].g - g).abs();
    if d > 0.5 * spacing {
        return Err(LatticeError::OffLattice { m, g });
    }
    let runner_up = [i.checked_sub(1), Some(i + 1)]
        .into_iter()
        .flatten()
        .filter(|&k| k < col.len())
        .min_by(|&a, &b| (col[a].g - g).abs().total_cmp(&(col[b].g - g).abs()));
    if let Some(k) = runner_up {
        let d2 = (col[k].g - g).abs();
        if d2 - d <= AMBIGUITY_MARGIN * d2 {
            return Err(LatticeError::AmbiguousSnap {
                m,
                g,
                first: col[i].l,
                second: col[k].l,
            });
        }
    }
    Ok(col[i].l)
}

/// A point on the transport path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub m: i64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    /// Rows give the final vertical and horizontal edge in the initial basis.
    pub matrix: [[i64; 2]; 2],
    pub index: i64,
    pub trace: Vec<UnitCell>,
}

/// Transports `initial` around the closed anchor path.
///
/// Consecutive anchors must lie in the same column or in columns `step` apart,
/// where `step` is the horizontal edge width of the initial cell. Moves within
/// a column visit every lattice point in between.
pub fn transport_cell(
    spectrum: &JointSpectrum,
    anchors: &[Anchor],
    initial: UnitCell,
) -> Result<MonodromyResult, LatticeError> {
    if anchors.len() < 2 {
        return Err(LatticeError::LoopTooShort);
    }
    let (first, last) = (anchors[0], anchors[anchors.len() - 1]);
    if first.m != last.m || (first.g - last.g).abs() > 1e-9 * first.g.abs().max(1.0) {
        return Err(LatticeError::LoopNotClosed);
    }
    let (h0, v0) = initial.edges();
    let step = h0.0;
    if step == 0 || v0.0 != 0 {
        return Err(LatticeError::DegenerateCell);
    }
    if initial.corners[0].0 != first.m {
        return Err(LatticeError::BadAnchorStep {
            from: initial.corners[0].0,
            to: first.m,
            step,
        });
    }

    let mut cell = initial;
    let mut trace = vec![cell];
    for w in anchors.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dm = b.m - a.m;
        if dm != 0 && dm.abs() != step.abs() {
            return Err(LatticeError::BadAnchorStep {
                from: a.m,
                to: b.m,
                step,
            });
        }
        for target in column_walk(spectrum, &cell, b)? {
            cell = move_cell(spectrum, &cell, target)?;
            trace.push(cell);
        }
    }

    let (h1, v1) = cell.edges();
    let matrix = express_in_basis(v0, h0, v1, h1)?;
    Ok(MonodromyResult {
        matrix,
        index: matrix[1][0],
        trace,
    })
}

/// First-corner targets for moving towards `b`: every point of the current
/// column strictly between the current corner and the anchor, then the anchor.
fn column_walk(
    spectrum: &JointSpectrum,
    cell: &UnitCell,
    b: Anchor,
) -> Result<Vec<Anchor>, LatticeError> {
    let (m, l) = cell.corners[0];
    if b.m != m {
        return Ok(vec![b]);
    }
    let g0 = spectrum.get(m, l).ok_or(LatticeError::MissingState { m, l })?;
    let col = spectrum.column(m);
    let end = col[nearest_index(&col, b.g)].g;
    let mut out: Vec<Anchor> = col
        .iter()
        .filter(|p| p.g > g0.min(end) && p.g < g0.max(end))
        .map(|p| Anchor { m, g: p.g })
        .collect();
    if end < g0 {
        out.reverse();
    }
    out.push(b);
    Ok(out)
}

fn move_cell(
    spectrum: &JointSpectrum,
    cell: &UnitCell,
    target: Anchor,
) -> Result<UnitCell, LatticeError> {
    let pos = cell.positions(spectrum)?;
    let col = spectrum.column(target.m);
    if col.is_empty() {
        return Err(LatticeError::MissingColumn(target.m));
    }
    let head = col[nearest_index(&col, target.g)];
    let mut corners = [(head.m, head.l); 4];
    for k in 1..4 {
        let m = head.m + (cell.corners[k].0 - cell.corners[0].0);
        let g = head.g + (pos[k].1 - pos[0].1);
        corners[k] = (m, snap(spectrum, m, g)?);
    }
    Ok(UnitCell {
        corners,
        kind: CellKind::Generic,
    })
}

/// Integer matrix `M` with `(v1', h1')ᵀ = M (v0, h0)ᵀ`.
fn express_in_basis(
    v0: (i64, i64),
    h0: (i64, i64),
    v1: (i64, i64),
    h1: (i64, i64),
) -> Result<[[i64; 2]; 2], LatticeError> {
    // columns of the basis matrix are v0 and h0
    let det = v0.0 * h0.1 - h0.0 * v0.1;
    if det == 0 {
        return Err(LatticeError::DegenerateCell);
    }
    let solve = |w: (i64, i64)| -> Result<[i64; 2], LatticeError> {
        let a = w.0 * h0.1 - h0.0 * w.1;
        let b = v0.0 * w.1 - w.0 * v0.1;
        if a % det != 0 || b % det != 0 {
            return Err(LatticeError::NonIntegral);
        }
        Ok([a / det, b / det])
    };
    let m = [solve(v1)?, solve(h1)?];
    if (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() != 1 {
        return Err(LatticeError::NonIntegral);
    }
    Ok(m)
}

/// Closed counterclockwise loop around the origin: right along the lower
/// parabola from `m0`, up the outermost column, left along the upper parabola
/// for `l = l*`, down the opposite column and back to `m0`.
pub fn standard_loop(gamma: f64, l_star: i64, m0: i64, step: i64) -> Vec<Anchor> {
    let par = boundary_parabolas(gamma, l_star as f64).expect("l* > 0");
    // a cell spans two columns `step` apart; keep it within |m| <= l* - 1
    // whichever way it extends
    let reach = l_star - 1 - step;
    let right = m0 + ((reach - m0).div_euclid(step)) * step;
    let left = m0 - ((reach + m0).div_euclid(step)) * step;
    let lower = |m: i64| Anchor { m, g: par.lower(m as f64) };
    let upper = |m: i64| Anchor { m, g: par.upper(m as f64) };
    let mut out = Vec::new();
    let mut m = m0;
    while m <= right {
        out.push(lower(m));
        m += step;
    }
    let mut m = right;
    while m >= left {
        out.push(upper(m));
        m -= step;
    }
    let mut m = left;
    while m <= m0 {
        out.push(lower(m));
        m += step;
    }
    out
}

/// Counterclockwise rectangle: along `g = g_bottom` from `m_left` to
/// `m_right`, up, back along `g = g_top`, and down to the start.
pub fn rectangle_loop(m_left: i64, m_right: i64, g_bottom: f64, g_top: f64, step: i64) -> Vec<Anchor> {
    let step = step.abs().max(1);
    let mut out = Vec::new();
    let mut m = m_left;
    while m <= m_right {
        out.push(Anchor { m, g: g_bottom });
        m += step;
    }
    let last = m - step;
    let mut m = last;
    while m >= m_left {
        out.push(Anchor { m, g: g_top });
        m -= step;
    }
    out.push(Anchor { m: m_left, g: g_bottom });
    out
}

/// Monodromy of the (sub)spectrum along an arbitrary closed anchor path,
/// starting from the cell at the first anchor.
pub fn monodromy_on_loop(
    spectrum: &JointSpectrum,
    selector: SymmetrySelector,
    anchors: &[Anchor],
) -> Result<MonodromyResult, LatticeError> {
    if spectrum.gamma == 0.0 {
        return Err(LatticeError::Degenerate);
    }
    let first = anchors.first().ok_or(LatticeError::LoopTooShort)?;
    let sub = filter_symmetry(spectrum, selector);
    let initial = UnitCell::near(&sub, first.m, first.g, selector.column_step())?;
    transport_cell(&sub, anchors, initial)
}

/// Fewest sublattice columns between the origin and the loop's outer edge.
/// Coarser loops cut through cells and the snapped transport is unreliable.
pub const MIN_LOOP_HALF_WIDTH: i64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// Monodromy of the (sub)spectrum for the standard loop with `l* = ⌈sqrt(3/2) γ⌉`.
///
/// The initial cell sits at the bottom of the starting column. Counterclockwise
/// transport uses a cell extending to the right; clockwise transport uses the
/// mirror cell extending to the left, and its matrix is re-expressed in the
/// basis of the right-extending cell so both orientations are comparable.
pub fn monodromy(
    spectrum: &JointSpectrum,
    selector: SymmetrySelector,
    orientation: Orientation,
) -> Result<(MonodromyResult, Vec<Anchor>, i64), LatticeError> {
    if spectrum.gamma == 0.0 {
        return Err(LatticeError::Degenerate);
    }
    let sub = filter_symmetry(spectrum, selector);
    let l_star = balanced_l_star(spectrum.gamma).max(3);
    let step = selector.column_step();
    let half_width = (l_star - 1) / step;
    if half_width < MIN_LOOP_HALF_WIDTH {
        return Err(LatticeError::LoopTooCoarse { half_width });
    }
    let m0 = selector.base_column();
    let mut anchors = standard_loop(spectrum.gamma, l_star, m0, step);
    let start = sub.column(m0);
    let bottom = start.first().ok_or(LatticeError::MissingColumn(m0))?.g;
    let reference = UnitCell::near(&sub, m0, bottom, step)?;
    let result = match orientation {
        Orientation::Counterclockwise => transport_cell(&sub, &anchors, reference)?,
        Orientation::Clockwise => {
            anchors.reverse();
            let initial = UnitCell::near(&sub, m0, bottom, -step)?;
            let mut r = transport_cell(&sub, &anchors, initial)?;
            let last = *r.trace.last().expect("trace holds the initial cell");
            r.matrix = matrix_in_basis(&initial, &last, &reference)?;
            r.index = r.matrix[1][0];
            r
        }
    };
    Ok((result, anchors, l_star))
}

/// Matrix of the lattice map taking `initial` to `last`, written in the edge
/// basis of `reference` with the row convention of [`MonodromyResult`].
pub fn matrix_in_basis(
    initial: &UnitCell,
    last: &UnitCell,
    reference: &UnitCell,
) -> Result<[[i64; 2]; 2], LatticeError> {
    // columns (vertical, horizontal) in label coordinates (m, l)
    let basis = |c: &UnitCell| {
        let (h, v) = c.edges();
        [[v.0 as i128, h.0 as i128], [v.1 as i128, h.1 as i128]]
    };
    let mul = |a: [[i128; 2]; 2], b: [[i128; 2]; 2]| {
        let mut out = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    };
    let adj = |a: [[i128; 2]; 2]| [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
    let det = |a: [[i128; 2]; 2]| a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let (e, f, r) = (basis(initial), basis(last), basis(reference));
    let (de, dr) = (det(e), det(r));
    if de == 0 || dr == 0 {
        return Err(LatticeError::DegenerateCell);
    }
    // reference coordinates of the transported reference edges: R^{-1} F E^{-1} R
    let num = mul(mul(mul(adj(r), f), adj(e)), r);
    let den = de * dr;
    let mut mt = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            if num[i][j] % den != 0 {
                return Err(LatticeError::NonIntegral);
            }
            mt[i][j] = (num[i][j] / den) as i64;
        }
    }
    // columns of mt are the images; rows of the result are the images
    Ok([[mt[0][0], mt[1][0]], [mt[0][1], mt[1][1]]])
}

/// Serialized monodromy result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub gamma: f64,
    pub l_star: i64,
    pub matrix: [[i64; 2]; 2],
    pub index: i64,
    pub loop_anchors: Vec<Anchor>,
}

impl MonodromyReport {
    pub fn new(gamma: f64, l_star: i64, result: &MonodromyResult, anchors: Vec<Anchor>) -> Self {
        Self {
            gamma,
            l_star,
            matrix: result.matrix,
            index: result.index,
            loop_anchors: anchors,
        }
    }
}

/// Bottom cell `B` versus top cell `T` where the two parabolas meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionReport {
    pub l_star: i64,
    /// Column of the cells' first corner; negative for the mirror junction.
    pub m: i64,
    pub bottom: UnitCell,
    pub top: UnitCell,
    /// Corners 2 and 3 coincide and the last corner of `B` is the first of `T`.
    pub corners_match: bool,
    /// `|c1 + c3 - c2 - c4|` in `g`, divided by the local vertical spacing.
    pub bottom_skew: f64,
    pub top_skew: f64,
    /// Transport of `B_0^0` along the lower parabola ends on `bottom`.
    pub bottom_transport_ok: bool,
    /// Transport of `T_{l*}^0` along the upper parabola ends on `top`.
    pub top_transport_ok: bool,
    /// Change of `l` along the horizontal edge when passing from `B` to `T`.
    pub shift: i64,
}

fn mirror(cell: UnitCell) -> UnitCell {
    let mut c = cell.corners;
    for p in c.iter_mut() {
        p.0 = -p.0;
    }
    UnitCell {
        corners: c,
        kind: cell.kind,
    }
}

fn skew(spectrum: &JointSpectrum, cell: &UnitCell) -> Result<f64, LatticeError> {
    let p = cell.positions(spectrum)?;
    let spacing = (p[3].1 - p[0].1).abs();
    Ok((p[0].1 + p[2].1 - p[1].1 - p[3].1).abs() / spacing)
}

/// Compares `B_{l*-1}^{l*-1}` with `T_{l*}^{l*-1}` and, mirrored, at `m = -l*`.
pub fn junction_compare(
    spectrum: &JointSpectrum,
    l_star: i64,
) -> Result<[JunctionReport; 2], LatticeError> {
    if spectrum.gamma == 0.0 {
        return Err(LatticeError::Degenerate);
    }
    if l_star < 2 {
        return Err(LatticeError::DegenerateCell);
    }
    let par = boundary_parabolas(spectrum.gamma, l_star as f64).expect("l* > 0");
    let mut reports = Vec::with_capacity(2);
    for sign in [1i64, -1] {
        let (mut b, mut t) = (UnitCell::b(l_star - 1, l_star - 1), UnitCell::t(l_star, l_star - 1));
        let (mut b0, mut t0) = (UnitCell::b(0, 0), UnitCell::t(l_star, 0));
        if sign < 0 {
            b = mirror(b);
            t = mirror(t);
            b0 = mirror(b0);
            t0 = mirror(t0);
        }
        for cell in [&b, &t] {
            for &(m, l) in &cell.corners {
                spectrum.get(m, l).ok_or(LatticeError::MissingState { m, l })?;
            }
        }
        let corners_match = b.corners[1] == t.corners[1]
            && b.corners[2] == t.corners[2]
            && b.corners[3] == t.corners[0];

        let path = |f: &dyn Fn(f64) -> f64| -> Vec<Anchor> {
            (0..l_star)
                .map(|k| {
                    let m = sign * k;
                    Anchor { m, g: f(m as f64) }
                })
                .collect()
        };
        let lower_path = path(&|m| par.lower(m));
        let upper_path = path(&|m| par.upper(m));
        let bottom_transport_ok = open_transport(spectrum, &lower_path, b0)
            .map(|c| c.corners == b.corners)
            .unwrap_or(false);
        let top_transport_ok = open_transport(spectrum, &upper_path, t0)
            .map(|c| c.corners == t.corners)
            .unwrap_or(false);

        let (hb, _) = b.edges();
        let (ht, _) = t.edges();
        reports.push(JunctionReport {
            l_star,
            m: sign * (l_star - 1),
            bottom: b,
            top: t,
            corners_match,
            bottom_skew: skew(spectrum, &b)?,
            top_skew: skew(spectrum, &t)?,
            bottom_transport_ok,
            top_transport_ok,
            shift: hb.1 - ht.1,
        });
    }
    let second = reports.pop().expect("two reports");
    let first = reports.pop().expect("two reports");
    Ok([first, second])
}

/// Transport along an open path; returns the final cell.
fn open_transport(
    spectrum: &JointSpectrum,
    anchors: &[Anchor],
    initial: UnitCell,
) -> Result<UnitCell, LatticeError> {
    let mut cell = initial;
    for w in anchors.windows(2) {
        for target in column_walk(spectrum, &cell, w[1])? {
            cell = move_cell(spectrum, &cell, target)?;
        }
    }
    Ok(cell)
}
