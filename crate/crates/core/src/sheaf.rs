//! Cellular cochains of a triangulated polygon with coefficients in the
//! constructible sheaf of a Lagrangian tuple: fibre `V` on the open disk, `l_i` on
//! the boundary edge `{i, i+1}` and `l_{i−1} ∩ l_i` at the vertex `i`.
//!
//! `H^1` with its cup pairing recomputes `(T, −q)` independently of the explicit form.

use std::collections::HashMap;

use crate::error::{ensure, MaslovError, Result};
use crate::field::Field;
use crate::maslov::{compute_t, QuotientChart, TSpace};
use crate::matrix::{Matrix, Solver};
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

/// The two triangulations of the polygon: a cone on the boundary from a central
/// vertex `∞`, and the fan of diagonals from vertex `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triangulation {
    Star,
    Fan,
}

/// Simplices are sorted label lists and carry the orientation of that order.
#[derive(Clone, Debug)]
pub struct PolygonCochains<F: Field> {
    pub tuple: LagrangianTuple<F>,
    pub triangulation: Triangulation,
    /// Simplices of dimension 0, 1, 2.
    pub cells: [Vec<Vec<usize>>; 3],
    pub stalks: [Vec<Subspace<F>>; 3],
    offsets: [Vec<usize>; 3],
    /// Triangles listed with the orientation of the disk (boundary runs 0 → 1 → … → n−1).
    pub oriented_triangles: Vec<[usize; 3]>,
    pub d0: Matrix<F>,
    pub d1: Matrix<F>,
}

fn offsets<F: Field>(stalks: &[Subspace<F>]) -> Vec<usize> {
    let mut out = vec![0];
    for s in stalks {
        out.push(out.last().unwrap() + s.dim());
    }
    out
}

/// Signed sum over faces of the inclusions of stalks, as a matrix from `k`- to `(k+1)`-cochains.
fn coboundary<F: Field>(
    field: &F,
    lower: &[Vec<usize>],
    lower_stalks: &[Subspace<F>],
    upper: &[Vec<usize>],
    upper_stalks: &[Subspace<F>],
) -> Result<Matrix<F>> {
    let lo = offsets(lower_stalks);
    let up = offsets(upper_stalks);
    let index: HashMap<&[usize], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let mut d = Matrix::zeros(field, *up.last().unwrap(), *lo.last().unwrap());
    for (ti, tau) in upper.iter().enumerate() {
        for drop in 0..tau.len() {
            let mut sigma = tau.clone();
            sigma.remove(drop);
            let si = *index
                .get(sigma.as_slice())
                .ok_or_else(|| MaslovError::consistency("face missing from the complex"))?;
            let sign = if drop % 2 == 0 {
                field.one()
            } else {
                -field.one()
            };
            for (r, v) in lower_stalks[si].basis_vecs().iter().enumerate() {
                let c = upper_stalks[ti].coordinates(v).map_err(|_| {
                    MaslovError::consistency(
                        "stalk of a face is not contained in the stalk of the cell",
                    )
                })?;
                for (k, x) in c.into_iter().enumerate() {
                    d[(up[ti] + k, lo[si] + r)] = sign.clone() * x;
                }
            }
        }
    }
    Ok(d)
}

pub fn build_cochains<F: Field>(t: &LagrangianTuple<F>) -> Result<PolygonCochains<F>> {
    build_triangulated(t, Triangulation::Star)
}

pub fn build_triangulated<F: Field>(
    t: &LagrangianTuple<F>,
    tri: Triangulation,
) -> Result<PolygonCochains<F>> {
    t.require_n_at_least(3)?;
    let f = t.field();
    let n = t.n();
    let dim = 2 * t.m();
    let full = Subspace::full(f, dim);
    let edges = t.edge_intersections();

    let mut cells: [Vec<Vec<usize>>; 3] = Default::default();
    let mut stalks: [Vec<Subspace<F>>; 3] = Default::default();
    for i in 0..n {
        cells[0].push(vec![i]);
        stalks[0].push(edges[(i + n - 1) % n].clone());
    }
    for i in 0..n {
        let j = (i + 1) % n;
        cells[1].push(vec![i.min(j), i.max(j)]);
        stalks[1].push(t.l(i as isize).clone());
    }
    let mut oriented = Vec::new();
    match tri {
        Triangulation::Star => {
            let inf = n;
            cells[0].push(vec![inf]);
            stalks[0].push(full.clone());
            for i in 0..n {
                cells[1].push(vec![i, inf]);
                stalks[1].push(full.clone());
            }
            for i in 0..n {
                let j = (i + 1) % n;
                cells[2].push(vec![i.min(j), i.max(j), inf]);
                stalks[2].push(full.clone());
                oriented.push([i, j, inf]);
            }
        }
        Triangulation::Fan => {
            for i in 2..n - 1 {
                cells[1].push(vec![0, i]);
                stalks[1].push(full.clone());
            }
            for i in 1..n - 1 {
                cells[2].push(vec![0, i, i + 1]);
                stalks[2].push(full.clone());
                oriented.push([0, i, i + 1]);
            }
        }
    }
    let d0 = coboundary(f, &cells[0], &stalks[0], &cells[1], &stalks[1])?;
    let d1 = coboundary(f, &cells[1], &stalks[1], &cells[2], &stalks[2])?;
    ensure(d1.dot(&d0).is_zero(), || "d1 ∘ d0 ≠ 0".into())?;
    let offs = [
        offsets(&stalks[0]),
        offsets(&stalks[1]),
        offsets(&stalks[2]),
    ];
    Ok(PolygonCochains {
        tuple: t.clone(),
        triangulation: tri,
        cells,
        stalks,
        offsets: offs,
        oriented_triangles: oriented,
        d0,
        d1,
    })
}

impl<F: Field> PolygonCochains<F> {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d0.cols(), self.d0.rows(), self.d1.rows())
    }

    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.cells[1].iter().position(|c| c.as_slice() == key)
    }

    /// Value in `V` of the 1-cochain `alpha` along the oriented edge `a → b`.
    pub fn edge_value(&self, alpha: &[F::Elem], a: usize, b: usize) -> Vec<F::Elem> {
        let e = self.edge_index(a, b).expect("edge of the triangulation");
        let (lo, hi) = (self.offsets[1][e], self.offsets[1][e + 1]);
        let v = self.stalks[1][e].from_coordinates(&alpha[lo..hi]);
        if a < b {
            v
        } else {
            v.into_iter().map(|x| -x).collect()
        }
    }

    /// `Σ B(α(a→b), β(b→c))` over triangles `(a, b, c)`, oriented as the disk or reversed.
    pub fn cup(&self, alpha: &[F::Elem], beta: &[F::Elem], reversed: bool) -> F::Elem {
        let s = self.tuple.space();
        self.oriented_triangles
            .iter()
            .fold(self.tuple.field().zero(), |acc, &[a, b, c]| {
                let (a, b) = if reversed { (b, a) } else { (a, b) };
                acc + s.b(&self.edge_value(alpha, a, b), &self.edge_value(beta, b, c))
            })
    }

    pub fn cup_gram(&self, rows: &Matrix<F>, reversed: bool) -> Matrix<F> {
        let f = self.tuple.field();
        let k = rows.rows();
        let mut g = Matrix::zeros(f, k, k);
        for a in 0..k {
            for b in 0..k {
                g[(a, b)] = self.cup(rows.row(a), rows.row(b), reversed);
            }
        }
        g
    }

    /// `(v_i)` with `v_i = α(i → i+1) ∈ l_i`.
    pub fn boundary_values(&self, alpha: &[F::Elem]) -> Vec<Vec<F::Elem>> {
        let n = self.tuple.n();
        (0..n)
            .map(|i| self.edge_value(alpha, i, (i + 1) % n))
            .collect()
    }

    pub fn cocycles(&self) -> Subspace<F> {
        Subspace::kernel(&self.d1)
    }

    pub fn coboundaries(&self) -> Subspace<F> {
        Subspace::row_space(&self.d0.transpose())
    }

    /// A 1-cocycle with boundary values `vs`, solving for the interior edges.
    pub fn cocycle_with_boundary(&self, vs: &[Vec<F::Elem>]) -> Option<Vec<F::Elem>> {
        let (interior, solver) = self.interior_solver();
        self.extend_boundary(vs, &interior, &solver)
    }

    /// [`Self::cocycle_with_boundary`] for many boundary data, sharing one elimination.
    pub fn cocycles_with_boundaries(
        &self,
        data: &[Vec<Vec<F::Elem>>],
    ) -> Option<Vec<Vec<F::Elem>>> {
        let (interior, solver) = self.interior_solver();
        data.iter()
            .map(|vs| self.extend_boundary(vs, &interior, &solver))
            .collect()
    }

    fn interior_solver(&self) -> (Vec<usize>, Solver<F>) {
        let n = self.tuple.n();
        let interior: Vec<usize> = (n..self.cells[1].len())
            .flat_map(|e| self.offsets[1][e]..self.offsets[1][e + 1])
            .collect();
        let solver = self.d1.select_cols(&interior).solver();
        (interior, solver)
    }

    fn extend_boundary(
        &self,
        vs: &[Vec<F::Elem>],
        interior: &[usize],
        solver: &Solver<F>,
    ) -> Option<Vec<F::Elem>> {
        let f = self.tuple.field();
        let n = self.tuple.n();
        let mut alpha = f.zero_vec(self.d0.rows());
        for (i, v) in vs.iter().enumerate() {
            let j = (i + 1) % n;
            let e = self.edge_index(i, j)?;
            let c = self.stalks[1][e].coordinates(v).ok()?;
            let sign = if i < j { f.one() } else { -f.one() };
            for (k, x) in c.into_iter().enumerate() {
                alpha[self.offsets[1][e] + k] = sign.clone() * x;
            }
        }
        let rhs: Vec<F::Elem> = self.d1.mul_vec(&alpha).into_iter().map(|x| -x).collect();
        let x = solver.solve(&rhs)?;
        for (k, &idx) in interior.iter().enumerate() {
            alpha[idx] = x[k].clone();
        }
        Some(alpha)
    }
}

pub fn h1_dimensions<F: Field>(t: &LagrangianTuple<F>) -> Result<(usize, usize, usize)> {
    let c = build_cochains(t)?;
    Ok(dimensions_of(&c))
}

fn dimensions_of<F: Field>(c: &PolygonCochains<F>) -> (usize, usize, usize) {
    let (c0, c1, c2) = c.dims();
    let r0 = c.d0.rank();
    let r1 = c.d1.rank();
    (c0 - r0, c1 - r1 - r0, c2 - r1)
}

/// `H^1` on explicit cocycle representatives with its cup pairing, compared with `T`.
#[derive(Clone, Debug)]
pub struct CupReport<F: Field> {
    pub cochains: PolygonCochains<F>,
    pub t: TSpace<F>,
    pub chart: QuotientChart<F>,
    /// Cup pairing on the representatives `chart.reps`.
    pub cup_gram: Matrix<F>,
    /// Row `k`: coordinates in `T` of the boundary values of representative `k`.
    pub to_t: Matrix<F>,
    /// Row `k`: a cocycle whose boundary values are basis vector `k` of `T`.
    pub section: Matrix<F>,
    /// Cup pairing on `section`.
    pub section_cup: Matrix<F>,
}

impl<F: Field> CupReport<F> {
    pub fn dim_h1(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_symmetric(&self) -> bool {
        self.cup_gram.is_symmetric()
    }

    /// `dim H^1 = dim T`, the boundary-value map is an isomorphism, and cup = −q on
    /// both the representatives and the section.
    pub fn matches_minus_q(&self) -> bool {
        let g = self.t.gram();
        self.dim_h1() == self.t.dim()
            && self.to_t.rank() == self.t.dim()
            && self.section_cup == g.neg()
            && self.cup_gram == g.restrict_form(&self.to_t).neg()
    }
}

pub fn h1_with_cup<F: Field>(t: &LagrangianTuple<F>) -> Result<CupReport<F>> {
    h1_with_cup_on(t, Triangulation::Star, false)
}

pub fn h1_with_cup_on<F: Field>(
    t: &LagrangianTuple<F>,
    tri: Triangulation,
    reversed: bool,
) -> Result<CupReport<F>> {
    let cochains = build_triangulated(t, tri)?;
    let tspace = compute_t(t)?;
    let chart = QuotientChart::new(&cochains.cocycles(), &cochains.coboundaries())?;
    let cup_gram = cochains.cup_gram(&chart.reps, reversed);
    let cx = &tspace.k.complex;
    let f = t.field();
    let mut to_t = Vec::with_capacity(chart.dim());
    for alpha in chart.reps.row_vecs() {
        let a = cx.from_components(&cochains.boundary_values(&alpha))?;
        to_t.push(tspace.project(&a)?);
    }
    let to_t = Matrix::from_rows(f, tspace.dim(), &to_t);
    let data: Vec<_> = tspace
        .basis()
        .row_vecs()
        .iter()
        .map(|row| cx.components(row))
        .collect();
    let section = cochains
        .cocycles_with_boundaries(&data)
        .ok_or_else(|| MaslovError::consistency("element of K has no cocycle extension"))?;
    let section = Matrix::from_rows(f, cochains.d0.rows(), &section);
    let section_cup = cochains.cup_gram(&section, reversed);
    Ok(CupReport {
        cochains,
        t: tspace,
        chart,
        cup_gram,
        to_t,
        section,
        section_cup,
    })
}
