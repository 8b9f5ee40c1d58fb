//! Discrete basic complexes on closed fixtures.
//!
//! For each form degree `k` the ambient dictionary is cut down to the
//! numerical nullspace of the sampled basic constraints `v⌟α = 0`,
//! `v⌟dα = 0`, then orthonormalized in the `L²` product of the compatible
//! metric. Because `d` maps each dictionary into the next one exactly, the
//! retained spaces form a subcomplex and `d` is represented without loss.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::dictionary::{AtomFamily, DictForm, FormDictionary};
use crate::chains::whole_manifold_chain;
use crate::error::{Error, Result};
use crate::exterior::{blade, Covector, PointwiseForm};
use crate::hodge::TransversalHodge;
use crate::linalg::Mat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralOptions {
    /// Dictionary degree bound `D`.
    pub degree: usize,
    pub quad_order: usize,
    pub quad_cells: usize,
    /// Constraint samples per dictionary element.
    pub sample_factor: usize,
    pub seed: u64,
    /// Relative singular-value cutoff for the basic constraints.
    pub constraint_cutoff: f64,
    /// Relative cutoff on the singular values of the quadrature matrix
    /// (square roots of mass eigenvalues).
    pub mass_cutoff: f64,
    /// Relative cutoff deciding which Laplacian singular values count as zero.
    pub kernel_cutoff: f64,
    /// Smallest accepted ratio between the first nonzero and the last zero
    /// singular value.
    pub gap_threshold: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            degree: 4,
            quad_order: 8,
            quad_cells: 2,
            sample_factor: 5,
            seed: 0,
            constraint_cutoff: 1e-8,
            mass_cutoff: 1e-8,
            kernel_cutoff: 1e-8,
            gap_threshold: 1e3,
        }
    }
}

/// Frame data at a quadrature node or constraint sample.
#[derive(Clone, Debug)]
pub(crate) struct NodeData {
    pub point: Vec<f64>,
    /// Quadrature weight times the metric volume density (1 for samples).
    pub weight: f64,
    pub atoms: Vec<f64>,
    pub frame_dim: usize,
    /// `restrict[k]`: ambient `k`-blade coefficients to components on the
    /// orthonormal frame `(v, e₁, …, e₂ₙ)`; frame blade bit 0 is `v`.
    pub restrict: Vec<Mat<f64>>,
}

fn node_data(h: &TransversalHodge, atoms: &AtomFamily, p: &[f64], max_k: usize) -> Result<(NodeData, Covector<f64>, Mat<f64>)> {
    let pf = h.cached_frame(p)?;
    let m = h.ambient_dim();
    let mut cols = vec![pf.reeb.clone()];
    cols.extend((0..pf.frame.cols).map(|c| pf.frame.column(c)));
    let f = Mat::from_columns(&cols);
    let restrict = (0..=max_k)
        .map(|k| {
            let bl = blade::blades(m, k);
            let rows = blade::binomial(f.cols, k);
            let mut r = Mat::zeros(rows, bl.len());
            for (j, &b) in bl.iter().enumerate() {
                let pb = Covector::<f64>::basis(m, b).pullback(&f);
                for (i, &x) in pb.c.iter().enumerate() {
                    r[(i, j)] = x;
                }
            }
            r
        })
        .collect();
    let data = NodeData { point: p.to_vec(), weight: 1.0, atoms: atoms.eval_all(atoms.bound, p), frame_dim: f.cols, restrict };
    Ok((data, pf.beta.clone(), pf.coframe.clone()))
}

/// Rows `√w · E_k(p)` of one node: restricted components of every
/// dictionary element; `only_reeb` keeps the rows whose frame blade
/// contains `v`.
fn node_rows(dict: &FormDictionary, node: &NodeData, only_reeb: bool) -> Vec<Vec<f64>> {
    let k = dict.k;
    let r = &node.restrict[k];
    let nb = dict.blades.len();
    let sw = node.weight.sqrt();
    let frame_blades = blade::blades(node.frame_dim, k);
    let mut out = Vec::new();
    for (i, &fb) in frame_blades.iter().enumerate() {
        if only_reeb && fb & 1 == 0 {
            continue;
        }
        let mut row = vec![0.0; dict.len()];
        for a in 0..dict.n_atoms {
            let av = node.atoms[a] * sw;
            if av == 0.0 {
                continue;
            }
            for j in 0..nb {
                row[a * nb + j] = av * r[(i, j)];
            }
        }
        out.push(row);
    }
    out
}

fn stack(rows: Vec<Vec<f64>>, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Discretized space of basic `k`-forms.
#[derive(Clone, Debug)]
pub struct GalerkinSpace {
    pub fixture: String,
    pub k: usize,
    /// Dictionary degree bound `D`.
    pub degree_bound: usize,
    pub dict: Arc<FormDictionary>,
    pub constraint_samples: usize,
    pub constraint_singular_values: Vec<f64>,
    pub constraint_cutoff: f64,
    /// Orthonormal basis of the constraint nullspace (dictionary × r).
    pub nullspace: DMatrix<f64>,
    /// Retained singular values of the quadrature matrix on the nullspace;
    /// their squares are the mass eigenvalues.
    pub mass_singular_values: Vec<f64>,
    pub mass_cutoff: f64,
    /// `L²`-orthonormal basis (dictionary × dim).
    pub basis: DMatrix<f64>,
    /// Quadrature matrix of the dictionary (node rows × dictionary).
    pub(crate) quad: DMatrix<f64>,
    /// Quadrature rows of the orthonormal basis (node rows × dim).
    pub(crate) quad_basis: DMatrix<f64>,
}

impl GalerkinSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Dictionary coefficients of the form with the given orthonormal
    /// coordinates.
    pub fn coefficients(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    pub fn form(&self, coords: &DVector<f64>) -> DictForm {
        DictForm { dict: self.dict.clone(), coeffs: self.coefficients(coords).as_slice().to_vec() }
    }

    pub fn basis_form(&self, i: usize) -> DictForm {
        let mut e = DVector::zeros(self.dim());
        e[i] = 1.0;
        self.form(&e)
    }

    /// Smallest mass eigenvalue over largest, on the retained subspace.
    pub fn mass_condition(&self) -> f64 {
        match (self.mass_singular_values.first(), self.mass_singular_values.last()) {
            (Some(a), Some(b)) => (b / a).powi(2),
            _ => 1.0,
        }
    }
}

/// Quadrature and constraint data shared by the spaces of one fixture.
pub struct GalerkinComplex<'h> {
    pub hodge: &'h TransversalHodge,
    pub fixture: String,
    pub options: SpectralOptions,
    pub atoms: Arc<AtomFamily>,
    pub spaces: Vec<GalerkinSpace>,
    /// `d[k]`: orthonormal coordinates of degree `k` to degree `k + 1`.
    pub d: Vec<DMatrix<f64>>,
    pub total_volume: f64,
    /// Set for fixtures without an expected answer.
    pub exploratory: bool,
    pub(crate) nodes: Vec<NodeData>,
    pub timings: Vec<(String, f64)>,
}

impl std::fmt::Debug for GalerkinComplex<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GalerkinComplex")
            .field("fixture", &self.fixture)
            .field("dims", &self.spaces.iter().map(GalerkinSpace::dim).collect::<Vec<_>>())
            .finish()
    }
}

struct Prepared {
    atoms: Arc<AtomFamily>,
    dicts: Vec<Arc<FormDictionary>>,
    nodes: Vec<NodeData>,
    samples: Vec<NodeData>,
    volume: f64,
}

fn prepare(h: &TransversalHodge, opts: &SpectralOptions, max_k: usize, timings: &mut Vec<(String, f64)>) -> Result<Prepared> {
    let m = &h.ctx.manifold;
    if !m.is_closed() {
        return Err(Error::Precondition(format!("'{}' has boundary; the spectral module needs a closed fixture", m.name)));
    }
    if opts.degree == 0 {
        return Err(Error::Precondition("dictionary degree bound must be at least 1".into()));
    }
    let top = m.dim();
    let atoms = Arc::new(AtomFamily::for_manifold(m, opts.degree));
    let dicts: Vec<Arc<FormDictionary>> =
        (0..=(top + 1).min(m.ambient_dim())).map(|k| Arc::new(FormDictionary::new(atoms.clone(), k))).collect();
    let t0 = Instant::now();
    let chain = whole_manifold_chain(m, opts.quad_order, opts.quad_cells)?;
    let mut params = Vec::new();
    for (w, patch) in &chain.terms {
        for (u, wu) in patch.nodes(patch.cells) {
            params.push((patch, *w, u, wu));
        }
    }
    let nodes: Vec<NodeData> = params
        .par_iter()
        .map(|(patch, w, u, wu)| {
            let p = patch.point(u);
            let (mut nd, beta, coframe) = node_data(h, &atoms, &p, max_k)?;
            let jac = patch.jacobian_at(u);
            let rows: Vec<Vec<f64>> = std::iter::once(beta.c.clone()).chain((0..coframe.rows).map(|r| coframe.row(r))).collect();
            let density: f64 = Mat::from_fn(rows.len(), jac.cols, |i, j| (0..jac.rows).map(|a| rows[i][a] * jac[(a, j)]).sum()).det();
            nd.weight = wu * (*w as f64).abs() * density.abs();
            if !nd.weight.is_finite() {
                return Err(Error::Singular { context: "quadrature weight", pivot: f64::NAN });
            }
            Ok(nd)
        })
        .collect::<Result<_>>()?;
    let volume = nodes.iter().map(|n| n.weight).sum();
    timings.push(("quadrature".into(), t0.elapsed().as_secs_f64()));
    let t0 = Instant::now();
    let largest = dicts.iter().take(top + 1).map(|d| d.len()).max().unwrap_or(1);
    let pts = m.sample(opts.sample_factor.max(1) * largest, opts.seed);
    let samples: Vec<NodeData> = pts.par_iter().map(|p| node_data(h, &atoms, p, max_k).map(|x| x.0)).collect::<Result<_>>()?;
    timings.push(("constraint sampling".into(), t0.elapsed().as_secs_f64()));
    Ok(Prepared { atoms, dicts, nodes, samples, volume })
}

fn build_space(h: &TransversalHodge, fixture: &str, opts: &SpectralOptions, prep: &Prepared, k: usize) -> Result<GalerkinSpace> {
    let top = h.ctx.manifold.dim();
    let dict = prep.dicts[k].clone();
    let n = dict.len();
    let count = (opts.sample_factor.max(1) * n).min(prep.samples.len());
    // Constraint rows: restricted v⌟φ and v⌟dφ at each sample.
    let dnext = if k < top { Some(dict.d_matrix(&prep.dicts[k + 1])?) } else { None };
    let blocks: Vec<Vec<Vec<f64>>> = prep.samples[..count]
        .par_iter()
        .map(|s| {
            let mut rows = if k > 0 { node_rows(&dict, s, true) } else { Vec::new() };
            if let Some(dm) = &dnext {
                let e1 = stack(node_rows(&prep.dicts[k + 1], s, true), prep.dicts[k + 1].len());
                let c = e1 * dm;
                rows.extend(c.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()));
            }
            rows
        })
        .collect();
    let cons = stack(blocks.into_iter().flatten().collect(), n);
    let (constraint_singular_values, nullspace) = if n == 0 {
        (vec![], DMatrix::zeros(0, 0))
    } else if cons.nrows() == 0 {
        (vec![], DMatrix::identity(n, n))
    } else {
        crate::linalg::nullspace(&cons, opts.constraint_cutoff)
    };
    // Quadrature matrix and mass orthonormalization of the nullspace.
    let qrows: Vec<Vec<Vec<f64>>> = prep.nodes.par_iter().map(|nd| node_rows(&dict, nd, false)).collect();
    let quad = stack(qrows.into_iter().flatten().collect(), n);
    let qn = &quad * &nullspace;
    let (mass_singular_values, basis, quad_basis) = if qn.ncols() == 0 {
        (vec![], DMatrix::zeros(n, 0), DMatrix::zeros(quad.nrows(), 0))
    } else {
        let svd = nalgebra::SVD::new(qn, true, true);
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested V");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        // Dictionary atoms are O(1) on the fixtures, so a genuine unit
        // coefficient vector has mass comparable to the volume.
        let smax = svd.singular_values[idx[0]].max(prep.volume.sqrt());
        let keep: Vec<usize> = idx.into_iter().filter(|&i| svd.singular_values[i] > opts.mass_cutoff * smax).collect();
        let sv: Vec<f64> = keep.iter().map(|&i| svd.singular_values[i]).collect();
        let mut b = DMatrix::zeros(nullspace.ncols(), keep.len());
        let mut qb = DMatrix::zeros(u.nrows(), keep.len());
        for (c, &i) in keep.iter().enumerate() {
            b.set_column(c, &(vt.row(i).transpose() / svd.singular_values[i]));
            qb.set_column(c, &u.column(i));
        }
        (sv, &nullspace * b, qb)
    };
    Ok(GalerkinSpace {
        fixture: fixture.to_string(),
        k,
        degree_bound: opts.degree,
        dict,
        constraint_samples: count,
        constraint_singular_values,
        constraint_cutoff: opts.constraint_cutoff,
        nullspace,
        mass_singular_values,
        mass_cutoff: opts.mass_cutoff,
        basis,
        quad,
        quad_basis,
    })
}

/// Discretized basic `k`-forms of a closed fixture.
pub fn build_galerkin_space(h: &TransversalHodge, fixture: &str, k: usize, opts: &SpectralOptions) -> Result<GalerkinSpace> {
    let top = h.ctx.manifold.dim();
    if k > top {
        return Err(Error::Degree(format!("degree {k} exceeds the dimension {top}")));
    }
    let mut t = Vec::new();
    let prep = prepare(h, opts, (k + 1).min(top), &mut t)?;
    build_space(h, fixture, opts, &prep, k)
}

impl<'h> GalerkinComplex<'h> {
    pub fn build(h: &'h TransversalHodge, fixture: &str, opts: &SpectralOptions) -> Result<Self> {
        let top = h.ctx.manifold.dim();
        let mut timings = Vec::new();
        let prep = prepare(h, opts, top, &mut timings)?;
        let t0 = Instant::now();
        let spaces: Vec<GalerkinSpace> = (0..=top).map(|k| build_space(h, fixture, opts, &prep, k)).collect::<Result<_>>()?;
        timings.push(("spaces".into(), t0.elapsed().as_secs_f64()));
        let t0 = Instant::now();
        let mut d = Vec::with_capacity(top);
        for k in 0..top {
            let dm = prep.dicts[k].d_matrix(&prep.dicts[k + 1])?;
            let (a, b) = (&spaces[k], &spaces[k + 1]);
            let img = &b.quad * (dm * &a.basis);
            d.push(b.quad_basis.transpose() * img);
        }
        timings.push(("differentials".into(), t0.elapsed().as_secs_f64()));
        Ok(GalerkinComplex {
            hodge: h,
            fixture: fixture.to_string(),
            options: opts.clone(),
            atoms: prep.atoms,
            spaces,
            d,
            total_volume: prep.volume,
            exploratory: false,
            nodes: prep.nodes,
            timings,
        })
    }

    pub fn top(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(GalerkinSpace::dim).collect()
    }

    /// `d` out of degree `k` (an empty map at the top).
    pub fn d_out(&self, k: usize) -> DMatrix<f64> {
        self.d.get(k).cloned().unwrap_or_else(|| DMatrix::zeros(0, self.spaces[k].dim()))
    }

    /// `d` into degree `k` (an empty map in degree 0).
    pub fn d_in(&self, k: usize) -> DMatrix<f64> {
        if k == 0 {
            DMatrix::zeros(self.spaces[0].dim(), 0)
        } else {
            self.d[k - 1].clone()
        }
    }

    /// Largest `‖d_{k+1} d_k‖` relative to the squared largest `‖d_j‖`.
    pub fn dd_residual(&self) -> f64 {
        let scale = self.d.iter().map(|m| m.norm()).fold(0.0, f64::max).powi(2).max(1e-300);
        self.d.windows(2).map(|w| (&w[1] * &w[0]).norm() / scale).fold(0.0, f64::max)
    }

    /// Orthonormal coordinates of the `L²` projection of a pointwise form
    /// onto the degree-`k` space, with the `L²` norm of the discarded part.
    pub fn project<F: PointwiseForm>(&self, k: usize, f: &F) -> Result<(DVector<f64>, f64)> {
        if f.degree() != k {
            return Err(Error::Degree(format!("{}-form projected onto degree {k}", f.degree())));
        }
        let y = self.sample_field(k, f);
        let sp = &self.spaces[k];
        let c = sp.quad_basis.transpose() * &y;
        let rest = (y - &sp.quad_basis * &c).norm();
        Ok((c, rest))
    }

    /// Stacked `√w ·` restricted components of a form at the nodes.
    pub(crate) fn sample_field<F: PointwiseForm>(&self, k: usize, f: &F) -> DVector<f64> {
        let blocks: Vec<Vec<f64>> = self
            .nodes
            .par_iter()
            .map(|nd| {
                let amb = f.at(&nd.point);
                let r = &nd.restrict[k];
                let sw = nd.weight.sqrt();
                (0..r.rows).map(|i| sw * (0..r.cols).map(|j| r[(i, j)] * amb.c[j]).sum::<f64>()).collect()
            })
            .collect();
        DVector::from_vec(blocks.into_iter().flatten().collect())
    }

    /// `L²` norm of a pointwise form.
    pub fn l2_norm<F: PointwiseForm>(&self, f: &F) -> f64 {
        self.sample_field(f.degree(), f).norm()
    }
}
