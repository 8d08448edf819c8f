//! Quiver representations over F_p and their ambient abelian structure.
//!
//! A representation assigns a finite-dimensional F_p-space to each vertex
//! and a matrix to each arrow; morphisms are vertexwise matrices making
//! every arrow square commute. Hom spaces, kernels, cokernels, images,
//! and direct sums are all computed exactly, which is what lets the rest
//! of the crate decide categorical questions by brute force.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffmat::{FpMatrix, Prime, DEFAULT_ENUMERATION_CEILING};

/// Fixed seed for the randomized isomorphism fallback; keeps runs reproducible.
const ISO_SAMPLE_SEED: u64 = 0x1505_C0DE;
/// Random samples tried before giving up on an oversized Hom space.
const ISO_SAMPLE_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub id: u32,
    pub source: u32,
    pub target: u32,
}

/// A finite acyclic quiver. Acyclicity is enforced at construction so the
/// representation category is always a length category.
#[derive(Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Quiver {
    vertices: Vec<u32>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<u32>, arrows: Vec<Arrow>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::InvalidQuiver(format!("duplicate vertex id {v}")));
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            if arrows[..i].iter().any(|b| b.id == a.id) {
                return Err(Error::InvalidQuiver(format!("duplicate arrow id {}", a.id)));
            }
            if !vertices.contains(&a.source) || !vertices.contains(&a.target) {
                return Err(Error::InvalidQuiver(format!(
                    "arrow {} has endpoint outside the vertex set",
                    a.id
                )));
            }
        }
        let q = Quiver { vertices, arrows };
        if !q.is_acyclic() {
            return Err(Error::InvalidQuiver("directed cycle".into()));
        }
        Ok(q)
    }

    /// The linear quiver 1 -> 2 -> ... -> n.
    pub fn line(n: usize) -> Arc<Self> {
        let vertices: Vec<u32> = (1..=n as u32).collect();
        let arrows: Vec<Arrow> = (1..n as u32)
            .map(|i| Arrow {
                id: i,
                source: i,
                target: i + 1,
            })
            .collect();
        Arc::new(Quiver::new(vertices, arrows).expect("line quivers are acyclic"))
    }

    fn is_acyclic(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            indeg[self.vertex_index(a.target).unwrap()] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for a in &self.arrows {
                if self.vertex_index(a.source).unwrap() == v {
                    let w = self.vertex_index(a.target).unwrap();
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        queue.push_back(w);
                    }
                }
            }
        }
        seen == n
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_index(&self, id: u32) -> Option<usize> {
        self.vertices.iter().position(|&v| v == id)
    }

    /// Positional (source index, target index) for arrow `a`.
    pub fn arrow_endpoints(&self, a: usize) -> (usize, usize) {
        let arrow = &self.arrows[a];
        (
            self.vertex_index(arrow.source).expect("validated"),
            self.vertex_index(arrow.target).expect("validated"),
        )
    }
}

/// A representation: dims and matrices are positional, aligned with
/// `quiver.vertices()` and `quiver.arrows()` respectively. `mats[a]` has
/// shape dims[target] x dims[source].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rep {
    quiver: Arc<Quiver>,
    p: Prime,
    dims: Vec<usize>,
    mats: Vec<FpMatrix>,
}

impl Rep {
    pub fn new(
        quiver: Arc<Quiver>,
        p: Prime,
        dims: Vec<usize>,
        mats: Vec<FpMatrix>,
    ) -> Result<Self> {
        if dims.len() != quiver.vertices().len() {
            return Err(Error::InvalidRep(format!(
                "expected {} vertex dimensions, got {}",
                quiver.vertices().len(),
                dims.len()
            )));
        }
        if mats.len() != quiver.arrows().len() {
            return Err(Error::InvalidRep(format!(
                "expected {} arrow matrices, got {}",
                quiver.arrows().len(),
                mats.len()
            )));
        }
        for (a, m) in mats.iter().enumerate() {
            if m.p() != p {
                return Err(Error::FieldMismatch {
                    left: p.get(),
                    right: m.p().get(),
                });
            }
            let (s, t) = quiver.arrow_endpoints(a);
            if m.rows() != dims[t] || m.cols() != dims[s] {
                return Err(Error::InvalidRep(format!(
                    "arrow {} needs a {}x{} matrix, got {}x{}",
                    quiver.arrows()[a].id,
                    dims[t],
                    dims[s],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Rep {
            quiver,
            p,
            dims,
            mats,
        })
    }

    pub fn zero(quiver: Arc<Quiver>, p: Prime) -> Self {
        let dims = vec![0; quiver.vertices().len()];
        let mats = quiver
            .arrows()
            .iter()
            .map(|_| FpMatrix::zero(p, 0, 0))
            .collect();
        Rep {
            quiver,
            p,
            dims,
            mats,
        }
    }

    /// The simple representation concentrated at one vertex (by index).
    pub fn simple(quiver: Arc<Quiver>, p: Prime, vertex: usize) -> Self {
        let mut dims = vec![0; quiver.vertices().len()];
        dims[vertex] = 1;
        let mats = (0..quiver.arrows().len())
            .map(|a| {
                let (s, t) = quiver.arrow_endpoints(a);
                FpMatrix::zero(p, dims[t], dims[s])
            })
            .collect();
        Rep {
            quiver,
            p,
            dims,
            mats,
        }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_at(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn mat(&self, a: usize) -> &FpMatrix {
        &self.mats[a]
    }

    fn same_ambient(&self, other: &Rep) -> Result<()> {
        if self.quiver != other.quiver {
            return Err(Error::QuiverMismatch);
        }
        if self.p != other.p {
            return Err(Error::FieldMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        Ok(())
    }
}

impl Serialize for Rep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        let dims: Vec<(String, usize)> = self
            .quiver
            .vertices()
            .iter()
            .zip(&self.dims)
            .map(|(v, &d)| (v.to_string(), d))
            .collect();
        let mats: Vec<(String, &FpMatrix)> = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.mats)
            .map(|(a, m)| (a.id.to_string(), m))
            .collect();
        map.serialize_entry("dims", &OrderedPairs(&dims))?;
        map.serialize_entry("mats", &OrderedPairs(&mats))?;
        map.end()
    }
}

/// Serializes key/value pairs as a JSON object in the given order.
pub(crate) struct OrderedPairs<'a, V>(pub(crate) &'a [(String, V)]);

impl<V: Serialize> Serialize for OrderedPairs<'_, V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A morphism of representations: one matrix per vertex, commuting with
/// every arrow. The commuting-square invariant is checked at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mor {
    src: Rep,
    dst: Rep,
    comps: Vec<FpMatrix>,
}

impl Mor {
    pub fn new(src: Rep, dst: Rep, comps: Vec<FpMatrix>) -> Result<Self> {
        src.same_ambient(&dst)?;
        if comps.len() != src.quiver.vertices().len() {
            return Err(Error::InvalidMor(format!(
                "expected {} vertex components, got {}",
                src.quiver.vertices().len(),
                comps.len()
            )));
        }
        for (v, c) in comps.iter().enumerate() {
            if c.rows() != dst.dims[v] || c.cols() != src.dims[v] {
                return Err(Error::InvalidMor(format!(
                    "component at vertex {} needs shape {}x{}, got {}x{}",
                    src.quiver.vertices()[v],
                    dst.dims[v],
                    src.dims[v],
                    c.rows(),
                    c.cols()
                )));
            }
        }
        let m = Mor { src, dst, comps };
        if let Some(a) = m.violated_square() {
            return Err(Error::InvalidMor(format!(
                "square at arrow {} does not commute",
                m.src.quiver.arrows()[a].id
            )));
        }
        Ok(m)
    }

    /// Construction bypass for linear combinations of already-validated
    /// morphisms, where commuting is guaranteed by linearity.
    pub(crate) fn from_parts_unchecked(src: Rep, dst: Rep, comps: Vec<FpMatrix>) -> Self {
        let m = Mor { src, dst, comps };
        debug_assert!(m.violated_square().is_none());
        m
    }

    fn violated_square(&self) -> Option<usize> {
        (0..self.src.quiver.arrows().len()).find(|&a| {
            let (s, t) = self.src.quiver.arrow_endpoints(a);
            let left = self.comps[t]
                .mat_mul(self.src.mat(a))
                .expect("shapes validated");
            let right = self
                .dst
                .mat(a)
                .mat_mul(&self.comps[s])
                .expect("shapes validated");
            left != right
        })
    }

    pub fn zero(src: Rep, dst: Rep) -> Result<Self> {
        src.same_ambient(&dst)?;
        let p = src.p;
        let comps = (0..src.dims.len())
            .map(|v| FpMatrix::zero(p, dst.dims[v], src.dims[v]))
            .collect();
        Ok(Mor { src, dst, comps })
    }

    pub fn identity(x: &Rep) -> Self {
        let comps = x.dims.iter().map(|&d| FpMatrix::identity(x.p, d)).collect();
        Mor {
            src: x.clone(),
            dst: x.clone(),
            comps,
        }
    }

    pub fn src(&self) -> &Rep {
        &self.src
    }

    pub fn dst(&self) -> &Rep {
        &self.dst
    }

    pub fn comp(&self, v: usize) -> &FpMatrix {
        &self.comps[v]
    }

    pub fn comps(&self) -> &[FpMatrix] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FpMatrix::is_zero)
    }

    /// Composition in diagram order: `self.then(g)` is `g` after `self`.
    pub fn then(&self, g: &Mor) -> Result<Mor> {
        if self.dst != g.src {
            return Err(Error::InvalidMor(
                "composition endpoints do not match".into(),
            ));
        }
        let comps = self
            .comps
            .iter()
            .zip(&g.comps)
            .map(|(f, gg)| gg.mat_mul(f).expect("shapes validated"))
            .collect();
        Ok(Mor::from_parts_unchecked(
            self.src.clone(),
            g.dst.clone(),
            comps,
        ))
    }

    pub fn add(&self, other: &Mor) -> Result<Mor> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::InvalidMor("sum endpoints do not match".into()));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b).expect("shapes validated"))
            .collect();
        Ok(Mor::from_parts_unchecked(
            self.src.clone(),
            self.dst.clone(),
            comps,
        ))
    }

    pub fn scale(&self, c: u32) -> Mor {
        let comps = self.comps.iter().map(|m| m.scale(c)).collect();
        Mor::from_parts_unchecked(self.src.clone(), self.dst.clone(), comps)
    }

    /// All vertex components invertible. Implies an isomorphism.
    pub fn is_invertible(&self) -> bool {
        self.comps.iter().all(FpMatrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<Mor> {
        let mut comps = Vec::with_capacity(self.comps.len());
        for c in &self.comps {
            if c.rows() != c.cols() {
                return None;
            }
            comps.push(c.try_inverse().expect("square")?);
        }
        Some(Mor::from_parts_unchecked(
            self.dst.clone(),
            self.src.clone(),
            comps,
        ))
    }

    /// Flattens the components into one column vector (vertex order,
    /// row-major within each component).
    pub fn to_vector(&self) -> FpMatrix {
        let total: usize = self
            .comps
            .iter()
            .map(|c| c.rows() * c.cols())
            .sum();
        let mut v = FpMatrix::zero(self.src.p, total, 1);
        let mut off = 0;
        for c in &self.comps {
            for i in 0..c.rows() {
                for j in 0..c.cols() {
                    v.set(off, 0, c.get(i, j));
                    off += 1;
                }
            }
        }
        let _ = total;
        v
    }

    fn from_vector(src: &Rep, dst: &Rep, v: &FpMatrix) -> Mor {
        let p = src.p;
        let mut comps = Vec::with_capacity(src.dims.len());
        let mut off = 0;
        for vtx in 0..src.dims.len() {
            let (rows, cols) = (dst.dims[vtx], src.dims[vtx]);
            let mut c = FpMatrix::zero(p, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    c.set(i, j, v.get(off, 0));
                    off += 1;
                }
            }
            comps.push(c);
        }
        Mor::from_parts_unchecked(src.clone(), dst.clone(), comps)
    }
}

impl Serialize for Mor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(String, &FpMatrix)> = self
            .src
            .quiver
            .vertices()
            .iter()
            .zip(&self.comps)
            .map(|(v, c)| (v.to_string(), c))
            .collect();
        OrderedPairs(&pairs).serialize(serializer)
    }
}

/// The full Hom space between two representations, as an explicit basis.
#[derive(Clone, Debug)]
pub struct HomSpace {
    src: Rep,
    dst: Rep,
    basis: Vec<Mor>,
}

impl HomSpace {
    pub fn src(&self) -> &Rep {
        &self.src
    }

    pub fn dst(&self) -> &Rep {
        &self.dst
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mor] {
        &self.basis
    }

    /// p^dim, the number of morphisms.
    pub fn count(&self) -> u128 {
        u128::from(self.src.p.get()).pow(self.basis.len() as u32)
    }

    /// The element with the given basis coefficients.
    pub fn element(&self, coeffs: &[u32]) -> Mor {
        assert_eq!(coeffs.len(), self.basis.len());
        let mut m = Mor::zero(self.src.clone(), self.dst.clone()).expect("same ambient");
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                m = m.add(&b.scale(*c)).expect("same endpoints");
            }
        }
        m
    }

    /// The idx-th morphism in base-p counting order; index 0 is zero.
    pub fn element_at(&self, idx: u128) -> Mor {
        assert!(idx < self.count(), "element index out of range");
        let p = u128::from(self.src.p.get());
        let mut rem = idx;
        let coeffs: Vec<u32> = (0..self.basis.len())
            .map(|_| {
                let c = (rem % p) as u32;
                rem /= p;
                c
            })
            .collect();
        self.element(&coeffs)
    }

    /// Enumerates every morphism in base-p counting order (zero first).
    /// The zero morphism is yielded even when the space has dimension 0.
    pub fn elements(&self) -> impl Iterator<Item = Mor> + '_ {
        (0..self.count()).map(move |idx| self.element_at(idx))
    }

    /// Like `elements`, but refuses spaces larger than `ceiling`.
    pub fn elements_checked(
        &self,
        ceiling: u64,
    ) -> Result<impl Iterator<Item = Mor> + '_> {
        if self.count() > u128::from(ceiling) {
            return Err(Error::EnumerationTooLarge {
                count: self.count(),
                ceiling,
            });
        }
        Ok(self.elements())
    }
}

/// Computes Hom(X, Y) by solving all commuting-square constraints as one
/// linear system: unknowns are the entries of the vertex components, one
/// constraint row per (arrow, target row, source column).
pub fn hom_space(x: &Rep, y: &Rep) -> Result<HomSpace> {
    x.same_ambient(y)?;
    let p = x.p;
    let q = &x.quiver;
    let nv = q.vertices().len();

    let mut offsets = vec![0usize; nv + 1];
    for v in 0..nv {
        offsets[v + 1] = offsets[v] + y.dims[v] * x.dims[v];
    }
    let unknowns = offsets[nv];

    let mut n_rows = 0;
    for a in 0..q.arrows().len() {
        let (s, t) = q.arrow_endpoints(a);
        n_rows += y.dims[t] * x.dims[s];
    }

    let mut sys = FpMatrix::zero(p, n_rows, unknowns);
    let mut row = 0;
    for a in 0..q.arrows().len() {
        let (s, t) = q.arrow_endpoints(a);
        let xa = x.mat(a); // dims: x.dims[t] x x.dims[s]
        let ya = y.mat(a); // dims: y.dims[t] x y.dims[s]
        for r in 0..y.dims[t] {
            for c in 0..x.dims[s] {
                // Constraint: (U_t · X_a)[r,c] - (Y_a · U_s)[r,c] = 0.
                for k in 0..x.dims[t] {
                    let idx = offsets[t] + r * x.dims[t] + k;
                    sys.set(row, idx, p.add(sys.get(row, idx), xa.get(k, c)));
                }
                for k in 0..y.dims[s] {
                    let idx = offsets[s] + k * x.dims[s] + c;
                    sys.set(row, idx, p.sub(sys.get(row, idx), ya.get(r, k)));
                }
                row += 1;
            }
        }
    }
    assert_eq!(row, n_rows);

    let basis = sys
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let m = Mor::from_vector(x, y, &v);
            assert!(m.violated_square().is_none(), "solver produced a non-map");
            m
        })
        .collect();
    Ok(HomSpace {
        src: x.clone(),
        dst: y.clone(),
        basis,
    })
}

/// Kernel of a morphism: the subrepresentation of vertexwise nullspaces,
/// with its canonical inclusion.
pub fn kernel_of(f: &Mor) -> (Rep, Mor) {
    let x = f.src();
    let p = x.p;
    let bases: Vec<FpMatrix> = f
        .comps
        .iter()
        .map(|c| {
            let cols = c.kernel_basis();
            FpMatrix::from_columns(p, c.cols(), &cols).expect("kernel vectors share the shape")
        })
        .collect();
    sub_rep_from_bases(x, &bases)
}

/// Cokernel of a morphism: vertexwise quotients by the image, using a
/// fixed complement convention so representatives are deterministic. The
/// returned morphism is the canonical projection.
pub fn cokernel_of(f: &Mor) -> (Rep, Mor) {
    let y = f.dst();
    let p = y.p;
    let q = y.quiver.clone();

    // Per vertex: image basis (pivot columns), its quotient map, and the
    // standard-vector section of the quotient map.
    let mut quots = Vec::with_capacity(y.dims.len());
    let mut sections = Vec::with_capacity(y.dims.len());
    for c in &f.comps {
        let img = c.image_basis();
        let qm = img.quotient_map();
        let comp = img.complement_coords();
        let mut section = FpMatrix::zero(p, c.rows(), comp.len());
        for (j, &coord) in comp.iter().enumerate() {
            section.set(coord, j, 1);
        }
        quots.push(qm);
        sections.push(section);
    }

    let dims: Vec<usize> = quots.iter().map(FpMatrix::rows).collect();
    let mats: Vec<FpMatrix> = (0..q.arrows().len())
        .map(|a| {
            let (s, t) = q.arrow_endpoints(a);
            // Induced map on quotients: q_t · Y_a · section_s. Well defined
            // because Y_a carries im(f_s) into im(f_t).
            let m = quots[t]
                .mat_mul(y.mat(a))
                .and_then(|m| m.mat_mul(&sections[s]))
                .expect("shapes agree");
            let check = m.mat_mul(&quots[s]).expect("shapes agree");
            let direct = quots[t].mat_mul(y.mat(a)).expect("shapes agree");
            assert_eq!(check, direct, "quotient map is not induced");
            m
        })
        .collect();
    let coker = Rep::new(q, p, dims, mats).expect("constructed to shape");
    let proj = Mor::new(y.clone(), coker.clone(), quots).expect("squares asserted above");
    (coker, proj)
}

/// Image factorization of `f`: the image subrepresentation `I` of the
/// target together with `X ->> I` and `I >-> Y` whose composite is `f`.
pub fn image_of(f: &Mor) -> (Rep, Mor, Mor) {
    let bases: Vec<FpMatrix> = f.comps.iter().map(FpMatrix::image_basis).collect();
    let (img, incl) = sub_rep_from_bases(f.dst(), &bases);
    let onto_comps: Vec<FpMatrix> = f
        .comps
        .iter()
        .zip(&bases)
        .map(|(c, b)| {
            b.solve_matrix(c)
                .expect("shapes agree")
                .expect("image columns span the image")
        })
        .collect();
    let onto = Mor::new(f.src().clone(), img.clone(), onto_comps).expect("factorization commutes");
    assert_eq!(&onto.then(&incl).expect("endpoints match"), f);
    (img, onto, incl)
}

/// Builds the subrepresentation spanned by the given vertexwise bases
/// (independent columns, arrow-stable), with its inclusion.
pub fn sub_rep_from_bases(x: &Rep, bases: &[FpMatrix]) -> (Rep, Mor) {
    let p = x.p;
    let q = x.quiver.clone();
    assert_eq!(bases.len(), x.dims.len());
    let dims: Vec<usize> = bases.iter().map(FpMatrix::cols).collect();
    let mats: Vec<FpMatrix> = (0..q.arrows().len())
        .map(|a| {
            let (s, t) = q.arrow_endpoints(a);
            let pushed = x.mat(a).mat_mul(&bases[s]).expect("shapes agree");
            bases[t]
                .solve_matrix(&pushed)
                .expect("shapes agree")
                .expect("subspaces must be arrow-stable")
        })
        .collect();
    let sub = Rep::new(q, p, dims, mats).expect("constructed to shape");
    let incl = Mor::new(sub.clone(), x.clone(), bases.to_vec()).expect("stability makes squares commute");
    (sub, incl)
}

/// Direct sum with its four structural morphisms.
pub struct DirectSum {
    pub sum: Rep,
    pub inj: [Mor; 2],
    pub proj: [Mor; 2],
}

pub fn direct_sum(x: &Rep, y: &Rep) -> Result<DirectSum> {
    x.same_ambient(y)?;
    let p = x.p;
    let q = x.quiver.clone();
    let dims: Vec<usize> = x.dims.iter().zip(&y.dims).map(|(a, b)| a + b).collect();
    let mats: Vec<FpMatrix> = (0..q.arrows().len())
        .map(|a| x.mat(a).block_diag(y.mat(a)).expect("same field"))
        .collect();
    let sum = Rep::new(q, p, dims, mats)?;

    let mut inj_x = Vec::new();
    let mut inj_y = Vec::new();
    let mut proj_x = Vec::new();
    let mut proj_y = Vec::new();
    for v in 0..x.dims.len() {
        let (dx, dy) = (x.dims[v], y.dims[v]);
        let mut ix = FpMatrix::zero(p, dx + dy, dx);
        let mut iy = FpMatrix::zero(p, dx + dy, dy);
        let mut px = FpMatrix::zero(p, dx, dx + dy);
        let mut py = FpMatrix::zero(p, dy, dx + dy);
        for i in 0..dx {
            ix.set(i, i, 1);
            px.set(i, i, 1);
        }
        for i in 0..dy {
            iy.set(dx + i, i, 1);
            py.set(i, dx + i, 1);
        }
        inj_x.push(ix);
        inj_y.push(iy);
        proj_x.push(px);
        proj_y.push(py);
    }
    Ok(DirectSum {
        inj: [
            Mor::new(x.clone(), sum.clone(), inj_x)?,
            Mor::new(y.clone(), sum.clone(), inj_y)?,
        ],
        proj: [
            Mor::new(sum.clone(), x.clone(), proj_x)?,
            Mor::new(sum.clone(), y.clone(), proj_y)?,
        ],
        sum,
    })
}

/// Searches for an isomorphism. Cheap invariants first (dimension vector,
/// arrow ranks, endomorphism dimension), then an exhaustive scan of
/// Hom(X, Y) when it fits under `ceiling`, else seeded random sampling.
/// `Ok(None)` is a definite no; `SearchBudgetExceeded` is an honest shrug.
pub fn is_isomorphic(x: &Rep, y: &Rep, ceiling: u64) -> Result<Option<Mor>> {
    x.same_ambient(y)?;
    if x.dims != y.dims {
        return Ok(None);
    }
    if x.total_dim() == 0 {
        return Ok(Some(Mor::identity(x)));
    }
    for a in 0..x.quiver.arrows().len() {
        if x.mat(a).rank() != y.mat(a).rank() {
            return Ok(None);
        }
    }
    if hom_space(x, x)?.dim() != hom_space(y, y)?.dim() {
        return Ok(None);
    }
    let h = hom_space(x, y)?;
    if h.dim() == 0 {
        return Ok(None);
    }
    if h.count() <= u128::from(ceiling) {
        return Ok(h.elements().find(Mor::is_invertible));
    }
    let p = x.p.get();
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SAMPLE_SEED);
    for _ in 0..ISO_SAMPLE_BUDGET {
        let coeffs: Vec<u32> = (0..h.dim()).map(|_| rng.gen_range(0..p)).collect();
        let m = h.element(&coeffs);
        if m.is_invertible() {
            return Ok(Some(m));
        }
    }
    Err(Error::SearchBudgetExceeded {
        samples: ISO_SAMPLE_BUDGET,
    })
}

/// Iterator over every endomorphism of `x`, or `EnumerationTooLarge` when
/// p^(dim End) exceeds the default ceiling.
pub fn end_elements(x: &Rep) -> Result<impl Iterator<Item = Mor>> {
    let h = hom_space(x, x)?;
    if h.count() > u128::from(DEFAULT_ENUMERATION_CEILING) {
        return Err(Error::EnumerationTooLarge {
            count: h.count(),
            ceiling: DEFAULT_ENUMERATION_CEILING,
        });
    }
    let total = h.count();
    let p = u128::from(x.p.get());
    let dim = h.dim();
    Ok((0..total).map(move |idx| {
        let mut rem = idx;
        let coeffs: Vec<u32> = (0..dim)
            .map(|_| {
                let c = (rem % p) as u32;
                rem /= p;
                c
            })
            .collect();
        h.element(&coeffs)
    }))
}
