//! Truncated jet groups `G_{k,l}`: k-jets at the origin of diffeomorphisms
//! of affine l-space fixing the origin.
//!
//! A [`JetMap`] stores one polynomial per component, as exponent-vector maps
//! with total degree between 1 and k; the linear part must be invertible.
//! Composition is polynomial substitution truncated above degree k, which
//! makes `G_{k,l}` a group; [`KernelElement`] models the abelian kernel of
//! the projection `G_{k+1,l} -> G_{k,l}` (maps `id + h` with `h` homogeneous
//! of degree k+1), on which the lower group acts by conjugation through the
//! zero-padding section.

mod rep;

pub use rep::{GroupPresentation, JetRepresentation, Letter, LiftOutcome, RepReport};

use std::collections::BTreeMap;

use crate::error::Error;
use crate::exact_linalg::{Matrix, Scalar};
use crate::expr::parse_expression;
use crate::graded_cdga::render_linear_combination;

type Poly = BTreeMap<Vec<u32>, Scalar>;

/// A k-jet of an origin-fixing diffeomorphism of affine l-space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetMap {
    l: usize,
    k: usize,
    comps: Vec<Poly>,
}

fn poly_add_term(p: &mut Poly, exp: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(exp).or_insert_with(Scalar::zero);
    *entry += c;
    // rebuild key lookup to drop exact zeros lazily via prune
}

fn poly_prune(p: &mut Poly) {
    p.retain(|_, c| !c.is_zero());
}

fn poly_mul(l: usize, k: usize, a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let mut e = vec![0u32; l];
            let mut total = 0u32;
            for i in 0..l {
                e[i] = ea[i] + eb[i];
                total += e[i];
            }
            if total as usize > k {
                continue;
            }
            poly_add_term(&mut out, e, ca * cb);
        }
    }
    poly_prune(&mut out);
    out
}

fn monomials_of_degree(l: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(pos: usize, l: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == l {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(pos + 1, l, left - e, cur, out);
            cur.pop();
        }
    }
    if l == 0 {
        return out;
    }
    rec(0, l, d as u32, &mut Vec::new(), &mut out);
    out.sort();
    out
}

impl JetMap {
    pub fn identity(l: usize, k: usize) -> JetMap {
        let mut comps = vec![Poly::new(); l];
        for (i, p) in comps.iter_mut().enumerate() {
            let mut e = vec![0u32; l];
            e[i] = 1;
            p.insert(e, Scalar::one());
        }
        JetMap { l, k, comps }
    }

    /// Builds a jet from raw component polynomials, checking the group
    /// invariants: origin fixed, degrees within `1..=k`, invertible linear
    /// part.
    pub fn from_components(l: usize, k: usize, comps: Vec<Poly>) -> Result<JetMap, Error> {
        if l == 0 || k == 0 {
            return Err(Error::usage("jet spaces need l >= 1 and k >= 1"));
        }
        if comps.len() != l {
            return Err(Error::usage(format!(
                "expected {l} components, got {}",
                comps.len()
            )));
        }
        let mut cleaned = Vec::with_capacity(l);
        for p in comps {
            let mut q = Poly::new();
            for (e, c) in p {
                if c.is_zero() {
                    continue;
                }
                if e.len() != l {
                    return Err(Error::usage("exponent vector of wrong length"));
                }
                let d: u32 = e.iter().sum();
                if d == 0 {
                    return Err(Error::Validation(
                        "jet must fix the origin (constant term present)".to_string(),
                    ));
                }
                if d as usize > k {
                    return Err(Error::usage(format!(
                        "monomial of degree {d} exceeds jet order {k}"
                    )));
                }
                q.insert(e, c);
            }
            cleaned.push(q);
        }
        let jet = JetMap {
            l,
            k,
            comps: cleaned,
        };
        if jet.linear_matrix().rank() != l {
            return Err(Error::Validation(
                "jet has non-invertible linear part".to_string(),
            ));
        }
        Ok(jet)
    }

    /// Parses component expressions in the variables `z1..zl`.
    pub fn parse(l: usize, k: usize, comps: &[String]) -> Result<JetMap, Error> {
        if comps.len() != l {
            return Err(Error::usage(format!(
                "expected {l} component expressions, got {}",
                comps.len()
            )));
        }
        let mut polys = Vec::with_capacity(l);
        for src in comps {
            let mut p = Poly::new();
            for t in parse_expression(src)? {
                let mut e = vec![0u32; l];
                for f in &t.factors {
                    let idx = f
                        .strip_prefix('z')
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&i| i >= 1 && i <= l)
                        .ok_or_else(|| {
                            Error::usage(format!("unknown jet variable {f:?} (use z1..z{l})"))
                        })?;
                    e[idx - 1] += 1;
                }
                poly_add_term(&mut p, e, t.coeff);
            }
            poly_prune(&mut p);
            polys.push(p);
        }
        JetMap::from_components(l, k, polys)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn is_identity(&self) -> bool {
        self == &JetMap::identity(self.l, self.k)
    }

    pub fn linear_matrix(&self) -> Matrix {
        let mut m = Matrix::new(self.l, self.l);
        for (i, p) in self.comps.iter().enumerate() {
            for (e, c) in p {
                if e.iter().sum::<u32>() == 1 {
                    let j = e.iter().position(|&x| x == 1).expect("degree-1 monomial");
                    m.set(i, j, c.clone());
                }
            }
        }
        m
    }

    /// `self ∘ other`: substitute `other` into `self`, truncating above
    /// degree k.
    pub fn compose(&self, other: &JetMap) -> Result<JetMap, Error> {
        if self.l != other.l || self.k != other.k {
            return Err(Error::usage(format!(
                "cannot compose jets of shapes (l={}, k={}) and (l={}, k={})",
                self.l, self.k, other.l, other.k
            )));
        }
        let mut comps = Vec::with_capacity(self.l);
        for p in &self.comps {
            let mut out = Poly::new();
            for (e, c) in p {
                // product of other_j^{e_j}, truncated
                let mut acc: Poly = {
                    let mut unit = Poly::new();
                    unit.insert(vec![0u32; self.l], Scalar::one());
                    unit
                };
                for (j, &ej) in e.iter().enumerate() {
                    for _ in 0..ej {
                        acc = poly_mul(self.l, self.k, &acc, &other.comps[j]);
                    }
                }
                for (em, cm) in acc {
                    poly_add_term(&mut out, em, &cm * c);
                }
            }
            poly_prune(&mut out);
            comps.push(out);
        }
        // constant terms cannot appear: every factor has valuation >= 1
        Ok(JetMap {
            l: self.l,
            k: self.k,
            comps,
        })
    }

    /// Group inverse, degree by degree.
    pub fn inverse(&self) -> Result<JetMap, Error> {
        let a_inv = self.linear_matrix().inverse().ok_or_else(|| {
            Error::internal("group element with singular linear part".to_string())
        })?;
        let mut g = JetMap::from_linear(&a_inv, self.k);
        for d in 2..=self.k {
            let r = self.compose(&g)?;
            // residual in degree d
            let mut correction: Vec<Poly> = vec![Poly::new(); self.l];
            for (i, p) in r.comps.iter().enumerate() {
                for (e, c) in p {
                    if e.iter().sum::<u32>() as usize == d {
                        poly_add_term(&mut correction[i], e.clone(), c.clone());
                    }
                }
            }
            if correction.iter().all(|p| p.is_empty()) {
                continue;
            }
            // g -= A^{-1} · correction
            for i in 0..self.l {
                for j in 0..self.l {
                    let aij = a_inv.get(i, j);
                    if aij.is_zero() {
                        continue;
                    }
                    for (e, c) in &correction[j] {
                        poly_add_term(&mut g.comps[i], e.clone(), -(&aij * c));
                    }
                }
            }
            for p in g.comps.iter_mut() {
                poly_prune(p);
            }
        }
        debug_assert!(self.compose(&g).expect("shapes match").is_identity());
        debug_assert!(g.compose(self).expect("shapes match").is_identity());
        Ok(g)
    }

    pub fn from_linear(a: &Matrix, k: usize) -> JetMap {
        let l = a.rows();
        assert_eq!(a.cols(), l, "linear part must be square");
        let mut comps = vec![Poly::new(); l];
        for i in 0..l {
            for j in 0..l {
                let c = a.get(i, j);
                if !c.is_zero() {
                    let mut e = vec![0u32; l];
                    e[j] = 1;
                    comps[i].insert(e, c);
                }
            }
        }
        JetMap { l, k, comps }
    }

    /// Forgets all terms above degree `k2 <= k`.
    pub fn project(&self, k2: usize) -> Result<JetMap, Error> {
        if k2 > self.k || k2 == 0 {
            return Err(Error::usage(format!(
                "cannot project a {}-jet to order {k2}",
                self.k
            )));
        }
        let comps = self
            .comps
            .iter()
            .map(|p| {
                p.iter()
                    .filter(|(e, _)| e.iter().sum::<u32>() as usize <= k2)
                    .map(|(e, c)| (e.clone(), c.clone()))
                    .collect()
            })
            .collect();
        Ok(JetMap {
            l: self.l,
            k: k2,
            comps,
        })
    }

    /// The zero-padding section `G_{k,l} -> G_{k2,l}` for `k2 >= k`: same
    /// coefficients, no new ones.
    pub fn zero_pad(&self, k2: usize) -> Result<JetMap, Error> {
        if k2 < self.k {
            return Err(Error::usage(format!(
                "zero-padding cannot lower the order ({} -> {k2})",
                self.k
            )));
        }
        Ok(JetMap {
            l: self.l,
            k: k2,
            comps: self.comps.clone(),
        })
    }

    /// Component expressions in `z1..zl`.
    pub fn display(&self) -> Vec<String> {
        self.comps
            .iter()
            .map(|p| {
                let parts: Vec<(Scalar, String)> = p
                    .iter()
                    .map(|(e, c)| (c.clone(), monomial_name(e)))
                    .collect();
                render_linear_combination(parts)
            })
            .collect()
    }
}

fn monomial_name(e: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &exp) in e.iter().enumerate() {
        match exp {
            0 => {}
            1 => parts.push(format!("z{}", i + 1)),
            _ => parts.push(format!("z{}^{exp}", i + 1)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// An element of the kernel of `G_{k+1,l} -> G_{k,l}`: the map `id + h`
/// with `h` homogeneous of degree `k+1`. `base_k` records k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelElement {
    l: usize,
    base_k: usize,
    comps: Vec<Poly>,
}

impl KernelElement {
    pub fn zero(l: usize, base_k: usize) -> KernelElement {
        KernelElement {
            l,
            base_k,
            comps: vec![Poly::new(); l],
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn base_k(&self) -> usize {
        self.base_k
    }

    /// Extracts `jet - id`, requiring the jet to agree with the identity
    /// below degree `base_k + 1`.
    pub fn from_jet(jet: &JetMap, base_k: usize) -> Result<KernelElement, Error> {
        if jet.k != base_k + 1 {
            return Err(Error::usage(format!(
                "kernel elements live at order {} (got a {}-jet)",
                base_k + 1,
                jet.k
            )));
        }
        let id = JetMap::identity(jet.l, jet.k);
        let mut comps = Vec::with_capacity(jet.l);
        for i in 0..jet.l {
            let mut h = Poly::new();
            for (e, c) in &jet.comps[i] {
                let mut v = c.clone();
                if let Some(idc) = id.comps[i].get(e) {
                    v -= idc.clone();
                }
                poly_add_term(&mut h, e.clone(), v);
            }
            for (e, idc) in &id.comps[i] {
                if !jet.comps[i].contains_key(e) {
                    poly_add_term(&mut h, e.clone(), -idc.clone());
                }
            }
            poly_prune(&mut h);
            for e in h.keys() {
                if e.iter().sum::<u32>() as usize != base_k + 1 {
                    return Err(Error::usage(
                        "jet is not in the kernel of the projection".to_string(),
                    ));
                }
            }
            comps.push(h);
        }
        Ok(KernelElement {
            l: jet.l,
            base_k,
            comps,
        })
    }

    /// The jet `id + h` in `G_{base_k+1, l}`.
    pub fn embed(&self) -> JetMap {
        let mut jet = JetMap::identity(self.l, self.base_k + 1);
        for (i, p) in self.comps.iter().enumerate() {
            for (e, c) in p {
                poly_add_term(&mut jet.comps[i], e.clone(), c.clone());
            }
        }
        for p in jet.comps.iter_mut() {
            poly_prune(p);
        }
        jet
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_empty())
    }

    pub fn add(&self, other: &KernelElement) -> Result<KernelElement, Error> {
        if self.l != other.l || self.base_k != other.base_k {
            return Err(Error::usage(
                "kernel elements of different shapes".to_string(),
            ));
        }
        let mut out = self.clone();
        for (i, p) in other.comps.iter().enumerate() {
            for (e, c) in p {
                poly_add_term(&mut out.comps[i], e.clone(), c.clone());
            }
        }
        for p in out.comps.iter_mut() {
            poly_prune(p);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> KernelElement {
        let mut out = self.clone();
        for p in out.comps.iter_mut() {
            for c in p.values_mut() {
                *c = &*c * s;
            }
            poly_prune(p);
        }
        out
    }

    /// Dimension of the kernel: `l` choices of component times the number
    /// of degree-(k+1) monomials in `l` variables.
    pub fn space_dim(l: usize, base_k: usize) -> usize {
        l * monomials_of_degree(l, base_k + 1).len()
    }

    /// Deterministic basis: component-major, monomials in ascending
    /// lexicographic order.
    pub fn basis(l: usize, base_k: usize) -> Vec<KernelElement> {
        let monos = monomials_of_degree(l, base_k + 1);
        let mut out = Vec::new();
        for i in 0..l {
            for m in &monos {
                let mut ke = KernelElement::zero(l, base_k);
                ke.comps[i].insert(m.clone(), Scalar::one());
                out.push(ke);
            }
        }
        out
    }

    /// Flat coordinates matching [`KernelElement::basis`] order.
    pub fn to_coords(&self) -> Vec<Scalar> {
        let monos = monomials_of_degree(self.l, self.base_k + 1);
        let mut out = Vec::with_capacity(self.l * monos.len());
        for i in 0..self.l {
            for m in &monos {
                out.push(self.comps[i].get(m).cloned().unwrap_or_else(Scalar::zero));
            }
        }
        out
    }

    pub fn from_coords(l: usize, base_k: usize, coords: &[Scalar]) -> Result<KernelElement, Error> {
        let monos = monomials_of_degree(l, base_k + 1);
        if coords.len() != l * monos.len() {
            return Err(Error::usage(
                "kernel coordinate vector of wrong length".to_string(),
            ));
        }
        let mut ke = KernelElement::zero(l, base_k);
        let mut it = coords.iter();
        for i in 0..l {
            for m in &monos {
                let c = it.next().expect("length checked").clone();
                if !c.is_zero() {
                    ke.comps[i].insert(m.clone(), c);
                }
            }
        }
        Ok(ke)
    }

    pub fn display(&self) -> Vec<String> {
        self.comps
            .iter()
            .map(|p| {
                let parts: Vec<(Scalar, String)> = p
                    .iter()
                    .map(|(e, c)| (c.clone(), monomial_name(e)))
                    .collect();
                render_linear_combination(parts)
            })
            .collect()
    }
}

/// Conjugation action of `G_{k,l}` on the kernel of
/// `G_{k+1,l} -> G_{k,l}`, written for right-action composition so that for
/// `l = 1` it multiplies by `a(ψ)^k` (a = the linear coefficient). The
/// result only depends on the linear part of `ψ`.
pub fn module_action(psi: &JetMap, b: &KernelElement) -> Result<KernelElement, Error> {
    if psi.l() != b.l() || psi.k() != b.base_k() {
        return Err(Error::usage(format!(
            "module action shape mismatch: psi in G_{{{},{}}}, b over G_{{{},{}}}",
            psi.k(),
            psi.l(),
            b.base_k(),
            b.l()
        )));
    }
    let sigma = psi.zero_pad(psi.k() + 1)?;
    let conj = sigma.inverse()?.compose(&b.embed())?.compose(&sigma)?;
    KernelElement::from_jet(&conj, b.base_k())
}

/// Matrix of [`module_action`] by any group element with linear part `a`,
/// in the deterministic kernel basis.
pub fn kernel_transport_matrix(a: &Matrix, base_k: usize) -> Result<Matrix, Error> {
    let l = a.rows();
    let jet = JetMap::from_linear(a, base_k);
    if jet.linear_matrix().rank() != l {
        return Err(Error::usage(
            "transport needs an invertible linear part".to_string(),
        ));
    }
    let basis = KernelElement::basis(l, base_k);
    let dim = basis.len();
    let mut m = Matrix::new(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        let img = module_action(&jet, b)?;
        for (i, c) in img.to_coords().into_iter().enumerate() {
            if !c.is_zero() {
                m.set(i, j, c);
            }
        }
    }
    Ok(m)
}

/// Failure of the zero-padding section to be a homomorphism:
/// `σ(c1·c2)^{-1} ∘ σ(c1) ∘ σ(c2)` in `G_{k+1,l}`, which lands in the
/// kernel.
pub fn section_cocycle(c1: &JetMap, c2: &JetMap) -> Result<KernelElement, Error> {
    if c1.l() != c2.l() || c1.k() != c2.k() {
        return Err(Error::usage(
            "cocycle arguments of different shapes".to_string(),
        ));
    }
    let k = c1.k();
    let prod = c1.compose(c2)?; // in G_k
    let lhs = c1.zero_pad(k + 1)?.compose(&c2.zero_pad(k + 1)?)?;
    let coc = prod.zero_pad(k + 1)?.inverse()?.compose(&lhs)?;
    KernelElement::from_jet(&coc, k)
}
