//! Maurer–Cartan data over a finite model and the invariants derived from
//! it: validation of the structure equations, the twisted cochain complex,
//! its cohomology ring, the first page of the block-filtration spectral
//! sequence, restriction to the hypersurface complex, and the Gysin-style
//! dimension count for the restricted algebroid.
//!
//! Conventions. The data of order `k` consists of a closed connection form
//! `γ` and structure forms `η_1 … η_{k-1}`; `η_r` carries line-bundle
//! weight `-r`, and a form of weight `w` is differentiated by `d + wγ∧`.
//! The structure equations read, for `r = 1 … k-1`,
//!
//! ```text
//! dη_r - rγ∧η_r + ½ Σ_{i+j=r, i,j≥1} (j-i) η_i∧η_j = 0.
//! ```

mod twisted;

pub use twisted::{TwElement, TwistedComplex};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::exact_linalg::{subquotient, Matrix, Scalar, Subquotient};
use crate::graded_cdga::{Element, FiniteCdga};

/// A homogeneous element together with the line-bundle weight it carries.
#[derive(Clone, Debug)]
pub struct WeightedElement {
    pub element: Element,
    pub weight: i64,
}

/// Connection form `γ` plus structure forms `η_1 … η_{k-1}` on a fixed
/// model, describing an order-`k` singular foliation structure along the
/// hypersurface the model presents.
#[derive(Clone, Debug)]
pub struct MaurerCartanData {
    model: Arc<FiniteCdga>,
    k: usize,
    gamma: Element,
    /// `etas[i]` is `η_{i+1}`; length `k - 1` (empty for `k ≤ 1`).
    etas: Vec<Element>,
}

/// One failed structure equation: the order `r` and the nonzero residual.
#[derive(Clone, Debug)]
pub struct McViolation {
    pub order: usize,
    pub residual: Element,
}

/// Outcome of checking the structure equations.
#[derive(Clone, Debug)]
pub struct McReport {
    pub gamma_closed: bool,
    pub violations: Vec<McViolation>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.gamma_closed && self.violations.is_empty()
    }
}

/// First page of the spectral sequence of the weight filtration on a
/// twisted complex: one column per block weight, plus the comparison
/// against the Betti numbers of the total complex.
#[derive(Clone, Debug)]
pub struct E1Page {
    /// `columns[w][p]`: dimension at block weight `w` and model degree `p`.
    pub columns: Vec<Vec<usize>>,
    /// Per total degree `n`: `Σ_w columns[w][n-1]`.
    pub mass: Vec<usize>,
    /// Betti numbers of the twisted complex, same indexing as `mass`.
    pub twisted: Vec<usize>,
    /// `mass[n] ≥ twisted[n]` for every `n` (must always hold).
    pub mass_dominates: bool,
    /// Alternating sums of `mass` and `twisted` agree (must always hold).
    pub euler_matches: bool,
}

/// Dimension bookkeeping for the restricted algebroid via the long exact
/// sequence with connecting map `ω ↦ (-1)^{j+1} c∧ω`.
#[derive(Clone, Debug)]
pub struct GysinReport {
    /// `dims[i]`: dimension of the degree-`i` cohomology of the restricted
    /// algebroid.
    pub dims: Vec<usize>,
    /// Betti numbers of the model itself.
    pub base_betti: Vec<usize>,
    /// Betti numbers at twist weight `k` (the line-bundle power side).
    pub line_betti: Vec<usize>,
    /// `connecting_ranks[j]`: rank of the connecting map out of weight-`k`
    /// degree-`j` cohomology into model degree `j + 2`.
    pub connecting_ranks: Vec<usize>,
}

impl MaurerCartanData {
    /// Validates shapes only (the structure equations are checked by
    /// [`MaurerCartanData::mc_check`]): `gamma` and every `η` must be
    /// degree-1 elements (or zero) of `model`, and there must be exactly
    /// `k - 1` structure forms.
    pub fn new(
        model: Arc<FiniteCdga>,
        k: usize,
        gamma: Element,
        etas: Vec<Element>,
    ) -> Result<MaurerCartanData, Error> {
        if etas.len() != k.saturating_sub(1) {
            return Err(Error::usage(format!(
                "order-{k} data needs {} structure forms, got {}",
                k.saturating_sub(1),
                etas.len()
            )));
        }
        let check_form = |x: &Element, what: &str| -> Result<(), Error> {
            if x.algebra_id() != model.id() {
                return Err(Error::validation(format!(
                    "{what} belongs to a different algebra than the model"
                )));
            }
            if !x.is_zero() && x.degree() != Some(1) {
                return Err(Error::validation(format!(
                    "{what} must be homogeneous of degree 1"
                )));
            }
            Ok(())
        };
        check_form(&gamma, "connection form")?;
        for (i, e) in etas.iter().enumerate() {
            check_form(e, &format!("structure form eta_{}", i + 1))?;
        }
        Ok(MaurerCartanData {
            model,
            k,
            gamma,
            etas,
        })
    }

    /// All-zero data of order `k`: flat, no structure forms.
    pub fn zero(model: Arc<FiniteCdga>, k: usize) -> MaurerCartanData {
        let gamma = model.zero();
        let etas = vec![model.zero(); k.saturating_sub(1)];
        MaurerCartanData {
            model,
            k,
            gamma,
            etas,
        }
    }

    pub fn model(&self) -> &Arc<FiniteCdga> {
        &self.model
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> &Element {
        &self.gamma
    }

    pub fn etas(&self) -> &[Element] {
        &self.etas
    }

    /// `η_i` for `1 ≤ i ≤ k-1`.
    pub fn eta(&self, i: usize) -> Result<&Element, Error> {
        if i == 0 || i >= self.k {
            return Err(Error::usage(format!(
                "eta index {i} out of range 1..={}",
                self.k.saturating_sub(1)
            )));
        }
        Ok(&self.etas[i - 1])
    }

    /// Checks `dγ = 0` and every structure equation; collects all failures
    /// rather than stopping at the first.
    pub fn mc_check(&self) -> Result<McReport, Error> {
        let gamma_closed = self.model.differential(&self.gamma)?.is_zero();
        let mut violations = Vec::new();
        let half = Scalar::ratio(1, 2);
        for r in 1..self.k {
            let mut residual = self.model.differential(self.eta(r)?)?;
            if !self.gamma.is_zero() {
                let tw = self.model.multiply(&self.gamma, self.eta(r)?)?;
                residual = residual.add(&tw.scale(&Scalar::from_int(-(r as i64))))?;
            }
            for i in 1..r {
                let j = r - i;
                let c = Scalar::from_int(j as i64 - i as i64) * &half;
                if c.is_zero() {
                    continue;
                }
                let w = self.model.multiply(self.eta(i)?, self.eta(j)?)?;
                residual = residual.add(&w.scale(&c))?;
            }
            if !residual.is_zero() {
                violations.push(McViolation { order: r, residual });
            }
        }
        Ok(McReport {
            gamma_closed,
            violations,
        })
    }

    /// Errors with a description of every failed structure equation unless
    /// [`MaurerCartanData::mc_check`] passes.
    pub(crate) fn ensure_mc(&self) -> Result<(), Error> {
        let report = self.mc_check()?;
        if report.passed() {
            return Ok(());
        }
        let mut parts = Vec::new();
        if !report.gamma_closed {
            parts.push("connection form is not closed".to_string());
        }
        for v in &report.violations {
            parts.push(format!(
                "Maurer–Cartan violation at order {}: residual {}",
                v.order,
                self.model.display(&v.residual)
            ));
        }
        Err(Error::validation(parts.join("; ")))
    }

    /// The twisted complex `⊕_{r=0}^{k} Ω ⊗ t_r` with
    /// `d(t_r) = rγ⊗t_r + Σ_{i=1}^{r-1} (i-r) η_i⊗t_{r-i}` and
    /// `t_s ∗ t_r = Σ_{i=max(s,1)}^{r-1} η_i ⊗ t_{s+r-i}` for `s < r`.
    pub fn build_twisted(&self) -> Result<TwistedComplex, Error> {
        self.ensure_mc()?;
        let mut dt = Vec::with_capacity(self.k + 1);
        for r in 0..=self.k {
            let mut terms = Vec::new();
            if r > 0 && !self.gamma.is_zero() {
                terms.push((r, self.gamma.scale(&Scalar::from_int(r as i64))));
            }
            for i in 1..r {
                let g = self.eta(i)?.scale(&Scalar::from_int(i as i64 - r as i64));
                if !g.is_zero() {
                    terms.push((r - i, g));
                }
            }
            dt.push(terms);
        }
        let mut tprod = BTreeMap::new();
        for s in 0..=self.k {
            for r in s + 1..=self.k {
                let mut terms = Vec::new();
                for i in s.max(1)..r {
                    if !self.eta(i)?.is_zero() {
                        terms.push((s + r - i, self.eta(i)?.clone()));
                    }
                }
                if !terms.is_empty() {
                    tprod.insert((s, r), terms);
                }
            }
        }
        TwistedComplex::assemble(
            Arc::clone(&self.model),
            self.k,
            format!("{}[t0..t{}]", self.model.name(), self.k),
            dt,
            tprod,
        )
    }

    /// Betti numbers of the twisted complex.
    pub fn twisted_betti(&self) -> Result<Vec<usize>, Error> {
        self.build_twisted()?.betti()
    }

    /// Betti numbers of the full algebroid complex: model cohomology plus
    /// twisted-complex cohomology, degree by degree.
    pub fn algebroid_betti(&self) -> Result<Vec<usize>, Error> {
        let base = self.model.betti()?;
        let tw = self.twisted_betti()?;
        let mut out = vec![0usize; base.len().max(tw.len())];
        for (n, b) in base.iter().enumerate() {
            out[n] += b;
        }
        for (n, b) in tw.iter().enumerate() {
            out[n] += b;
        }
        Ok(out)
    }

    /// The degree-2, weight-`(-k)` obstruction cocycle
    /// `Σ_{1≤i<k/2} (k-2i) η_i∧η_{k-i}`.
    pub fn extension_cocycle(&self) -> Result<Element, Error> {
        let mut out = self.model.zero();
        for i in 1..self.k {
            if 2 * i >= self.k {
                break;
            }
            let j = self.k - i;
            let w = self.model.multiply(self.eta(i)?, self.eta(j)?)?;
            out = out.add(&w.scale(&Scalar::from_int((self.k - 2 * i) as i64)))?;
        }
        Ok(out)
    }

    /// First page of the weight-filtration spectral sequence: block weight
    /// `w` contributes the weight-`w` twisted cohomology of the model, one
    /// degree up. Both comparison flags must come back `true`; they are
    /// recomputed rather than assumed so that tests can assert them.
    pub fn spectral_e1(&self) -> Result<E1Page, Error> {
        let twisted = self.twisted_betti()?;
        let top = self.model.top_degree();
        let mut columns = Vec::with_capacity(self.k + 1);
        for w in 0..=self.k {
            columns.push(self.model.twisted_betti_weight(&self.gamma, w as i64)?);
        }
        let mut mass = vec![0usize; top + 2];
        for col in &columns {
            for (p, d) in col.iter().enumerate() {
                mass[p + 1] += d;
            }
        }
        let mass_dominates = twisted
            .iter()
            .enumerate()
            .all(|(n, b)| mass.get(n).copied().unwrap_or(0) >= *b);
        let euler = |v: &[usize]| -> i64 {
            v.iter()
                .enumerate()
                .map(|(n, d)| if n % 2 == 0 { *d as i64 } else { -(*d as i64) })
                .sum()
        };
        let euler_matches = euler(&mass) == euler(&twisted);
        Ok(E1Page {
            columns,
            mass,
            twisted,
            mass_dominates,
            euler_matches,
        })
    }

    /// Restriction of a twisted element to the hypersurface data: block
    /// components `x = Σ φ_r ⊗ t_r` go to `(Σ_{r=1}^{k-1} φ_r∧η_r, φ_k)`,
    /// the second component carrying weight `k`. Satisfies
    /// `restrict(dx) = (d β' + (-1)^{|ω'|+1} c∧ω', dω' + kγ∧ω')` where
    /// `(β', ω') = restrict(x)` and `c` is the obstruction cocycle.
    pub fn restrict(
        &self,
        complex: &TwistedComplex,
        x: &TwElement,
    ) -> Result<(Element, WeightedElement), Error> {
        if complex.k() != self.k || complex.model().id() != self.model.id() {
            return Err(Error::usage(
                "twisted complex does not match the Maurer–Cartan data".to_string(),
            ));
        }
        let mut first = self.model.zero();
        for r in 1..self.k {
            let block = complex.block_component(x, r)?;
            if block.is_zero() {
                continue;
            }
            first = first.add(&self.model.multiply(&block, self.eta(r)?)?)?;
        }
        let last = complex.block_component(x, self.k)?;
        Ok((
            first,
            WeightedElement {
                element: last,
                weight: self.k as i64,
            },
        ))
    }

    /// Cohomology dimensions of the restricted algebroid out of the long
    /// exact sequence: per degree `i`, the cokernel of the connecting map
    /// landing in model degree `i` plus the kernel of the connecting map
    /// leaving weight-`k` degree `i - 1`.
    pub fn gysin_betti(&self) -> Result<GysinReport, Error> {
        self.ensure_mc()?;
        let model = &self.model;
        let top = model.top_degree();
        let base_subs: Vec<Subquotient> = (0..=top)
            .map(|n| model.subquotient_at(n))
            .collect::<Result<_, _>>()?;
        let tw_mats = model.twisted_differentials(&self.gamma, self.k as i64)?;
        let mut line_subs = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let b = if n == 0 {
                Matrix::new(model.dim(0), 0)
            } else {
                tw_mats[n - 1].clone()
            };
            line_subs.push(subquotient(&tw_mats[n], &b)?);
        }
        let c = self.extension_cocycle()?;
        let mut connecting_ranks = vec![0usize; top + 1];
        for j in 0..=top {
            if j + 2 > top || c.is_zero() {
                continue;
            }
            let target = &base_subs[j + 2];
            if target.dim() == 0 || line_subs[j].dim() == 0 {
                continue;
            }
            let mut cols = Vec::new();
            for rep in line_subs[j].representatives() {
                let w = model.element_from_coords(j, rep.clone());
                let mut cw = model.multiply(&c, &w)?;
                if (j + 1) % 2 == 1 {
                    cw = cw.neg();
                }
                cols.push(target.reduce(&cw.coords(j + 2, model.dim(j + 2)))?);
            }
            connecting_ranks[j] = Matrix::from_columns(target.dim(), &cols).rank();
        }
        let base_betti: Vec<usize> = base_subs.iter().map(|s| s.dim()).collect();
        let line_betti: Vec<usize> = line_subs.iter().map(|s| s.dim()).collect();
        let mut dims = vec![0usize; top + 2];
        for (i, slot) in dims.iter_mut().enumerate() {
            let into = base_betti.get(i).copied().unwrap_or(0)
                - if i >= 2 {
                    connecting_ranks.get(i - 2).copied().unwrap_or(0)
                } else {
                    0
                };
            let out_of = if i >= 1 {
                line_betti.get(i - 1).copied().unwrap_or(0)
                    - connecting_ranks.get(i - 1).copied().unwrap_or(0)
            } else {
                0
            };
            *slot = into + out_of;
        }
        Ok(GysinReport {
            dims,
            base_betti,
            line_betti,
            connecting_ranks,
        })
    }
}

/// Cohomology of a twisted complex with deterministic representatives and
/// the induced product on classes.
#[derive(Clone)]
pub struct CohomologyRing {
    complex: TwistedComplex,
    subs: Vec<Subquotient>,
}

/// A nonvanishing product of two representative classes: the two
/// `(degree, index)` labels and the class coordinates of the product.
#[derive(Clone, Debug)]
pub struct ClassProduct {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub coords: Vec<Scalar>,
}

impl CohomologyRing {
    pub fn new(complex: &TwistedComplex) -> Result<CohomologyRing, Error> {
        let subs = (0..=complex.top_degree())
            .map(|n| complex.subquotient_at(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CohomologyRing {
            complex: complex.clone(),
            subs,
        })
    }

    pub fn complex(&self) -> &TwistedComplex {
        &self.complex
    }

    pub fn betti(&self) -> Vec<usize> {
        self.subs.iter().map(|s| s.dim()).collect()
    }

    /// The `i`-th representative cocycle in degree `n`.
    pub fn representative(&self, n: usize, i: usize) -> Result<TwElement, Error> {
        let sub = self
            .subs
            .get(n)
            .ok_or_else(|| Error::usage(format!("degree {n} out of range")))?;
        let rep = sub
            .representatives()
            .get(i)
            .ok_or_else(|| Error::usage(format!("class index {i} out of range in degree {n}")))?;
        Ok(self.complex.element_from_coords(n, rep.clone()))
    }

    /// Class coordinates of a degree-`n` cocycle; errors if `x` is not a
    /// cocycle concentrated in degree `n`.
    pub fn reduce(&self, x: &TwElement, n: usize) -> Result<Vec<Scalar>, Error> {
        if x.complex_id() != self.complex.id() {
            return Err(Error::usage(
                "element belongs to a different twisted complex".to_string(),
            ));
        }
        if x.degrees().iter().any(|&d| d != n) {
            return Err(Error::usage(format!(
                "class reduction requires an element concentrated in degree {n}"
            )));
        }
        let sub = self
            .subs
            .get(n)
            .ok_or_else(|| Error::usage(format!("degree {n} out of range")))?;
        sub.reduce(&x.coords(n, self.complex.dim(n)))
    }

    /// Whether a degree-`n` cocycle is a coboundary.
    pub fn is_trivial(&self, x: &TwElement, n: usize) -> Result<bool, Error> {
        Ok(self.reduce(x, n)?.iter().all(|c| c.is_zero()))
    }

    /// Class coordinates of the product of representatives `(n1, i1)` and
    /// `(n2, i2)`; empty when the product degree exceeds the top degree.
    pub fn class_product(
        &self,
        n1: usize,
        i1: usize,
        n2: usize,
        i2: usize,
    ) -> Result<Vec<Scalar>, Error> {
        let n = n1 + n2;
        if n > self.complex.top_degree() {
            return Ok(Vec::new());
        }
        let x = self.representative(n1, i1)?;
        let y = self.representative(n2, i2)?;
        let p = self.complex.multiply(&x, &y)?;
        self.reduce(&p, n)
    }

    /// All unordered pairs of representatives whose product class is
    /// nonzero, in lexicographic order of `(degree, index)` labels.
    pub fn nonzero_products(&self) -> Result<Vec<ClassProduct>, Error> {
        let mut labels = Vec::new();
        for (n, sub) in self.subs.iter().enumerate() {
            for i in 0..sub.dim() {
                labels.push((n, i));
            }
        }
        let mut out = Vec::new();
        for (a, &left) in labels.iter().enumerate() {
            for &right in &labels[a..] {
                let coords = self.class_product(left.0, left.1, right.0, right.1)?;
                if coords.iter().any(|c| !c.is_zero()) {
                    out.push(ClassProduct {
                        left,
                        right,
                        coords,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_cdga::models;

    /// Order-4 data on the Heisenberg model: `γ = 0`,
    /// `(η_1, η_2, η_3) = (a, b, -c)`.
    fn heisenberg_data() -> MaurerCartanData {
        let h = models::heisenberg_ce();
        let etas = vec![
            h.parse_element("a").unwrap(),
            h.parse_element("b").unwrap(),
            h.parse_element("-c").unwrap(),
        ];
        MaurerCartanData::new(Arc::clone(&h), 4, h.zero(), etas).unwrap()
    }

    fn tw(data: &MaurerCartanData) -> TwistedComplex {
        data.build_twisted().unwrap()
    }

    #[test]
    fn shape_validation() {
        let h = models::heisenberg_ce();
        // wrong number of structure forms
        assert!(MaurerCartanData::new(Arc::clone(&h), 3, h.zero(), vec![]).is_err());
        // non-1-form rejected
        let ab = h.parse_element("a*b").unwrap();
        assert!(MaurerCartanData::new(Arc::clone(&h), 2, h.zero(), vec![ab]).is_err());
        // foreign element rejected
        let t = models::torus_ce(2);
        let a1 = t.parse_element("a1").unwrap();
        assert!(MaurerCartanData::new(Arc::clone(&h), 2, h.zero(), vec![a1]).is_err());
        assert!(MaurerCartanData::new(h, 0, t.zero(), vec![]).is_err());
    }

    #[test]
    fn mc_check_accepts_and_rejects() {
        assert!(heisenberg_data().mc_check().unwrap().passed());

        // flipping η_3 to +c breaks exactly the order-3 equation:
        // residual = d(c) + ½[(2-1)η_1η_2 + (1-2)η_2η_1] = ab + ab = 2ab.
        let h = models::heisenberg_ce();
        let etas = vec![
            h.parse_element("a").unwrap(),
            h.parse_element("b").unwrap(),
            h.parse_element("c").unwrap(),
        ];
        let bad = MaurerCartanData::new(Arc::clone(&h), 4, h.zero(), etas).unwrap();
        let report = bad.mc_check().unwrap();
        assert!(report.gamma_closed);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].order, 3);
        let expected = h.parse_element("2*a*b").unwrap();
        assert!(report.violations[0]
            .residual
            .sub(&expected)
            .unwrap()
            .is_zero());
        assert!(bad.build_twisted().is_err());

        // a non-closed connection form is reported separately
        let c = h.parse_element("c").unwrap();
        let data = MaurerCartanData::new(Arc::clone(&h), 1, c, vec![]).unwrap();
        let report = data.mc_check().unwrap();
        assert!(!report.gamma_closed);
        assert!(report.violations.is_empty());
        assert!(data.build_twisted().is_err());
    }

    #[test]
    fn heisenberg_twisted_differentials() {
        let data = heisenberg_data();
        let tc = tw(&data);
        let model = data.model();
        let unit = model.parse_element("1").unwrap();
        let t = |r: usize| tc.t_element(r, &unit).unwrap();
        let expect = |x: &TwElement, s: &str| {
            let e = tc.parse_element(s).unwrap();
            assert!(x.sub(&e).unwrap().is_zero(), "got {}", tc.display(x));
        };
        assert!(tc.differential(&t(0)).unwrap().is_zero());
        assert!(tc.differential(&t(1)).unwrap().is_zero());
        expect(&tc.differential(&t(2)).unwrap(), "-a*t1");
        expect(&tc.differential(&t(3)).unwrap(), "-2*a*t2 - b*t1");
        expect(&tc.differential(&t(4)).unwrap(), "-3*a*t3 - 2*b*t2 + c*t1");
    }

    #[test]
    fn heisenberg_twisted_products() {
        let data = heisenberg_data();
        let tc = tw(&data);
        let unit = data.model().parse_element("1").unwrap();
        let t = |r: usize| tc.t_element(r, &unit).unwrap();
        let check = |s: usize, r: usize, rhs: &str| {
            let p = tc.multiply(&t(s), &t(r)).unwrap();
            if rhs.is_empty() {
                assert!(p.is_zero(), "t{s}*t{r} = {}", tc.display(&p));
            } else {
                let e = tc.parse_element(rhs).unwrap();
                assert!(
                    p.sub(&e).unwrap().is_zero(),
                    "t{s}*t{r} = {}",
                    tc.display(&p)
                );
            }
        };
        check(0, 1, "");
        check(0, 2, "a*t1");
        check(0, 3, "a*t2 + b*t1");
        check(0, 4, "a*t3 + b*t2 - c*t1");
        check(1, 2, "a*t2");
        check(1, 3, "a*t3 + b*t2");
        check(1, 4, "a*t4 + b*t3 - c*t2");
        check(2, 3, "b*t3");
        check(2, 4, "b*t4 - c*t3");
        check(3, 4, "-c*t4");
        // graded commutativity in total degree: t_r all have total degree 1
        check(2, 1, "-a*t2");
        check(4, 3, "c*t4");
        // squares of odd-total-degree elements vanish
        assert!(tc.multiply(&t(2), &t(2)).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_betti_numbers() {
        let data = heisenberg_data();
        assert_eq!(data.twisted_betti().unwrap(), vec![0, 2, 5, 5, 2]);
        assert_eq!(data.algebroid_betti().unwrap(), vec![1, 4, 7, 6, 2]);
    }

    #[test]
    fn zero_data_shifts_model_cohomology() {
        // with γ = 0 and no structure forms the twisted complex is k+1
        // disjoint shifted copies of the model
        let t = models::torus_ce(2);
        let data = MaurerCartanData::zero(t, 2);
        assert_eq!(data.twisted_betti().unwrap(), vec![0, 3, 6, 3]);
    }

    #[test]
    fn twisted_matches_base_change() {
        use crate::universal::{base_change, CdgaMorphism};

        // γ = 0: both routes must produce structurally identical complexes
        let data = heisenberg_data();
        let h = data.model();
        let images = vec![
            h.zero(),
            h.parse_element("a").unwrap(),
            h.parse_element("b").unwrap(),
            h.parse_element("-c").unwrap(),
        ];
        let psi = CdgaMorphism::new(4, Arc::clone(h), images).unwrap();
        let via_mc = tw(&data);
        let via_bc = base_change(&psi).unwrap();
        assert_eq!(via_mc.id(), via_bc.id());
        for n in 0..=via_mc.top_degree() {
            assert_eq!(via_mc.differential_matrix(n), via_bc.differential_matrix(n));
        }

        // γ ≠ 0: differentials still agree, products differ in the t_0 row
        let t = models::torus_ce(2);
        let a1 = t.parse_element("a1").unwrap();
        let data = MaurerCartanData::new(Arc::clone(&t), 2, a1.clone(), vec![a1.clone()]).unwrap();
        assert!(data.mc_check().unwrap().passed());
        let via_mc = data.build_twisted().unwrap();
        let psi = CdgaMorphism::new(2, Arc::clone(&t), vec![a1.neg(), a1.clone()]).unwrap();
        let via_bc = base_change(&psi).unwrap();
        assert_ne!(via_mc.id(), via_bc.id());
        for n in 0..=via_mc.top_degree() {
            assert_eq!(via_mc.differential_matrix(n), via_bc.differential_matrix(n));
        }
        let t0 = via_mc.t_element(0, &t.parse_element("1").unwrap()).unwrap();
        let t1 = via_mc.t_element(1, &t.parse_element("1").unwrap()).unwrap();
        assert!(via_mc.multiply(&t0, &t1).unwrap().is_zero());
        let s0 = via_bc.t_element(0, &t.parse_element("1").unwrap()).unwrap();
        let s1 = via_bc.t_element(1, &t.parse_element("1").unwrap()).unwrap();
        let p = via_bc.multiply(&s0, &s1).unwrap();
        let expected = via_bc.parse_element("-a1*t1").unwrap();
        assert!(p.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn extension_cocycle_value() {
        let data = heisenberg_data();
        // Σ_{i<2} (4-2i) η_i∧η_{4-i} = 2·a∧(-c) = -2ac
        let c = data.extension_cocycle().unwrap();
        let expected = data.model().parse_element("-2*a*c").unwrap();
        assert!(c.sub(&expected).unwrap().is_zero());
    }

    #[test]
    fn restriction_examples() {
        let data = heisenberg_data();
        let tc = tw(&data);
        let unit = data.model().parse_element("1").unwrap();
        let b = data.model().parse_element("b").unwrap();

        let (first, last) = data
            .restrict(&tc, &tc.t_element(2, &unit).unwrap())
            .unwrap();
        assert!(first.sub(&b).unwrap().is_zero());
        assert!(last.element.is_zero());
        assert_eq!(last.weight, 4);

        let (first, last) = data
            .restrict(&tc, &tc.t_element(0, &unit).unwrap())
            .unwrap();
        assert!(first.is_zero());
        assert!(last.element.is_zero());

        let (first, last) = data
            .restrict(&tc, &tc.t_element(4, &unit).unwrap())
            .unwrap();
        assert!(first.is_zero());
        assert!(last.element.sub(&unit).unwrap().is_zero());
    }

    /// `restrict(dx) = (dβ' + (-1)^{|ω'|+1} c∧ω', dω' + kγ∧ω')` on every
    /// basis element, for data with and without a connection form.
    #[test]
    fn restriction_is_a_chain_map() {
        let torus = models::torus_ce(2);
        let a1 = torus.parse_element("a1").unwrap();
        let datasets = vec![
            heisenberg_data(),
            MaurerCartanData::new(Arc::clone(&torus), 2, a1.clone(), vec![a1]).unwrap(),
        ];
        for data in datasets {
            let tc = tw(&data);
            let model = data.model();
            let c = data.extension_cocycle().unwrap();
            let k_gamma = data.gamma().scale(&Scalar::from_int(data.k() as i64));
            for n in 1..=tc.top_degree() {
                let p = n - 1; // base degree of every block component
                for i in 0..tc.dim(n) {
                    let x = tc.basis_element(n, i);
                    let (lhs_first, lhs_last) =
                        data.restrict(&tc, &tc.differential(&x).unwrap()).unwrap();
                    let (beta, omega) = data.restrict(&tc, &x).unwrap();
                    let mut rhs_first = model.differential(&beta).unwrap();
                    if !c.is_zero() && !omega.element.is_zero() {
                        let mut corr = model.multiply(&c, &omega.element).unwrap();
                        if p % 2 == 0 {
                            corr = corr.neg();
                        }
                        rhs_first = rhs_first.add(&corr).unwrap();
                    }
                    let mut rhs_last = model.differential(&omega.element).unwrap();
                    if !k_gamma.is_zero() && !omega.element.is_zero() {
                        rhs_last = rhs_last
                            .add(&model.multiply(&k_gamma, &omega.element).unwrap())
                            .unwrap();
                    }
                    assert!(
                        lhs_first.sub(&rhs_first).unwrap().is_zero(),
                        "first component, degree {n} index {i}"
                    );
                    assert!(
                        lhs_last.element.sub(&rhs_last).unwrap().is_zero(),
                        "second component, degree {n} index {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn spectral_first_page() {
        let page = heisenberg_data().spectral_e1().unwrap();
        assert_eq!(page.columns.len(), 5);
        for col in &page.columns {
            assert_eq!(col, &vec![1, 2, 2, 1]);
        }
        assert_eq!(page.mass, vec![0, 5, 10, 10, 5]);
        assert_eq!(page.twisted, vec![0, 2, 5, 5, 2]);
        assert!(page.mass_dominates);
        assert!(page.euler_matches);

        // torus with γ = a1, k = 1: the filtration degenerates, masses agree
        let t = models::torus_ce(2);
        let a1 = t.parse_element("a1").unwrap();
        let data = MaurerCartanData::new(t, 1, a1, vec![]).unwrap();
        let page = data.spectral_e1().unwrap();
        assert_eq!(page.columns[0], vec![1, 2, 1]);
        assert_eq!(page.columns[1], vec![0, 0, 0]);
        assert_eq!(page.mass, vec![0, 1, 2, 1]);
        assert_eq!(page.twisted, page.mass);
        assert!(page.mass_dominates && page.euler_matches);
    }

    /// Long-exact-sequence bookkeeping for the restricted Heisenberg
    /// algebroid, checked against the following hand computation.
    ///
    /// The model has Betti numbers (1, 2, 2, 1) with representatives
    /// 1; a, b; ac, bc; abc. At twist weight 4 the connection form is zero,
    /// so the weight-4 side has the same dimensions. The connecting map is
    /// `ω ↦ (-1)^{j+1} c∧ω` with cocycle `c = -2ac`:
    ///
    ///   j = 0: 1 ↦ -(-2ac) = 2ac          — rank 1 into degree 2
    ///   j = 1: a ↦ -2a∧ac = 0, b ↦ -2b∧ac = 2abc — rank 1 into degree 3
    ///   j = 2, 3: target degrees exceed 3  — rank 0
    ///
    /// With rank_into(i) = rank of the map landing in model degree i (from
    /// j = i-2) and rank_out(j) = rank of the map leaving weight-4 degree j:
    ///
    ///   dims[i] = (base[i] - rank_into(i)) + (line[i-1] - rank_out(i-1))
    ///   i = 0: (1 - 0) + 0       = 1
    ///   i = 1: (2 - 0) + (1 - 1) = 2
    ///   i = 2: (2 - 1) + (2 - 1) = 2
    ///   i = 3: (1 - 1) + (2 - 0) = 2
    ///   i = 4: (0 - 0) + (1 - 0) = 1
    #[test]
    fn gysin_dimensions() {
        let report = heisenberg_data().gysin_betti().unwrap();
        assert_eq!(report.base_betti, vec![1, 2, 2, 1]);
        assert_eq!(report.line_betti, vec![1, 2, 2, 1]);
        assert_eq!(report.connecting_ranks, vec![1, 1, 0, 0]);
        assert_eq!(report.dims, vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn cohomology_ring_reduces_classes() {
        let data = heisenberg_data();
        let tc = tw(&data);
        let ring = CohomologyRing::new(&tc).unwrap();
        assert_eq!(ring.betti(), vec![0, 2, 5, 5, 2]);

        // representatives are cocycles and reduce to unit coordinate vectors
        for n in 0..ring.betti().len() {
            for i in 0..ring.betti()[n] {
                let rep = ring.representative(n, i).unwrap();
                assert!(tc.differential(&rep).unwrap().is_zero());
                let coords = ring.reduce(&rep, n).unwrap();
                for (j, c) in coords.iter().enumerate() {
                    assert_eq!(!c.is_zero(), j == i);
                }
            }
        }

        // coboundaries reduce to zero
        let unit = data.model().parse_element("1").unwrap();
        let d = tc.differential(&tc.t_element(3, &unit).unwrap()).unwrap();
        assert!(!d.is_zero());
        assert!(ring.is_trivial(&d, 2).unwrap());
    }

    #[test]
    fn heisenberg_class_products() {
        let data = heisenberg_data();
        let tc = tw(&data);
        let ring = CohomologyRing::new(&tc).unwrap();
        let unit = data.model().parse_element("1").unwrap();
        let t1 = tc.t_element(1, &unit).unwrap();
        let xi = tc.parse_element("a*t4 + 1/2*b*t3 - c*t2").unwrap();
        assert!(tc.differential(&xi).unwrap().is_zero());
        assert!(!ring.is_trivial(&xi, 2).unwrap());

        // [t1]·[ξ] = (1/6)[b c t1]
        let p = tc.multiply(&t1, &xi).unwrap();
        let rhs = tc.parse_element("1/6*b*c*t1").unwrap();
        assert_eq!(ring.reduce(&p, 3).unwrap(), ring.reduce(&rhs, 3).unwrap());
        assert!(!ring.is_trivial(&p, 3).unwrap());

        // [ξ]² = [a b c t4]
        let sq = tc.multiply(&xi, &xi).unwrap();
        let rhs = tc.parse_element("a*b*c*t4").unwrap();
        assert_eq!(ring.reduce(&sq, 4).unwrap(), ring.reduce(&rhs, 4).unwrap());
        assert!(!ring.is_trivial(&sq, 4).unwrap());
    }
}
