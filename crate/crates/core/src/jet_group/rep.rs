//! Finitely presented groups mapping into jet groups, and the one-step
//! lifting problem `G_{k,l} -> G_{k+1,l}`.
//!
//! A lift candidate multiplies each generator image by an unknown kernel
//! element. Because the kernel is abelian and the conjugation action
//! factors through linear parts, every relation imposes an affine-linear
//! condition on the unknowns; lifting is a single exact linear solve.

use crate::error::Error;
use crate::exact_linalg::{Matrix, Scalar};
use crate::jet_group::{kernel_transport_matrix, JetMap, KernelElement};

/// One letter of a relation word: a generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

/// A finite group presentation: named generators and relation words.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relations: Vec<Vec<Letter>>,
}

impl GroupPresentation {
    /// Parses relation words given as letter lists, e.g.
    /// `["f", "g", "f^-1", "g^-1"]`.
    pub fn parse(generators: Vec<String>, relations: Vec<Vec<String>>) -> Result<Self, Error> {
        if generators.is_empty() {
            return Err(Error::usage("a presentation needs at least one generator"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if g.is_empty() || !seen.insert(g.clone()) {
                return Err(Error::usage(format!(
                    "bad or duplicate generator name {g:?}"
                )));
            }
        }
        let index = |name: &str| generators.iter().position(|g| g == name);
        let mut words = Vec::new();
        for rel in relations {
            let mut word = Vec::new();
            for letter in rel {
                let (name, inverse) = match letter.strip_suffix("^-1") {
                    Some(base) => (base, true),
                    None => (letter.as_str(), false),
                };
                let gen = index(name).ok_or_else(|| {
                    Error::usage(format!("relation uses unknown generator {name:?}"))
                })?;
                word.push(Letter { gen, inverse });
            }
            if word.is_empty() {
                return Err(Error::usage("empty relation word"));
            }
            words.push(word);
        }
        Ok(GroupPresentation {
            generators,
            relations: words,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<Letter>] {
        &self.relations
    }

    pub fn relation_display(&self, word: &[Letter]) -> String {
        word.iter()
            .map(|l| {
                let mut s = self.generators[l.gen].clone();
                if l.inverse {
                    s.push_str("^-1");
                }
                s
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

/// A homomorphism from a presented group into `G_{k,l}`, given on
/// generators.
#[derive(Clone, Debug)]
pub struct JetRepresentation {
    pres: GroupPresentation,
    l: usize,
    k: usize,
    images: Vec<JetMap>,
}

/// Relation-by-relation verdict of [`JetRepresentation::validate`].
#[derive(Clone, Debug)]
pub struct RepReport {
    pub violations: Vec<(usize, String)>,
}

impl RepReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Result of the one-step lifting problem.
#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lifted {
        images: Vec<JetMap>,
        corrections: Vec<KernelElement>,
        solution_dim: usize,
    },
    Obstructed,
}

impl JetRepresentation {
    pub fn new(
        pres: GroupPresentation,
        l: usize,
        k: usize,
        images: Vec<JetMap>,
    ) -> Result<Self, Error> {
        if images.len() != pres.generators().len() {
            return Err(Error::usage(format!(
                "{} generator images expected, got {}",
                pres.generators().len(),
                images.len()
            )));
        }
        for img in &images {
            if img.l() != l || img.k() != k {
                return Err(Error::usage(format!(
                    "generator image has shape (l={}, k={}), expected (l={l}, k={k})",
                    img.l(),
                    img.k()
                )));
            }
        }
        Ok(JetRepresentation { pres, l, k, images })
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.pres
    }

    pub fn images(&self) -> &[JetMap] {
        &self.images
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn letter_value(&self, letter: Letter) -> Result<JetMap, Error> {
        let img = &self.images[letter.gen];
        if letter.inverse {
            img.inverse()
        } else {
            Ok(img.clone())
        }
    }

    /// Evaluates every relation word; a violation records the word and the
    /// jet it evaluates to.
    pub fn validate(&self) -> Result<RepReport, Error> {
        let mut violations = Vec::new();
        for (idx, word) in self.pres.relations().iter().enumerate() {
            let mut acc = JetMap::identity(self.l, self.k);
            for &letter in word {
                acc = acc.compose(&self.letter_value(letter)?)?;
            }
            if !acc.is_identity() {
                violations.push((idx, acc.display().join(", ")));
            }
        }
        Ok(RepReport { violations })
    }

    /// Tries to lift to `G_{k+1,l}` by correcting each zero-padded
    /// generator image with a kernel element.
    ///
    /// Relation words are evaluated symbolically in the unknown
    /// corrections: a state `(J, E)` tracks the `G_{k+1}` jet of the
    /// zero-padded word prefix together with the matrix of its accumulated
    /// kernel term, using
    /// `(J1, E1)·(J2, E2) = (J1∘J2, T(A2)·E1 + E2)` where `A2` is the
    /// linear part of `J2` and `T` is the conjugation action on the kernel.
    pub fn lift(&self) -> Result<LiftOutcome, Error> {
        let report = self.validate()?;
        if !report.ok() {
            return Err(Error::Validation(format!(
                "not a representation at order {}: relation {} evaluates to {}",
                self.k, report.violations[0].0, report.violations[0].1
            )));
        }
        let n = self.images.len();
        let m = KernelElement::space_dim(self.l, self.k);
        let unknowns = n * m;

        struct State {
            jet: JetMap,
            // m x unknowns matrix of the accumulated kernel correction
            coeffs: Matrix,
        }

        let id_state = |l: usize, k: usize| State {
            jet: JetMap::identity(l, k + 1),
            coeffs: Matrix::new(m, unknowns),
        };

        let mul = |a: State, b: &State| -> Result<State, Error> {
            let jet = a.jet.compose(&b.jet)?;
            let t = kernel_transport_matrix(&b.jet.linear_matrix(), self.k)?;
            let coeffs = t.mul(&a.coeffs)?.add(&b.coeffs)?;
            Ok(State { jet, coeffs })
        };

        let inv = |s: &State| -> Result<State, Error> {
            let jet = s.jet.inverse()?;
            let a_inv = jet.linear_matrix();
            let t = kernel_transport_matrix(&a_inv, self.k)?;
            Ok(State {
                jet,
                coeffs: t.mul(&s.coeffs)?.scale(&-Scalar::one()),
            })
        };

        // generator states: padded image, unit coefficient block
        let mut gen_states = Vec::with_capacity(n);
        for (g, img) in self.images.iter().enumerate() {
            let mut coeffs = Matrix::new(m, unknowns);
            for i in 0..m {
                coeffs.set(i, g * m + i, Scalar::one());
            }
            gen_states.push(State {
                jet: img.zero_pad(self.k + 1)?,
                coeffs,
            });
        }

        // one affine condition per relation: E·b = -(defect of padded word)
        let mut rows = Matrix::new(0, unknowns);
        let mut rhs: Vec<Scalar> = Vec::new();
        for word in self.pres.relations() {
            let mut acc = id_state(self.l, self.k);
            for &letter in word {
                let st = &gen_states[letter.gen];
                let factor = if letter.inverse {
                    inv(st)?
                } else {
                    State {
                        jet: st.jet.clone(),
                        coeffs: st.coeffs.clone(),
                    }
                };
                acc = mul(acc, &factor)?;
            }
            let defect = KernelElement::from_jet(&acc.jet, self.k)?;
            let defect_coords = defect.to_coords();
            let base = rows.rows();
            let mut grown = Matrix::new(base + m, unknowns);
            for ((i, j), v) in rows.iter() {
                grown.set(i, j, v.clone());
            }
            for ((i, j), v) in acc.coeffs.iter() {
                grown.set(base + i, j, v.clone());
            }
            rows = grown;
            rhs.extend(defect_coords.into_iter().map(|c| -c));
        }

        let sol = match rows.solve_affine(&rhs)? {
            Some(s) => s,
            None => return Ok(LiftOutcome::Obstructed),
        };
        let mut corrections = Vec::with_capacity(n);
        let mut lifted = Vec::with_capacity(n);
        for g in 0..n {
            let ke =
                KernelElement::from_coords(self.l, self.k, &sol.particular[g * m..(g + 1) * m])?;
            lifted.push(self.images[g].zero_pad(self.k + 1)?.compose(&ke.embed())?);
            corrections.push(ke);
        }
        let lifted_rep = JetRepresentation::new(self.pres.clone(), self.l, self.k + 1, lifted)?;
        let check = lifted_rep.validate()?;
        if !check.ok() {
            return Err(Error::internal(
                "lift solver produced images violating a relation".to_string(),
            ));
        }
        Ok(LiftOutcome::Lifted {
            images: lifted_rep.images,
            corrections,
            solution_dim: sol.nullspace.len(),
        })
    }
}
