//! Resultant of three ternary forms of equal degree via Sylvester's
//! determinantal formula.
//!
//! For `d >= 2` the matrix `Φ` has `3·C(d,2)` rows `x^u f_i` (`u ∈ E_{d-2}`)
//! followed by `C(d+1,2)` rows `det[F_ij^(u)]` (`u ∈ E_{d-1}`), with columns
//! indexed by `E_{2d-2}`. Both blocks use the canonical exponent order. The
//! overall sign is normalized once per degree so that `R_d(x^d, y^d, z^d) = 1`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::algebra::{exponents, ExponentVector, Form, Ring, TernaryForm};
use crate::error::{Error, Result};
use crate::linalg::{fraction_free_det, fraction_free_det_i128, Matrix};

/// Splits `f` (degree `d`) as `Σ_j x_j^{u_j+1} F_j` for `u ∈ E_{d-1}`:
/// `F_0` takes every term divisible by `x0^{u0+1}`, `F_1` every remaining
/// term divisible by `x1^{u1+1}`, and `F_2` the rest.
pub fn f_decomposition<R: Ring>(f: &Form<R>, u: &ExponentVector) -> Result<[Form<R>; 3]> {
    let d = f.degree();
    if u.degree() + 1 != d {
        return Err(Error::DegreeMismatch(format!(
            "decomposition index {u} needs a form of degree {}, got {d}",
            u.degree() + 1
        )));
    }
    let like = &f.coeffs()[0];
    let mut parts: [Form<R>; 3] = [0, 1, 2].map(|j| Form::zero(d - 1 - u.0[j], like));
    let mut parts_coeffs: Vec<Vec<R>> = parts.iter().map(|p| p.coeffs().to_vec()).collect();
    for (w, c) in exponents(d).iter().zip(f.coeffs()) {
        if c.is_ring_zero() {
            continue;
        }
        let j = (0..3)
            .find(|&j| w.0[j] > u.0[j])
            .expect("some exponent exceeds u since deg w > deg u");
        let mut rest = *w;
        rest.0[j] -= u.0[j] + 1;
        parts_coeffs[j][rest.index()] = c.clone();
    }
    for (j, coeffs) in parts_coeffs.into_iter().enumerate() {
        parts[j] = Form::new(d - 1 - u.0[j], coeffs)?;
    }
    Ok(parts)
}

/// The Sylvester matrix `Φ_{f0,f1,f2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMatrix<R> {
    pub degree: u32,
    pub entries: Matrix<R>,
    /// Number of leading rows coming from `T` (`3·C(d,2)`); the remaining
    /// `C(d+1,2)` rows come from `D`.
    pub t_rows: usize,
}

impl<R> PhiMatrix<R> {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn d_rows(&self) -> std::ops::Range<usize> {
        self.t_rows..self.entries.len()
    }
}

fn det3_forms<R: Ring>(m: &[[Form<R>; 3]; 3]) -> Form<R> {
    let mut acc: Option<Form<R>> = None;
    for (perm, sign) in [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
        ([1, 0, 2], -1),
    ] {
        let t = m[0][perm[0]].mul(&m[1][perm[1]]).mul(&m[2][perm[2]]);
        let t = if sign < 0 { t.neg() } else { t };
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t).expect("equal degrees"),
        });
    }
    acc.unwrap()
}

pub fn build_phi_matrix<R: Ring>(forms: [&Form<R>; 3]) -> Result<PhiMatrix<R>> {
    let d = forms[0].degree();
    if forms.iter().any(|f| f.degree() != d) {
        return Err(Error::DegreeMismatch(format!(
            "resultant needs equal degrees, got {}, {}, {}",
            forms[0].degree(),
            forms[1].degree(),
            forms[2].degree()
        )));
    }
    if d < 2 {
        return Err(Error::InvalidDegree(d as i64));
    }
    let mut rows: Matrix<R> = Vec::new();
    for u in exponents(d - 2) {
        for f in forms {
            rows.push(f.shift(&u).into_coeffs());
        }
    }
    let t_rows = rows.len();
    for u in exponents(d - 1) {
        let parts: Vec<[Form<R>; 3]> = forms
            .iter()
            .map(|f| f_decomposition(f, &u))
            .collect::<Result<_>>()?;
        let block = [parts[0].clone(), parts[1].clone(), parts[2].clone()];
        rows.push(det3_forms(&block).into_coeffs());
    }
    debug_assert!(rows.iter().all(|r| r.len() == rows.len()));
    Ok(PhiMatrix {
        degree: d,
        entries: rows,
        t_rows,
    })
}

/// `det` of the 3×3 coefficient matrix of three linear forms.
pub fn resultant_linear<R: Ring>(forms: [&Form<R>; 3]) -> Result<R> {
    if forms.iter().any(|f| f.degree() != 1) {
        return Err(Error::DegreeMismatch("resultant_linear needs linear forms".into()));
    }
    let m: Vec<&[R]> = forms.iter().map(|f| f.coeffs()).collect();
    let t = |a: usize, b: usize, c: usize| m[0][a].mul(&m[1][b]).mul(&m[2][c]);
    Ok(t(0, 1, 2)
        .add(&t(1, 2, 0))
        .add(&t(2, 0, 1))
        .sub(&t(0, 2, 1))
        .sub(&t(2, 1, 0))
        .sub(&t(1, 0, 2)))
}

const SIGN_CACHE: usize = 24;
static SIGNS: [OnceLock<i8>; SIGN_CACHE] = [const { OnceLock::new() }; SIGN_CACHE];

fn compute_sign(d: u32) -> i8 {
    let forms: Vec<TernaryForm> = (0..3)
        .map(|j| {
            let mut u = ExponentVector::new(0, 0, 0);
            u.0[j] = d;
            Form::monomial(u, BigInt::one())
        })
        .collect();
    let phi = build_phi_matrix([&forms[0], &forms[1], &forms[2]]).expect("d >= 2");
    let det = fraction_free_det(&phi.entries);
    if det.is_one() {
        1
    } else if det == -BigInt::one() {
        -1
    } else {
        panic!("det Φ(x^{d}, y^{d}, z^{d}) = {det}, expected ±1")
    }
}

/// `σ_d ∈ {±1}` with `R_d = σ_d · det Φ` under our row and column orders.
pub fn phi_sign(d: u32) -> i8 {
    assert!(d >= 2);
    match SIGNS.get(d as usize) {
        Some(cell) => *cell.get_or_init(|| compute_sign(d)),
        None => compute_sign(d),
    }
}

/// Exact `R_d(f0, f1, f2)`.
pub fn resultant(f0: &TernaryForm, f1: &TernaryForm, f2: &TernaryForm) -> Result<BigInt> {
    let d = f0.degree();
    if f1.degree() != d || f2.degree() != d {
        return Err(Error::DegreeMismatch(format!(
            "resultant needs equal degrees, got {}, {}, {}",
            d,
            f1.degree(),
            f2.degree()
        )));
    }
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if d == 1 {
        return resultant_linear([f0, f1, f2]);
    }
    let small = [f0, f1, f2].iter().all(|f| f.norm() <= BigInt::from(1 << 15));
    let det = if small {
        let g: Vec<Form<i64>> = [f0, f1, f2]
            .iter()
            .map(|f| f.map(|c| c.to_i64().unwrap()))
            .collect();
        let phi = build_phi_matrix([&g[0], &g[1], &g[2]])?;
        match fraction_free_det_i128(&phi.entries) {
            Some(v) => BigInt::from(v),
            None => fraction_free_det(&to_big(&phi.entries)),
        }
    } else {
        let phi = build_phi_matrix([f0, f1, f2])?;
        fraction_free_det(&phi.entries)
    };
    Ok(det * phi_sign(d))
}

pub(crate) fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::monomial_count;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn form(d: u32, s: &str) -> TernaryForm {
        TernaryForm::parse(d, s).unwrap()
    }

    fn random_form(rng: &mut ChaCha8Rng, d: u32, bound: i64) -> TernaryForm {
        let c: Vec<i64> = (0..monomial_count(d)).map(|_| rng.gen_range(-bound..=bound)).collect();
        TernaryForm::from_i64(d, &c).unwrap()
    }

    fn check_reconstruction(f: &TernaryForm, u: &ExponentVector) {
        let parts = f_decomposition(f, u).unwrap();
        let mut sum = Form::zero(f.degree(), &BigInt::zero());
        for (j, p) in parts.iter().enumerate() {
            assert_eq!(p.degree(), f.degree() - 1 - u.0[j]);
            let mut e = ExponentVector::new(0, 0, 0);
            e.0[j] = u.0[j] + 1;
            sum = sum.add(&p.shift(&e)).unwrap();
        }
        assert_eq!(&sum, f);
    }

    #[test]
    fn decomposition_examples() {
        let f = form(2, "x^2 + xy + y^2");
        let [a, b, c] = f_decomposition(&f, &ExponentVector::new(1, 0, 0)).unwrap();
        assert_eq!(a, form(0, "1"));
        assert_eq!(b, form(1, "x + y"));
        assert_eq!(c, form(1, "0"));
        for d in 2..5 {
            let u = ExponentVector::new(d - 1, 0, 0);
            let mut e = ExponentVector::new(0, 0, 0);
            e.0[0] = d;
            let xd = Form::monomial(e, BigInt::one());
            let parts = f_decomposition(&xd, &u).unwrap();
            assert!(parts[0].coeffs()[0].is_one());
            assert!(parts[1].is_zero() && parts[2].is_zero());
            e.0 = [0, 0, d];
            let zd = Form::monomial(e, BigInt::one());
            let parts = f_decomposition(&zd, &u).unwrap();
            assert!(parts[0].is_zero() && parts[1].is_zero());
            assert_eq!(parts[2], Form::monomial(ExponentVector::new(0, 0, d - 1), BigInt::one()));
        }
        assert!(f_decomposition(&f, &ExponentVector::new(2, 0, 0)).is_err());
    }

    #[test]
    fn decomposition_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            for _ in 0..20 {
                let f = random_form(&mut rng, d, 9);
                for u in exponents(d - 1) {
                    check_reconstruction(&f, &u);
                }
            }
        }
    }

    #[test]
    fn dimension_identity() {
        for d in 2..=6u32 {
            let f = Form::monomial(ExponentVector::new(d, 0, 0), BigInt::one());
            let phi = build_phi_matrix([&f, &f, &f]).unwrap();
            let n = (2 * d * d - d) as usize;
            assert_eq!(phi.size(), n);
            assert_eq!(n, monomial_count(2 * d - 2));
            assert_eq!(phi.t_rows, 3 * monomial_count(d - 2));
            assert!(phi.entries.iter().all(|r| r.len() == n));
        }
    }

    #[test]
    fn normalization() {
        for d in 1..=4u32 {
            let f: Vec<TernaryForm> = (0..3)
                .map(|j| {
                    let mut u = ExponentVector::new(0, 0, 0);
                    u.0[j] = d;
                    Form::monomial(u, BigInt::one())
                })
                .collect();
            assert_eq!(resultant(&f[0], &f[1], &f[2]).unwrap(), BigInt::one(), "d={d}");
        }
    }

    #[test]
    fn linear_examples() {
        let (x, y, z) = (form(1, "x"), form(1, "y"), form(1, "z"));
        assert_eq!(resultant(&x, &y, &z).unwrap(), BigInt::from(1));
        assert_eq!(resultant(&y, &x, &z).unwrap(), BigInt::from(-1));
        assert_eq!(resultant(&form(1, "x + y"), &y, &z).unwrap(), BigInt::from(1));
    }

    #[test]
    fn weierstrass_partials() {
        // y^2 z - x^3 + z^3: Δ3 = -432 a6^2 = -432 with a6 = -1, so R2 = -27 Δ3
        let f = form(3, "y^2z - x^3 + z^3");
        let g = f.gradient().unwrap();
        assert_eq!(resultant(&g[0], &g[1], &g[2]).unwrap(), BigInt::from(11664));
    }

    #[test]
    fn unequal_degrees() {
        assert!(matches!(
            resultant(&form(2, "x^2"), &form(2, "y^2"), &form(3, "z^3")),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn homogeneity_in_each_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=3u32 {
            for _ in 0..10 {
                let f: Vec<TernaryForm> = (0..3).map(|_| random_form(&mut rng, d, 5)).collect();
                let r = resultant(&f[0], &f[1], &f[2]).unwrap();
                for c in [2i64, -3] {
                    let scaled = f[0].scale(&BigInt::from(c));
                    let rc = resultant(&scaled, &f[1], &f[2]).unwrap();
                    assert_eq!(rc, &r * BigInt::from(c).pow(d * d));
                }
            }
        }
    }

    #[test]
    fn common_root_forces_zero() {
        // every f_i vanishes at (0:0:1) when its z^d coefficient is zero
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 2..=3u32 {
            for _ in 0..100 {
                let f: Vec<TernaryForm> = (0..3)
                    .map(|_| {
                        let mut c: Vec<i64> =
                            (0..monomial_count(d)).map(|_| rng.gen_range(-9..=9)).collect();
                        *c.last_mut().unwrap() = 0;
                        TernaryForm::from_i64(d, &c).unwrap()
                    })
                    .collect();
                // move the common root to a random point via a unimodular map
                let m = [[1, rng.gen_range(-2..=2), 0], [0, 1, 0], [rng.gen_range(-2..=2), 0, 1]];
                let g: Vec<TernaryForm> = f.iter().map(|h| h.apply_linear(&m)).collect();
                assert!(Zero::is_zero(&resultant(&g[0], &g[1], &g[2]).unwrap()));
            }
        }
    }

    fn has_common_root_mod_p(f: &[TernaryForm], p: u64) -> bool {
        let pts = (0..p).flat_map(|y| (0..p).map(move |z| [1, y, z]))
            .chain((0..p).map(|z| [0, 1, z]))
            .chain(std::iter::once([0, 0, 1]));
        pts.into_iter().any(|pt| f.iter().all(|h| h.evaluate_mod_p(pt, p).unwrap() == 0))
    }

    #[test]
    fn nonvanishing_consistent_with_mod_p() {
        // no common root over F_p (even after a field extension is not
        // checked) is necessary for R mod p != 0; conversely R ≡ 0 mod p is
        // only possible when the reductions share a root over the closure.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in 2..=3u32 {
            for _ in 0..100 {
                let f: Vec<TernaryForm> = (0..3).map(|_| random_form(&mut rng, d, 9)).collect();
                let r = resultant(&f[0], &f[1], &f[2]).unwrap();
                for p in [5u64, 7, 11] {
                    if has_common_root_mod_p(&f, p) {
                        assert!(Zero::is_zero(&(&r % BigInt::from(p))), "d={d} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn small_and_big_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 2..=4u32 {
            for _ in 0..5 {
                let f: Vec<TernaryForm> = (0..3).map(|_| random_form(&mut rng, d, 9)).collect();
                let phi = build_phi_matrix([&f[0], &f[1], &f[2]]).unwrap();
                let expect = fraction_free_det(&phi.entries) * phi_sign(d);
                assert_eq!(resultant(&f[0], &f[1], &f[2]).unwrap(), expect);
            }
        }
    }
}
