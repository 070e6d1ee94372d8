//! The printed closed expressions for Q_2 and Q_3 in terms of partial derivatives of
//! A(1/2; z) at the origin. These are assembled independently of the residue engine
//! and serve as its cross-check.

use super::jet::{a_jet, a_partial};
use crate::error::Result;
use crate::num::Real;
use crate::series::{Coeff, MultiSeries, XPoly};

fn xpoly<T: Real>(lowest_first: &[i64]) -> XPoly<T> {
    XPoly::from_coeffs(lowest_first.iter().map(|&c| T::lit(c as f64)).collect())
}

/// sum of c * A_{indices} over a list like [(2, "333"), (-3, "233")].
fn combo<T: Real>(jet: &MultiSeries<T>, terms: &[(i64, &str)]) -> Result<T> {
    let mut acc = T::zero();
    for &(c, idx) in terms {
        let indices: Vec<usize> = idx.bytes().map(|b| (b - b'0') as usize).collect();
        acc += T::lit(c as f64) * a_partial(jet, &indices)?;
    }
    Ok(acc)
}

fn add_scaled<T: Real>(acc: &mut XPoly<T>, p: XPoly<T>, s: T) {
    acc.add_assign(&p.scale(s));
}

/// Q_2(x) from the printed expression, with log q restored on the A_12 term
/// (the bracket is homogeneous: each derivative order trades one power of log q).
pub fn q2_explicit_from_jet<T: Real>(jet: &MultiSeries<T>, q: u64) -> Result<XPoly<T>> {
    let l = T::from_u64(q).expect("q representable").ln();
    let a = *jet.constant_term();
    let mut acc = XPoly::zero();
    add_scaled(&mut acc, xpoly(&[6, 11, 6, 1]), a * l.powi(3));
    add_scaled(&mut acc, xpoly(&[11, 12, 3]), l * l * combo(jet, &[(1, "1"), (1, "2")])?);
    add_scaled(&mut acc, xpoly(&[24, 12]), l * combo(jet, &[(1, "12")])?);
    let third = combo(jet, &[(1, "222"), (-3, "122"), (-3, "112"), (1, "111")])?;
    add_scaled(&mut acc, xpoly(&[1]), T::lit(-2.0) * third);
    Ok(acc.scale((T::lit(24.0) * l.powi(3)).recip()))
}

/// Q_3(x) from the printed expression, taken literally. It disagrees with the residue in
/// two places; see [`q3_explicit_from_jet`].
pub fn q3_printed_from_jet<T: Real>(jet: &MultiSeries<T>, q: u64) -> Result<XPoly<T>> {
    q3_assemble(jet, q, false)
}

/// Q_3(x) from the printed expression with two repairs: the third-derivative bracket
/// enters with a minus sign, and the six A_{iiiij} terms all carry -5.
pub fn q3_explicit_from_jet<T: Real>(jet: &MultiSeries<T>, q: u64) -> Result<XPoly<T>> {
    q3_assemble(jet, q, true)
}

fn q3_assemble<T: Real>(jet: &MultiSeries<T>, q: u64, repaired: bool) -> Result<XPoly<T>> {
    let l = T::from_u64(q).expect("q representable").ln();
    let a = *jet.constant_term();
    let mut acc = XPoly::zero();

    // 3 (3+x)^2 (x^4 + 12x^3 + 49x^2 + 78x + 40)
    let sq = xpoly::<T>(&[9, 6, 1]);
    let quartic = xpoly::<T>(&[40, 78, 49, 12, 1]);
    add_scaled(&mut acc, sq.mul(&quartic), T::lit(3.0) * a * l.powi(6));

    add_scaled(
        &mut acc,
        xpoly(&[471, 949, 720, 260, 45, 3]),
        T::lit(4.0) * l.powi(5) * combo(jet, &[(1, "1"), (1, "2"), (1, "3")])?,
    );
    add_scaled(
        &mut acc,
        xpoly(&[949, 1440, 780, 180, 15]),
        T::lit(4.0) * l.powi(4) * combo(jet, &[(1, "23"), (1, "13"), (1, "12")])?,
    );
    let third = combo(
        jet,
        &[
            (2, "333"),
            (-3, "233"),
            (-3, "223"),
            (2, "222"),
            (-3, "133"),
            (-36, "123"),
            (-3, "122"),
            (-3, "113"),
            (-3, "112"),
            (2, "111"),
        ],
    )?;
    let third_sign = if repaired { -10.0 } else { 10.0 };
    add_scaled(&mut acc, xpoly(&[24, 26, 9, 1]), T::lit(third_sign) * l.powi(3) * third);
    let fourth = combo(
        jet,
        &[
            (1, "2333"),
            (1, "2223"),
            (1, "1333"),
            (-6, "1233"),
            (-6, "1223"),
            (1, "1222"),
            (-6, "1123"),
            (1, "1113"),
            (1, "1112"),
        ],
    )?;
    add_scaled(&mut acc, xpoly(&[26, 18, 3]), T::lit(-20.0) * l * l * fourth);
    let (c13333, c12222, c11112) = if repaired { (-5, -5, -5) } else { (5, 5, -1) };
    let fifth = combo(
        jet,
        &[
            (2, "33333"),
            (-5, "23333"),
            (-10, "22333"),
            (-10, "22233"),
            (-5, "22223"),
            (2, "22222"),
            (c13333, "13333"),
            (60, "12233"),
            (c12222, "12222"),
            (-10, "11333"),
            (60, "11233"),
            (60, "11223"),
            (-10, "11222"),
            (-10, "11133"),
            (-10, "11122"),
            (-5, "11113"),
            (c11112, "11112"),
            (2, "11111"),
        ],
    )?;
    add_scaled(&mut acc, xpoly(&[3, 1]), T::lit(6.0) * l * fifth);
    let sixth = combo(
        jet,
        &[
            (3, "233333"),
            (-20, "222333"),
            (3, "222223"),
            (3, "133333"),
            (-30, "123333"),
            (30, "122333"),
            (30, "122233"),
            (-30, "122223"),
            (3, "122222"),
            (30, "112333"),
            (30, "112223"),
            (-20, "111333"),
            (30, "111233"),
            (30, "111223"),
            (-20, "111222"),
            (-30, "111123"),
            (3, "111113"),
            (3, "111112"),
        ],
    )?;
    add_scaled(&mut acc, xpoly(&[1]), T::lit(4.0) * sixth);
    Ok(acc.scale((T::lit(8640.0) * l.powi(6)).recip()))
}

/// Q_2 from the printed expression with derivatives taken from A_jet.
pub fn q2_explicit<T: Real>(q: u64, max_degree: usize) -> Result<XPoly<T>> {
    let jet = a_jet::<T>(2, q, max_degree, 3)?;
    q2_explicit_from_jet(&jet, q)
}

/// Q_3 from the printed expression with derivatives taken from A_jet.
pub fn q3_explicit<T: Real>(q: u64, max_degree: usize) -> Result<XPoly<T>> {
    let jet = a_jet::<T>(3, q, max_degree, 5)?;
    q3_explicit_from_jet(&jet, q)
}
