use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use super::factor::is_irreducible;
use super::poly::IntPoly;
use crate::error::{domain, Result};

static CACHE: LazyLock<Mutex<HashMap<u64, IntPoly>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The n-th cyclotomic polynomial, `(x^n - 1) / prod_{d | n, d < n} Phi_d`.
pub fn cyclotomic(n: u64) -> Result<IntPoly> {
    if n == 0 {
        return domain("cyclotomic: n must be positive");
    }
    if let Some(p) = CACHE.lock().expect("cache lock").get(&n) {
        return Ok(p.clone());
    }
    let mut num = IntPoly::monomial(1.into(), n as usize);
    num = &num - &IntPoly::from_i64s(&[1]);
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = num
                .exact_div(&cyclotomic(d)?)
                .expect("Phi_d divides x^n - 1");
        }
    }
    CACHE.lock().expect("cache lock").insert(n, num.clone());
    Ok(num)
}

/// Returns `n` when `f` (irreducible, any scaling) is the n-th cyclotomic
/// polynomial, i.e. its roots are primitive n-th roots of unity.
pub fn root_of_unity_order(f: &IntPoly) -> Result<Option<u64>> {
    if !is_irreducible(f) {
        return domain(format!("root_of_unity_order: {f} is not irreducible"));
    }
    Ok(cyclotomic_index(&f.canonical()))
}

/// Like [`root_of_unity_order`] but skips the irreducibility check; `f` must
/// already be canonical.
pub(crate) fn cyclotomic_index(f: &IntPoly) -> Option<u64> {
    let k = f.deg() as u64;
    // cheap necessary conditions: monic with constant term +-1
    if f.lc() != 1.into() {
        return None;
    }
    let c0 = f.coeff(0);
    if c0 != 1.into() && c0 != (-1).into() {
        return None;
    }
    // phi(n) >= sqrt(n/2), so phi(n) = k forces n <= 2k^2
    (1..=2 * k * k + 2)
        .filter(|&n| euler_phi(n) == k)
        .find(|&n| cyclotomic(n).is_ok_and(|c| &c == f))
}
