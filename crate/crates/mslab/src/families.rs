//! The counterexample families, assembled from the base descriptors by
//! connected sums and powers:
//!
//!   f_g      = psi0 # psi_g          (orientation-changing, orientable S_g)
//!   f~_q     = psi0 # psi~_q         (non-orientable N_q)
//!   xi_g     = xi0  # psi_g^2        (heteroclinic, orientable S_g)
//!   xi~_q    = xi0  # psi~_q^2       (heteroclinic, non-orientable N_q)
//!
//! plus the gradient-like building blocks psi_g and psi~_q themselves.

use crate::descriptor::sums::{connected_sum, power, rename, Interleaving, SumError};
use crate::descriptor::{fixtures, Descriptor};

fn sum_along(
    d1: &Descriptor,
    sink_name: &str,
    d2: &Descriptor,
    source_name: &str,
    orientable: bool,
) -> Result<Descriptor, SumError> {
    let sink = d1
        .orbit_by_name(sink_name)
        .ok_or_else(|| SumError::NotASink(sink_name.to_string()))?;
    let source = d2
        .orbit_by_name(source_name)
        .ok_or_else(|| SumError::NotASource(source_name.to_string()))?;
    connected_sum(
        d1,
        sink,
        d2,
        source,
        Interleaving::Auto {
            prefer_orientable: Some(orientable),
        },
    )
}

/// psi_g on the orientable surface of genus g (g >= 1): iterated sums of
/// psi1 along its sink and source. Saddle orbits are named s1..sg.
pub fn psi_g(g: usize) -> Result<Descriptor, SumError> {
    assert!(g >= 1, "psi_g needs g >= 1");
    let copy = |k: usize| {
        let mut d = fixtures::psi1();
        rename(&mut d, &[("s", &format!("s{k}"))]);
        d
    };
    let mut d = copy(1);
    for k in 2..=g {
        d = sum_along(&d, "w", &copy(k), "a", true)?;
    }
    Ok(d)
}

/// psi~_q on the non-orientable surface of genus q (q >= 1): iterated sums
/// of psi~_1. Saddles are named st1..stq.
pub fn psitilde_q(q: usize) -> Result<Descriptor, SumError> {
    assert!(q >= 1, "psitilde_q needs q >= 1");
    let copy = |k: usize| {
        let mut d = fixtures::psitilde1();
        rename(&mut d, &[("st", &format!("st{k}"))]);
        d
    };
    let mut d = copy(1);
    for k in 2..=q {
        d = sum_along(&d, "wt", &copy(k), "at", false)?;
    }
    Ok(d)
}

/// f_g: the orientation-changing gradient-like family on orientable
/// surfaces; f_0 = psi0, f_g = psi0 # psi_g along the sink w0 and the
/// source a.
pub fn f_g(g: usize) -> Result<Descriptor, SumError> {
    if g == 0 {
        return Ok(fixtures::psi0());
    }
    sum_along(&fixtures::psi0(), "w0", &psi_g(g)?, "a", true)
}

/// f~_q: the gradient-like family on non-orientable surfaces;
/// f~_q = psi0 # psi~_q along w0 and at.
pub fn ftilde_q(q: usize) -> Result<Descriptor, SumError> {
    assert!(q >= 1, "ftilde_q needs q >= 1");
    sum_along(&fixtures::psi0(), "w0", &psitilde_q(q)?, "at", false)
}

/// xi_g: the heteroclinic family on orientable surfaces;
/// xi_0 = xi0, xi_g = xi0 # psi_g^2 along the sink w0 and the source a.
pub fn xi_g(g: usize) -> Result<Descriptor, SumError> {
    if g == 0 {
        return Ok(fixtures::xi0());
    }
    let squared = power(&psi_g(g)?, 2)?;
    sum_along(&fixtures::xi0(), "w0", &squared, "a", true)
}

/// xi~_q: the heteroclinic family on non-orientable surfaces;
/// xi~_q = xi0 # psi~_q^2 along w0 and at.
pub fn xitilde_q(q: usize) -> Result<Descriptor, SumError> {
    assert!(q >= 1, "xitilde_q needs q >= 1");
    let squared = power(&psitilde_q(q)?, 2)?;
    sum_along(&fixtures::xi0(), "w0", &squared, "at", false)
}
