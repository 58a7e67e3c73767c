//! Scaling of weighted coefficient sups with the annulus modulus over s in {0.99, 0.999}.

use hybridisc::annulus_map;
use hybridisc::diagnostics::{decay_profile, hybrid_split_w21, single_basis_coeffs, CutoffSpec};

/// Ratio of `scale(T) * sup` between the two geometries, which must stay within a factor 3.
fn within_factor_three(values: [f64; 2]) -> bool {
    let r = values[0] / values[1];
    (1.0 / 3.0..=3.0).contains(&r)
}

fn sups(s: f64) -> (f64, [f64; 3], [f64; 3], [f64; 3]) {
    let map = annulus_map(1.0, s).unwrap();
    let split =
        hybrid_split_w21(&map, Some(&CutoffSpec::for_modulus(map.t).unwrap()), 4096).unwrap();
    let get = |c: &[_]| {
        let p = decay_profile(c, map.t, 2).unwrap();
        [p.sups[0], p.sups[1], p.sups[2]]
    };
    (
        map.t,
        get(&split.zeta_tail()),
        get(&split.laurent_tail()),
        get(&single_basis_coeffs(&map, 4096)),
    )
}

#[test]
fn plain_annulus_series_scales_as_predicted() {
    let (t0, _, _, a) = sups(0.99);
    let (t1, _, _, b) = sups(0.999);
    assert!(
        within_factor_three([a[1], b[1]]),
        "k = 1: {} vs {}",
        a[1],
        b[1]
    );
    assert!(
        within_factor_three([t0 * a[2], t1 * b[2]]),
        "k = 2: {} vs {}",
        a[2],
        b[2]
    );
}

#[test]
fn cut_off_split_first_moment_scales_as_inverse_root() {
    let (t0, z0, l0, _) = sups(0.99);
    let (t1, z1, l1, _) = sups(0.999);
    assert!(
        within_factor_three([t0.sqrt() * z0[1], t1.sqrt() * z1[1]]),
        "{z0:?} {z1:?}"
    );
    assert!(
        within_factor_three([t0.sqrt() * l0[1], t1.sqrt() * l1[1]]),
        "{l0:?} {l1:?}"
    );
}
