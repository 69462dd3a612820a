//! Modified Bessel functions of complex argument and the ordinary J_n of
//! real argument used by the radial solution formula.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_TOL: f64 = 1e-16;
const SERIES_CAP: usize = 60;

fn check_cut(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    Ok(())
}

/// Ascending series for (K0, K1).
fn k01_series(z: Complex64) -> (Complex64, Complex64) {
    let y = z * z * 0.25;
    let lg = (z * 0.5).ln();
    // I0, I1/(z/2), and the digamma sums
    let mut term = Complex64::new(1.0, 0.0); // y^k / (k!)^2
    let mut i0 = term;
    let mut i1h = term; // sum y^k/(k!(k+1)!)
    let mut k0s = Complex64::new(0.0, 0.0);
    let mut k1s = Complex64::new(-2.0 * EULER_GAMMA + 1.0, 0.0); // psi(1)+psi(2)
    let mut hk = 0.0; // harmonic number H_k
    let mut term1 = term; // y^k/(k!(k+1)!)
    for k in 1..SERIES_CAP {
        let kf = k as f64;
        term *= y / (kf * kf);
        term1 *= y / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        i0 += term;
        i1h += term1;
        k0s += term * hk;
        // psi(k+1)+psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        k1s += term1 * (-2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (kf + 1.0));
        if term.norm() < SERIES_TOL * i0.norm() && term1.norm() < SERIES_TOL * i1h.norm() {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + k0s;
    let k1 = z.inv() + lg * (z * 0.5) * i1h - z * 0.25 * k1s;
    (k0, k1)
}

/// Steed/Temme continued fraction for (K0, K1), valid for Re z > 0, |z| moderate to large.
fn k01_cf2(x: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + x) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..20000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -c * a / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn use_series(z: Complex64) -> bool {
    let r = z.norm();
    r <= 2.0 || (r <= 8.0 && z.re < 0.5 * r)
}

/// K1(z) on the principal branch, cut along the negative real axis.
pub fn bessel_k1_complex(z: Complex64) -> Result<Complex64> {
    check_cut(z)?;
    Ok(k01_unchecked(z).1)
}

/// K0(z) on the principal branch.
pub fn bessel_k0_complex(z: Complex64) -> Result<Complex64> {
    check_cut(z)?;
    Ok(k01_unchecked(z).0)
}

fn k01_unchecked(z: Complex64) -> (Complex64, Complex64) {
    // the continued fraction needs Re z > 0; callers pass principal roots
    if z.re <= 0.0 || use_series(z) {
        k01_series(z)
    } else {
        k01_cf2(z)
    }
}

/// Real I0, I1 by ascending series.
pub fn bessel_i01(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut i0 = t0;
    let mut i1 = t1;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        i0 += t0;
        i1 += t1;
        if t0 < SERIES_TOL * i0 {
            break;
        }
    }
    (i0, i1)
}

/// J0(z), J1(z)/z and J2(z)/z^2 for real z >= 0.
pub fn bessel_j_scaled(z: f64) -> (f64, f64, f64) {
    let z = z.abs();
    if z <= 12.0 {
        let y = -0.25 * z * z;
        let mut t0 = 1.0;
        let mut t1 = 0.5;
        let mut t2 = 0.125;
        let (mut j0, mut j1c, mut j2c) = (t0, t1, t2);
        for k in 1..80 {
            let kf = k as f64;
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
            t2 *= y / (kf * (kf + 2.0));
            j0 += t0;
            j1c += t1;
            j2c += t2;
            if t0.abs() < 1e-17 && t2.abs() < 1e-18 {
                break;
            }
        }
        (j0, j1c, j2c)
    } else {
        let j0 = hankel_asymptotic(0.0, z);
        let j1 = hankel_asymptotic(1.0, z);
        let j2 = 2.0 * j1 / z - j0;
        (j0, j1 / z, j2 / (z * z))
    }
}

/// Large-argument expansion of J_nu(z).
fn hankel_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1;
    while k < 30 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        if k % 2 == 1 {
            q += if (k / 2) % 2 == 0 { term } else { -term };
        } else {
            p += if (k / 2) % 2 == 0 { term } else { -term };
        }
        if term.abs() < 1e-17 {
            break;
        }
        k += 1;
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    // (re, im, Re K1, Im K1) from a 30-digit reference evaluation
    const K1_TABLE: &[(f64, f64, f64, f64)] = &[
        (1.0, 0.0, 0.60190723019723457474, 0.0),
        (0.5, 0.0, 1.6564411200033008937, 0.0),
        (0.01, 0.02, 19.966850289327983833, -40.038628199165154379),
        (1.5, -0.7, 0.14319284659816527838, 0.21429604605386416844),
        (0.1, 1.9, -0.82441996666867964745, -0.26056632059246229975),
        (3.0, 4.0, -0.0056734204013233074638, 0.028666936579007818994),
        (0.05, 7.5, -0.20084052601140068073, -0.387989105012958727),
        (10.0, 0.0, 0.000018648773453825584597, 0.0),
        (2.5, 0.001, 0.073890755110310126061, -0.000091903849779285659833),
        (0.3, 12.0, 0.26099555444485070241, -0.063207401799605918046),
        (25.0, -3.0, -3.5081612804068172673e-12, 2.8185456519493291189e-13),
        (6.5, -0.2, 0.00076140267865195432094, 0.00016780743179172767161),
        (0.001, -3.0, -0.5321707501491539883, -0.50941167126272903665),
    ];

    const K0_TABLE: &[(f64, f64, f64, f64)] = &[
        (0.7, 0.0, 0.66051985991510159538, 0.0),
        (1.5, -0.7, 0.12814928333372398247, 0.16035610059472792197),
        (3.0, 4.0, -0.0072390512135701550129, 0.026510418350267677215),
    ];

    #[test]
    fn k1_against_reference() {
        for &(a, b, re, im) in K1_TABLE {
            let got = bessel_k1_complex(Complex64::new(a, b)).unwrap();
            let want = Complex64::new(re, im);
            let rel = (got - want).norm() / want.norm();
            assert!(rel < 1e-10, "z={a}+{b}i rel={rel:e} got={got}");
        }
        for &(a, b, re, im) in K0_TABLE {
            let got = bessel_k0_complex(Complex64::new(a, b)).unwrap();
            let want = Complex64::new(re, im);
            assert!((got - want).norm() / want.norm() < 1e-10);
        }
    }

    #[test]
    fn small_argument_limit_and_cut() {
        for x in [1e-3, 1e-5, 1e-7] {
            let v = bessel_k1_complex(Complex64::new(x, 0.0)).unwrap();
            assert!((x * v.re - 1.0).abs() < 10.0 * x);
        }
        assert!(bessel_k1_complex(Complex64::new(-1.0, 0.0)).is_err());
        assert!(bessel_k1_complex(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn wronskian() {
        let mut x = 0.1;
        while x <= 5.0 {
            let (i0, i1) = bessel_i01(x);
            let k0 = bessel_k0_complex(Complex64::new(x, 0.0)).unwrap().re;
            let k1 = bessel_k1_complex(Complex64::new(x, 0.0)).unwrap().re;
            assert!((i1 * k0 + i0 * k1 - 1.0 / x).abs() * x < 1e-9, "x={x}");
            x += 0.07;
        }
    }

    #[test]
    fn branch_switch_is_continuous() {
        for &r in &[2.0, 8.0] {
            for k in 0..40 {
                let th = -1.57 + 3.14 * k as f64 / 39.0;
                let z = Complex64::from_polar(r, th);
                if r > 2.0 && z.re >= 0.5 * r {
                    continue;
                }
                let a = k01_series(z).1;
                let b = k01_cf2(z).1;
                assert!((a - b).norm() <= 1e-11 * a.norm().max(1e-3), "r={r} th={th}");
            }
        }
    }

    #[test]
    fn j_series_matches_asymptotic_at_switch() {
        let z = 12.0;
        let (j0, j1c, j2c) = bessel_j_scaled(z);
        let a0 = hankel_asymptotic(0.0, z);
        let a1 = hankel_asymptotic(1.0, z);
        assert!((j0 - a0).abs() < 1e-10);
        assert!((j1c * z - a1).abs() < 1e-10);
        assert!((j2c * z * z - (2.0 * a1 / z - a0)).abs() < 1e-10);
        // J0(1) reference
        assert!((bessel_j_scaled(1.0).0 - 0.765_197_686_557_966_6).abs() < 1e-15);
    }
}
