//! The warped-product target metric `g(u) = u√(1 + 7u² − (23d−170)u⁴)` and
//! the exact certificate that all its sectional curvatures are negative on
//! the range of the profile.

use num_traits::One;
use serde::Serialize;

use crate::exactmath::{
    negative_on_halfline, positive_on_halfline, sqrt_compare, Certificate, ExactError, RatPoly,
    Rational,
};
use crate::profile::{profile_params, quintic_coeff, ProfileError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("1 + 7u^2 - k u^4 < 0 at u = {u} (d = {d})")]
    Domain { d: i64, u: f64 },
    #[error("g vanishes at u = {u}: curvature has a pole")]
    Pole { u: f64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("no sign change found before the metric degenerates (d = {0})")]
    NoBoundary(i64),
}

/// `g(u)²` as an exact polynomial in `u`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricFamily {
    pub d: i64,
    pub e: i64,
    pub g_squared: RatPoly,
}

impl MetricFamily {
    pub fn new(d: i64) -> Self {
        let k = quintic_coeff(d);
        MetricFamily {
            d,
            e: d - 8,
            g_squared: RatPoly::from_ints(&[0, 0, 1, 0, 7, 0, -k], "u"),
        }
    }
}

/// `(−g″/g, (1 − g′²)/g²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvaturePair {
    pub type1: f64,
    pub type2: f64,
}

impl CurvaturePair {
    pub fn both_negative(&self) -> bool {
        self.type1 < 0.0 && self.type2 < 0.0
    }
}

fn h(k: f64, u: f64) -> f64 {
    let w = u * u;
    1.0 + 7.0 * w - k * w * w
}

/// Numerator of `g″/g` over `h²`: `N(e,u) = 6k²u⁶ − 63ku⁴ − 2(115e+21)u² + 21`.
pub fn n_numerator(d: i64, u: f64) -> f64 {
    let k = quintic_coeff(d) as f64;
    let e = (d - 8) as f64;
    let w = u * u;
    ((6.0 * k * k * w - 63.0 * k) * w - 2.0 * (115.0 * e + 21.0)) * w + 21.0
}

/// `h²(1 − g′²)/g² = −21 + (5k−196)u² + 84ku⁴ − 9k²u⁶`.
fn type2_numerator(k: f64, u: f64) -> f64 {
    let w = u * u;
    -21.0 + ((5.0 * k - 196.0) + (84.0 * k - 9.0 * k * k * w) * w) * w
}

pub fn metric_g(d: i64, u: f64) -> Result<f64, GeometryError> {
    let hv = h(quintic_coeff(d) as f64, u);
    if hv < 0.0 {
        return Err(GeometryError::Domain { d, u });
    }
    Ok(u * hv.sqrt())
}

/// `g′(u) = (1 + 14u² − 3ku⁴)/√h`.
pub fn metric_g_prime(d: i64, u: f64) -> Result<f64, GeometryError> {
    let k = quintic_coeff(d) as f64;
    let hv = h(k, u);
    if hv <= 0.0 {
        return Err(GeometryError::Domain { d, u });
    }
    let w = u * u;
    Ok((1.0 + 14.0 * w - 3.0 * k * w * w) / hv.sqrt())
}

/// Both curvature expressions, written as polynomials over `h²` so that
/// `u = 0` is a removable point with value `(−21, −21)`.
pub fn sectional_curvatures(d: i64, u: f64) -> Result<CurvaturePair, GeometryError> {
    let k = quintic_coeff(d) as f64;
    let hv = h(k, u);
    if hv < 0.0 {
        return Err(GeometryError::Domain { d, u });
    }
    if hv == 0.0 {
        return Err(GeometryError::Pole { u });
    }
    let h2 = hv * hv;
    Ok(CurvaturePair {
        type1: -n_numerator(d, u) / h2,
        type2: type2_numerator(k, u) / h2,
    })
}

/// Polynomial in `u` whose coefficients are polynomials in `e`.
#[derive(Clone, Debug, PartialEq)]
struct UPoly(Vec<RatPoly>);

impl UPoly {
    fn coeff(&self, i: usize) -> RatPoly {
        self.0.get(i).cloned().unwrap_or_else(|| RatPoly::zero("e"))
    }

    fn d_u(&self) -> UPoly {
        UPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Rational::from(i as i64)))
                .collect(),
        )
    }

    fn d_u_n(&self, n: usize) -> UPoly {
        (0..n).fold(self.clone(), |p, _| p.d_u())
    }

    fn nonzero_degrees(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    fn same_as(&self, other: &UPoly) -> bool {
        let n = self.0.len().max(other.0.len());
        (0..n).all(|i| self.coeff(i) == other.coeff(i))
    }
}

/// `α + β√Q` with `α, β` polynomials in `e`.
#[derive(Clone, Debug)]
struct Surd {
    alpha: RatPoly,
    beta: RatPoly,
}

impl Surd {
    fn rat(p: RatPoly) -> Self {
        Surd {
            alpha: p,
            beta: RatPoly::zero("e"),
        }
    }
    fn add(&self, o: &Surd) -> Surd {
        Surd {
            alpha: &self.alpha + &o.alpha,
            beta: &self.beta + &o.beta,
        }
    }
    fn mul(&self, o: &Surd, q: &RatPoly) -> Surd {
        Surd {
            alpha: &(&self.alpha * &o.alpha) + &(&(&self.beta * &o.beta) * q),
            beta: &(&self.alpha * &o.beta) + &(&self.beta * &o.alpha),
        }
    }
    fn scale(&self, c: &RatPoly) -> Surd {
        Surd {
            alpha: &self.alpha * c,
            beta: &self.beta * c,
        }
    }
}

fn ints(c: &[i64]) -> RatPoly {
    RatPoly::from_ints(c, "e")
}

/// Polynomials of the negative-curvature argument, in the shifted
/// dimension `e = d − 8`.
pub struct CurvaturePolys {
    pub k: RatPoly,
    pub p: RatPoly,
    pub q: RatPoly,
    pub r: RatPoly,
    pub s: RatPoly,
}

impl CurvaturePolys {
    pub fn new() -> Self {
        CurvaturePolys {
            k: ints(&[14, 23]),
            p: ints(&[7 * 17094, 7 * 11500, 7 * 1831, 7 * 69]),
            q: &ints(&[7, 1]) * &ints(&[567, 445, 46]),
            r: ints(&[7537866, 8566502, 3077307, 433338, 20723]),
            s: ints(&[
                22614480, 15651132, -30567884, 11046366, 12402439, 2979735, 289189, 10143,
            ]),
        }
    }
}

impl Default for CurvaturePolys {
    fn default() -> Self {
        Self::new()
    }
}

fn absorb(cert: &mut Certificate, label: &str, sub: Result<Certificate, ExactError>) -> bool {
    match sub {
        Ok(c) => cert.absorb(label, c),
        Err(err) => cert.push(label, false, err.to_string()),
    }
}

/// Substitutes `e ↦ value` in every coefficient (constant polynomials).
fn instantiate(p: &RatPoly, e: &RatPoly) -> RatPoly {
    if e.is_constant() {
        RatPoly::constant(p.eval(&e.coeff(0)), "e")
    } else {
        p.compose(e)
    }
}

/// The full chain with `e` either the variable itself (all `d ≥ 8` at
/// once) or a constant `d − 8`.
fn curvature_chain(name: String, e: &RatPoly) -> Certificate {
    let mut cert = Certificate::new(name);
    let base = CurvaturePolys::new();
    let inst = |p: &RatPoly| instantiate(p, e);
    let (k, p, q, r, s) = (
        inst(&base.k),
        inst(&base.p),
        inst(&base.q),
        inst(&base.r),
        inst(&base.s),
    );
    let c7 = inst(&ints(&[49, 7])); // 7(e+7)
    let lin115 = inst(&ints(&[21, 115]));

    let n = UPoly(vec![
        RatPoly::constant(Rational::from(21), "e"),
        RatPoly::zero("e"),
        lin115.scale(&Rational::from(-2)),
        RatPoly::zero("e"),
        k.scale(&Rational::from(-63)),
        RatPoly::zero("e"),
        (&k * &k).scale(&Rational::from(6)),
    ]);

    // g''/g = [4hh'/u + 2hh'' − h'^2]/(4h^2) for g = u√h
    let hpoly = UPoly(vec![
        RatPoly::constant(Rational::one(), "e"),
        RatPoly::zero("e"),
        RatPoly::constant(Rational::from(7), "e"),
        RatPoly::zero("e"),
        -&k,
    ]);
    let h1 = hpoly.d_u();
    let h2 = h1.d_u();
    let mul = |a: &UPoly, b: &UPoly| {
        let mut out = vec![RatPoly::zero("e"); a.0.len() + b.0.len()];
        for (i, x) in a.0.iter().enumerate() {
            for (j, y) in b.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        UPoly(out)
    };
    let h_h1 = mul(&hpoly, &h1);
    let h_h1_over_u = UPoly(h_h1.0.iter().skip(1).cloned().collect());
    let four_n = {
        let a = mul(
            &UPoly(vec![RatPoly::constant(Rational::from(4), "e")]),
            &h_h1_over_u,
        );
        let b = mul(
            &UPoly(vec![RatPoly::constant(Rational::from(2), "e")]),
            &mul(&hpoly, &h2),
        );
        let c = mul(&h1, &h1);
        let len = a.0.len().max(b.0.len()).max(c.0.len());
        UPoly(
            (0..len)
                .map(|i| &(&a.coeff(i) + &b.coeff(i)) - &c.coeff(i))
                .collect(),
        )
    };
    let n_times_4 = UPoly(n.0.iter().map(|c| c.scale(&Rational::from(4))).collect());
    cert.push(
        "N(e,u) is the numerator of g''/g = N/h^2 with h = 1 + 7u^2 - (23e+14)u^4",
        four_n.same_as(&n_times_4) && h_h1.coeff(0).is_zero(),
        "4N = 4hh'/u + 2hh'' - h'^2 coefficientwise",
    );

    // (i) N(e,0) = 21
    absorb(
        &mut cert,
        "(i) N(e,0) = 21 > 0",
        positive_on_halfline(&n.coeff(0)),
    );

    // (iii)(i) ∂²N(e,0) = −4(115e+21) < 0
    let n2 = n.d_u_n(2);
    let printed_n2 = UPoly(vec![
        lin115.scale(&Rational::from(-4)),
        RatPoly::zero("e"),
        k.scale(&Rational::from(-4 * 189)),
        RatPoly::zero("e"),
        (&k * &k).scale(&Rational::from(4 * 45)),
    ]);
    cert.push(
        "d2N/du2 = 4[45k^2u^4 - 189ku^2 - 115e - 21]",
        n2.same_as(&printed_n2),
        "coefficients agree",
    );
    absorb(
        &mut cert,
        "(ii) d2N/du2(e,0) = -4(115e+21) < 0",
        negative_on_halfline(&n2.coeff(0)),
    );

    // ∂³N: vanishes at 0, convex on u ≥ 0 since ∂⁵N = 4320uk² ≥ 0
    let n3 = n.d_u_n(3);
    let printed_n3 = UPoly(vec![
        RatPoly::zero("e"),
        k.scale(&Rational::from(-72 * 21)),
        RatPoly::zero("e"),
        (&k * &k).scale(&Rational::from(720)),
    ]);
    cert.push(
        "d3N/du3 = 72ku[10ku^2 - 21]",
        n3.same_as(&printed_n3),
        "coefficients agree",
    );
    cert.push(
        "d3N/du3(e,0) = 0",
        n3.coeff(0).is_zero(),
        format!("{}", n3.coeff(0)),
    );
    let n5 = n.d_u_n(5);
    cert.push(
        "d5N/du5 = 4320 u k^2 (only the u^1 term)",
        n5.nonzero_degrees() == vec![1] && n5.coeff(1) == (&k * &k).scale(&Rational::from(4320)),
        format!("u-degrees {:?}", n5.nonzero_degrees()),
    );
    absorb(
        &mut cert,
        "(iii) 4320k^2 > 0, so d3N/du3 convex for u >= 0",
        positive_on_halfline(&n5.coeff(1)),
    );
    absorb(&mut cert, "k = 23e + 14 > 0", positive_on_halfline(&k));

    // s = √Q − 7(e+7) > 0, so φ₀(1)² = 2/s
    let den_gap = &q - &(&c7 * &c7);
    let printed_gap =
        (&(&inst(&ints(&[8, 1])) * &inst(&ints(&[7, 1]))) * &k).scale(&Rational::from(2));
    cert.push(
        "Q - 49(e+7)^2 = 2(e+8)(e+7)(23e+14)",
        den_gap == printed_gap,
        format!("Q - 49(e+7)^2 = {den_gap}"),
    );
    absorb(
        &mut cert,
        "(iv) sqrt(Q) - 7(e+7) > 0",
        sqrt_compare(&RatPoly::constant(Rational::one(), "e"), &q, &c7),
    );

    // ∂³N(e,φ₀(1)) ≤ 0 ⇔ 10kφ₀(1)² < 21 ⇔ 21√Q > 607e + 1309
    let lin607 = inst(&ints(&[1309, 607]));
    let combined = &k.scale(&Rational::from(20)) + &c7.scale(&Rational::from(21));
    cert.push(
        "20k + 21*7(e+7) = 607e + 1309",
        combined == lin607,
        format!("{combined}"),
    );
    let quad = inst(&ints(&[1316, -925, 441]));
    let gap607 = &q.scale(&Rational::from(441)) - &(&lin607 * &lin607);
    cert.push(
        "441Q - (607e+1309)^2 = 2(23e+14)(441e^2 - 925e + 1316)",
        gap607 == (&k * &quad).scale(&Rational::from(2)),
        format!("{gap607}"),
    );
    absorb(
        &mut cert,
        "(v) 441e^2 - 925e + 1316 > 0",
        positive_on_halfline(&quad),
    );
    absorb(
        &mut cert,
        "(v) 21 sqrt(Q) - (607e+1309) > 0, so d3N/du3(e, phi0(1)) <= 0",
        sqrt_compare(&RatPoly::constant(Rational::from(21), "e"), &q, &lin607),
    );

    // N(e,φ₀(1)) = 2(P√Q − R)/s³: check s³N(e,√(2/s)) = 2P√Q − 2R in ℚ[e][√Q]
    let sv = Surd {
        alpha: -&c7,
        beta: RatPoly::constant(Rational::one(), "e"),
    };
    let s2 = sv.mul(&sv, &q);
    let s3 = s2.mul(&sv, &q);
    let n_at = Surd::rat((&k * &k).scale(&Rational::from(48)))
        .add(&sv.scale(&k.scale(&Rational::from(-252))))
        .add(&s2.scale(&lin115.scale(&Rational::from(-4))))
        .add(&s3.scale(&RatPoly::constant(Rational::from(21), "e")));
    cert.push(
        "s^3 N(e, phi0(1)) = 2(P sqrt(Q) - R) with s = sqrt(Q) - 7(e+7)",
        n_at.alpha == r.scale(&Rational::from(-2)) && n_at.beta == p.scale(&Rational::from(2)),
        "exact identity in Q[e][sqrt(Q)]",
    );
    let pq_r = &(&(&p * &p) * &q) - &(&r * &r);
    cert.push(
        "P^2 Q - R^2 = 2(23e+14)^2 S(e)",
        pq_r == (&(&k * &k) * &s).scale(&Rational::from(2)),
        "coefficients agree",
    );
    absorb(&mut cert, "(vi) S(e) > 0", positive_on_halfline(&s));
    absorb(
        &mut cert,
        "(vi) P sqrt(Q) - R > 0, so N(e, phi0(1)) > 0",
        sqrt_compare(&p, &q, &r),
    );

    // h(φ₀(1)) > 0 so g > 0 on (0, φ₀(1)]: s²h = α + β√Q with β < 0
    let sh = s2
        .add(&sv.scale(&RatPoly::constant(Rational::from(14), "e")))
        .add(&Surd::rat(k.scale(&Rational::from(-4))));
    let sh_norm = &(&sh.alpha * &sh.alpha) - &(&(&sh.beta * &sh.beta) * &q);
    absorb(
        &mut cert,
        "(vii) alpha > 0 in s^2 h(phi0(1)) = alpha + beta sqrt(Q)",
        positive_on_halfline(&sh.alpha),
    );
    absorb(&mut cert, "(vii) -beta > 0", negative_on_halfline(&sh.beta));
    absorb(
        &mut cert,
        "(vii) alpha^2 - beta^2 Q > 0, so h(phi0(1)) > 0 and h > 0 on [0, phi0(1)] (concave in u^2)",
        if sh_norm.is_zero() { Err(ExactError::ZeroPolynomial) } else { positive_on_halfline(&sh_norm) },
    );

    // type 2: numerator of g'^2 − 1 at u → 0
    let t2_low = -21;
    let t2_expected = UPoly(vec![RatPoly::constant(Rational::from(t2_low), "e")]);
    let h_plus = UPoly(vec![
        RatPoly::constant(Rational::one(), "e"),
        RatPoly::zero("e"),
        RatPoly::constant(Rational::from(14), "e"),
        RatPoly::zero("e"),
        k.scale(&Rational::from(-3)),
    ]);
    let hp2 = mul(&h_plus, &h_plus);
    let len = hpoly.0.len().max(hp2.0.len());
    let t2num = UPoly((0..len).map(|i| &hpoly.coeff(i) - &hp2.coeff(i)).collect());
    cert.push(
        "(1 - g'^2)/g^2 -> -21 at u = 0",
        t2num.coeff(0).is_zero()
            && t2num.coeff(1).is_zero()
            && UPoly(vec![t2num.coeff(2)]).same_as(&t2_expected),
        format!("h - (h + uh'/2)^2 = {} u^2 + O(u^4)", t2num.coeff(2)),
    );
    let prior = cert.passed();
    cert.push(
        "(viii) g > 0 and g'' = gN/h^2 > 0 on (0, phi0(1)], so g' > g'(0) = 1 and (1 - g'^2)/g^2 < 0",
        prior,
        if prior { "follows from the steps above" } else { "an earlier step failed" },
    );
    cert
}

/// The chain in the symbolic variable `e ≥ 0`, covering every `d ≥ 8`.
pub fn certify_negative_curvature_symbolic() -> Certificate {
    curvature_chain(
        "negative sectional curvature for all d >= 8 (symbolic e = d - 8 >= 0)".into(),
        &RatPoly::x("e"),
    )
}

/// The chain instantiated at one dimension; fails at the profile
/// precondition when `b(d) ≤ 1`.
pub fn certify_negative_curvature(d: i64) -> Certificate {
    let mut pre = Certificate::new(format!("negative sectional curvature for d = {d}"));
    // b > 1 ⇔ E > 14(d−1) ⇔ 46d² − 291d − 49 > 49(d − 1) ⇔ 46d² − 340d > 0
    let radicand_ok = d >= 2 && (46 * d * d - 291 * d - 49) >= 0;
    let margin = 46 * d * d - 340 * d;
    let ok = pre.push(
        "profile precondition b(d) > 1 (46d^2 - 340d > 0)",
        radicand_ok && margin > 0,
        format!(
            "46d^2 - 340d = {margin}; b = {}",
            profile_params(d)
                .map(|p| format!("{:.6}", p.b))
                .unwrap_or_else(|e| e.to_string())
        ),
    );
    if !ok {
        return pre;
    }
    let e = RatPoly::constant(Rational::from(d - 8), "e");
    let chain = curvature_chain(format!("chain at e = {}", d - 8), &e);
    pre.absorb("e = d - 8", chain);
    pre
}

/// Largest `ε` (to 1e−9) such that both curvature expressions stay
/// negative on `[0, φ₀(1) + ε)`.
pub fn epsilon_margin(d: i64) -> Result<f64, GeometryError> {
    let params = profile_params(d)?;
    let u0 = params.phi0_at_one()?;
    let k = quintic_coeff(d) as f64;
    // h > 0 up to u_h with u_h² = (7 + √(49 + 4k))/(2k)
    let u_h = if k > 0.0 {
        ((7.0 + (49.0 + 4.0 * k).sqrt()) / (2.0 * k)).sqrt()
    } else {
        f64::INFINITY
    };
    let good = |u: f64| -> bool {
        h(k, u) > 0.0 && n_numerator(d, u) > 0.0 && type2_numerator(k, u) < 0.0
    };
    if !good(u0) {
        return Err(GeometryError::NoBoundary(d));
    }
    let upper = if u_h.is_finite() { u_h } else { 10.0 * u0 };
    let steps = 20_000;
    let du = (upper - u0) / steps as f64;
    let mut lo = u0;
    let mut hi = None;
    for i in 1..=steps {
        let u = u0 + du * i as f64;
        if !good(u) {
            hi = Some(u);
            break;
        }
        lo = u;
    }
    let mut hi = hi.unwrap_or(upper);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if good(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo - u0)
}
