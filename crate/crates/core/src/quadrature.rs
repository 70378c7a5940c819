//! Symmetric triangle rules and Gauss-Legendre edge rules.
//!
//! Triangle weights are normalised to sum to one, so an integral over `T` is
//! `area(T) * sum(w_q f(x_q))`. Edge weights also sum to one (multiply by the
//! edge length); edge points are parameters in `[0, 1]`.

#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

fn orbit3(a: f64, w: f64, points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>) {
    let c = 1.0 - 2.0 * a;
    for p in [[a, a, c], [a, c, a], [c, a, a]] {
        points.push(p);
        weights.push(w);
    }
}

fn orbit6(a: f64, b: f64, w: f64, points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>) {
    let c = 1.0 - a - b;
    for p in [[a, b, c], [b, a, c], [a, c, b], [c, a, b], [b, c, a], [c, b, a]] {
        points.push(p);
        weights.push(w);
    }
}

impl TriangleRule {
    /// 6-point rule, exact for degree 4.
    pub fn degree4() -> Self {
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        orbit3(0.445_948_490_915_964_9, 0.223_381_589_678_011_47, &mut points, &mut weights);
        orbit3(0.091_576_213_509_770_74, 0.109_951_743_655_321_87, &mut points, &mut weights);
        Self {
            points,
            weights,
            degree: 4,
        }
    }

    /// 12-point rule, exact for degree 6.
    pub fn degree6() -> Self {
        let mut points = Vec::with_capacity(12);
        let mut weights = Vec::with_capacity(12);
        orbit3(0.249_286_745_170_910_7, 0.116_786_275_726_378_92, &mut points, &mut weights);
        orbit3(0.063_089_014_491_502_13, 0.050_844_906_370_206_68, &mut points, &mut weights);
        orbit6(
            0.310_352_451_033_784_1,
            0.053_145_049_844_817_13,
            0.082_851_075_618_373_86,
            &mut points,
            &mut weights,
        );
        Self {
            points,
            weights,
            degree: 6,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl EdgeRule {
    /// 3-point Gauss-Legendre, exact for degree 5.
    pub fn gauss3() -> Self {
        let d = 0.5 * (0.6f64).sqrt();
        Self {
            points: vec![0.5 - d, 0.5, 0.5 + d],
            weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
            degree: 5,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1).
    fn reference_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn check_triangle(rule: &TriangleRule) {
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 1.0).abs() < 1e-15);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        let d = rule.degree as u32;
        for a in 0..=d {
            for b in 0..=(d - a) {
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum::<f64>()
                    * 0.5;
                let exact = reference_monomial(a, b);
                assert!(((q - exact) / exact).abs() < 1e-14, "x^{a} y^{b}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn degree4_exactness() {
        check_triangle(&TriangleRule::degree4());
    }

    #[test]
    fn degree6_exactness() {
        check_triangle(&TriangleRule::degree6());
    }

    #[test]
    fn degree4_is_not_degree5() {
        let rule = TriangleRule::degree4();
        let q: f64 = rule.points.iter().zip(&rule.weights).map(|(l, w)| w * l[1].powi(5)).sum::<f64>() * 0.5;
        assert!((q - reference_monomial(5, 0)).abs() > 1e-8);
    }

    #[test]
    fn gauss3_exactness() {
        let rule = EdgeRule::gauss3();
        for k in 0..=5 {
            let q: f64 = rule.points.iter().zip(&rule.weights).map(|(s, w)| w * s.powi(k)).sum();
            let exact = 1.0 / f64::from(k as u32 + 1);
            assert!(((q - exact) / exact).abs() < 1e-14, "s^{k}");
        }
    }
}
