//! Bichromatic and multi-frequency fields propagating along `z`.
//!
//! A component with ellipticity `ε ∈ [-π/4, π/4]` and major axis at angle
//! `φ` from `x` has contravariant spherical components
//!
//! ```text
//! a^{-1} = e^{-iφ} sin(ε - π/4),   a^{+1} = e^{iφ} cos(ε - π/4),   a^0 = 0
//! ```
//!
//! in the basis `e_{±1} = ∓(e_x ± i e_y)/√2`. Component 1 normally sits at
//! `φ = 0`, so the relative angle between major axes is the axis angle of
//! component 2.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the ellipticity range, for values computed in floating point.
const ELLIPTICITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldComponent {
    pub amplitude: Complex64,
    /// Ellipticity angle in `[-π/4, π/4]`; positive rotates like `σ+`.
    pub ellipticity: f64,
    /// Absolute orientation of the major axis relative to `x`.
    pub axis_angle: f64,
    /// Ground level addressed (0 or 1) for a pair, comb index for a comb.
    pub tag: u32,
}

impl FieldComponent {
    pub fn new(amplitude: Complex64, ellipticity: f64, axis_angle: f64, tag: u32) -> Result<Self> {
        check_ellipticity(ellipticity)?;
        Ok(FieldComponent { amplitude, ellipticity, axis_angle, tag })
    }

    /// `(a^{-1}, a^{+1})`.
    pub fn spherical(&self) -> (Complex64, Complex64) {
        spherical_components(self).expect("field component constructed with invalid ellipticity")
    }

    /// Contravariant spherical component `a^q` for `q ∈ {-1, 0, +1}`.
    pub fn spherical_q(&self, q: i32) -> Complex64 {
        let (minus, plus) = self.spherical();
        match q {
            -1 => minus,
            1 => plus,
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

fn check_ellipticity(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps.abs() > FRAC_PI_4 + ELLIPTICITY_SLACK {
        return Err(Error::domain(format!("ellipticity {eps} outside [-π/4, π/4]")));
    }
    Ok(())
}

/// Spherical components `(a^{-1}, a^{+1})` of a component's polarization.
pub fn spherical_components(c: &FieldComponent) -> Result<(Complex64, Complex64)> {
    check_ellipticity(c.ellipticity)?;
    let eps = c.ellipticity.clamp(-FRAC_PI_4, FRAC_PI_4);
    let minus = Complex64::from_polar(1.0, -c.axis_angle) * (eps - FRAC_PI_4).sin();
    let plus = Complex64::from_polar(1.0, c.axis_angle) * (eps - FRAC_PI_4).cos();
    Ok((minus, plus))
}

/// Two-frequency field; component 1 drives the first ground level and
/// component 2 the second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BichromaticField {
    pub comp1: FieldComponent,
    pub comp2: FieldComponent,
}

impl BichromaticField {
    pub fn new(comp1: FieldComponent, comp2: FieldComponent) -> Self {
        BichromaticField { comp1, comp2 }
    }

    /// Angle between the major axes.
    pub fn theta(&self) -> f64 {
        self.comp2.axis_angle - self.comp1.axis_angle
    }

    pub fn component(&self, index: usize) -> &FieldComponent {
        match index {
            0 => &self.comp1,
            1 => &self.comp2,
            _ => panic!("bichromatic field has components 0 and 1, not {index}"),
        }
    }

    /// Same polarizations with amplitudes multiplied by `(s1, s2)`.
    pub fn scaled(&self, s1: Complex64, s2: Complex64) -> Self {
        let mut out = *self;
        out.comp1.amplitude *= s1;
        out.comp2.amplitude *= s2;
        out
    }

    /// Both components share the same circular polarization (`σ+σ+` or `σ-σ-`).
    pub fn is_same_circular(&self, tol: f64) -> bool {
        let (e1, e2) = (self.comp1.ellipticity, self.comp2.ellipticity);
        ((e1 - FRAC_PI_4).abs() < tol && (e2 - FRAC_PI_4).abs() < tol)
            || ((e1 + FRAC_PI_4).abs() < tol && (e2 + FRAC_PI_4).abs() < tol)
    }
}

/// Equidistant frequency comb.
#[derive(Clone, Debug, PartialEq)]
pub struct CombField {
    components: Vec<FieldComponent>,
}

impl CombField {
    pub fn new(components: Vec<FieldComponent>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::domain("a comb needs at least two components"));
        }
        Ok(CombField { components })
    }

    pub fn components(&self) -> &[FieldComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Adjacent pairs `(k, k+1)` as bichromatic fields; the lower-index
    /// component drives the first ground level.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = BichromaticField> + '_ {
        self.components.windows(2).map(|w| BichromaticField::new(w[0], w[1]))
    }
}

/// Field configurations named after the orientation of the polarization
/// ellipses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigKind {
    /// Orthogonal linear polarizations.
    LinPerpLin,
    /// Orthogonal major axes with the given ellipticities (`ε⊥ε` when both
    /// are equal).
    EpsPerpEps,
    /// Orthogonal major axes, equal ellipticity magnitude, opposite rotation.
    EpsPerpMinusEps,
    /// Component 1 linear, component 2 elliptical, orthogonal axes.
    LinPerpEps,
    /// Component 1 elliptical, component 2 linear, orthogonal axes.
    EpsPerpLin,
    SigmaPlusSigmaPlus,
    SigmaMinusSigmaMinus,
    /// Parallel major axes.
    EpsParEps,
}

impl ConfigKind {
    pub fn is_perpendicular(self) -> bool {
        !matches!(self, ConfigKind::EpsParEps | ConfigKind::SigmaPlusSigmaPlus | ConfigKind::SigmaMinusSigmaMinus)
    }

    pub fn shorthand(self) -> &'static str {
        match self {
            ConfigKind::LinPerpLin => "lin-perp-lin",
            ConfigKind::EpsPerpEps => "eps-perp-eps",
            ConfigKind::EpsPerpMinusEps => "eps-perp-minus-eps",
            ConfigKind::LinPerpEps => "lin-perp-eps",
            ConfigKind::EpsPerpLin => "eps-perp-lin",
            ConfigKind::SigmaPlusSigmaPlus => "sigma++",
            ConfigKind::SigmaMinusSigmaMinus => "sigma--",
            ConfigKind::EpsParEps => "eps-par-eps",
        }
    }
}

impl fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.shorthand())
    }
}

impl FromStr for ConfigKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        use ConfigKind::*;
        [
            LinPerpLin,
            EpsPerpEps,
            EpsPerpMinusEps,
            LinPerpEps,
            EpsPerpLin,
            SigmaPlusSigmaPlus,
            SigmaMinusSigmaMinus,
            EpsParEps,
        ]
        .into_iter()
        .find(|k| k.shorthand() == s.trim())
        .ok_or_else(|| Error::parse(format!("unknown field configuration {s:?}")))
    }
}

fn expect_count(kind: ConfigKind, values: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&values.len()) {
        Ok(())
    } else {
        Err(Error::domain(format!("{kind} takes {allowed:?} ellipticities, got {}", values.len())))
    }
}

fn all_equal(values: &[f64], target: f64) -> bool {
    values.iter().all(|v| (v - target).abs() < ELLIPTICITY_SLACK)
}

/// Build a named configuration. `ellipticities` carries whatever free
/// parameters the kind has; fixed values may be repeated as long as they
/// agree with the kind.
pub fn named_config(kind: ConfigKind, ellipticities: &[f64], amplitudes: [Complex64; 2]) -> Result<BichromaticField> {
    use ConfigKind::*;
    let contradiction = || Error::domain(format!("ellipticities {ellipticities:?} contradict {kind}"));
    let (e1, e2) = match kind {
        LinPerpLin => {
            if !all_equal(ellipticities, 0.0) || ellipticities.len() > 2 {
                return Err(contradiction());
            }
            (0.0, 0.0)
        }
        EpsPerpEps => {
            expect_count(kind, ellipticities, &[1, 2])?;
            (ellipticities[0], *ellipticities.last().unwrap())
        }
        EpsPerpMinusEps => {
            expect_count(kind, ellipticities, &[1])?;
            (ellipticities[0], -ellipticities[0])
        }
        LinPerpEps => {
            expect_count(kind, ellipticities, &[1])?;
            (0.0, ellipticities[0])
        }
        EpsPerpLin => {
            expect_count(kind, ellipticities, &[1])?;
            (ellipticities[0], 0.0)
        }
        SigmaPlusSigmaPlus | SigmaMinusSigmaMinus => {
            let e = if kind == SigmaPlusSigmaPlus { FRAC_PI_4 } else { -FRAC_PI_4 };
            if !all_equal(ellipticities, e) || ellipticities.len() > 2 {
                return Err(contradiction());
            }
            (e, e)
        }
        EpsParEps => {
            expect_count(kind, ellipticities, &[1, 2])?;
            (ellipticities[0], *ellipticities.last().unwrap())
        }
    };
    let theta = if kind.is_perpendicular() { FRAC_PI_2 } else { 0.0 };
    Ok(BichromaticField::new(
        FieldComponent::new(amplitudes[0], e1, 0.0, 0)?,
        FieldComponent::new(amplitudes[1], e2, theta, 1)?,
    ))
}

/// Parse an angle in radians, or in degrees with a `deg:` prefix.
pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::parse(format!("not an angle: {s:?}"));
    match s.strip_prefix("deg:") {
        Some(deg) => deg.trim().parse::<f64>().map(f64::to_radians).map_err(|_| bad()),
        None => s.parse::<f64>().map_err(|_| bad()),
    }
}

/// Parse CLI shorthand such as `lin-perp-lin`, `eps-perp-minus-eps:-0.2618`,
/// `eps-perp-eps:deg:10`, `eps-par-eps:0.1,0.3`, `sigma++`.
pub fn parse_named_config(s: &str, amplitudes: [Complex64; 2]) -> Result<BichromaticField> {
    let (name, params) = match s.split_once(':') {
        Some((name, rest)) => (name, Some(rest)),
        None => (s, None),
    };
    let kind: ConfigKind = name.parse()?;
    let values = match params {
        None => Vec::new(),
        Some(rest) => rest.split(',').map(parse_angle).collect::<Result<Vec<_>>>()?,
    };
    named_config(kind, &values, amplitudes)
}

/// Extend an `ε⊥ε` pair to an `n`-component comb in which every adjacent
/// pair is the base pair rotated by a multiple of `π/2`. Amplitudes are
/// equal and successive components advance by the base pair's relative
/// phase.
pub fn comb_from_pair(base: &BichromaticField, n: usize) -> Result<CombField> {
    if n < 2 {
        return Err(Error::domain(format!("comb needs n >= 2, got {n}")));
    }
    let step = base.theta();
    let orthogonal = ((step.rem_euclid(std::f64::consts::PI)) - FRAC_PI_2).abs() < 1e-12;
    if !orthogonal || (base.comp1.ellipticity - base.comp2.ellipticity).abs() > 1e-12 {
        return Err(Error::domain("comb base must be an ε⊥ε configuration"));
    }
    let (a1, a2) = (base.comp1.amplitude, base.comp2.amplitude);
    if a1.norm() == 0.0 || ((a1.norm() - a2.norm()).abs() > 1e-12 * a1.norm()) {
        return Err(Error::domain("comb base must have equal, nonzero amplitudes"));
    }
    let phase_step = a2 / a1;
    let mut amplitude = a1;
    let components = (0..n)
        .map(|k| {
            let c = FieldComponent {
                amplitude,
                ellipticity: base.comp1.ellipticity,
                axis_angle: base.comp1.axis_angle + step * k as f64,
                tag: k as u32,
            };
            amplitude *= phase_step;
            c
        })
        .collect::<Vec<_>>();
    let mut comb = CombField::new(components)?;
    // keep the base exactly for n = 2
    comb.components[1] = FieldComponent { tag: 1, ..base.comp2 };
    comb.components[0] = FieldComponent { tag: 0, ..base.comp1 };
    Ok(comb)
}

/// `{"re": .., "im": ..}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub amplitude: ComplexJson,
    pub ellipticity_rad: f64,
    pub axis_angle_rad: f64,
    pub tag: u32,
}

/// JSON form of a field: `{"components": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub components: Vec<ComponentSpec>,
}

impl FieldSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_components(&self) -> Result<Vec<FieldComponent>> {
        self.components
            .iter()
            .map(|c| FieldComponent::new(c.amplitude.into(), c.ellipticity_rad, c.axis_angle_rad, c.tag))
            .collect()
    }

    pub fn to_bichromatic(&self) -> Result<BichromaticField> {
        match self.to_components()?.as_slice() {
            [c1, c2] => Ok(BichromaticField::new(*c1, *c2)),
            other => Err(Error::domain(format!("bichromatic field needs 2 components, got {}", other.len()))),
        }
    }

    pub fn to_comb(&self) -> Result<CombField> {
        CombField::new(self.to_components()?)
    }
}

impl From<&FieldComponent> for ComponentSpec {
    fn from(c: &FieldComponent) -> Self {
        ComponentSpec {
            amplitude: c.amplitude.into(),
            ellipticity_rad: c.ellipticity,
            axis_angle_rad: c.axis_angle,
            tag: c.tag,
        }
    }
}

impl From<&BichromaticField> for FieldSpec {
    fn from(f: &BichromaticField) -> Self {
        FieldSpec { components: vec![(&f.comp1).into(), (&f.comp2).into()] }
    }
}

impl From<&CombField> for FieldSpec {
    fn from(f: &CombField) -> Self {
        FieldSpec { components: f.components().iter().map(Into::into).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn comp(eps: f64, axis: f64) -> FieldComponent {
        FieldComponent::new(ONE, eps, axis, 0).unwrap()
    }

    #[test]
    fn endpoints() {
        let (m, p) = comp(FRAC_PI_4, 0.0).spherical();
        assert_abs_diff_eq!(m.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-15);
        let (m, p) = comp(-FRAC_PI_4, 0.0).spherical();
        assert_abs_diff_eq!(m.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.norm(), 0.0, epsilon = 1e-15);
        let (m, p) = comp(0.0, 0.0).spherical();
        assert_abs_diff_eq!(m.re, -(0.5f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.re, (0.5f64).sqrt(), epsilon = 1e-15);
        assert_eq!(comp(0.3, 0.0).spherical_q(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn linear_polarization_points_along_axis() {
        // a = a^{-1} e_{-1} + a^{+1} e_{+1}, e_{±1} = ∓(x ± i y)/√2;
        // with this phase convention the real vector is (-cos φ, sin φ)
        for axis in [0.0, 0.4, FRAC_PI_2] {
            let (m, p) = comp(0.0, axis).spherical();
            let s = (0.5f64).sqrt();
            let x = (m - p) * s;
            let y = (m + p) * Complex64::new(0.0, -s);
            assert_abs_diff_eq!(x.re, -axis.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(y.re, axis.sin(), epsilon = 1e-14);
            assert_abs_diff_eq!(x.im.abs() + y.im.abs(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn out_of_range_ellipticity() {
        assert!(matches!(FieldComponent::new(ONE, 0.8, 0.0, 0), Err(Error::Domain(_))));
        let mut c = comp(0.0, 0.0);
        c.ellipticity = -1.0;
        assert!(spherical_components(&c).is_err());
    }

    #[test]
    fn named_configs() {
        let amps = [ONE, ONE];
        let f = named_config(ConfigKind::EpsPerpMinusEps, &[-PI / 12.0], amps).unwrap();
        assert_eq!(f.comp1.ellipticity, -PI / 12.0);
        assert_eq!(f.comp2.ellipticity, PI / 12.0);
        assert_eq!(f.theta(), FRAC_PI_2);

        let f = named_config(ConfigKind::SigmaPlusSigmaPlus, &[], amps).unwrap();
        for c in [f.comp1, f.comp2] {
            let (m, p) = c.spherical();
            assert_abs_diff_eq!(m.norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(f.theta(), 0.0);

        let f = named_config(ConfigKind::LinPerpLin, &[], amps).unwrap();
        assert_eq!((f.comp1.ellipticity, f.comp2.ellipticity, f.theta()), (0.0, 0.0, FRAC_PI_2));

        assert!(named_config(ConfigKind::LinPerpLin, &[0.1], amps).is_err());
        assert!(named_config(ConfigKind::SigmaPlusSigmaPlus, &[0.0], amps).is_err());
        assert!(named_config(ConfigKind::EpsPerpMinusEps, &[], amps).is_err());
        assert!(named_config(ConfigKind::EpsParEps, &[1.2], amps).is_err());
    }

    #[test]
    fn shorthand_parsing() {
        let amps = [ONE, ONE];
        let f = parse_named_config("eps-perp-minus-eps:deg:-15", amps).unwrap();
        assert_abs_diff_eq!(f.comp1.ellipticity, -PI / 12.0, epsilon = 1e-15);
        let f = parse_named_config("eps-par-eps:0.1,0.2", amps).unwrap();
        assert_eq!((f.comp1.ellipticity, f.comp2.ellipticity, f.theta()), (0.1, 0.2, 0.0));
        assert!(parse_named_config("lin-par-lin", amps).is_err());
        assert!(parse_angle("deg:x").is_err());
        assert_abs_diff_eq!(parse_angle("deg:90").unwrap(), FRAC_PI_2);
    }

    #[test]
    fn comb_construction() {
        let base = named_config(ConfigKind::LinPerpLin, &[], [ONE, ONE]).unwrap();
        let comb = comb_from_pair(&base, 2).unwrap();
        assert_eq!(comb.adjacent_pairs().next().unwrap(), base);

        let comb = comb_from_pair(&base, 5).unwrap();
        for (k, c) in comb.components().iter().enumerate() {
            // axes alternate x, y, x, y, x
            let axis = c.axis_angle.rem_euclid(PI);
            let expected = if k % 2 == 0 { 0.0 } else { FRAC_PI_2 };
            assert_abs_diff_eq!(axis.min(PI - axis), expected, epsilon = 1e-12);
        }
        for pair in comb.adjacent_pairs() {
            assert_abs_diff_eq!(pair.theta(), FRAC_PI_2, epsilon = 1e-12);
        }

        let skew = named_config(ConfigKind::EpsPerpMinusEps, &[0.2], [ONE, ONE]).unwrap();
        assert!(comb_from_pair(&skew, 3).is_err());
        let par = named_config(ConfigKind::EpsParEps, &[0.2], [ONE, ONE]).unwrap();
        assert!(comb_from_pair(&par, 3).is_err());
        assert!(comb_from_pair(&base, 1).is_err());
        let unequal = base.scaled(ONE, Complex64::new(2.0, 0.0));
        assert!(comb_from_pair(&unequal, 3).is_err());
    }

    #[test]
    fn json_schema() {
        let json = r#"{"components":[
            {"amplitude":{"re":1.0,"im":0.0},"ellipticity_rad":0.1,"axis_angle_rad":0.0,"tag":0},
            {"amplitude":{"re":0.0,"im":1.0},"ellipticity_rad":0.1,"axis_angle_rad":1.5707963267948966,"tag":1}]}"#;
        let spec = FieldSpec::from_json(json).unwrap();
        let field = spec.to_bichromatic().unwrap();
        assert_eq!(field.comp2.amplitude, Complex64::new(0.0, 1.0));
        let back = serde_json::to_string(&FieldSpec::from(&field)).unwrap();
        assert_eq!(FieldSpec::from_json(&back).unwrap(), spec);
        assert!(spec.to_comb().is_ok());
        let single = FieldSpec { components: spec.components[..1].to_vec() };
        assert!(single.to_bichromatic().is_err());
        assert!(single.to_comb().is_err());
    }

    proptest! {
        #[test]
        fn unit_norm(eps in -FRAC_PI_4..=FRAC_PI_4, axis in -7.0f64..7.0) {
            let (m, p) = comp(eps, axis).spherical();
            prop_assert!((m.norm_sqr() + p.norm_sqr() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn mirror_swaps_circular_weights(eps in -FRAC_PI_4..=FRAC_PI_4, axis in -7.0f64..7.0) {
            let (m, p) = comp(eps, axis).spherical();
            let (mm, pm) = comp(-eps, axis).spherical();
            prop_assert!((m.norm() - pm.norm()).abs() < 1e-14);
            prop_assert!((p.norm() - mm.norm()).abs() < 1e-14);
        }

        #[test]
        fn axis_shift_by_pi_keeps_intensities(eps in -FRAC_PI_4..=FRAC_PI_4, axis in -7.0f64..7.0) {
            let (m, p) = comp(eps, axis).spherical();
            let (ms, ps) = comp(eps, axis + PI).spherical();
            prop_assert!((m.norm_sqr() - ms.norm_sqr()).abs() < 1e-14);
            prop_assert!((p.norm_sqr() - ps.norm_sqr()).abs() < 1e-14);
        }
    }
}
