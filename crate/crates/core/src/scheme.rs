//! Level schemes: two ground hyperfine levels and a set of excited levels.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angular::{hyperfine_levels, reduced_dipole, LineId};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::surd::Surd;

/// Index of a ground level: 0 for `F1`, 1 for `F2`.
pub type GroundLevel = usize;

/// Ground levels `F1`, `F2` coupled through excited levels `Fe`.
///
/// With `line` set, this is an alkali D line of nuclear spin `nuclear_spin`
/// and dipole elements come from [`reduced_dipole`]. Without it the scheme
/// is generic: any `F1`, `F2`, `Fe` obeying dipole selection rules, with
/// every reduced element equal to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemeSpec", into = "SchemeSpec")]
pub struct LevelScheme {
    nuclear_spin: HalfInt,
    line: Option<LineId>,
    f1: HalfInt,
    f2: HalfInt,
    excited: Vec<HalfInt>,
    resolved: bool,
}

/// JSON form of a [`LevelScheme`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nuclear_spin: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<LineId>,
    pub f1: HalfInt,
    pub f2: HalfInt,
    pub excited: Vec<HalfInt>,
    #[serde(default)]
    pub resolved: bool,
}

impl TryFrom<SchemeSpec> for LevelScheme {
    type Error = Error;
    fn try_from(s: SchemeSpec) -> Result<Self> {
        match s.line {
            Some(line) => {
                let i = s.nuclear_spin.ok_or_else(|| Error::domain("an alkali line needs nuclear_spin"))?;
                LevelScheme::alkali(i, line, s.f1, s.f2, s.excited, s.resolved)
            }
            None => LevelScheme::generic(s.f1, s.f2, s.excited, s.resolved),
        }
    }
}

impl From<LevelScheme> for SchemeSpec {
    fn from(s: LevelScheme) -> Self {
        SchemeSpec {
            nuclear_spin: s.line.map(|_| s.nuclear_spin),
            line: s.line,
            f1: s.f1,
            f2: s.f2,
            excited: s.excited,
            resolved: s.resolved,
        }
    }
}

/// Dipole selection rule between hyperfine levels: `|F - Fe| <= 1`, no `0 -> 0`.
pub fn dipole_allowed(f: HalfInt, fe: HalfInt) -> bool {
    let diff = (f - fe).twice().abs();
    (diff == 0 || diff == 2) && !(f.twice() == 0 && fe.twice() == 0) && f.twice() >= 0 && fe.twice() >= 0
}

impl LevelScheme {
    pub fn alkali(
        nuclear_spin: HalfInt,
        line: LineId,
        f1: HalfInt,
        f2: HalfInt,
        excited: Vec<HalfInt>,
        resolved: bool,
    ) -> Result<Self> {
        if nuclear_spin.twice() < 0 {
            return Err(Error::domain("negative nuclear spin"));
        }
        let ground = hyperfine_levels(nuclear_spin, line.ground_j());
        for f in [f1, f2] {
            if !ground.contains(&f) {
                return Err(Error::domain(format!("F = {f} is not a ground level for I = {nuclear_spin}")));
            }
        }
        if f1 == f2 {
            return Err(Error::domain("alkali ground levels must differ"));
        }
        let allowed = hyperfine_levels(nuclear_spin, line.excited_j());
        if let Some(fe) = excited.iter().find(|fe| !allowed.contains(fe)) {
            return Err(Error::domain(format!(
                "F' = {fe} is not an excited level of the {line} line for I = {nuclear_spin}"
            )));
        }
        let scheme = LevelScheme { nuclear_spin, line: Some(line), f1, f2, excited, resolved };
        scheme.check_excited()?;
        Ok(scheme)
    }

    pub fn generic(f1: HalfInt, f2: HalfInt, excited: Vec<HalfInt>, resolved: bool) -> Result<Self> {
        if f1.twice() < 0 || f2.twice() < 0 {
            return Err(Error::domain("negative ground angular momentum"));
        }
        if (f1 - f2).twice() % 2 != 0 {
            return Err(Error::domain("F1 and F2 must both be integer or both half-integer"));
        }
        let scheme = LevelScheme { nuclear_spin: HalfInt::ZERO, line: None, f1, f2, excited, resolved };
        scheme.check_excited()?;
        Ok(scheme)
    }

    fn check_excited(&self) -> Result<()> {
        if self.excited.is_empty() {
            return Err(Error::domain("level scheme needs at least one excited level"));
        }
        for (k, fe) in self.excited.iter().enumerate() {
            if self.excited[..k].contains(fe) {
                return Err(Error::domain(format!("excited level {fe} listed twice")));
            }
            if !self.couples(0, *fe) && !self.couples(1, *fe) {
                return Err(Error::domain(format!(
                    "excited level {fe} is reachable from neither F1 = {} nor F2 = {}",
                    self.f1, self.f2
                )));
            }
        }
        Ok(())
    }

    pub fn nuclear_spin(&self) -> HalfInt {
        self.nuclear_spin
    }

    pub fn line(&self) -> Option<LineId> {
        self.line
    }

    pub fn f1(&self) -> HalfInt {
        self.f1
    }

    pub fn f2(&self) -> HalfInt {
        self.f2
    }

    pub fn ground_f(&self, level: GroundLevel) -> HalfInt {
        match level {
            0 => self.f1,
            1 => self.f2,
            _ => panic!("ground level index {level} out of range"),
        }
    }

    pub fn excited(&self) -> &[HalfInt] {
        &self.excited
    }

    pub fn resolved(&self) -> bool {
        self.resolved
    }

    pub fn with_excited(&self, excited: Vec<HalfInt>) -> Result<Self> {
        let mut s = self.clone();
        s.excited = excited;
        s.check_excited()?;
        Ok(s)
    }

    pub fn with_resolved(&self, resolved: bool) -> Self {
        LevelScheme { resolved, ..self.clone() }
    }

    /// Whether ground level `level` has a nonvanishing dipole coupling to `fe`.
    pub fn couples(&self, level: GroundLevel, fe: HalfInt) -> bool {
        let f = self.ground_f(level);
        dipole_allowed(f, fe) && !self.dipole(level, fe).is_zero()
    }

    /// Reduced dipole element `d(F_level, Fe)`; zero if forbidden.
    pub fn dipole(&self, level: GroundLevel, fe: HalfInt) -> Surd {
        let f = self.ground_f(level);
        if !dipole_allowed(f, fe) {
            return Surd::zero();
        }
        match self.line {
            Some(line) => reduced_dipole(f, fe, line, self.nuclear_spin).unwrap_or_else(|_| Surd::zero()),
            None => Surd::one(),
        }
    }

    /// Projections shared by both ground levels.
    pub fn common_projections(&self) -> Vec<HalfInt> {
        self.f1.projections().filter(|m| self.f2.admits_projection(*m)).collect()
    }

    pub fn check_common_projection(&self, m: HalfInt) -> Result<()> {
        if self.f1.admits_projection(m) && self.f2.admits_projection(m) {
            Ok(())
        } else {
            Err(Error::domain(format!("m = {m} is not a projection of both F1 = {} and F2 = {}", self.f1, self.f2)))
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Built-in presets: `cs-d1`, `cs-d2` (¹³³Cs, I = 7/2) and `rb87-d1`,
    /// `rb87-d2` (⁸⁷Rb, I = 3/2), all with every excited level included
    /// and unresolved.
    pub fn preset(name: &str) -> Result<Self> {
        let (i, line) = match name.trim().to_ascii_lowercase().as_str() {
            "cs-d1" => (7, LineId::D1),
            "cs-d2" => (7, LineId::D2),
            "rb87-d1" => (3, LineId::D1),
            "rb87-d2" => (3, LineId::D2),
            other => return Err(Error::parse(format!("unknown scheme preset {other:?}"))),
        };
        let i = HalfInt::from_twice(i);
        let ground = hyperfine_levels(i, line.ground_j());
        LevelScheme::alkali(i, line, ground[0], ground[1], hyperfine_levels(i, line.excited_j()), false)
    }

    pub fn cs_d1() -> Self {
        LevelScheme::preset("cs-d1").expect("preset")
    }

    pub fn cs_d2() -> Self {
        LevelScheme::preset("cs-d2").expect("preset")
    }

    pub fn rb87_d1() -> Self {
        LevelScheme::preset("rb87-d1").expect("preset")
    }

    pub fn rb87_d2() -> Self {
        LevelScheme::preset("rb87-d2").expect("preset")
    }

    pub const PRESETS: [&'static str; 4] = ["cs-d1", "cs-d2", "rb87-d1", "rb87-d2"];
}

impl FromStr for LevelScheme {
    type Err = Error;
    /// A preset name or an inline JSON object.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            LevelScheme::from_json(s)
        } else {
            LevelScheme::preset(s)
        }
    }
}
