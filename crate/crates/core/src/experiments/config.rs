use crate::error::{Error, Result};
use crate::interpolant::{HermiteApproach, InterpolationMode, RefIndex};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Transcendental curve, `m = 8`
    Example1,
    /// Transcendental curve, `m = 18`
    Example1Hard,
    /// Transcendental curve with perturbed samples, `m = 10`
    Example2,
    /// Helmholtz snapshots over the wavenumber
    Helmholtz,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Example1,
        Scenario::Example1Hard,
        Scenario::Example2,
        Scenario::Helmholtz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Example1 => "example1",
            Scenario::Example1Hard => "example1_hard",
            Scenario::Example2 => "example2",
            Scenario::Helmholtz => "helmholtz",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    MvCva,
    MonomialLocal,
    MonomialMaxvol,
    NormalCoords,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::MvCva,
        Method::MonomialLocal,
        Method::MonomialMaxvol,
        Method::NormalCoords,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MvCva => "mv_cva",
            Method::MonomialLocal => "monomial_local",
            Method::MonomialMaxvol => "monomial_maxvol",
            Method::NormalCoords => "normal_coords",
        }
    }

    pub fn is_baseline(self) -> bool {
        self != Method::MvCva
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Parses a comma separated method list; the list always includes
/// `mv_cva`, which is prepended when missing.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out = vec![Method::MvCva];
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = item.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

impl FromStr for InterpolationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lagrange" => Ok(InterpolationMode::Lagrange),
            "hermite" => Ok(InterpolationMode::Hermite),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub degree: usize,
    pub probes: usize,
    pub noise: f64,
    pub seed: u64,
    pub interval: (f64, f64),
    pub methods: Vec<Method>,
    pub mode: InterpolationMode,
    pub approach: HermiteApproach,
    pub ref_index: RefIndex,
    pub output: Option<PathBuf>,
}

/// Problem size used by `--small`.
pub const SMALL_N: usize = 200;

impl ExperimentConfig {
    /// Defaults of each scenario: Hermite data, degree `2m - 1`, 200
    /// equispaced probes, all methods.
    pub fn for_scenario(scenario: Scenario, seed: u64) -> Self {
        let (n, p, m, noise, interval) = match scenario {
            Scenario::Example1 => (1000, 10, 8, 0.0, (0.0, 1.0)),
            Scenario::Example1Hard => (1000, 10, 18, 0.0, (0.0, 1.0)),
            Scenario::Example2 => (1000, 10, 10, 1e-10, (0.0, 1.0)),
            Scenario::Helmholtz => (500, 8, 12, 0.0, (10.0, 20.0)),
        };
        Self {
            scenario,
            n,
            p,
            m,
            degree: 2 * m - 1,
            probes: 200,
            noise,
            seed,
            interval,
            methods: Method::ALL.to_vec(),
            mode: InterpolationMode::Hermite,
            approach: HermiteApproach::Augmented,
            ref_index: RefIndex::Midpoint,
            output: None,
        }
    }

    /// Switches to Lagrange data with degree `m - 1`.
    pub fn lagrange(mut self) -> Self {
        self.mode = InterpolationMode::Lagrange;
        self.degree = self.m - 1;
        self
    }

    pub fn small(mut self) -> Self {
        self.n = SMALL_N.min(self.n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 || self.m == 0 || self.probes == 0 {
            return Err(Error::Config("all counts must be positive".into()));
        }
        if self.p > self.n {
            return Err(Error::Config(format!("p = {} exceeds n = {}", self.p, self.n)));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::Config("noise level must be nonnegative".into()));
        }
        if !(self.interval.0 < self.interval.1) {
            return Err(Error::Config("interval must satisfy a < b".into()));
        }
        let max = match self.mode {
            InterpolationMode::Lagrange => self.m - 1,
            InterpolationMode::Hermite => 2 * self.m - 1,
        };
        if self.degree > max {
            return Err(Error::DegreeTooHigh {
                degree: self.degree,
                max,
            });
        }
        if !self.methods.contains(&Method::MvCva) {
            return Err(Error::Config("method list must include mv_cva".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("example3".parse::<Scenario>().is_err());
    }

    #[test]
    fn method_list_always_has_ours() {
        assert_eq!(
            parse_methods("normal_coords").unwrap(),
            vec![Method::MvCva, Method::NormalCoords]
        );
        assert_eq!(parse_methods("mv_cva,mv_cva").unwrap(), vec![Method::MvCva]);
        assert!(parse_methods("bogus").is_err());
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::for_scenario(Scenario::Example1Hard, 1);
        assert_eq!((c.n, c.p, c.m, c.degree), (1000, 10, 18, 35));
        assert!(c.validate().is_ok());
        let c = ExperimentConfig::for_scenario(Scenario::Helmholtz, 1).lagrange().small();
        assert_eq!((c.n, c.degree), (200, 11));
        let mut bad = ExperimentConfig::for_scenario(Scenario::Example1, 1);
        bad.degree = 16;
        assert!(bad.validate().is_err());
    }
}
