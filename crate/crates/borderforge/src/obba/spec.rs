use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::oracle::{AdversarialOracle, EmptyOracle, Oracle, PerfectOracle, RandomSubsetOracle, TrivialFullOracle};
use super::wire::{Endpoint, ExternalOracle, DEFAULT_TIMEOUT};
use crate::error::{Error, Result};

/// Which oracle to build, as written on the command line or in a suite file:
/// `none`, `perfect`, `empty`, `full`, `adversarial`, `random[:KEEP]`,
/// `replay:FILE` or `external:ENDPOINT`.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleSpec {
    None,
    Perfect,
    Empty,
    Full,
    Adversarial,
    Random { keep: f64 },
    Replay(PathBuf),
    External(Endpoint),
}

impl OracleSpec {
    /// Builds the oracle; `seed` drives randomized ones. `None` yields no oracle.
    pub fn build(&self, seed: u64) -> Result<Option<Box<dyn Oracle + Send>>> {
        Ok(Some(match self {
            OracleSpec::None => return Ok(None),
            OracleSpec::Perfect => Box::new(PerfectOracle),
            OracleSpec::Empty => Box::new(EmptyOracle),
            OracleSpec::Full => Box::new(TrivialFullOracle),
            OracleSpec::Adversarial => Box::new(AdversarialOracle),
            OracleSpec::Random { keep } => Box::new(RandomSubsetOracle::new(seed, *keep)),
            OracleSpec::Replay(path) => Box::new(crate::datagen::replay_oracle(&crate::datagen::read_dataset(path)?)),
            OracleSpec::External(ep) => Box::new(ExternalOracle::connect(ep, DEFAULT_TIMEOUT)?),
        }))
    }

    pub fn build_with_timeout(&self, seed: u64, timeout: Duration) -> Result<Option<Box<dyn Oracle + Send>>> {
        match self {
            OracleSpec::External(ep) => Ok(Some(Box::new(ExternalOracle::connect(ep, timeout)?))),
            other => other.build(seed),
        }
    }
}

impl FromStr for OracleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<OracleSpec> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let spec = match (head, rest) {
            ("none", None) => OracleSpec::None,
            ("perfect", None) => OracleSpec::Perfect,
            ("empty", None) => OracleSpec::Empty,
            ("full", None) => OracleSpec::Full,
            ("adversarial", None) => OracleSpec::Adversarial,
            ("random", None) => OracleSpec::Random { keep: 0.5 },
            ("random", Some(k)) => {
                let keep: f64 = k.parse().map_err(|_| Error::Parse(format!("bad keep probability {k:?}")))?;
                if !(0.0..=1.0).contains(&keep) {
                    return Err(Error::InvalidConfig(format!("keep probability {keep} not in [0, 1]")));
                }
                OracleSpec::Random { keep }
            }
            ("replay", Some(path)) if !path.is_empty() => OracleSpec::Replay(PathBuf::from(path)),
            ("external", Some(ep)) => OracleSpec::External(ep.parse()?),
            _ => return Err(Error::Parse(format!("unknown oracle {s:?}"))),
        };
        Ok(spec)
    }
}

impl std::fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleSpec::None => f.write_str("none"),
            OracleSpec::Perfect => f.write_str("perfect"),
            OracleSpec::Empty => f.write_str("empty"),
            OracleSpec::Full => f.write_str("full"),
            OracleSpec::Adversarial => f.write_str("adversarial"),
            OracleSpec::Random { keep } => write!(f, "random:{keep}"),
            OracleSpec::Replay(p) => write!(f, "replay:{}", p.display()),
            OracleSpec::External(ep) => write!(f, "external:{ep}"),
        }
    }
}

impl Serialize for OracleSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OracleSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
