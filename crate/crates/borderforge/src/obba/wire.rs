//! Line-delimited JSON protocol spoken with external oracles.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::oracle::{Oracle, OracleQuery};
use crate::algebra::Term;
use crate::bba::ExpansionPair;
use crate::error::{Error, Result};

/// A generator as (coefficient, exponents) pairs, leading term first.
pub type WirePoly = Vec<(u32, Term)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub id: u64,
    pub p: u32,
    pub n: u32,
    pub l: u32,
    pub universe_corners: Vec<Term>,
    pub generators: Vec<WirePoly>,
}

#[derive(Serialize)]
struct KeyView<'a> {
    universe_corners: &'a [Term],
    generators: &'a [WirePoly],
}

impl OracleRequest {
    /// Canonical lookup key: the JSON of the corners and generators.
    pub fn key(&self) -> String {
        replay_key(&self.universe_corners, &self.generators)
    }
}

pub fn replay_key(universe_corners: &[Term], generators: &[WirePoly]) -> String {
    serde_json::to_string(&KeyView { universe_corners, generators }).expect("plain data serializes")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResponse {
    pub id: u64,
    pub pairs: Vec<ExpansionPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Where an external oracle lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// `tcp:HOST:PORT` or a bare `HOST:PORT`.
    Tcp(String),
    /// `unix:PATH`.
    Unix(String),
    /// `cmd:PROGRAM ARGS...`, spoken to over stdin/stdout.
    Command(Vec<String>),
}

impl std::str::FromStr for Endpoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Endpoint> {
        if let Some(rest) = s.strip_prefix("tcp:") {
            return Ok(Endpoint::Tcp(rest.to_string()));
        }
        if let Some(rest) = s.strip_prefix("unix:") {
            return Ok(Endpoint::Unix(rest.to_string()));
        }
        if let Some(rest) = s.strip_prefix("cmd:") {
            let argv: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if argv.is_empty() {
                return Err(Error::InvalidConfig("empty oracle command".into()));
            }
            return Ok(Endpoint::Command(argv));
        }
        if s.rsplit_once(':').is_some_and(|(h, p)| !h.is_empty() && p.parse::<u16>().is_ok()) {
            return Ok(Endpoint::Tcp(s.to_string()));
        }
        Err(Error::InvalidConfig(format!("unrecognized oracle address `{s}`")))
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Tcp(a) => write!(f, "tcp:{a}"),
            Endpoint::Unix(p) => write!(f, "unix:{p}"),
            Endpoint::Command(argv) => write!(f, "cmd:{}", argv.join(" ")),
        }
    }
}

/// Client for an oracle server. One request is outstanding at a time.
pub struct ExternalOracle {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    child: Option<Child>,
    next_id: u64,
    timeout: Duration,
    /// Raw response lines in arrival order.
    pub response_log: Vec<String>,
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

impl ExternalOracle {
    pub fn connect(endpoint: &Endpoint, timeout: Duration) -> Result<ExternalOracle> {
        let unavailable = |e: std::io::Error| Error::OracleUnavailable(e.to_string());
        match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr).map_err(unavailable)?;
                let reader = stream.try_clone().map_err(unavailable)?;
                Ok(Self::from_streams(reader, stream, None, timeout))
            }
            #[cfg(unix)]
            Endpoint::Unix(path) => {
                let stream = std::os::unix::net::UnixStream::connect(path).map_err(unavailable)?;
                let reader = stream.try_clone().map_err(unavailable)?;
                Ok(Self::from_streams(reader, stream, None, timeout))
            }
            #[cfg(not(unix))]
            Endpoint::Unix(_) => Err(Error::InvalidConfig("unix sockets are unsupported here".into())),
            Endpoint::Command(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .spawn()
                    .map_err(unavailable)?;
                let stdin = child.stdin.take().unwrap();
                let stdout = child.stdout.take().unwrap();
                Ok(Self::from_streams(stdout, stdin, Some(child), timeout))
            }
        }
    }

    /// Wraps an arbitrary byte stream pair.
    pub fn from_streams(
        reader: impl Read + Send + 'static,
        writer: impl Write + Send + 'static,
        child: Option<Child>,
        timeout: Duration,
    ) -> ExternalOracle {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        ExternalOracle { writer: Box::new(writer), lines: rx, child, next_id: 0, timeout, response_log: Vec::new() }
    }

    /// Sends one request and waits for the response carrying its id.
    pub fn call(&mut self, mut req: OracleRequest) -> Result<OracleResponse> {
        let unavailable = |msg: String| Error::OracleUnavailable(msg);
        req.id = self.next_id;
        self.next_id += 1;
        let mut line = serde_json::to_string(&req).expect("plain data serializes");
        line.push('\n');
        self.writer.write_all(line.as_bytes()).map_err(|e| unavailable(e.to_string()))?;
        self.writer.flush().map_err(|e| unavailable(e.to_string()))?;
        loop {
            let raw = match self.lines.recv_timeout(self.timeout) {
                Ok(Ok(raw)) => raw,
                Ok(Err(e)) => return Err(unavailable(e.to_string())),
                Err(RecvTimeoutError::Timeout) => return Err(unavailable("timed out".into())),
                Err(RecvTimeoutError::Disconnected) => return Err(unavailable("connection closed".into())),
            };
            self.response_log.push(raw.clone());
            let resp: OracleResponse =
                serde_json::from_str(&raw).map_err(|e| unavailable(format!("malformed response: {e}")))?;
            if resp.id < req.id {
                // answer to a request that already timed out
                continue;
            }
            if resp.id != req.id {
                return Err(unavailable(format!("expected id {}, got {}", req.id, resp.id)));
            }
            if resp.pairs.iter().any(|p| p.lt.nvars() != req.n as usize) {
                return Err(unavailable("pair has the wrong number of variables".into()));
            }
            return Ok(resp);
        }
    }
}

impl Oracle for ExternalOracle {
    fn predict(&mut self, query: &OracleQuery) -> Result<Vec<ExpansionPair>> {
        Ok(self.call(query.request(0))?.pairs)
    }

    fn name(&self) -> &str {
        "external"
    }
}

impl Drop for ExternalOracle {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
