use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use borderforge::bba::{compute_border_basis, BbaConfig, ExpansionPair, TraceEvent};
use borderforge::datagen::record_perfect_run;
use borderforge::obba::{
    run_obba, Endpoint, ExternalOracle, ObbaConfig, OracleRequest, OracleResponse, OracleSpec, PerfectOracle,
};
use borderforge::{Error, Polynomial, Ring, TermOrder};

fn system3() -> (Ring, Vec<Polynomial>) {
    let r = Ring::new(31, 3, TermOrder::DegRevLex).unwrap();
    let f = ["x1^2 + 3*x2 - x3", "x2^2 - x1*x3 + 5", "x3^2 + x1 - 2*x2", "x1*x2 - x3 + 7"]
        .iter()
        .map(|s| r.parse(s).unwrap())
        .collect();
    (r, f)
}

fn hindsight() -> ObbaConfig {
    ObbaConfig { budget: u32::MAX, gap_threshold: 0.0, ..Default::default() }
}

/// Serves one connection; `answer` maps a request to the raw reply lines.
fn serve<F>(answer: F) -> String
where
    F: Fn(&OracleRequest) -> Vec<String> + Send + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut out = stream.try_clone().unwrap();
        for line in BufReader::new(stream).lines() {
            let Ok(line) = line else { break };
            let req: OracleRequest = serde_json::from_str(&line).unwrap();
            for reply in answer(&req) {
                if writeln!(out, "{reply}").is_err() {
                    return;
                }
            }
        }
    });
    addr
}

fn reply(id: u64, pairs: &[ExpansionPair]) -> String {
    serde_json::to_string(&OracleResponse { id, pairs: pairs.to_vec(), error: None }).unwrap()
}

fn table(r: &Ring, f: &[Polynomial]) -> HashMap<String, Vec<ExpansionPair>> {
    record_perfect_run(r, f, 5).unwrap().into_iter().map(|q| (q.request.key(), q.pairs)).collect()
}

#[test]
fn tcp_server_reproduces_builtin_run() {
    let (r, f) = system3();
    let answers = table(&r, &f);
    let addr = serve(move |req| vec![reply(req.id, answers.get(&req.key()).map_or(&[][..], |v| v))]);
    let mut oracle = ExternalOracle::connect(&format!("tcp:{addr}").parse().unwrap(), Duration::from_secs(5)).unwrap();
    let (bb, trace) = run_obba(&r, &f, &mut oracle, &hindsight()).unwrap();
    let (bb_ref, trace_ref) = run_obba(&r, &f, &mut PerfectOracle, &hindsight()).unwrap();
    assert_eq!(bb, bb_ref);
    assert_eq!(trace, trace_ref);
    assert_eq!(oracle.response_log.len(), trace.oracle_calls);
    let first: OracleResponse = serde_json::from_str(&oracle.response_log[0]).unwrap();
    assert_eq!(first.id, 0);
}

#[test]
fn request_wire_format() {
    let (r, f) = system3();
    let log = record_perfect_run(&r, &f, 2).unwrap();
    let v = serde_json::to_value(&log[0].request).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 6);
    for k in ["id", "p", "n", "l", "universe_corners", "generators"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(v["p"], 31);
    assert_eq!(v["l"], 2);
    assert!(v["generators"].as_array().unwrap().iter().all(|g| g.as_array().unwrap().len() <= 2));
    let back: OracleRequest = serde_json::from_value(v).unwrap();
    assert_eq!(back, log[0].request);
}

#[test]
fn stale_responses_are_skipped() {
    let (r, f) = system3();
    let answers = table(&r, &f);
    // every answer is preceded by a late reply to an earlier id
    let addr = serve(move |req| {
        let mut out = Vec::new();
        if req.id > 0 {
            out.push(reply(req.id - 1, &[]));
        }
        out.push(reply(req.id, answers.get(&req.key()).map_or(&[][..], |v| v)));
        out
    });
    let mut oracle = ExternalOracle::connect(&Endpoint::Tcp(addr), Duration::from_secs(5)).unwrap();
    let (bb, trace) = run_obba(&r, &f, &mut oracle, &hindsight()).unwrap();
    let (bb_ref, trace_ref) = run_obba(&r, &f, &mut PerfectOracle, &hindsight()).unwrap();
    assert_eq!(bb, bb_ref);
    assert_eq!(trace, trace_ref);
    assert_eq!(oracle.response_log.len(), 2 * trace.oracle_calls - 1);
}

fn one_call(addr: String, timeout: Duration) -> Error {
    let (r, f) = system3();
    let req = record_perfect_run(&r, &f, 5).unwrap().remove(0).request;
    let mut oracle = ExternalOracle::connect(&Endpoint::Tcp(addr), timeout).unwrap();
    oracle.call(req).unwrap_err()
}

#[test]
fn silent_server_times_out() {
    let addr = serve(|_| Vec::new());
    let err = one_call(addr, Duration::from_millis(100));
    assert!(matches!(&err, Error::OracleUnavailable(m) if m.contains("timed out")), "{err}");
}

#[test]
fn malformed_reply_is_rejected() {
    let addr = serve(|_| vec!["{\"id\": 0, \"pairs\": [[1".to_string()]);
    let err = one_call(addr, Duration::from_secs(5));
    assert!(matches!(&err, Error::OracleUnavailable(m) if m.contains("malformed")), "{err}");

    let addr = serve(|req| vec![format!("{{\"id\": {}, \"pairs\": [[0, [1, 0, 0]]]}}", req.id)]);
    let err = one_call(addr, Duration::from_secs(5));
    assert!(matches!(err, Error::OracleUnavailable(_)));

    let addr = serve(|req| vec![format!("{{\"id\": {}, \"pairs\": [[1, [1, 0]]]}}", req.id)]);
    let err = one_call(addr, Duration::from_secs(5));
    assert!(matches!(&err, Error::OracleUnavailable(m) if m.contains("variables")), "{err}");
}

#[test]
fn wrong_id_is_rejected() {
    let addr = serve(|req| vec![reply(req.id + 3, &[])]);
    let err = one_call(addr, Duration::from_secs(5));
    assert!(matches!(&err, Error::OracleUnavailable(m) if m.contains("expected id 0")), "{err}");
}

#[test]
fn error_field_is_tolerated() {
    let addr = serve(|req| vec![format!("{{\"id\": {}, \"pairs\": [], \"error\": \"busy\"}}", req.id)]);
    let (r, f) = system3();
    let req = record_perfect_run(&r, &f, 5).unwrap().remove(0).request;
    let mut oracle = ExternalOracle::connect(&Endpoint::Tcp(addr), Duration::from_secs(5)).unwrap();
    let resp = oracle.call(req).unwrap();
    assert_eq!(resp.error.as_deref(), Some("busy"));
    assert!(resp.pairs.is_empty());
}

#[test]
fn unreachable_oracle_still_gives_the_basis() {
    let (r, f) = system3();
    let (bb_ref, _) = compute_border_basis(&r, &f, &BbaConfig::default()).unwrap();

    let addr = serve(|_| Vec::new());
    let mut oracle = ExternalOracle::connect(&Endpoint::Tcp(addr), Duration::from_millis(20)).unwrap();
    let cfg = ObbaConfig { budget: 2, gap_threshold: 0.0, ..Default::default() };
    let (bb, trace) = run_obba(&r, &f, &mut oracle, &cfg).unwrap();
    assert_eq!(bb, bb_ref);
    assert!(trace.events.iter().any(|e| matches!(e, TraceEvent::OracleUnavailable { .. })));
    assert_eq!(trace.oracle_expansions(), 0);

    let closed = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().to_string();
    assert!(matches!(ExternalOracle::connect(&Endpoint::Tcp(closed), Duration::from_secs(1)), Err(Error::OracleUnavailable(_))));
}

#[cfg(unix)]
#[test]
fn command_endpoint_echo_is_malformed() {
    let (r, f) = system3();
    let req = record_perfect_run(&r, &f, 5).unwrap().remove(0).request;
    let mut oracle = ExternalOracle::connect(&"cmd:cat".parse().unwrap(), Duration::from_secs(5)).unwrap();
    let err = oracle.call(req).unwrap_err();
    assert!(matches!(&err, Error::OracleUnavailable(m) if m.contains("malformed")), "{err}");
    assert_eq!(oracle.response_log.len(), 1);

    let missing = ExternalOracle::connect(&"cmd:/nonexistent/oracle".parse().unwrap(), Duration::from_secs(1));
    assert!(matches!(missing, Err(Error::OracleUnavailable(_))));
}

#[cfg(unix)]
#[test]
fn unix_socket_endpoint() {
    use std::os::unix::net::UnixListener;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.sock");
    let listener = UnixListener::bind(&path).unwrap();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut out = stream.try_clone().unwrap();
        for line in BufReader::new(stream).lines() {
            let req: OracleRequest = serde_json::from_str(&line.unwrap()).unwrap();
            writeln!(out, "{}", reply(req.id, &[])).unwrap();
        }
    });
    let (r, f) = system3();
    let req = record_perfect_run(&r, &f, 5).unwrap().remove(0).request;
    let ep: Endpoint = format!("unix:{}", path.display()).parse().unwrap();
    let mut oracle = ExternalOracle::connect(&ep, Duration::from_secs(5)).unwrap();
    assert_eq!(oracle.call(req.clone()).unwrap().id, 0);
    assert_eq!(oracle.call(req).unwrap().id, 1);
}

#[test]
fn endpoint_parsing() {
    assert_eq!("tcp:localhost:9000".parse::<Endpoint>().unwrap(), Endpoint::Tcp("localhost:9000".into()));
    assert_eq!("127.0.0.1:9000".parse::<Endpoint>().unwrap(), Endpoint::Tcp("127.0.0.1:9000".into()));
    assert_eq!("unix:/tmp/o.sock".parse::<Endpoint>().unwrap(), Endpoint::Unix("/tmp/o.sock".into()));
    assert_eq!(
        "cmd:python3 serve.py --fast".parse::<Endpoint>().unwrap(),
        Endpoint::Command(vec!["python3".into(), "serve.py".into(), "--fast".into()])
    );
    for bad in ["cmd:", "localhost", "host:port", ":80"] {
        assert!(bad.parse::<Endpoint>().is_err(), "{bad}");
    }
    for s in ["tcp:h:1", "unix:/x", "cmd:a b"] {
        assert_eq!(s.parse::<Endpoint>().unwrap().to_string(), s);
    }
}

#[test]
fn oracle_spec_parsing() {
    assert_eq!("perfect".parse::<OracleSpec>().unwrap(), OracleSpec::Perfect);
    assert_eq!("random".parse::<OracleSpec>().unwrap(), OracleSpec::Random { keep: 0.5 });
    assert_eq!("random:0.25".parse::<OracleSpec>().unwrap(), OracleSpec::Random { keep: 0.25 });
    assert_eq!("replay:data.jsonl".parse::<OracleSpec>().unwrap(), OracleSpec::Replay("data.jsonl".into()));
    assert_eq!(
        "external:tcp:h:7".parse::<OracleSpec>().unwrap(),
        OracleSpec::External(Endpoint::Tcp("h:7".into()))
    );
    for bad in ["random:2", "random:x", "replay:", "perfect:1", "magic", "external:nowhere"] {
        assert!(bad.parse::<OracleSpec>().is_err(), "{bad}");
    }
    for s in ["none", "empty", "full", "adversarial", "random:0.3", "replay:a.jsonl", "external:unix:/s"] {
        let spec: OracleSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<OracleSpec>(&json).unwrap(), spec);
    }
    assert!(OracleSpec::None.build(0).unwrap().is_none());
    assert_eq!(OracleSpec::Adversarial.build(0).unwrap().unwrap().name(), "adversarial");
}

#[test]
fn replay_spec_loads_a_dataset() {
    let (r, f) = system3();
    let samples = borderforge::datagen::samples_from_log(&record_perfect_run(&r, &f, 5).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    borderforge::datagen::write_dataset(&path, &samples).unwrap();
    let spec: OracleSpec = format!("replay:{}", path.display()).parse().unwrap();
    let mut oracle = spec.build(0).unwrap().unwrap();
    let (bb, trace) = run_obba(&r, &f, &mut oracle, &hindsight()).unwrap();
    let (bb_ref, trace_ref) = run_obba(&r, &f, &mut PerfectOracle, &hindsight()).unwrap();
    assert_eq!(bb, bb_ref);
    assert_eq!(trace, trace_ref);

    let missing: OracleSpec = "replay:/nonexistent.jsonl".parse().unwrap();
    assert!(missing.build(0).is_err());
}
