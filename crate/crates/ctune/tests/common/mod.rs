//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use ctune::core::corpus::{generate_corpus, Corpus, CorpusConfig};

pub fn small_corpus(n_personas: usize) -> Corpus {
    generate_corpus(&CorpusConfig {
        n_personas,
        ..CorpusConfig::default()
    })
    .unwrap()
}

/// What the test server does with one request body.
pub enum Reply {
    Json(String),
    /// Never answers within any sane timeout.
    Stall,
}

/// Serves HTTP on a local port until the test process exits; returns the
/// endpoint URL.
pub fn serve<F>(handler: F) -> String
where
    F: Fn(&str) -> Reply + Send + Sync + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/plan", listener.local_addr().unwrap());
    let handler = Arc::new(handler);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let handler = Arc::clone(&handler);
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            len = v.trim().parse().unwrap();
                        }
                    }
                }
                let mut body = vec![0; len];
                reader.read_exact(&mut body).unwrap();
                match handler(&String::from_utf8(body).unwrap()) {
                    Reply::Json(json) => {
                        let resp = format!(
                            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{json}",
                            json.len()
                        );
                        let _ = stream.write_all(resp.as_bytes());
                    }
                    Reply::Stall => thread::sleep(Duration::from_secs(5)),
                }
            });
        }
    });
    url
}
