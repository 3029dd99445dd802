//! The TCP daemon: one protocol session per connection.

use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};

use super::frame::{read_message, write_message};
use super::{Message, WireErrorCode};
use crate::error::{Error, Result};
use crate::protocol::ServerEngine;

pub struct Server {
    listener: TcpListener,
    engine: Arc<ServerEngine>,
    max_frame: u64,
    shutdown: Arc<AtomicBool>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, engine: Arc<ServerEngine>, max_frame: u64) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        info!("listening on {}", listener.local_addr()?);
        Ok(Server { listener, engine, max_frame, shutdown: Arc::new(AtomicBool::new(false)) })
    }

    pub fn local_addr(&self) -> Result<std::net::SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accept loop; returns when [`ServerHandle::stop`] is called.
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            if self.shutdown.load(Ordering::SeqCst) {
                break;
            }
            match stream {
                Ok(stream) => {
                    let engine = self.engine.clone();
                    let max_frame = self.max_frame;
                    std::thread::spawn(move || handle_connection(stream, engine, max_frame));
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> Result<ServerHandle> {
        let addr = self.local_addr()?;
        let shutdown = self.shutdown.clone();
        let join = std::thread::spawn(move || {
            if let Err(e) = self.run() {
                warn!("server stopped: {e}");
            }
        });
        Ok(ServerHandle { addr, shutdown, join })
    }
}

pub struct ServerHandle {
    addr: std::net::SocketAddr,
    shutdown: Arc<AtomicBool>,
    join: std::thread::JoinHandle<()>,
}

impl ServerHandle {
    pub fn addr(&self) -> std::net::SocketAddr {
        self.addr
    }

    pub fn stop(self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // poke the accept loop awake
        let _ = TcpStream::connect(self.addr);
        let _ = self.join.join();
    }
}

/// Convenience: bind and run in the foreground.
pub fn serve(addr: impl ToSocketAddrs, engine: Arc<ServerEngine>, max_frame: u64) -> Result<()> {
    Server::bind(addr, engine, max_frame)?.run()
}

fn handle_connection(mut stream: TcpStream, engine: Arc<ServerEngine>, max_frame: u64) {
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_else(|_| "?".into());
    loop {
        let msg = match read_message(&mut stream, max_frame) {
            Ok(msg) => msg,
            Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
                // client closed the connection; session state (if any) ages
                // out via the TTL sweep
                return;
            }
            Err(e) => {
                warn!("peer={peer} bad frame: {e}");
                let reply =
                    Message::Error { code: WireErrorCode::from_error(&e), detail: e.to_string() };
                let _ = write_message(&mut stream, &reply);
                return;
            }
        };
        let started = Instant::now();
        let kind = msg.kind_str();
        let reply = engine.handle(&msg);
        info!(
            "peer={peer} step={kind} reply={} elapsed_ms={}",
            reply.kind_str(),
            started.elapsed().as_millis()
        );
        if write_message(&mut stream, &reply).is_err() {
            return;
        }
        match reply {
            // terminal replies close the session/connection
            Message::Result { .. } | Message::Terminate { .. } | Message::Error { .. } => return,
            _ => {}
        }
    }
}
