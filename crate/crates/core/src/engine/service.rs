//! The live service: network listeners around a single engine loop.
//!
//! * OSC over UDP, one message per datagram.
//! * Optionally a SLIP-framed OSC byte stream read from a file or serial
//!   device.
//! * The UI socket (TCP). Each connection speaks line-delimited JSON
//!   ([`protocol`](super::protocol)); a connection that opens with an HTTP
//!   `GET` is upgraded to WebSocket and carries one JSON message per text
//!   frame, so browsers can connect directly.
//!
//! Listener threads only decode and enqueue. One engine thread owns the
//! [`Engine`], stamps every input with milliseconds since start, and fans
//! broadcasts out to all connected clients.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, UdpSocket};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender, TryRecvError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use log::{debug, info, warn};
use thiserror::Error;
use tungstenite::Message;

use super::protocol::{ClientMessage, ServerMessage};
use super::{Engine, EngineConfig, EngineUpdate, LogError, SessionLog};
use crate::osc::{self, slip::SlipDecoder, OscMessage};

const POLL_INTERVAL: Duration = Duration::from_millis(20);

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub udp_addr: SocketAddr,
    pub ui_addr: SocketAddr,
    /// SLIP byte stream to read OSC from, e.g. a serial device.
    pub serial_path: Option<PathBuf>,
    /// Where the session log is written on stop.
    pub session_path: Option<PathBuf>,
    pub engine: EngineConfig,
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot bind {what} on {addr}: {source}")]
    Bind {
        what: &'static str,
        addr: SocketAddr,
        source: io::Error,
    },
    #[error("cannot open serial stream {path}: {source}")]
    Serial { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("writing session log: {0}")]
    Log(#[from] LogError),
    #[error("engine thread panicked")]
    EnginePanicked,
}

enum Inbound {
    Osc(OscMessage),
    Client(ClientMessage),
    Connect(u64, Sender<String>),
    Disconnect(u64),
    Stop,
}

/// Handle to a running service. Dropping it without [`Service::stop`]
/// leaves the threads running until process exit.
pub struct Service {
    tx: Sender<Inbound>,
    shutdown: Arc<AtomicBool>,
    udp_addr: SocketAddr,
    ui_addr: SocketAddr,
    session_path: Option<PathBuf>,
    engine: JoinHandle<SessionLog>,
    workers: Vec<JoinHandle<()>>,
    streams: Arc<Mutex<Vec<TcpStream>>>,
}

impl Service {
    /// Address the OSC socket is bound to.
    pub fn udp_addr(&self) -> SocketAddr {
        self.udp_addr
    }

    /// Address the UI socket is bound to.
    pub fn ui_addr(&self) -> SocketAddr {
        self.ui_addr
    }

    /// Stops all listeners, flushes the session log and returns it.
    pub fn stop(self) -> Result<SessionLog, ServiceError> {
        self.shutdown.store(true, Ordering::SeqCst);
        let _ = self.tx.send(Inbound::Stop);
        let log = self.engine.join().map_err(|_| ServiceError::EnginePanicked)?;
        for s in self.streams.lock().expect("stream registry").drain(..) {
            let _ = s.shutdown(std::net::Shutdown::Both);
        }
        for w in self.workers {
            let _ = w.join();
        }
        if let Some(path) = &self.session_path {
            log.write_to(path)?;
            info!("session log written to {}", path.display());
        }
        Ok(log)
    }
}

pub fn serve(cfg: ServeConfig) -> Result<Service, ServiceError> {
    let udp = UdpSocket::bind(cfg.udp_addr).map_err(|source| ServiceError::Bind {
        what: "OSC/UDP",
        addr: cfg.udp_addr,
        source,
    })?;
    let listener = TcpListener::bind(cfg.ui_addr).map_err(|source| ServiceError::Bind {
        what: "UI socket",
        addr: cfg.ui_addr,
        source,
    })?;
    let serial = match &cfg.serial_path {
        Some(path) => Some(std::fs::File::open(path).map_err(|source| ServiceError::Serial {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    let udp_addr = udp.local_addr()?;
    let ui_addr = listener.local_addr()?;
    udp.set_read_timeout(Some(POLL_INTERVAL))?;
    listener.set_nonblocking(true)?;

    let (tx, rx) = mpsc::channel();
    let shutdown = Arc::new(AtomicBool::new(false));
    let streams = Arc::new(Mutex::new(Vec::new()));

    let created_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let engine = Engine::new(cfg.engine.clone(), created_ms);
    let engine = thread::Builder::new()
        .name("engine".into())
        .spawn(move || engine_loop(engine, rx))?;

    let mut workers = Vec::new();
    {
        let (tx, shutdown) = (tx.clone(), Arc::clone(&shutdown));
        workers.push(
            thread::Builder::new()
                .name("osc-udp".into())
                .spawn(move || udp_loop(udp, tx, shutdown))?,
        );
    }
    if let Some(file) = serial {
        let (tx, shutdown) = (tx.clone(), Arc::clone(&shutdown));
        workers.push(
            thread::Builder::new()
                .name("osc-slip".into())
                .spawn(move || slip_loop(file, tx, shutdown))?,
        );
    }
    {
        let (tx, shutdown, streams) = (tx.clone(), Arc::clone(&shutdown), Arc::clone(&streams));
        workers.push(
            thread::Builder::new()
                .name("ui-accept".into())
                .spawn(move || accept_loop(listener, tx, shutdown, streams))?,
        );
    }
    info!("listening: OSC/UDP {udp_addr}, UI {ui_addr}");

    Ok(Service {
        tx,
        shutdown,
        udp_addr,
        ui_addr,
        session_path: cfg.session_path,
        engine,
        workers,
        streams,
    })
}

fn engine_loop(mut engine: Engine, rx: Receiver<Inbound>) -> SessionLog {
    let start = Instant::now();
    let mut clients: BTreeMap<u64, Sender<String>> = BTreeMap::new();
    while let Ok(inbound) = rx.recv() {
        let t = start.elapsed().as_millis() as u64;
        let updates = match inbound {
            Inbound::Stop => break,
            Inbound::Osc(msg) => engine.ingest(&msg, t),
            Inbound::Client(ClientMessage::Press { pad }) => engine.press(pad, t),
            Inbound::Client(ClientMessage::Release { pad }) => engine.release(pad, t),
            Inbound::Client(ClientMessage::Mode { mode }) => engine.set_mode(mode, t),
            Inbound::Connect(id, out) => {
                let _ = out.send(ServerMessage::from(engine.status()).to_line());
                clients.insert(id, out);
                continue;
            }
            Inbound::Disconnect(id) => {
                clients.remove(&id);
                continue;
            }
        };
        for update in updates {
            let msg = match update {
                EngineUpdate::Sound(cmd) => ServerMessage::from(&cmd),
                EngineUpdate::State(status) => ServerMessage::from(status),
                EngineUpdate::Error(e) => {
                    warn!("{e}");
                    continue;
                }
                _ => continue,
            };
            let line = msg.to_line();
            clients.retain(|_, out| out.send(line.clone()).is_ok());
        }
    }
    engine.into_log()
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}

fn udp_loop(socket: UdpSocket, tx: Sender<Inbound>, shutdown: Arc<AtomicBool>) {
    let mut buf = vec![0u8; 65_536];
    while !shutdown.load(Ordering::SeqCst) {
        match socket.recv_from(&mut buf) {
            Ok((n, from)) => match osc::decode_message(&buf[..n]) {
                Ok(msg) => {
                    if tx.send(Inbound::Osc(msg)).is_err() {
                        break;
                    }
                }
                Err(e) => warn!("dropping datagram from {from}: {e}"),
            },
            Err(e) if is_timeout(&e) => {}
            Err(e) => {
                warn!("OSC/UDP receive failed: {e}");
                break;
            }
        }
    }
}

fn slip_loop(mut source: impl Read, tx: Sender<Inbound>, shutdown: Arc<AtomicBool>) {
    let mut decoder = SlipDecoder::new();
    let mut buf = [0u8; 4096];
    while !shutdown.load(Ordering::SeqCst) {
        let n = match source.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if is_timeout(&e) => continue,
            Err(e) => {
                warn!("SLIP stream read failed: {e}");
                break;
            }
        };
        for frame in decoder.push(&buf[..n]) {
            match frame
                .map_err(|e| e.to_string())
                .and_then(|f| osc::decode_message(&f).map_err(|e| e.to_string()))
            {
                Ok(msg) => {
                    if tx.send(Inbound::Osc(msg)).is_err() {
                        return;
                    }
                }
                Err(e) => warn!("dropping SLIP frame: {e}"),
            }
        }
    }
    debug!("SLIP stream closed");
}

fn accept_loop(
    listener: TcpListener,
    tx: Sender<Inbound>,
    shutdown: Arc<AtomicBool>,
    streams: Arc<Mutex<Vec<TcpStream>>>,
) {
    let next_id = AtomicU64::new(0);
    while !shutdown.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                debug!("UI client {peer} connected");
                if let Ok(clone) = stream.try_clone() {
                    streams.lock().expect("stream registry").push(clone);
                }
                let id = next_id.fetch_add(1, Ordering::SeqCst);
                let (tx, shutdown) = (tx.clone(), Arc::clone(&shutdown));
                let spawned = thread::Builder::new()
                    .name(format!("ui-{id}"))
                    .spawn(move || client_session(id, stream, tx, shutdown));
                if let Err(e) = spawned {
                    warn!("cannot spawn client thread: {e}");
                }
            }
            Err(e) if is_timeout(&e) => thread::sleep(POLL_INTERVAL),
            Err(e) => warn!("accept failed: {e}"),
        }
    }
}

fn client_session(id: u64, stream: TcpStream, tx: Sender<Inbound>, shutdown: Arc<AtomicBool>) {
    if stream.set_nonblocking(false).is_err() || stream.set_read_timeout(Some(Duration::from_millis(200))).is_err() {
        return;
    }
    // Browsers open with an HTTP upgrade request; plain clients may send
    // nothing at all before waiting for broadcasts.
    let mut probe = [0u8; 3];
    let websocket = matches!(stream.peek(&mut probe), Ok(3) if &probe == b"GET");

    let (out_tx, out_rx) = mpsc::channel();
    if tx.send(Inbound::Connect(id, out_tx)).is_err() {
        return;
    }
    let result = if websocket {
        websocket_session(stream, &tx, out_rx, &shutdown)
    } else {
        line_session(stream, &tx, out_rx, &shutdown)
    };
    if let Err(e) = result {
        debug!("UI client {id} ended: {e}");
    }
    let _ = tx.send(Inbound::Disconnect(id));
}

fn forward(tx: &Sender<Inbound>, text: &str) {
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match ClientMessage::parse(line) {
            Ok(msg) => {
                let _ = tx.send(Inbound::Client(msg));
            }
            Err(e) => warn!("ignoring UI message {line:?}: {e}"),
        }
    }
}

fn line_session(
    stream: TcpStream,
    tx: &Sender<Inbound>,
    out_rx: Receiver<String>,
    shutdown: &AtomicBool,
) -> io::Result<()> {
    let mut writer = stream.try_clone()?;
    let writer = thread::spawn(move || {
        for line in out_rx {
            if writer
                .write_all(line.as_bytes())
                .and_then(|_| writer.write_all(b"\n"))
                .is_err()
            {
                break;
            }
        }
    });

    let mut reader = BufReader::new(stream);
    let mut buf = Vec::new();
    while !shutdown.load(Ordering::SeqCst) {
        // read_until keeps partial input in `buf` across timeouts
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => break,
            Ok(_) if buf.ends_with(b"\n") => {
                forward(tx, &String::from_utf8_lossy(&buf));
                buf.clear();
            }
            Ok(_) => break,
            Err(e) if is_timeout(&e) => {}
            Err(e) => return Err(e),
        }
    }
    drop(writer);
    Ok(())
}

fn websocket_session(
    stream: TcpStream,
    tx: &Sender<Inbound>,
    out_rx: Receiver<String>,
    shutdown: &AtomicBool,
) -> io::Result<()> {
    let mut ws = tungstenite::accept(stream).map_err(|e| io::Error::other(e.to_string()))?;
    ws.get_mut().set_read_timeout(Some(POLL_INTERVAL))?;
    let to_io = |e: tungstenite::Error| match e {
        tungstenite::Error::Io(e) => e,
        other => io::Error::other(other.to_string()),
    };
    'session: while !shutdown.load(Ordering::SeqCst) {
        match ws.read() {
            Ok(Message::Text(text)) => forward(tx, text.as_str()),
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e)) if is_timeout(&e) => {}
            Err(tungstenite::Error::ConnectionClosed) => break,
            Err(e) => return Err(to_io(e)),
        }
        loop {
            match out_rx.try_recv() {
                Ok(line) => ws.send(Message::text(line)).map_err(to_io)?,
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => break 'session,
            }
        }
    }
    let _ = ws.close(None);
    let _ = ws.flush();
    Ok(())
}
