// SPDX-License-Identifier: Apache-2.0
//
// POSIX socket implementation of the one-way update protocol.

#include "indel/sync.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/file.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <system_error>

#include "indel/container.hpp"
#include "indel/fileio.hpp"

namespace indel::sync {

namespace {

constexpr int kSocketTimeoutSeconds = 30;

[[noreturn]] void fail_errno(const std::string& what) {
  fail(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int k = bytes - 1; k >= 0; --k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

class BeReader {
 public:
  explicit BeReader(const std::vector<std::uint8_t>& p) : p_(p) {}
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k) v = (v << 8) | p_[pos_++];
    return v;
  }
  std::string str(std::size_t len) {
    need(len);
    std::string s(p_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  p_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return s;
  }
  std::size_t remaining() const { return p_.size() - pos_; }

 private:
  void need(std::size_t k) const {
    if (k > p_.size() - pos_) fail(ErrorCode::kMalformed, "frame payload too short");
  }
  const std::vector<std::uint8_t>& p_;
  std::size_t pos_ = 0;
};

void set_timeouts(int fd) {
  timeval tv{};
  tv.tv_sec = kSocketTimeoutSeconds;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t k = ::send(fd, data, len, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail_errno("send");
    }
    data += k;
    len -= static_cast<std::size_t>(k);
  }
}

void read_all(int fd, std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t k = ::recv(fd, data, len, 0);
    if (k < 0) {
      if (errno == EINTR) continue;
      fail_errno("recv");
    }
    if (k == 0) fail(ErrorCode::kIo, "connection closed by peer");
    data += k;
    len -= static_cast<std::size_t>(k);
  }
}

// Closes a descriptor on scope exit.
struct Fd {
  int fd = -1;
  explicit Fd(int f) : fd(f) {}
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
};

// Writes `bytes` to `target` atomically: temp file in the same directory,
// fsync, rename, fsync of the directory.
void atomic_replace(const std::filesystem::path& target, const std::vector<std::uint8_t>& bytes) {
  const std::filesystem::path dir = target.parent_path();
  std::string tmpl = (dir / ("." + target.filename().string() + ".XXXXXX")).string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  const int fd = ::mkstemp(buf.data());
  if (fd < 0) fail_errno("mkstemp");
  const std::string tmp(buf.data());
  try {
    Fd guard(fd);
    const std::uint8_t* data = bytes.data();
    std::size_t len = bytes.size();
    while (len > 0) {
      const ssize_t k = ::write(fd, data, len);
      if (k < 0) {
        if (errno == EINTR) continue;
        fail_errno("write");
      }
      data += k;
      len -= static_cast<std::size_t>(k);
    }
    if (::fsync(fd) != 0) fail_errno("fsync");
  } catch (...) {
    ::unlink(tmp.c_str());
    throw;
  }
  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    const int saved = errno;
    ::unlink(tmp.c_str());
    errno = saved;
    fail_errno("rename");
  }
  Fd dfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
  if (dfd.fd >= 0) ::fsync(dfd.fd);
}

// Shared advisory lock on `.name.lock` serialising updates of one file,
// across threads and processes.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path)
      : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_.fd < 0) fail_errno("open lock file");
    while (::flock(fd_.fd, LOCK_EX) != 0) {
      if (errno != EINTR) fail_errno("flock");
    }
  }
  ~FileLock() { ::flock(fd_.fd, LOCK_UN); }

 private:
  Fd fd_;
};

void send_error(int fd, SyncError code, const std::string& message) {
  write_frame(fd, {FrameKind::kError, encode_error({code, message})});
}

}  // namespace

const char* sync_error_name(SyncError e) {
  switch (e) {
    case SyncError::kVersion: return "VERSION";
    case SyncError::kDigest: return "DIGEST";
    case SyncError::kDecode: return "DECODE";
    case SyncError::kProtocol: return "PROTOCOL";
    case SyncError::kIo: return "IO";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxFrameLength) fail(ErrorCode::kMalformed, "frame payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(5 + f.payload.size());
  put_be(out, f.payload.size(), 4);
  out.push_back(static_cast<std::uint8_t>(f.kind));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

std::vector<std::uint8_t> encode_hello(const Hello& h) {
  if (h.name.size() > 0xFFFF) fail(ErrorCode::kMalformed, "file name too long");
  std::vector<std::uint8_t> out;
  out.push_back(h.version);
  put_be(out, h.name.size(), 2);
  out.insert(out.end(), h.name.begin(), h.name.end());
  put_be(out, h.n, 8);
  put_be(out, h.x_digest, 8);
  return out;
}

Hello decode_hello(const std::vector<std::uint8_t>& p) {
  BeReader r(p);
  Hello h;
  h.version = static_cast<std::uint8_t>(r.get(1));
  h.name = r.str(static_cast<std::size_t>(r.get(2)));
  h.n = r.get(8);
  h.x_digest = r.get(8);
  if (r.remaining() != 0) fail(ErrorCode::kMalformed, "trailing bytes in Hello");
  return h;
}

std::vector<std::uint8_t> encode_ack(const Ack& a) {
  std::vector<std::uint8_t> out;
  put_be(out, a.m, 8);
  put_be(out, a.digest, 8);
  return out;
}

Ack decode_ack(const std::vector<std::uint8_t>& p) {
  BeReader r(p);
  Ack a;
  a.m = r.get(8);
  a.digest = r.get(8);
  if (r.remaining() != 0) fail(ErrorCode::kMalformed, "trailing bytes in Ack");
  return a;
}

std::vector<std::uint8_t> encode_error(const ErrorReply& e) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(e.code)};
  out.insert(out.end(), e.message.begin(), e.message.end());
  return out;
}

ErrorReply decode_error(const std::vector<std::uint8_t>& p) {
  if (p.empty()) fail(ErrorCode::kMalformed, "empty Error frame");
  const std::uint8_t c = p[0];
  if (c < 1 || c > 5) fail(ErrorCode::kMalformed, "unknown error code " + std::to_string(c));
  return {static_cast<SyncError>(c), std::string(p.begin() + 1, p.end())};
}

void write_frame(int fd, const Frame& f) {
  const std::vector<std::uint8_t> bytes = encode_frame(f);
  write_all(fd, bytes.data(), bytes.size());
}

Frame read_frame(int fd) {
  std::uint8_t head[5];
  read_all(fd, head, sizeof head);
  const std::uint32_t len = (std::uint32_t(head[0]) << 24) | (std::uint32_t(head[1]) << 16) |
                            (std::uint32_t(head[2]) << 8) | std::uint32_t(head[3]);
  if (len > kMaxFrameLength) fail(ErrorCode::kMalformed, "frame length " + std::to_string(len) + " too large");
  if (head[4] < 1 || head[4] > 4) fail(ErrorCode::kMalformed, "unknown frame kind " + std::to_string(head[4]));
  Frame f;
  f.kind = static_cast<FrameKind>(head[4]);
  f.payload.resize(len);
  read_all(fd, f.payload.data(), len);
  return f;
}

bool valid_store_name(const std::string& name) {
  return !name.empty() && name.size() <= 255 && name[0] != '.' && name.find('/') == std::string::npos &&
         name.find('\0') == std::string::npos;
}

std::filesystem::path default_store_dir() {
  const char* env = std::getenv("INDEL_SYNC_STORE");
  return env && *env ? std::filesystem::path(env) : std::filesystem::current_path();
}

// ---------------------------------------------------------------------------
// Server

SyncServer::SyncServer(std::filesystem::path store, std::string host, std::uint16_t port)
    : store_(std::move(store)), host_(std::move(host)), port_(port) {}

SyncServer::~SyncServer() { stop(); }

void SyncServer::start() {
  std::error_code ec;
  std::filesystem::create_directories(store_, ec);
  if (!std::filesystem::is_directory(store_)) fail(ErrorCode::kIo, "store " + store_.string() + " is not a directory");

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) fail_errno("socket");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    fail(ErrorCode::kIo, "listen address must be a dotted IPv4 address: " + host_);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
    const int saved = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    errno = saved;
    fail_errno("bind/listen on " + host_ + ":" + std::to_string(port_));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void SyncServer::stop() {
  // shutdown() wakes the blocked accept(); the descriptor is closed only after
  // the acceptor has exited so it cannot be reused underneath it.
  if (running_.exchange(false)) ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  std::vector<Worker> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) w.thread.join();
}

void SyncServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void SyncServer::accept_loop() {
  while (running_) {
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      if (!running_) break;
      if (errno == EMFILE || errno == ENFILE || errno == ECONNABORTED) continue;
      break;
    }
    set_timeouts(fd);
    std::lock_guard<std::mutex> lock(workers_mu_);
    // Reap finished connections so a long-running server does not accumulate threads.
    for (auto it = workers_.begin(); it != workers_.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = workers_.erase(it);
      } else {
        ++it;
      }
    }
    auto done = std::make_shared<std::atomic<bool>>(false);
    workers_.push_back({std::thread([this, fd, done] {
                          serve(fd);
                          done->store(true);
                        }),
                        done});
  }
}

void SyncServer::serve(int raw_fd) {
  Fd conn(raw_fd);
  const int fd = conn.fd;
  try {
    const Frame first = read_frame(fd);
    if (first.kind != FrameKind::kHello) return send_error(fd, SyncError::kProtocol, "expected Hello");
    Hello hello;
    try {
      hello = decode_hello(first.payload);
    } catch (const Error& e) {
      return send_error(fd, SyncError::kProtocol, e.what());
    }
    if (hello.version != kProtocolVersion) {
      return send_error(fd, SyncError::kVersion,
                        "protocol version " + std::to_string(hello.version) + " not supported");
    }
    if (!valid_store_name(hello.name)) return send_error(fd, SyncError::kProtocol, "invalid file name");

    const std::filesystem::path target = store_ / hello.name;
    FileLock lock(store_ / ("." + hello.name + ".lock"));
    std::vector<std::uint8_t> current;
    if (std::filesystem::exists(target)) current = read_file(target);
    const std::uint64_t digest = fnv1a64(current);
    if (current.size() != hello.n || digest != hello.x_digest) {
      return send_error(fd, SyncError::kDigest, "stored copy of " + hello.name + " differs from the client's old file");
    }
    write_frame(fd, {FrameKind::kAck, encode_ack({current.size(), digest})});

    const Frame delta = read_frame(fd);
    if (delta.kind != FrameKind::kDelta) return send_error(fd, SyncError::kProtocol, "expected Delta");
    std::vector<std::uint8_t> updated;
    try {
      const Transmission t = parse(delta.payload);
      const Sequence x = bytes_to_sequence(current, t.header.alphabet);
      updated = sequence_to_bytes(decode_update(x, t));
    } catch (const Error& e) {
      return send_error(fd, SyncError::kDecode, e.what());
    }
    try {
      atomic_replace(target, updated);
    } catch (const Error& e) {
      return send_error(fd, SyncError::kIo, e.what());
    }
    write_frame(fd, {FrameKind::kAck, encode_ack({updated.size(), fnv1a64(updated)})});
  } catch (const Error&) {
    // Transport failure: the peer is gone or timed out; nothing was written.
  }
}

// ---------------------------------------------------------------------------
// Client

PushResult push(const std::string& host, std::uint16_t port, const std::string& name,
                const std::vector<std::uint8_t>& old_bytes, const std::vector<std::uint8_t>& new_bytes,
                std::uint32_t alphabet) {
  if (!valid_store_name(name)) fail(ErrorCode::kDomainError, "invalid file name: " + name);
  const Sequence x = bytes_to_sequence(old_bytes, alphabet);
  const Sequence y = bytes_to_sequence(new_bytes, alphabet);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    fail(ErrorCode::kIo, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int raw = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    raw = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (raw < 0) continue;
    if (::connect(raw, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(raw);
    raw = -1;
  }
  ::freeaddrinfo(res);
  if (raw < 0) fail_errno("connect to " + host + ":" + service);
  Fd conn(raw);
  set_timeouts(conn.fd);

  PushResult result;
  auto refused = [&](const Frame& f) {
    const ErrorReply e = decode_error(f.payload);
    result.error = e.code;
    result.message = e.message;
    return result;
  };

  write_frame(conn.fd, {FrameKind::kHello, encode_hello({kProtocolVersion, name, old_bytes.size(), fnv1a64(old_bytes)})});
  Frame reply = read_frame(conn.fd);
  if (reply.kind == FrameKind::kError) return refused(reply);
  if (reply.kind != FrameKind::kAck) fail(ErrorCode::kIo, "unexpected reply to Hello");

  const std::vector<std::uint8_t> delta = serialize(encode_update(x, y));
  result.delta_bytes = delta.size();
  write_frame(conn.fd, {FrameKind::kDelta, delta});
  reply = read_frame(conn.fd);
  if (reply.kind == FrameKind::kError) return refused(reply);
  if (reply.kind != FrameKind::kAck) fail(ErrorCode::kIo, "unexpected reply to Delta");
  result.ack = decode_ack(reply.payload);
  if (result.ack.m != new_bytes.size() || result.ack.digest != fnv1a64(new_bytes)) {
    fail(ErrorCode::kIo, "server acknowledged a file that differs from the new version");
  }
  result.ok = true;
  result.message = "updated " + name;
  return result;
}

}  // namespace indel::sync
