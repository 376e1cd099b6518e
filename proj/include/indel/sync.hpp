// SPDX-License-Identifier: Apache-2.0
//
// One-way file update over TCP.  A client that holds the old and the new
// version of a file pushes a single update container to a server holding the
// old version; one connection carries one update.
//
// Wire format (all integers big-endian; full layout in docs/FORMAT.md):
//   frame  := length:u32 kind:u8 payload[length]
//   Hello  := version:u8 name_len:u16 name n:u64 x_digest:u64
//   Delta  := update container bytes
//   Ack    := m:u64 digest:u64         (size and digest of the server's file)
//   Error  := code:u8 message
// The server answers Hello with Ack (its copy matches the client's old file)
// or Error, so a desynchronised store costs one round trip and no Delta.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "indel/error.hpp"

namespace indel::sync {

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameLength = 1u << 30;

enum class FrameKind : std::uint8_t { kHello = 1, kDelta = 2, kAck = 3, kError = 4 };

enum class SyncError : std::uint8_t { kVersion = 1, kDigest = 2, kDecode = 3, kProtocol = 4, kIo = 5 };

const char* sync_error_name(SyncError e);

struct Frame {
  FrameKind kind = FrameKind::kHello;
  std::vector<std::uint8_t> payload;
};

struct Hello {
  std::uint8_t version = kProtocolVersion;
  std::string name;
  std::uint64_t n = 0;
  std::uint64_t x_digest = 0;
};

struct Ack {
  std::uint64_t m = 0;
  std::uint64_t digest = 0;
};

struct ErrorReply {
  SyncError code = SyncError::kProtocol;
  std::string message;
};

// Encoders/decoders for frame payloads; decoding throws Error(kMalformed).
std::vector<std::uint8_t> encode_frame(const Frame& f);
std::vector<std::uint8_t> encode_hello(const Hello& h);
Hello decode_hello(const std::vector<std::uint8_t>& p);
std::vector<std::uint8_t> encode_ack(const Ack& a);
Ack decode_ack(const std::vector<std::uint8_t>& p);
std::vector<std::uint8_t> encode_error(const ErrorReply& e);
ErrorReply decode_error(const std::vector<std::uint8_t>& p);

// Blocking frame I/O on a connected socket; throws Error(kIo) on failure or
// timeout and Error(kMalformed) on an oversized frame.
void write_frame(int fd, const Frame& f);
Frame read_frame(int fd);

// Store names are plain file names: non-empty, no '/', no leading '.'.
bool valid_store_name(const std::string& name);

// Default store directory: $INDEL_SYNC_STORE, else the current directory.
std::filesystem::path default_store_dir();

class SyncServer {
 public:
  // port 0 picks a free port (see port()).
  SyncServer(std::filesystem::path store, std::string host, std::uint16_t port);
  ~SyncServer();
  SyncServer(const SyncServer&) = delete;
  SyncServer& operator=(const SyncServer&) = delete;

  void start();
  void stop();
  std::uint16_t port() const { return port_; }
  // Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();
  void serve(int fd);

  std::filesystem::path store_;
  std::string host_;
  std::uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::mutex workers_mu_;
  std::vector<Worker> workers_;
};

struct PushResult {
  bool ok = false;
  std::optional<SyncError> error;  // set when the server replied with Error
  std::string message;
  Ack ack;                          // final Ack on success
  std::uint64_t delta_bytes = 0;
};

// Pushes old -> new under `name`.  Transport failures throw Error(kIo);
// protocol-level refusals are returned in PushResult.
PushResult push(const std::string& host, std::uint16_t port, const std::string& name,
                const std::vector<std::uint8_t>& old_bytes, const std::vector<std::uint8_t>& new_bytes,
                std::uint32_t alphabet = 256);

}  // namespace indel::sync
